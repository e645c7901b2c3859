#pragma once

// Dense vector kernels behind the brute-force vector index.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active variant is picked once at startup from
// CPUID; COGSEARCH_SIMD=scalar forces the reference path. Both paths
// accumulate in double so their results agree to ~1e-12.

#include <cstddef>
#include <span>
#include <string_view>

namespace cogsearch::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// The variant used by the dispatched entry points below.
Isa active_isa();

// True if this CPU/binary can run the given variant.
bool isa_available(Isa isa);

double dot(std::span<const float> a, std::span<const float> b);
double squared_norm(std::span<const float> a);

// out[i] = dot(rows[i*dim .. (i+1)*dim), query) for i in [0, out.size()).
void dot_rows(std::span<const float> rows, std::span<const float> query, std::span<double> out);

// Direct per-variant entry points, used by equivalence tests.
namespace scalar {
double dot(const float* a, const float* b, std::size_t n);
void dot_rows(const float* rows, const float* query, std::size_t dim, std::size_t n_rows,
              double* out);
}  // namespace scalar

namespace avx2 {
double dot(const float* a, const float* b, std::size_t n);
void dot_rows(const float* rows, const float* query, std::size_t dim, std::size_t n_rows,
              double* out);
}  // namespace avx2

}  // namespace cogsearch::simd
