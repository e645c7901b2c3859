#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "cogsearch/simd/kernels.hpp"

namespace cogsearch::simd {

namespace {

using DotFn = double (*)(const float*, const float*, std::size_t);
using DotRowsFn = void (*)(const float*, const float*, std::size_t, std::size_t, double*);

struct Table {
  Isa isa;
  DotFn dot;
  DotRowsFn dot_rows;
};

Table select() {
  const char* forced = std::getenv("COGSEARCH_SIMD");
  bool want_scalar = forced != nullptr && std::strcmp(forced, "scalar") == 0;
  if (!want_scalar && isa_available(Isa::kAvx2)) {
    return {Isa::kAvx2, &avx2::dot, &avx2::dot_rows};
  }
  return {Isa::kScalar, &scalar::dot, &scalar::dot_rows};
}

const Table& table() {
  static const Table t = select();
  return t;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  if (isa == Isa::kScalar) return true;
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return table().isa; }

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return table().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const float> a) { return table().dot(a.data(), a.data(), a.size()); }

void dot_rows(std::span<const float> rows, std::span<const float> query, std::span<double> out) {
  const std::size_t dim = query.size();
  if (rows.size() != dim * out.size()) throw std::invalid_argument("dot_rows: shape mismatch");
  if (out.empty()) return;
  table().dot_rows(rows.data(), query.data(), dim, out.size(), out.data());
}

}  // namespace cogsearch::simd
