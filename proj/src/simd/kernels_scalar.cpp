#include "cogsearch/simd/kernels.hpp"

namespace cogsearch::simd::scalar {

double dot(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

void dot_rows(const float* rows, const float* query, std::size_t dim, std::size_t n_rows,
              double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) out[r] = dot(rows + r * dim, query, dim);
}

}  // namespace cogsearch::simd::scalar
