#include "cogsearch/catalog/embedding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cogsearch/simd/kernels.hpp"
#include "cogsearch/util/text.hpp"

namespace cogsearch::catalog {

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("embedding dim must be positive");
}

std::vector<float> HashingEmbedder::embed(std::string_view s) const {
  std::vector<double> acc(dim_, 0.0);
  auto add = [&](const std::string& feature) {
    std::uint64_t h = text::fnv1a64(feature);
    acc[h % dim_] += (h >> 63) ? -1.0 : 1.0;
  };
  for (const auto& tok : text::tokenize(s)) {
    add("w:" + tok);
    const std::string padded = "#" + tok + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) add("c:" + padded.substr(i, 3));
  }
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  std::vector<float> out(dim_, 0.0f);
  if (norm == 0.0) return out;
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<float>(acc[i] / norm);
  return out;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double na = simd::squared_norm(a);
  double nb = simd::squared_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return simd::dot(a, b) / std::sqrt(na * nb);
}

}  // namespace cogsearch::catalog
