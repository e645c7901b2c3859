#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace cogsearch::catalog {

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dim() const = 0;
  // Unit-norm vector of length dim(); the zero vector for text with no tokens.
  virtual std::vector<float> embed(std::string_view text) const = 0;
};

// Signed feature hashing of whole tokens and boundary-padded character
// trigrams, L2-normalized.
//
// For each token t (see text::tokenize):
//   feature "w:" + t, and every trigram of "#" + t + "#" as "c:" + tri.
//   h = fnv1a64(feature); bucket = h % dim; sign = +1 if bit 63 of h is 0 else -1.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dim = 256);

  std::size_t dim() const override { return dim_; }
  std::vector<float> embed(std::string_view text) const override;

 private:
  std::size_t dim_;
};

double cosine(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace cogsearch::catalog
