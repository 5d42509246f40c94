#pragma once

// Truncated tensor algebra T^D(R^d).
//
// Elements are stored as one coefficient per word of length <= D in the
// canonical order: by length, then lexicographically on letters. Letters are
// zero-based, so the alphabet of R^d is {0, ..., d-1}.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sigbsde {

class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters) : letters_(letters) {}
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}

  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  std::span<const int> letters() const noexcept { return letters_; }
  int operator[](std::size_t i) const { return letters_[i]; }

  Word appended(int letter) const;
  Word concat(const Word& other) const;
  std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;
  /// Canonical order: shorter words first, then lexicographic.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::vector<int> letters_;
};

/// Formal integer combination of words, e.g. the result of a shuffle product.
using WordSum = std::map<Word, std::int64_t>;

/// Number of words of length <= depth over an alphabet of the given size.
std::size_t dimension(int alphabet_size, int depth);

/// All words of length <= depth in canonical order.
std::vector<Word> words(int alphabet_size, int depth);

class TruncatedTensor {
 public:
  /// Zero element.
  TruncatedTensor(int alphabet_size, int depth);

  static TruncatedTensor unit(int alphabet_size, int depth);
  static TruncatedTensor basis(const Word& w, int alphabet_size, int depth, double coeff = 1.0);
  static TruncatedTensor from_coeffs(int alphabet_size, int depth, std::vector<double> coeffs);

  int alphabet_size() const noexcept { return d_; }
  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }

  /// Coefficients of the words of exactly length k.
  std::span<const double> level(int k) const;
  std::span<double> level(int k);

  std::size_t index_of(const Word& w) const;
  double operator[](const Word& w) const { return coeffs_[index_of(w)]; }
  double& operator[](const Word& w) { return coeffs_[index_of(w)]; }

  TruncatedTensor& operator+=(const TruncatedTensor& other);
  TruncatedTensor& operator*=(double s);

  bool same_shape(const TruncatedTensor& other) const noexcept {
    return d_ == other.d_ && depth_ == other.depth_;
  }

 private:
  int d_;
  int depth_;
  std::vector<double> coeffs_;
};

TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b);
TruncatedTensor operator*(double s, TruncatedTensor a);

/// Offset of the first word of length k in canonical order.
std::size_t level_offset(int alphabet_size, int k);

/// Truncated concatenation product: (a (x) b)[w] = sum over w = uv of a[u] b[v].
TruncatedTensor concat_product(const TruncatedTensor& a, const TruncatedTensor& b);
inline TruncatedTensor operator*(const TruncatedTensor& a, const TruncatedTensor& b) {
  return concat_product(a, b);
}

/// Shuffle product of two words; words longer than max_length are dropped.
WordSum shuffle_product(const Word& u, const Word& v, std::size_t max_length = SIZE_MAX);

double inner_product(const TruncatedTensor& a, const TruncatedTensor& b);

/// Pairing of a formal word combination with a tensor, sum_w m_w * t[w].
double inner_product(const WordSum& words, const TruncatedTensor& t);

/// exp(v) truncated at the given depth for a level-1 element v of R^d.
TruncatedTensor exp_level1(std::span<const double> v, int depth);

}  // namespace sigbsde
