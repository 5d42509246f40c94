#include "sigbsde/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "sigbsde/errors.hpp"

namespace sigbsde {

Word Word::appended(int letter) const {
  Word out = *this;
  out.letters_.push_back(letter);
  return out;
}

Word Word::concat(const Word& other) const {
  Word out = *this;
  out.letters_.insert(out.letters_.end(), other.letters_.begin(), other.letters_.end());
  return out;
}

std::string Word::to_string() const {
  if (letters_.empty()) return "()";
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) os << ',';
    os << letters_[i];
  }
  os << ')';
  return os.str();
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.length() <=> b.length(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                b.letters_.begin(), b.letters_.end());
}

std::size_t level_offset(int alphabet_size, int k) {
  std::size_t offset = 0;
  std::size_t width = 1;
  for (int i = 0; i < k; ++i) {
    offset += width;
    width *= static_cast<std::size_t>(alphabet_size);
  }
  return offset;
}

std::size_t dimension(int alphabet_size, int depth) {
  if (alphabet_size < 1 || depth < 0) {
    throw PreconditionError("dimension: need alphabet_size >= 1 and depth >= 0");
  }
  return level_offset(alphabet_size, depth + 1);
}

std::vector<Word> words(int alphabet_size, int depth) {
  std::vector<Word> out;
  out.reserve(dimension(alphabet_size, depth));
  out.emplace_back();
  std::size_t level_begin = 0;
  for (int k = 1; k <= depth; ++k) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int a = 0; a < alphabet_size; ++a) out.push_back(out[i].appended(a));
    }
    level_begin = level_end;
  }
  return out;
}

TruncatedTensor::TruncatedTensor(int alphabet_size, int depth)
    : d_(alphabet_size), depth_(depth), coeffs_(dimension(alphabet_size, depth), 0.0) {}

TruncatedTensor TruncatedTensor::unit(int alphabet_size, int depth) {
  TruncatedTensor t(alphabet_size, depth);
  t.coeffs_[0] = 1.0;
  return t;
}

TruncatedTensor TruncatedTensor::basis(const Word& w, int alphabet_size, int depth, double coeff) {
  TruncatedTensor t(alphabet_size, depth);
  t[w] = coeff;
  return t;
}

TruncatedTensor TruncatedTensor::from_coeffs(int alphabet_size, int depth,
                                             std::vector<double> coeffs) {
  TruncatedTensor t(alphabet_size, depth);
  if (coeffs.size() != t.size()) {
    throw ShapeError("TruncatedTensor: expected " + std::to_string(t.size()) +
                     " coefficients, got " + std::to_string(coeffs.size()));
  }
  t.coeffs_ = std::move(coeffs);
  return t;
}

std::span<const double> TruncatedTensor::level(int k) const {
  if (k < 0 || k > depth_) throw ShapeError("level out of range");
  const std::size_t begin = level_offset(d_, k);
  return std::span<const double>(coeffs_).subspan(begin, level_offset(d_, k + 1) - begin);
}

std::span<double> TruncatedTensor::level(int k) {
  if (k < 0 || k > depth_) throw ShapeError("level out of range");
  const std::size_t begin = level_offset(d_, k);
  return std::span<double>(coeffs_).subspan(begin, level_offset(d_, k + 1) - begin);
}

std::size_t TruncatedTensor::index_of(const Word& w) const {
  if (w.length() > static_cast<std::size_t>(depth_)) {
    throw ShapeError("word " + w.to_string() + " longer than depth " + std::to_string(depth_));
  }
  std::size_t idx = 0;
  for (int letter : w.letters()) {
    if (letter < 0 || letter >= d_) {
      throw ShapeError("letter " + std::to_string(letter) + " outside alphabet of size " +
                       std::to_string(d_));
    }
    idx = idx * static_cast<std::size_t>(d_) + static_cast<std::size_t>(letter);
  }
  return level_offset(d_, static_cast<int>(w.length())) + idx;
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& other) {
  if (!same_shape(other)) throw ShapeError("tensor sum: mismatched alphabet size or depth");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b) { return a += b; }
TruncatedTensor operator*(double s, TruncatedTensor a) { return a *= s; }

TruncatedTensor concat_product(const TruncatedTensor& a, const TruncatedTensor& b) {
  if (!a.same_shape(b)) throw ShapeError("concat_product: mismatched alphabet size or depth");
  const int d = a.alphabet_size();
  const int depth = a.depth();
  TruncatedTensor out(d, depth);
  // A word of length n splits as u (length i) followed by v (length n - i);
  // its index is index(u) * d^(n-i) + index(v) within level n.
  for (int n = 0; n <= depth; ++n) {
    auto dst = out.level(n);
    for (int i = 0; i <= n; ++i) {
      auto lhs = a.level(i);
      auto rhs = b.level(n - i);
      const std::size_t stride = rhs.size();
      for (std::size_t u = 0; u < lhs.size(); ++u) {
        const double au = lhs[u];
        if (au == 0.0) continue;
        double* row = dst.data() + u * stride;
        for (std::size_t v = 0; v < stride; ++v) row[v] += au * rhs[v];
      }
    }
  }
  return out;
}

namespace {

void shuffle_into(std::span<const int> u, std::span<const int> v, std::vector<int>& suffix,
                  std::size_t max_length, WordSum& out) {
  if (u.size() + v.size() + suffix.size() > max_length) return;
  if (u.empty() || v.empty()) {
    std::vector<int> letters(u.begin(), u.end());
    letters.insert(letters.end(), v.begin(), v.end());
    letters.insert(letters.end(), suffix.rbegin(), suffix.rend());
    ++out[Word(std::move(letters))];
    return;
  }
  // e_I ш e_J = (e_I' ш e_J) e_{i_n} + (e_I ш e_J') e_{j_m}
  suffix.push_back(u.back());
  shuffle_into(u.first(u.size() - 1), v, suffix, max_length, out);
  suffix.back() = v.back();
  shuffle_into(u, v.first(v.size() - 1), suffix, max_length, out);
  suffix.pop_back();
}

}  // namespace

WordSum shuffle_product(const Word& u, const Word& v, std::size_t max_length) {
  WordSum out;
  std::vector<int> suffix;
  shuffle_into(u.letters(), v.letters(), suffix, max_length, out);
  return out;
}

double inner_product(const TruncatedTensor& a, const TruncatedTensor& b) {
  if (!a.same_shape(b)) throw ShapeError("inner_product: mismatched alphabet size or depth");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.coeffs()[i] * b.coeffs()[i];
  return s;
}

double inner_product(const WordSum& words, const TruncatedTensor& t) {
  double s = 0.0;
  for (const auto& [w, m] : words) s += static_cast<double>(m) * t[w];
  return s;
}

TruncatedTensor exp_level1(std::span<const double> v, int depth) {
  if (depth < 1) throw PreconditionError("exp_level1: depth must be >= 1");
  const int d = static_cast<int>(v.size());
  TruncatedTensor out = TruncatedTensor::unit(d, depth);
  // level k = level (k-1) (x) v / k
  for (int k = 1; k <= depth; ++k) {
    auto prev = std::as_const(out).level(k - 1);
    auto cur = out.level(k);
    for (std::size_t u = 0; u < prev.size(); ++u) {
      for (int a = 0; a < d; ++a) cur[u * d + a] = prev[u] * v[a] / k;
    }
  }
  return out;
}

}  // namespace sigbsde
