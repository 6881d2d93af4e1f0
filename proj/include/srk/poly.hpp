#ifndef SRK_POLY_HPP
#define SRK_POLY_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "srk/error.hpp"
#include "srk/numeric.hpp"

namespace srk {

/// One scalar entry of the input matrix X in R^{n x m}, flattened row-major:
/// var(i, j) = i * m + j.
struct VarId {
  std::uint32_t index = 0;

  static constexpr VarId at(std::size_t i, std::size_t j, std::size_t cols) {
    return VarId{static_cast<std::uint32_t>(i * cols + j)};
  }
  constexpr std::size_t row(std::size_t cols) const { return index / cols; }
  constexpr std::size_t col(std::size_t cols) const { return index % cols; }

  friend constexpr auto operator<=>(VarId, VarId) = default;
};

/// Sparse power product. Factors are sorted by variable and never carry a
/// zero exponent; the empty monomial is the constant 1.
class Monomial {
 public:
  using Factor = std::pair<VarId, std::uint32_t>;

  Monomial() = default;

  static Monomial var(VarId v, std::uint32_t exp = 1) {
    Monomial m;
    if (exp > 0) m.factors_.emplace_back(v, exp);
    return m;
  }

  /// Builds from arbitrary (var, exp) pairs; merges duplicates, drops zeros.
  static Monomial from_factors(std::vector<Factor> factors) {
    std::sort(factors.begin(), factors.end());
    Monomial m;
    for (const auto& [v, e] : factors) {
      if (e == 0) continue;
      if (!m.factors_.empty() && m.factors_.back().first == v) {
        m.factors_.back().second += e;
      } else {
        m.factors_.emplace_back(v, e);
      }
    }
    return m;
  }

  std::span<const Factor> factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

  std::uint64_t degree() const {
    std::uint64_t d = 0;
    for (const auto& f : factors_) d += f.second;
    return d;
  }

  std::uint32_t exponent(VarId v) const {
    auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                               [](const Factor& f, VarId x) { return f.first < x; });
    return (it != factors_.end() && it->first == v) ? it->second : 0;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.factors_.reserve(a.factors_.size() + b.factors_.size());
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() && j != b.factors_.end()) {
      if (i->first < j->first) {
        out.factors_.push_back(*i++);
      } else if (j->first < i->first) {
        out.factors_.push_back(*j++);
      } else {
        out.factors_.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    out.factors_.insert(out.factors_.end(), i, a.factors_.end());
    out.factors_.insert(out.factors_.end(), j, b.factors_.end());
    return out;
  }

  /// Splits into the part over variables accepted by `in_first` and the rest.
  template <class Pred>
  std::pair<Monomial, Monomial> split(Pred in_first) const {
    std::pair<Monomial, Monomial> out;
    for (const auto& f : factors_) {
      (in_first(f.first) ? out.first : out.second).factors_.push_back(f);
    }
    return out;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Graded-lexicographic order: lower total degree first; within a degree,
/// the monomial with the larger exponent on the lowest-indexed variable comes
/// first (x0^2 < x0*x1 < x1^2).
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const auto da = a.degree();
    const auto db = b.degree();
    if (da != db) return da < db;
    auto fa = a.factors();
    auto fb = b.factors();
    std::size_t i = 0;
    for (; i < fa.size() && i < fb.size(); ++i) {
      if (fa[i].first != fb[i].first) return fa[i].first < fb[i].first;
      if (fa[i].second != fb[i].second) return fa[i].second > fb[i].second;
    }
    // Equal degrees and a common prefix force equal lengths.
    return false;
  }
};

/// Sparse multivariate polynomial with exact coefficients.
template <class Coeff>
class BasicPoly {
 public:
  using Terms = std::map<Monomial, Coeff, GrlexLess>;

  BasicPoly() = default;

  static BasicPoly constant(const Coeff& c) {
    BasicPoly p;
    if (c != 0) p.terms_.emplace(Monomial{}, c);
    return p;
  }

  static BasicPoly var(VarId v) { return term(Coeff{1}, Monomial::var(v)); }

  static BasicPoly term(const Coeff& c, Monomial m) {
    BasicPoly p;
    if (c != 0) p.terms_.emplace(std::move(m), c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::uint64_t degree() const {
    std::uint64_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  /// Largest variable index used plus one (0 for constants).
  std::uint32_t var_bound() const {
    std::uint32_t b = 0;
    for (const auto& [m, c] : terms_) {
      for (const auto& f : m.factors()) b = std::max(b, f.first.index + 1);
    }
    return b;
  }

  BasicPoly& operator+=(const BasicPoly& o) {
    for (const auto& [m, c] : o.terms_) accumulate(m, c);
    return *this;
  }

  BasicPoly& operator-=(const BasicPoly& o) {
    for (const auto& [m, c] : o.terms_) accumulate(m, -c);
    return *this;
  }

  BasicPoly& operator*=(const Coeff& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend BasicPoly operator+(BasicPoly a, const BasicPoly& b) { return a += b; }
  friend BasicPoly operator-(BasicPoly a, const BasicPoly& b) { return a -= b; }
  friend BasicPoly operator-(BasicPoly a) { return a *= Coeff{-1}; }
  friend BasicPoly operator*(BasicPoly a, const Coeff& s) { return a *= s; }
  friend BasicPoly operator*(const Coeff& s, BasicPoly a) { return a *= s; }

  friend BasicPoly operator*(const BasicPoly& a, const BasicPoly& b) {
    BasicPoly out;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) out.accumulate_raw(ma * mb, ca * cb);
    }
    out.drop_zeros();
    return out;
  }

  BasicPoly& operator*=(const BasicPoly& o) { return *this = *this * o; }

  friend bool operator==(const BasicPoly&, const BasicPoly&) = default;

  /// Canonical text form: terms in monomial order joined by " + ", each as
  /// `coeff * x{i}^{e} * ...`; the zero polynomial prints as "0".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << coeff_str(c);
      for (const auto& [v, e] : m.factors()) os << " * x" << v.index << '^' << e;
    }
    return os.str();
  }

 private:
  static std::string coeff_str(const Coeff& c) {
    if constexpr (std::is_same_v<Coeff, Rational>) {
      return to_string(c);
    } else {
      std::ostringstream os;
      os << c;
      return os.str();
    }
  }

  void accumulate(const Monomial& m, const Coeff& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  void accumulate_raw(Monomial m, Coeff c) {
    auto [it, inserted] = terms_.try_emplace(std::move(m), c);
    if (!inserted) it->second += c;
  }

  void drop_zeros() {
    std::erase_if(terms_, [](const auto& kv) { return kv.second == 0; });
  }

  Terms terms_;
};

using Poly = BasicPoly<Rational>;

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw ShapeMismatch("matrix data size does not match shape");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using PolyMatrix = Matrix<Poly>;
using ConstMatrix = Matrix<Rational>;

/// The symbolic input X in R^{rows x cols}: entry (i, j) is the variable
/// var(i, j).
inline PolyMatrix symbols(std::size_t rows, std::size_t cols) {
  PolyMatrix x(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) x(i, j) = Poly::var(VarId::at(i, j, cols));
  }
  return x;
}

inline ConstMatrix identity_matrix(std::size_t n) {
  ConstMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

inline void check_permutation(std::span<const std::size_t> perm, std::size_t n) {
  if (perm.size() != n) {
    throw InvalidPermutation("permutation has " + std::to_string(perm.size()) +
                             " entries, expected " + std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (std::size_t v : perm) {
    if (v >= n || seen[v]) throw InvalidPermutation("permutation is not a bijection on [0, n)");
    seen[v] = true;
  }
}

/// Relocates entries: flat index i of the input lands at flat index perm[i].
template <class T>
Matrix<T> permute(const Matrix<T>& a, std::span<const std::size_t> perm) {
  check_permutation(perm, a.size());
  Matrix<T> out(a.rows(), a.cols());
  auto src = a.flat();
  auto dst = out.flat();
  for (std::size_t i = 0; i < src.size(); ++i) dst[perm[i]] = src[i];
  return out;
}

inline PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeMismatch("add: shapes differ");
  PolyMatrix out = a;
  auto dst = out.flat();
  auto src = b.flat();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

inline PolyMatrix negate(const PolyMatrix& a) {
  PolyMatrix out = a;
  for (auto& p : out.flat()) p *= Rational{-1};
  return out;
}

/// Standard product; the left factor may be constant or polynomial.
template <class L>
PolyMatrix matmul(const Matrix<L>& a, const PolyMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  PolyMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Poly acc;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        if constexpr (std::is_same_v<L, Rational>) {
          if (a(i, k) != 0) acc += b(k, j) * a(i, k);
        } else {
          acc += a(i, k) * b(k, j);
        }
      }
      out(i, j) = std::move(acc);
    }
  }
  return out;
}

inline PolyMatrix hadamard(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeMismatch("hadamard: shapes differ");
  PolyMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.flat()[i] = a.flat()[i] * b.flat()[i];
  return out;
}

/// sigma_2 on polynomials: |x|^2 = x^2, so every entry is squared.
inline PolyMatrix entrywise_square(const PolyMatrix& a) {
  PolyMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.flat()[i] = a.flat()[i] * a.flat()[i];
  return out;
}

inline std::uint64_t total_degree(const PolyMatrix& a) {
  std::uint64_t d = 0;
  for (const auto& p : a.flat()) d = std::max(d, p.degree());
  return d;
}

inline std::uint32_t var_bound(const PolyMatrix& a) {
  std::uint32_t b = 0;
  for (const auto& p : a.flat()) b = std::max(b, p.var_bound());
  return b;
}

}  // namespace srk

#endif  // SRK_POLY_HPP
