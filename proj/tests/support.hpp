// Independent reference implementations used as test oracles. Nothing here
// calls into the library's rank or matricization code.
#ifndef SRK_TESTS_SUPPORT_HPP
#define SRK_TESTS_SUPPORT_HPP

#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "srk/srk.hpp"

namespace srk::testing {

using Exponents = std::vector<std::uint32_t>;

inline Exponents exponents_of(const Monomial& m, std::size_t universe) {
  Exponents e(universe, 0);
  for (const auto& [v, k] : m.factors()) e.at(v.index) = k;
  return e;
}

/// Rank over Q by textbook Gaussian elimination on rationals.
inline std::size_t gauss_rank(std::vector<std::vector<Rational>> a) {
  std::size_t rank = 0;
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

inline std::vector<std::vector<Rational>> to_rows(const Matrix<Rational>& m) {
  std::vector<std::vector<Rational>> out(m.rows(), std::vector<Rational>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

/// Balanced partitions as bitmasks of side A; bit 0 is always on side A.
inline std::vector<std::uint32_t> partition_masks(std::size_t universe) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t mask = 0; mask < (1u << universe); ++mask) {
    if ((mask & 1u) && static_cast<std::size_t>(std::popcount(mask)) * 2 == universe) out.push_back(mask);
  }
  return out;
}

/// Separation rank of f under the partition given by `mask` (bit i set means
/// variable i is on side A).
inline std::size_t oracle_rank(const Poly& f, std::uint32_t mask, std::size_t universe) {
  std::map<Exponents, std::size_t> rows, cols;
  std::vector<std::tuple<Exponents, Exponents, Rational>> entries;
  for (const auto& [mono, c] : f.terms()) {
    const Exponents e = exponents_of(mono, universe);
    Exponents ea(universe, 0), eb(universe, 0);
    for (std::size_t i = 0; i < universe; ++i) ((mask >> i) & 1u ? ea : eb)[i] = e[i];
    rows.emplace(ea, 0);
    cols.emplace(eb, 0);
    entries.emplace_back(ea, eb, c);
  }
  std::size_t k = 0;
  for (auto& [_, idx] : rows) idx = k++;
  k = 0;
  for (auto& [_, idx] : cols) idx = k++;
  std::vector<std::vector<Rational>> a(rows.size(), std::vector<Rational>(cols.size()));
  for (const auto& [ea, eb, c] : entries) a[rows[ea]][cols[eb]] += c;
  return gauss_rank(std::move(a));
}

/// Per-partition ranks of f, in partition_masks order.
inline std::vector<std::size_t> oracle_ranks(const Poly& f, std::size_t universe) {
  std::vector<std::size_t> out;
  for (auto mask : partition_masks(universe)) out.push_back(oracle_rank(f, mask, universe));
  return out;
}

/// Entrywise maximum over a matrix, per partition.
inline std::vector<std::size_t> oracle_ranks(const PolyMatrix& f, std::size_t universe) {
  std::vector<std::size_t> out(partition_masks(universe).size(), 0);
  for (const auto& e : f.flat()) {
    const auto r = oracle_ranks(e, universe);
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = std::max(out[i], r[i]);
  }
  return out;
}

inline Rational random_coeff(std::mt19937_64& rng) {
  const auto num = static_cast<std::int64_t>(rng() % 13) - 6;
  const auto den = static_cast<std::int64_t>(rng() % 4) + 1;
  return Rational(num == 0 ? 1 : num, den);
}

/// Random polynomial over `vars` variables with total degree <= max_degree.
inline Poly random_poly(std::mt19937_64& rng, std::size_t vars, std::uint32_t max_degree, std::size_t max_terms = 6) {
  Poly p;
  const std::size_t terms = 1 + rng() % max_terms;
  for (std::size_t t = 0; t < terms; ++t) {
    const std::uint32_t deg = static_cast<std::uint32_t>(rng() % (max_degree + 1));
    std::vector<Monomial::Factor> factors;
    for (std::uint32_t d = 0; d < deg; ++d) factors.emplace_back(VarId{static_cast<std::uint32_t>(rng() % vars)}, 1);
    p = p + Poly::term(random_coeff(rng), Monomial::from_factors(std::move(factors)));
  }
  return p;
}

inline PolyMatrix random_poly_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t vars,
                                     std::uint32_t max_degree) {
  PolyMatrix m(rows, cols);
  for (auto& e : m.flat()) e = random_poly(rng, vars, max_degree, 3);
  return m;
}

inline ConstMatrix random_const_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  ConstMatrix m(rows, cols);
  for (auto& e : m.flat()) e = random_coeff(rng);
  return m;
}

}  // namespace srk::testing

#endif  // SRK_TESTS_SUPPORT_HPP
