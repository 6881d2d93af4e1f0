#ifndef SRK_SEPRANK_HPP
#define SRK_SEPRANK_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "srk/error.hpp"
#include "srk/numeric.hpp"
#include "srk/poly.hpp"

namespace srk {

inline constexpr std::size_t kDefaultPartitionCap = 12;

/// Partition cap, honouring SRK_PARTITION_CAP.
inline std::size_t default_partition_cap() {
  return env_cap("SRK_PARTITION_CAP", kDefaultPartitionCap);
}

/// Balanced bipartition (A, B) of the variables [0, universe).
class Partition {
 public:
  Partition(std::vector<VarId> a, std::vector<VarId> b) : a_(std::move(a)), b_(std::move(b)) {
    std::sort(a_.begin(), a_.end());
    std::sort(b_.begin(), b_.end());
    const std::size_t n = a_.size() + b_.size();
    if (a_.size() != b_.size()) throw InvalidShape("partition is not balanced");
    side_.assign(n, 0);
    for (VarId v : a_) mark(v, 1, n);
    for (VarId v : b_) mark(v, 2, n);
  }

  std::span<const VarId> a() const { return a_; }
  std::span<const VarId> b() const { return b_; }
  std::size_t universe() const { return side_.size(); }

  bool contains(VarId v) const { return v.index < side_.size(); }
  bool in_a(VarId v) const { return side_[v.index] == 1; }

  friend bool operator==(const Partition& x, const Partition& y) { return x.a_ == y.a_ && x.b_ == y.b_; }

 private:
  void mark(VarId v, std::uint8_t s, std::size_t n) {
    if (v.index >= n || side_[v.index] != 0) {
      throw InvalidShape("partition sides must be disjoint and cover [0, universe)");
    }
    side_[v.index] = s;
  }

  std::vector<VarId> a_;
  std::vector<VarId> b_;
  std::vector<std::uint8_t> side_;
};

/// All C(2M, M)/2 balanced partitions of [0, 2M); each unordered pair {A, B}
/// is emitted once, with variable 0 always on side A.
inline std::vector<Partition> enumerate_balanced_partitions(std::size_t universe_size,
                                                            std::size_t cap = default_partition_cap()) {
  if (universe_size == 0 || universe_size % 2 != 0) {
    throw OddUniverse("balanced partitions need an even, positive universe; got " +
                      std::to_string(universe_size));
  }
  if (universe_size > cap) {
    throw CapExceeded("universe of " + std::to_string(universe_size) + " variables exceeds partition cap " +
                      std::to_string(cap));
  }
  const std::size_t half = universe_size / 2;
  std::vector<Partition> out;
  // Choose the other half-1 members of A from [1, universe) in lexicographic order.
  std::vector<std::size_t> pick(half - 1);
  std::iota(pick.begin(), pick.end(), std::size_t{1});
  while (true) {
    std::vector<VarId> a{VarId{0}};
    std::vector<VarId> b;
    std::size_t k = 0;
    for (std::size_t v = 1; v < universe_size; ++v) {
      if (k < pick.size() && pick[k] == v) {
        a.push_back(VarId{static_cast<std::uint32_t>(v)});
        ++k;
      } else {
        b.push_back(VarId{static_cast<std::uint32_t>(v)});
      }
    }
    out.emplace_back(std::move(a), std::move(b));

    // Next combination of size half-1 over [1, universe).
    std::size_t i = pick.size();
    while (i > 0 && pick[i - 1] == universe_size - pick.size() + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < pick.size(); ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

/// Coefficient matrix of a polynomial w.r.t. a partition: rows are A-side
/// monomials, columns B-side monomials, both in graded-lex order.
struct CoeffMatricization {
  std::vector<Monomial> row_index;
  std::vector<Monomial> col_index;
  Matrix<Rational> matrix;
};

inline CoeffMatricization matricize(const Poly& p, const Partition& part) {
  std::map<Monomial, std::size_t, GrlexLess> rows;
  std::map<Monomial, std::size_t, GrlexLess> cols;
  std::vector<std::pair<std::pair<Monomial, Monomial>, const Rational*>> split_terms;
  split_terms.reserve(p.size());
  for (const auto& [mono, coeff] : p.terms()) {
    for (const auto& f : mono.factors()) {
      if (!part.contains(f.first)) {
        throw UnknownVariable("variable x" + std::to_string(f.first.index) + " is outside the partition universe of " +
                              std::to_string(part.universe()));
      }
    }
    auto halves = mono.split([&](VarId v) { return part.in_a(v); });
    rows.try_emplace(halves.first, 0);
    cols.try_emplace(halves.second, 0);
    split_terms.emplace_back(std::move(halves), &coeff);
  }

  CoeffMatricization out;
  std::size_t r = 0;
  for (auto& [m, idx] : rows) {
    idx = r++;
    out.row_index.push_back(m);
  }
  std::size_t c = 0;
  for (auto& [m, idx] : cols) {
    idx = c++;
    out.col_index.push_back(m);
  }
  out.matrix = Matrix<Rational>(out.row_index.size(), out.col_index.size());
  for (const auto& [halves, coeff] : split_terms) {
    out.matrix(rows.at(halves.first), cols.at(halves.second)) = *coeff;
  }
  return out;
}

/// Rank over the rationals. Rows are scaled to integers, then reduced by
/// fraction-free (Bareiss) elimination, so every intermediate is exact.
inline std::size_t exact_rank(const Matrix<Rational>& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<std::vector<BigInt>> a(rows, std::vector<BigInt>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    BigInt lcm = 1;
    for (std::size_t j = 0; j < cols; ++j) {
      const BigInt& d = denominator(m(i, j));
      if (d != 1) lcm = boost::multiprecision::lcm(lcm, d);
    }
    for (std::size_t j = 0; j < cols; ++j) {
      a[i][j] = numerator(m(i, j)) * (lcm / denominator(m(i, j)));
    }
  }

  std::size_t rank = 0;
  BigInt prev = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    const BigInt& piv = a[rank][col];
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        a[i][j] = (a[i][j] * piv - a[i][col] * a[rank][j]) / prev;
      }
      a[i][col] = 0;
    }
    prev = piv;
    ++rank;
  }
  return rank;
}

/// Separation rank of a polynomial w.r.t. a partition (0 for the zero
/// polynomial, 1 for nonzero constants).
inline std::size_t sep_rank_entry(const Poly& p, const Partition& part) {
  if (p.is_zero()) return 0;
  return exact_rank(matricize(p, part).matrix);
}

/// How inf-sep aggregates over partitions. The default takes the minimum over
/// entries of the per-entry minimum; the alternative reading takes the
/// minimum over entries of the per-entry maximum.
enum class InfSepMode { MinOfMin, MinOfMax };

struct SepRange {
  std::size_t min = 0;
  std::size_t max = 0;
  friend bool operator==(const SepRange&, const SepRange&) = default;
};

struct SepProfile {
  Matrix<SepRange> per_entry;
  std::size_t sup_sep = 0;
  std::size_t inf_sep = 0;
  InfSepMode mode = InfSepMode::MinOfMin;
};

struct OracleConfig {
  std::size_t partition_cap = default_partition_cap();
  InfSepMode inf_mode = InfSepMode::MinOfMin;
};

/// Exhaustive sweep of every entry against every balanced partition of
/// [0, universe).
inline SepProfile sep_profile(const PolyMatrix& f, std::size_t universe, const OracleConfig& cfg = {}) {
  const auto parts = enumerate_balanced_partitions(universe, cfg.partition_cap);
  SepProfile out;
  out.mode = cfg.inf_mode;
  out.per_entry = Matrix<SepRange>(f.rows(), f.cols());
  out.sup_sep = 0;
  out.inf_sep = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < f.cols(); ++j) {
      SepRange r{std::numeric_limits<std::size_t>::max(), 0};
      for (const auto& part : parts) {
        const std::size_t k = sep_rank_entry(f(i, j), part);
        r.min = std::min(r.min, k);
        r.max = std::max(r.max, k);
      }
      out.per_entry(i, j) = r;
      out.sup_sep = std::max(out.sup_sep, r.max);
      const std::size_t inf_candidate = cfg.inf_mode == InfSepMode::MinOfMin ? r.min : r.max;
      out.inf_sep = std::min(out.inf_sep, inf_candidate);
    }
  }
  if (f.size() == 0) out.inf_sep = 0;
  return out;
}

/// Profile over the ambient universe of the matrix's own shape.
inline SepProfile sep_profile(const PolyMatrix& f, const OracleConfig& cfg = {}) {
  return sep_profile(f, f.rows() * f.cols(), cfg);
}

inline nlohmann::json to_json(const SepProfile& p) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < p.per_entry.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < p.per_entry.cols(); ++j) {
      row.push_back({{"min", p.per_entry(i, j).min}, {"max", p.per_entry(i, j).max}});
    }
    entries.push_back(std::move(row));
  }
  return {{"sup_sep", p.sup_sep}, {"inf_sep", p.inf_sep}, {"entries", std::move(entries)}};
}

}  // namespace srk

#endif  // SRK_SEPRANK_HPP
