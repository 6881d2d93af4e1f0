#ifndef SRK_BOUNDS_HPP
#define SRK_BOUNDS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srk/arch.hpp"
#include "srk/error.hpp"
#include "srk/numeric.hpp"

namespace srk {

inline constexpr std::uint64_t kDefaultExactBitLimit = 1'000'000;

/// A certified separation-rank bound. `exact` is kept while the value stays
/// under the bit limit and dropped (never rounded) beyond it; `log3` is always
/// present. `provenance` lists the rules applied, innermost first.
struct Bound {
  std::optional<BigInt> exact;
  double log3 = 0.0;
  std::vector<std::string> provenance;

  static Bound of(BigInt value, std::string rule) {
    Bound b;
    b.log3 = srk::log3(value);
    b.exact = std::move(value);
    b.provenance.push_back(std::move(rule));
    return b;
  }

  static Bound log_only(double log3_value, std::string rule) {
    Bound b;
    b.log3 = log3_value;
    b.provenance.push_back(std::move(rule));
    return b;
  }

  Bound& then(std::string rule) {
    provenance.push_back(std::move(rule));
    return *this;
  }
};

namespace detail {

inline double bits_of_log3(double l3) { return l3 * std::log2(3.0); }

inline std::vector<std::string> merge_trace(const Bound& a, const Bound& b) {
  std::vector<std::string> t = a.provenance;
  t.insert(t.end(), b.provenance.begin(), b.provenance.end());
  return t;
}

/// Keeps `exact` only when both inputs are exact and the estimated size fits.
inline std::optional<BigInt> exact_if(bool available, double log3_estimate, std::uint64_t bit_limit,
                                      const auto& compute) {
  if (!available || bits_of_log3(log3_estimate) > static_cast<double>(bit_limit)) return std::nullopt;
  return compute();
}

}  // namespace detail

inline Bound bound_add(const Bound& a, const Bound& b, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  Bound out;
  out.provenance = detail::merge_trace(a, b);
  out.log3 = log3_add(a.log3, b.log3);
  out.exact = detail::exact_if(a.exact && b.exact, out.log3, bit_limit, [&] { return *a.exact + *b.exact; });
  if (out.exact) out.log3 = log3(*out.exact);
  return out;
}

inline Bound bound_mul(const Bound& a, const Bound& b, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  Bound out;
  out.provenance = detail::merge_trace(a, b);
  out.log3 = a.log3 + b.log3;
  out.exact = detail::exact_if(a.exact && b.exact, out.log3, bit_limit, [&] { return *a.exact * *b.exact; });
  if (out.exact) out.log3 = log3(*out.exact);
  return out;
}

inline Bound bound_scale(const Bound& a, const BigInt& c, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  Bound out;
  out.provenance = a.provenance;
  out.log3 = a.log3 + log3(c);
  out.exact = detail::exact_if(a.exact.has_value(), out.log3, bit_limit, [&] { return *a.exact * c; });
  if (out.exact) out.log3 = log3(*out.exact);
  return out;
}

inline Bound bound_pow(const Bound& a, std::uint64_t e, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  Bound out;
  out.provenance = a.provenance;
  out.log3 = a.log3 * static_cast<double>(e);
  out.exact = detail::exact_if(a.exact.has_value(), out.log3, bit_limit, [&] { return ipow(*a.exact, e); });
  if (out.exact) out.log3 = log3(*out.exact);
  return out;
}

// ---------------------------------------------------------------------------
// Elementary rules

enum class Rule { Add, Permute, Transpose, Identity, HadamardSquare, ScalarMul, MatMul, LinearMap };

inline std::string rule_name(Rule r) {
  switch (r) {
    case Rule::Add: return "add";
    case Rule::Permute: return "permute";
    case Rule::Transpose: return "transpose";
    case Rule::Identity: return "identity";
    case Rule::HadamardSquare: return "hadamard_square";
    case Rule::ScalarMul: return "scalar_mul";
    case Rule::MatMul: return "matmul";
    case Rule::LinearMap: return "linear_map";
  }
  return "?";
}

inline Rule parse_rule(const std::string& name) {
  for (Rule r : {Rule::Add, Rule::Permute, Rule::Transpose, Rule::Identity, Rule::HadamardSquare, Rule::ScalarMul,
                 Rule::MatMul, Rule::LinearMap}) {
    if (rule_name(r) == name) return r;
  }
  throw UnknownRule("unknown bound rule '" + name + "'");
}

/// Bound after one elementary operation:
///   add k_f+k_g, permute/transpose k, identity 2, hadamard_square C(k+1,2),
///   scalar_mul k_f*k_g, matmul n*k_f*k_g, linear_map n*k.
/// `dim` is the contracted dimension n for matmul and linear_map.
inline Bound elementary_rule_bound(Rule rule, std::span<const Bound> in, std::uint64_t dim = 1,
                                   std::uint64_t bit_limit = kDefaultExactBitLimit) {
  const std::size_t arity = [&] {
    switch (rule) {
      case Rule::Identity: return std::size_t{0};
      case Rule::Permute:
      case Rule::Transpose:
      case Rule::HadamardSquare:
      case Rule::LinearMap: return std::size_t{1};
      default: return std::size_t{2};
    }
  }();
  if (in.size() != arity) {
    throw PreconditionViolation(rule_name(rule) + " takes " + std::to_string(arity) + " input bound(s)");
  }
  if (dim < 1) throw PreconditionViolation("dimension must be at least 1");
  for (const auto& b : in) {
    if (b.exact && *b.exact < 0) throw PreconditionViolation("bounds must be nonnegative");
  }

  Bound out;
  switch (rule) {
    case Rule::Identity:
      return Bound::of(2, "identity");
    case Rule::Permute:
    case Rule::Transpose:
      out = in[0];
      break;
    case Rule::Add:
      out = bound_add(in[0], in[1], bit_limit);
      break;
    case Rule::ScalarMul:
      out = bound_mul(in[0], in[1], bit_limit);
      break;
    case Rule::MatMul:
      out = bound_scale(bound_mul(in[0], in[1], bit_limit), dim, bit_limit);
      break;
    case Rule::LinearMap:
      out = bound_scale(in[0], dim, bit_limit);
      break;
    case Rule::HadamardSquare: {
      const Bound& k = in[0];
      out.provenance = k.provenance;
      // log3(k(k+1)/2) = log3 k + log3(k+1) - log3 2
      out.log3 = k.log3 + log3_add(k.log3, 0.0) - log3(2.0);
      out.exact = detail::exact_if(k.exact.has_value(), out.log3, bit_limit,
                                   [&] { return *k.exact * (*k.exact + 1) / 2; });
      if (out.exact) out.log3 = log3(*out.exact);
      break;
    }
  }
  out.then(rule_name(rule));
  return out;
}

/// One sigma_2 mixer layer on an input of separation rank k, where `n` is
/// the mixing dimension: n^2 k^2 + k.
inline Bound mixer_layer_bound(const Bound& k, std::uint64_t n, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  Bound out;
  out.provenance = k.provenance;
  const double ln = log3(static_cast<double>(n));
  out.log3 = k.log3 + log3_add(2.0 * ln + k.log3, 0.0);
  out.exact = detail::exact_if(k.exact.has_value(), out.log3, bit_limit, [&] {
    const BigInt nn = BigInt(n) * n;
    return nn * *k.exact * *k.exact + *k.exact;
  });
  if (out.exact) out.log3 = log3(*out.exact);
  out.then("mixer_layer(n=" + std::to_string(n) + ")");
  return out;
}

/// One degree-d attention layer with H heads and equally shaped weights:
/// H m^d n^(d+1) k^d.
inline Bound attention_layer_bound(const Bound& k, std::uint64_t n, std::uint64_t m, std::uint64_t heads,
                                   std::uint64_t d, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  if (d < 1) throw PreconditionViolation("attention degree must be at least 1");
  Bound out;
  out.provenance = k.provenance;
  const double dd = static_cast<double>(d);
  out.log3 = log3(static_cast<double>(heads)) + dd * log3(static_cast<double>(m)) +
             (dd + 1.0) * log3(static_cast<double>(n)) + dd * k.log3;
  out.exact = detail::exact_if(k.exact.has_value(), out.log3, bit_limit, [&] {
    return BigInt(heads) * ipow(m, d) * ipow(n, d + 1) * ipow(*k.exact, d);
  });
  if (out.exact) out.log3 = log3(*out.exact);
  out.then("attention_layer(H=" + std::to_string(heads) + ",d=" + std::to_string(d) + ")");
  return out;
}

/// Per-head form of the attention bound: dim_col(W_O) * sum_k Delta_k (+ k
/// with a residual), where
///   Delta_k = prod_{j in T_k \ {1}} rows(W^{j,k}) * prod_j cols(W^{j,k})
///             * cols(f)^{|T_k^c \ {1}|} * k^d.
/// With W^{j,k} in R^{m x n} and f in R^{n x m} every head contributes
/// m^{d-1} n^d k^d, so the total is attention_layer_bound divided by n.
inline Bound attention_layer_bound_detailed(const Bound& k, std::uint64_t n, std::uint64_t m,
                                            const std::vector<std::vector<std::size_t>>& sets, std::uint64_t d,
                                            bool residual) {
  if (!k.exact) throw PreconditionViolation("detailed attention bound needs an exact input bound");
  BigInt total = 0;
  for (const auto& set : sets) {
    std::uint64_t in_t = 0;
    for (std::size_t j : set) in_t += (j != 1) ? 1 : 0;
    const bool one_in_t = std::find(set.begin(), set.end(), std::size_t{1}) != set.end();
    const std::uint64_t out_t = (d - set.size()) - (one_in_t ? 0 : 1);
    total += ipow(m, in_t) * ipow(n, d) * ipow(m, out_t) * ipow(*k.exact, d);
  }
  total *= m;
  if (residual) total += *k.exact;
  Bound out = Bound::of(total, "");
  out.provenance = k.provenance;
  out.then("attention_layer_detailed");
  return out;
}

/// Folds the layer rules over the architecture, starting from the identity
/// leaf (bound 2).
inline Bound propagate_bound(const ArchSpec& spec, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  Bound k = elementary_rule_bound(Rule::Identity, {});
  if (spec.family == Family::Mixer) {
    for (const auto& layer : spec.mixer_layers) {
      k = mixer_layer_bound(k, layer.odd() ? spec.n : spec.m, bit_limit);
    }
  } else {
    for (const auto& layer : spec.attention_layers) {
      Bound prev = k;
      k = attention_layer_bound(k, spec.n, spec.m, layer.heads, layer.degree, bit_limit);
      // For n >= 2 the extra factor n absorbs the residual term; for n = 1 add it.
      if (layer.residual && spec.n == 1) {
        auto trace = k.provenance;
        k = bound_add(k, prev, bit_limit);
        k.provenance = std::move(trace);
        k.then("residual_add");
      }
    }
  }
  return k;
}

namespace detail {

inline Bound power_form(std::uint64_t base_value, double exponent, std::optional<std::uint64_t> exact_exponent,
                        std::string rule, std::uint64_t bit_limit) {
  const double lb = log3(static_cast<double>(base_value));
  Bound out;
  out.log3 = exponent * lb;
  if (exact_exponent && bits_of_log3(out.log3) <= static_cast<double>(bit_limit)) {
    out.exact = ipow(BigInt(base_value), *exact_exponent);
    out.log3 = srk::log3(*out.exact);
  }
  out.provenance.push_back(std::move(rule));
  return out;
}

inline std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return std::nullopt;
    r *= base;
  }
  return r;
}

}  // namespace detail

/// (2 H m^2 n^2)^(2^p).
inline Bound mixer_closed_form(std::uint64_t p, std::uint64_t n, std::uint64_t m, std::uint64_t heads = 1,
                               std::uint64_t bit_limit = kDefaultExactBitLimit) {
  if (p < 1) throw PreconditionViolation("closed form needs p >= 1");
  const std::uint64_t base = 2 * heads * m * m * n * n;
  return detail::power_form(base, std::pow(2.0, static_cast<double>(p)), detail::checked_pow(2, p),
                            "mixer_closed_form", bit_limit);
}

/// (2 H m^2 n^2)^(d^p); d = 3 is the attention case.
inline Bound transformer_closed_form(std::uint64_t p, std::uint64_t n, std::uint64_t m, std::uint64_t heads = 1,
                                     std::uint64_t d = 3, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  if (p < 1) throw PreconditionViolation("closed form needs p >= 1");
  if (d < 1) throw PreconditionViolation("degree must be at least 1");
  const std::uint64_t base = 2 * heads * m * m * n * n;
  return detail::power_form(base, std::pow(static_cast<double>(d), static_cast<double>(p)), detail::checked_pow(d, p),
                            "transformer_closed_form", bit_limit);
}

inline Bound closed_form(const ArchSpec& spec, std::uint64_t bit_limit = kDefaultExactBitLimit) {
  if (spec.family == Family::Mixer) return mixer_closed_form(spec.p, spec.n, spec.m, 1, bit_limit);
  return transformer_closed_form(spec.p, spec.n, spec.m, spec.heads(), spec.degree(), bit_limit);
}

/// 3^(p-2) (log3(m-H) + a) with a = -p + 2 - log3 2 unless overridden,
/// clamped at 0. No regime check; see transformer_lower_bound.
inline double transformer_lower_bound_formula(std::uint64_t p, std::uint64_t m, std::uint64_t heads,
                                              std::optional<double> a = std::nullopt) {
  if (heads < 1 || heads >= m) throw PreconditionViolation("lower bound needs 1 <= H < m");
  const double pd = static_cast<double>(p);
  const double shift = a.value_or(-pd + 2.0 - log3(2.0));
  const double value = std::pow(3.0, pd - 2.0) * (log3(static_cast<double>(m - heads)) + shift);
  return value < 0.0 ? 0.0 : value;
}

/// log3 lower bound for some weight assignment of a depth-p linear
/// transformer. Requires 3^p < m (p < log3 m).
inline Bound transformer_lower_bound(std::uint64_t p, std::uint64_t m, std::uint64_t heads,
                                     std::optional<double> a = std::nullopt) {
  if (p < 1) throw PreconditionViolation("lower bound needs p >= 1");
  if (heads < 1 || heads >= m) throw PreconditionViolation("lower bound needs 1 <= H < m");
  const auto three_p = detail::checked_pow(3, p);
  if (!three_p || *three_p >= m) {
    throw RegimeViolation("p = " + std::to_string(p) + " is not below log3(m) = " +
                          std::to_string(log3(static_cast<double>(m))) + "; the lower bound only holds for p < log3 m");
  }
  return Bound::log_only(transformer_lower_bound_formula(p, m, heads, a), "transformer_lower_bound");
}

// ---------------------------------------------------------------------------
// Saturated-regime mixer bound

/// Monomial-support bound for a depth-p mixer over nm variables.
struct MonomialCountBound {
  BigInt exact_count;        // |{a in N^{nm} : sum a <= 2^p}| = C(2^p + nm, nm)
  BigInt literal_sum;        // sum_{l=1}^{2^p} C(l + nm - 1, nm), as printed
  BigInt chain_cap;          // 2^p * C(2^p + nm, nm)
  double log2_envelope = 0;  // p*nm + p + nm*log2(e)
  bool envelope_regime = false;  // p > log2 m
  Bound bound;
};

inline MonomialCountBound large_p_mixer_bound(std::uint64_t p, std::uint64_t n, std::uint64_t m) {
  if (p < 1) throw PreconditionViolation("large-p bound needs p >= 1");
  if (p > 40) throw PreconditionViolation("2^p must stay enumerable (p <= 40)");
  const std::uint64_t vars = n * m;
  const std::uint64_t top = std::uint64_t{1} << p;
  MonomialCountBound out;
  out.exact_count = binomial(top + vars, vars);
  // Hockey stick: sum_{l=1}^{L} C(l+k-1, k) = C(L+k, k+1).
  out.literal_sum = binomial(top + vars, vars + 1);
  out.chain_cap = BigInt(top) * out.exact_count;
  const double pd = static_cast<double>(p);
  const double vd = static_cast<double>(vars);
  out.log2_envelope = pd * vd + pd + vd * std::log2(std::exp(1.0));
  out.envelope_regime = pd > std::log2(static_cast<double>(m));
  out.bound = Bound::of(out.exact_count, "monomial_count");
  return out;
}

// ---------------------------------------------------------------------------
// Gap between the two families

/// log3 upper bound on the mixer: 11 * 2^p * log3 m.
inline double gap_mixer_upper_log3(std::uint64_t p, double m) {
  return 11.0 * std::pow(2.0, static_cast<double>(p)) * log3(m);
}

/// log3 lower bound on the transformer: 3^(p-3) * log3 m.
inline double gap_transformer_lower_log3(std::uint64_t p, double m) {
  return std::pow(3.0, static_cast<double>(p) - 3.0) * log3(m);
}

/// Exact 3^(p-3) / (11 * 2^p).
inline Rational gap_ratio_exact(std::uint64_t p) {
  Rational num = p >= 3 ? Rational(ipow(3, p - 3)) : Rational(1, ipow(3, 3 - p));
  return num / Rational(BigInt(11) * ipow(2, p));
}

inline double gap_ratio(std::uint64_t p, double m) {
  if (p < 4) throw PreconditionViolation("gap ratio is stated for p >= 4");
  if (!(m > 1.0)) throw PreconditionViolation("gap ratio needs m > 1");
  return gap_transformer_lower_log3(p, m) / gap_mixer_upper_log3(p, m);
}

// ---------------------------------------------------------------------------
// Depth-efficiency regime

struct RegimeReport {
  bool holds = false;
  double lhs = 0;  // 2^p * log3(2 H m^2 n^2)
  double rhs = 0;  // 3^(p-2) * log3(m - H)
  std::vector<std::string> lines;
};

/// Sufficient depth (3 + log3 7) / log3(3/2) ~= 12.93 beyond which the chain
/// 2^p log3(2Hm^2n^2) <= 3^(p-2) log3(m-H) is guaranteed.
inline double regime_depth_threshold() { return (3.0 + log3(7.0)) / log3(1.5); }

/// Checks the endpoint of the mixer-vs-transformer inequality chain. The
/// assumptions are m >= 9, H < m/2, n <= m^2 and p < log3 m.
inline RegimeReport verify_regime_conditions(std::uint64_t p, const BigInt& m, const BigInt& n, const BigInt& heads) {
  std::vector<std::string> failed;
  if (m < 9) failed.push_back("m >= 9");
  if (heads < 1 || 2 * heads >= m) failed.push_back("1 <= H < m/2");
  if (n < 1 || n > m * m) failed.push_back("1 <= n <= m^2");
  if (ipow(3, p) >= m) failed.push_back("p < log3 m");
  if (!failed.empty()) {
    std::string msg = "regime assumptions violated:";
    for (const auto& f : failed) msg += " [" + f + "]";
    throw PreconditionViolation(msg);
  }
  RegimeReport r;
  const double pd = static_cast<double>(p);
  r.lhs = std::pow(2.0, pd) * (log3(2.0) + log3(heads) + 2.0 * log3(m) + 2.0 * log3(n));
  r.rhs = std::pow(3.0, pd - 2.0) * log3(BigInt(m - heads));
  r.holds = r.lhs <= r.rhs;
  std::ostringstream a;
  a.precision(17);
  a << "lhs 2^p*log3(2Hm^2n^2) = " << r.lhs;
  std::ostringstream b;
  b.precision(17);
  b << "rhs 3^(p-2)*log3(m-H) = " << r.rhs;
  r.lines = {a.str(), b.str(), r.holds ? "holds" : "fails"};
  return r;
}

// ---------------------------------------------------------------------------
// Curves

struct ClassBoundCurve {
  Family family = Family::Mixer;
  std::uint64_t n = 1, m = 1, heads = 1, degree = 3;
  std::map<std::uint64_t, Bound> upper;
  std::map<std::uint64_t, Bound> lower;
};

inline ClassBoundCurve class_bound_curve(Family family, std::uint64_t n, std::uint64_t m, std::uint64_t heads,
                                         std::uint64_t degree, std::uint64_t p_lo, std::uint64_t p_hi,
                                         std::uint64_t bit_limit = kDefaultExactBitLimit) {
  ClassBoundCurve c{family, n, m, heads, degree, {}, {}};
  for (std::uint64_t p = p_lo; p <= p_hi; ++p) {
    if (family == Family::Mixer) {
      c.upper.emplace(p, mixer_closed_form(p, n, m, heads, bit_limit));
    } else {
      c.upper.emplace(p, transformer_closed_form(p, n, m, heads, degree, bit_limit));
      const auto three_p = detail::checked_pow(3, p);
      if (degree == 3 && heads < m && three_p && *three_p < m) {
        c.lower.emplace(p, transformer_lower_bound(p, m, heads));
      }
    }
  }
  return c;
}

inline std::string trace_id(const Bound& b) {
  std::string joined;
  for (const auto& r : b.provenance) joined += r + ";";
  return fnv1a_hex(joined);
}

inline std::string format_log3(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

/// CSV with header p,family,log3_upper,log3_lower,exact_upper_if_available,rule_trace_id.
inline std::string curve_csv(const ClassBoundCurve& c) {
  std::ostringstream os;
  os << "p,family,log3_upper,log3_lower,exact_upper_if_available,rule_trace_id\n";
  for (const auto& [p, up] : c.upper) {
    os << p << ',' << family_name(c.family) << ',' << format_log3(up.log3) << ',';
    if (auto it = c.lower.find(p); it != c.lower.end()) os << format_log3(it->second.log3);
    os << ',';
    if (up.exact) os << up.exact->str();
    os << ',' << trace_id(up) << '\n';
  }
  return os.str();
}

inline nlohmann::json to_json(const Bound& b) {
  nlohmann::json j;
  j["exact"] = b.exact ? nlohmann::json(b.exact->str()) : nlohmann::json(nullptr);
  j["log3"] = b.log3;
  j["provenance"] = b.provenance;
  return j;
}

}  // namespace srk

#endif  // SRK_BOUNDS_HPP
