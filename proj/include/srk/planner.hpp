#ifndef SRK_PLANNER_HPP
#define SRK_PLANNER_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srk/error.hpp"

namespace srk {

enum class PlanFamily { Transformer, Mixer };

inline double default_alpha(PlanFamily f) { return f == PlanFamily::Transformer ? 3.0 : 2.0; }

inline std::string plan_family_name(PlanFamily f) { return f == PlanFamily::Transformer ? "transformer" : "mixer"; }

inline PlanFamily parse_plan_family(const std::string& s) {
  if (s == "transformer" || s == "linear_transformer") return PlanFamily::Transformer;
  if (s == "mixer") return PlanFamily::Mixer;
  throw ParseError("unknown family '" + s + "'");
}

/// Budget law |Theta| = C * p * d^2, so p * d^2 = D with D = B / C.
struct BudgetLaw {
  double constant = 1.0;
  double depth_width_budget(double budget) const {
    if (!(constant > 0.0) || !(budget > 0.0)) throw PreconditionViolation("budget law needs C > 0 and B > 0");
    return budget / constant;
  }
};

/// True iff p <= log_alpha d, i.e. alpha^p <= d. Integral bases compare
/// exactly so boundary cases such as (p=3, d=27, alpha=3) are not lost to
/// rounding.
inline bool in_depth_efficient_regime(std::uint64_t p, std::uint64_t d, double alpha) {
  const double rounded = std::round(alpha);
  if (rounded == alpha && alpha >= 2.0) {
    const auto base = static_cast<std::uint64_t>(alpha);
    std::uint64_t power = 1;
    for (std::uint64_t i = 0; i < p; ++i) {
      if (power > d / base) return false;
      power *= base;
    }
    return power <= d;
  }
  return static_cast<double>(p) * std::log(alpha) <= std::log(static_cast<double>(d)) * (1.0 + 1e-12);
}

/// Expressivity proxy: alpha^p * log_alpha d while p <= log_alpha d, and
/// d * log_alpha d beyond it.
inline double piecewise_objective(std::uint64_t p, std::uint64_t d, double alpha) {
  if (p < 1 || d < 1) throw PreconditionViolation("objective needs p, d >= 1");
  if (!(alpha > 1.0)) throw PreconditionViolation("objective needs alpha > 1");
  const double log_d = std::log(static_cast<double>(d)) / std::log(alpha);
  if (in_depth_efficient_regime(p, d, alpha)) return std::pow(alpha, static_cast<double>(p)) * log_d;
  return static_cast<double>(d) * log_d;
}

inline double piecewise_objective(PlanFamily family, std::uint64_t p, std::uint64_t d) {
  return piecewise_objective(p, d, default_alpha(family));
}

enum class Regime { DepthEfficient, Saturated };

struct PlanResult {
  std::uint64_t p_star = 0;
  std::uint64_t d_star = 0;
  double objective_value = 0;
  Regime regime = Regime::DepthEfficient;
  double ratio_log2 = 0;  // p / log2 d
  double ratio_log3 = 0;  // p / log3 d
};

inline std::uint64_t isqrt(std::uint64_t x) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

/// Maximizes the objective over integer (p, d) with p * d^2 <= D. For fixed
/// p the objective increases with d, so only the widest feasible d per depth
/// is evaluated. Ties keep the smaller p, then the smaller d.
inline PlanResult grid_search_optimum(std::uint64_t budget_d, double alpha) {
  if (budget_d < 4) throw PreconditionViolation("grid search needs D >= 4");
  PlanResult best;
  bool have = false;
  for (std::uint64_t p = 1; p * 4 <= budget_d; ++p) {
    const std::uint64_t d = isqrt(budget_d / p);
    const double v = piecewise_objective(p, d, alpha);
    if (!have || v > best.objective_value) {
      best.p_star = p;
      best.d_star = d;
      best.objective_value = v;
      have = true;
    }
  }
  best.regime = in_depth_efficient_regime(best.p_star, best.d_star, alpha) ? Regime::DepthEfficient
                                                                           : Regime::Saturated;
  const double pd = static_cast<double>(best.p_star);
  best.ratio_log2 = pd / std::log2(static_cast<double>(best.d_star));
  best.ratio_log3 = pd * std::log(3.0) / std::log(static_cast<double>(best.d_star));
  return best;
}

inline PlanResult grid_search_optimum(PlanFamily family, std::uint64_t budget_d) {
  return grid_search_optimum(budget_d, default_alpha(family));
}

/// Parameter count as a function of depth and (real) width. Empty means the
/// idealized p * d^2 law.
using CountLaw = std::function<double(std::uint64_t p, double d)>;

inline std::uint64_t round_half_up(double x) { return static_cast<std::uint64_t>(std::floor(x + 0.5)); }

/// Rounded width for depth p under budget B: the real d solving
/// count(p, d) = B, rounded half-up.
inline std::uint64_t rounded_width(std::uint64_t p, double budget, const CountLaw& law = {}) {
  if (!law) return round_half_up(std::sqrt(budget / static_cast<double>(p)));
  double lo = 0.0;
  double hi = 1.0;
  while (law(p, hi) < budget && hi < 1e15) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (law(p, mid) < budget ? lo : hi) = mid;
  }
  return round_half_up(0.5 * (lo + hi));
}

struct DepthChoice {
  std::uint64_t p = 0;
  std::uint64_t d = 0;
  double ratio = 0;  // p / log2 d
};

inline constexpr std::uint64_t kDefaultMaxDepth = 64;

/// Smallest depth p whose rounded width gives p / log2 d(p, B) > R.
inline DepthChoice depth_selection(double budget, double ratio, const CountLaw& law = {},
                                   std::uint64_t p_max = kDefaultMaxDepth) {
  for (std::uint64_t p = 1; p <= p_max; ++p) {
    const std::uint64_t d = rounded_width(p, budget, law);
    if (d < 2) continue;
    const double r = static_cast<double>(p) / std::log2(static_cast<double>(d));
    if (r > ratio) return {p, d, r};
  }
  throw NoFeasibleDepth("no depth up to " + std::to_string(p_max) + " reaches p/log2(d) > " + std::to_string(ratio));
}

struct SweepCell {
  std::uint64_t budget = 0;
  double ratio = 0;
  std::uint64_t seed = 0;
  std::uint64_t p = 0;
  std::uint64_t d = 0;
};

struct SweepConfig {
  std::vector<std::uint64_t> budgets;
  std::vector<double> ratios;
  std::vector<std::uint64_t> seeds;
  std::vector<SweepCell> cells;
};

inline std::vector<std::uint64_t> default_sweep_budgets() { return {32000, 64000, 128000, 256000}; }
inline std::vector<double> default_sweep_ratios() { return {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}; }
inline std::vector<std::uint64_t> default_sweep_seeds() { return {0, 1, 2, 3, 4, 5}; }

/// Cross product budgets x ratios x seeds (in that nesting order), each cell
/// sized by depth_selection.
inline SweepConfig make_sweep_config(const std::vector<std::uint64_t>& budgets, const std::vector<double>& ratios,
                                     const std::vector<std::uint64_t>& seeds, const CountLaw& law = {},
                                     std::uint64_t p_max = kDefaultMaxDepth) {
  if (budgets.empty() || ratios.empty() || seeds.empty()) {
    throw PreconditionViolation("sweep needs nonempty budgets, ratios and seeds");
  }
  SweepConfig cfg{budgets, ratios, seeds, {}};
  for (auto b : budgets) {
    for (double r : ratios) {
      const DepthChoice choice = depth_selection(static_cast<double>(b), r, law, p_max);
      for (auto s : seeds) cfg.cells.push_back({b, r, s, choice.p, choice.d});
    }
  }
  return cfg;
}

inline nlohmann::ordered_json sweep_hyperparameters() {
  nlohmann::ordered_json h;
  h["optimizer"] = "adam";
  h["lr"] = 1e-3;
  h["weight_decay"] = 5e-5;
  h["betas"] = {0.9, 0.999};
  h["batch_size"] = 128;
  h["epochs"] = 40;
  h["patch"] = {4, 4};
  h["dropout"] = 0.5;
  h["augment"] = {"random_crop", "normalize"};
  return h;
}

inline nlohmann::ordered_json to_json(const SweepConfig& cfg) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& c : cfg.cells) {
    nlohmann::ordered_json cell;
    cell["budget"] = c.budget;
    cell["ratio"] = c.ratio;
    cell["seed"] = c.seed;
    cell["p"] = c.p;
    cell["d"] = c.d;
    cells.push_back(std::move(cell));
  }
  nlohmann::ordered_json j;
  j["cells"] = std::move(cells);
  j["hyperparameters"] = sweep_hyperparameters();
  return j;
}

inline nlohmann::ordered_json to_json(const PlanResult& r, PlanFamily family, double alpha) {
  nlohmann::ordered_json j;
  j["family"] = plan_family_name(family);
  j["alpha"] = alpha;
  j["p_star"] = r.p_star;
  j["d_star"] = r.d_star;
  j["objective_value"] = r.objective_value;
  j["regime"] = r.regime == Regime::DepthEfficient ? "depth_efficient" : "saturated";
  j["ratio_log2"] = r.ratio_log2;
  j["ratio_log3"] = r.ratio_log3;
  return j;
}

// ---------------------------------------------------------------------------
// Dominance

/// A curve sampled at integer depths, stored as log3 values so that double
/// exponential quantities stay finite.
struct LogCurve {
  std::vector<std::uint64_t> p;
  std::vector<double> log3_value;
};

struct DominanceVerdict {
  bool dominated = false;
  bool eventually_increasing = false;
  bool bounded_below = false;
  double slope = 0;     // least-squares slope of log3(ratio / f) in p
  double constant = 0;  // min over the range of ratio / f
};

inline constexpr std::size_t kMinDominancePoints = 8;

/// Numerical Omega check: ratio(p) = lb(p)/ub(p) must increase strictly over
/// the second half of the range, and ratio/f must show no downward trend
/// (least-squares slope of its log3 >= -slope_tol per unit depth).
inline DominanceVerdict check_dominance(const LogCurve& lb, const LogCurve& ub,
                                        const std::function<double(double)>& growth_log3,
                                        double slope_tol = 1e-9) {
  if (lb.p != ub.p || lb.p.size() != lb.log3_value.size() || ub.p.size() != ub.log3_value.size()) {
    throw InsufficientRange("curves must share the same depth grid");
  }
  const std::size_t n = lb.p.size();
  if (n < kMinDominancePoints) {
    throw InsufficientRange("dominance check needs at least " + std::to_string(kMinDominancePoints) + " points");
  }
  std::vector<double> log_ratio(n);
  std::vector<double> log_q(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_ratio[i] = lb.log3_value[i] - ub.log3_value[i];
    log_q[i] = log_ratio[i] - growth_log3(static_cast<double>(lb.p[i]));
  }

  DominanceVerdict v;
  v.eventually_increasing = true;
  for (std::size_t i = n / 2; i + 1 < n; ++i) {
    if (!(log_ratio[i + 1] > log_ratio[i])) v.eventually_increasing = false;
  }

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += static_cast<double>(lb.p[i]);
    my += log_q[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  double min_q = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(lb.p[i]) - mx;
    sxy += dx * (log_q[i] - my);
    sxx += dx * dx;
    min_q = std::min(min_q, log_q[i]);
    finite = finite && std::isfinite(log_q[i]);
  }
  v.slope = sxx > 0 ? sxy / sxx : 0.0;
  v.constant = std::pow(3.0, min_q);
  v.bounded_below = finite && v.slope >= -slope_tol;
  v.dominated = v.eventually_increasing && v.bounded_below;
  return v;
}

struct DepthScalingThreshold {
  double value = std::log2(3.0);  // log2 3 = 1.58496...
  double quoted = 1.584;          // as usually quoted
};

/// Depth multiplier alpha below which the exponential gap survives.
inline DepthScalingThreshold depth_scaling_threshold() { return {}; }

/// Base of the surviving gap, 3 / 2^alpha; exceeds 1 iff alpha < log2 3.
inline double dominance_base(double alpha) { return 3.0 / std::pow(2.0, alpha); }

}  // namespace srk

#endif  // SRK_PLANNER_HPP
