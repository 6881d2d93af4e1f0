#ifndef SRK_VERIFY_HPP
#define SRK_VERIFY_HPP

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <set>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "srk/arch.hpp"
#include "srk/bounds.hpp"
#include "srk/seprank.hpp"

namespace srk {

/// Runs `fn(i)` for i in [0, count) on a small thread pool. Results are
/// written by index, so output order does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < count; i = next++) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Checks that the oracle can run on this spec: even universe under the
/// partition cap and output degree under the degree cap.
inline void check_oracle_caps(const ArchSpec& spec, std::size_t partition_cap, std::size_t degree_cap) {
  const std::size_t universe = spec.n * spec.m;
  if (universe % 2 != 0) throw OddUniverse("input has an odd number of variables (" + std::to_string(universe) + ")");
  if (universe > partition_cap) {
    throw CapExceeded("input has " + std::to_string(universe) + " variables, partition cap is " +
                      std::to_string(partition_cap));
  }
  if (degree_bound(spec) > degree_cap) {
    throw DegreeCapExceeded("output degree bound " + std::to_string(degree_bound(spec)) + " exceeds cap " +
                            std::to_string(degree_cap));
  }
}

/// Per-seed oracle profiles plus the max-over-seeds aggregate, which is a
/// lower bound on the generic separation rank.
inline nlohmann::json run_oracle(const ArchSpec& spec, const std::vector<std::uint64_t>& seeds,
                                 const OracleConfig& cfg = {}, std::size_t degree_cap = default_degree_cap()) {
  check_oracle_caps(spec, cfg.partition_cap, degree_cap);
  std::vector<SepProfile> profiles(seeds.size());
  std::vector<WeightAssignment> weights(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    weights[i] = sample_weights(spec, seeds[i]);
    profiles[i] = sep_profile(symbolic_forward(spec, weights[i], degree_cap), spec.n * spec.m, cfg);
  });
  nlohmann::json per_seed = nlohmann::json::array();
  std::size_t sup = 0;
  std::size_t inf = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    per_seed.push_back({{"seed", seeds[i]}, {"weights", to_json(weights[i])}, {"profile", to_json(profiles[i])}});
    sup = std::max(sup, profiles[i].sup_sep);
    inf = std::max(inf, profiles[i].inf_sep);
  }
  return {{"spec", to_json(spec)},
          {"spec_digest", spec_digest(spec)},
          {"inf_sep_mode", cfg.inf_mode == InfSepMode::MinOfMin ? "min_of_min" : "min_of_max"},
          {"seeds", std::move(per_seed)},
          {"aggregate", {{"sup_sep", sup}, {"inf_sep", inf}}}};
}

struct VerifyConfig {
  std::size_t trials = 0;
  Family family = Family::Mixer;
  std::size_t p_min = 1, p_max = 1;
  std::size_t n_min = 2, n_max = 2;
  std::size_t m_min = 2, m_max = 2;
  std::size_t heads_max = 1;
  std::size_t degree = 3;
  std::uint64_t seed = 0;
  OracleConfig oracle{};
  std::size_t degree_cap = default_degree_cap();
};

struct VerifyRecord {
  std::string spec_digest;
  ArchSpec spec;
  std::uint64_t weight_seed = 0;
  std::size_t oracle_sup = 0;
  std::size_t oracle_inf = 0;
  Bound propagated;
  Bound closed;
  bool sandwich_ok = false;
};

struct VerifyReport {
  std::vector<VerifyRecord> records;
  std::size_t failures = 0;
};

/// a <= b on bounds, exactly when both are exact, else in log3 with a
/// relative slack of 1e-9.
inline bool bound_le(const Bound& a, const Bound& b) {
  if (a.exact && b.exact) return *a.exact <= *b.exact;
  return a.log3 <= b.log3 + 1e-9 * std::max(1.0, std::abs(b.log3));
}

inline bool oracle_le(std::size_t oracle, const Bound& b) {
  if (b.exact) return BigInt(oracle) <= *b.exact;
  return oracle == 0 || log3(static_cast<double>(oracle)) <= b.log3 + 1e-9;
}

namespace detail {

inline std::vector<std::size_t> random_permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
  return perm;
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

inline ArchSpec random_spec(std::mt19937_64& rng, const VerifyConfig& cfg) {
  std::size_t n = 0, m = 0;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    n = uniform(rng, cfg.n_min, cfg.n_max);
    m = uniform(rng, cfg.m_min, cfg.m_max);
    if ((n * m) % 2 == 0) break;
  }
  if ((n * m) % 2 != 0) throw PreconditionViolation("shape range has no even-sized input");
  const std::size_t p = uniform(rng, cfg.p_min, cfg.p_max);
  std::set<std::size_t> residual;
  for (std::size_t k = 1; k <= p; ++k) {
    if (rng() % 2) residual.insert(k);
  }
  ArchSpec spec;
  if (cfg.family == Family::Mixer) {
    std::map<std::size_t, MixerPermutations> perms;
    for (std::size_t k = 1; k <= p; ++k) {
      MixerPermutations mp;
      if (rng() % 2) mp.pi_e = random_permutation(rng, n * m);
      if (rng() % 2) mp.pi_o = random_permutation(rng, n * m);
      if (rng() % 2) mp.pi_r = random_permutation(rng, n * m);
      if (mp != MixerPermutations{}) perms.emplace(k, std::move(mp));
    }
    spec = build_mixer(p, n, m, residual, perms);
  } else {
    const std::size_t heads = uniform(rng, 1, cfg.heads_max);
    std::vector<std::vector<std::size_t>> sets(heads);
    for (auto& set : sets) {
      const std::uint64_t mask = 1 + rng() % ((std::uint64_t{1} << cfg.degree) - 1);
      for (std::size_t j = 1; j <= cfg.degree; ++j) {
        if (mask & (std::uint64_t{1} << (j - 1))) set.push_back(j);
      }
    }
    spec = build_linear_transformer(p, n, m, heads, cfg.degree, std::move(sets), residual);
  }
  spec.seed = rng();
  return spec;
}

}  // namespace detail

/// Randomized sandwich check: oracle sup-sep <= propagated bound <= closed
/// form, over `trials` generated specs.
inline VerifyReport run_verify(const VerifyConfig& cfg) {
  if (cfg.p_min < 1 || cfg.p_min > cfg.p_max || cfg.n_min < 1 || cfg.n_min > cfg.n_max || cfg.m_min < 1 ||
      cfg.m_min > cfg.m_max || cfg.heads_max < 1) {
    throw PreconditionViolation("invalid verify ranges");
  }
  std::mt19937_64 rng(cfg.seed);
  VerifyReport report;
  report.records.resize(cfg.trials);
  for (auto& rec : report.records) {
    rec.spec = detail::random_spec(rng, cfg);
    rec.weight_seed = rec.spec.seed;
    check_oracle_caps(rec.spec, cfg.oracle.partition_cap, cfg.degree_cap);
  }
  parallel_for(report.records.size(), [&](std::size_t i) {
    auto& rec = report.records[i];
    rec.spec_digest = spec_digest(rec.spec);
    const auto w = sample_weights(rec.spec, rec.weight_seed);
    const auto profile = sep_profile(symbolic_forward(rec.spec, w, cfg.degree_cap), rec.spec.n * rec.spec.m,
                                     cfg.oracle);
    rec.oracle_sup = profile.sup_sep;
    rec.oracle_inf = profile.inf_sep;
    rec.propagated = propagate_bound(rec.spec);
    rec.closed = closed_form(rec.spec);
    rec.sandwich_ok = oracle_le(rec.oracle_sup, rec.propagated) && bound_le(rec.propagated, rec.closed);
  });
  report.failures = static_cast<std::size_t>(
      std::count_if(report.records.begin(), report.records.end(), [](const auto& r) { return !r.sandwich_ok; }));
  return report;
}

inline nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& rec : r.records) {
    recs.push_back({{"spec_digest", rec.spec_digest},
                    {"spec", to_json(rec.spec)},
                    {"seed", rec.weight_seed},
                    {"oracle_sup_sep", rec.oracle_sup},
                    {"oracle_inf_sep", rec.oracle_inf},
                    {"propagated", to_json(rec.propagated)},
                    {"closed_form", to_json(rec.closed)},
                    {"sandwich_ok", rec.sandwich_ok}});
  }
  return {{"records", std::move(recs)},
          {"summary", {{"trials", r.records.size()}, {"failures", r.failures}}}};
}

}  // namespace srk

#endif  // SRK_VERIFY_HPP
