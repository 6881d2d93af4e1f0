// srk: separation-rank toolkit command line.
//
//   srk oracle  --spec net.json --seeds 0,1,2
//   srk bound   --family mixer --mode closed --p 1 --n 2 --m 2
//   srk verify  --family mixer --trials 50 --p 1..2 --n 2 --m 2
//   srk plan    --family transformer --budget 59049
//   srk gap     --p 4..30 --m 81
//   srk sweep   [--budgets 32K,64K] [--ratios 0.5,1] [--seeds 0,1]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "srk/srk.hpp"

namespace {

struct Range {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

/// "a..b" or a single value "a" (interpreted as [a, a]).
Range parse_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const auto v = std::stoull(s);
      return {v, v};
    }
    return {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw srk::ParseError("bad range '" + s + "' (expected N or A..B)");
  }
}

/// Accepts a K suffix meaning thousands ("32K" = 32000).
std::uint64_t parse_budget(std::string s) {
  std::uint64_t scale = 1;
  if (!s.empty() && (s.back() == 'K' || s.back() == 'k')) {
    scale = 1000;
    s.pop_back();
  }
  try {
    return std::stoull(s) * scale;
  } catch (const std::exception&) {
    throw srk::ParseError("bad budget '" + s + "'");
  }
}

srk::Family parse_family(const std::string& s) {
  if (s == "mixer") return srk::Family::Mixer;
  if (s == "transformer" || s == "linear_transformer") return srk::Family::LinearTransformer;
  throw srk::ParseError("unknown family '" + s + "'");
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw srk::ParseError("cannot open output file '" + out_path + "'");
  f << text;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw srk::ParseError("cannot read '" + path + "'");
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw srk::ParseError(std::string("invalid JSON in '") + path + "': " + e.what());
  }
}

int exit_code_for(const srk::Error& e) {
  const auto& k = e.kind();
  if (k == "CapExceeded" || k == "OddUniverse" || k == "DegreeCapExceeded") return 3;
  if (k == "RegimeViolation") return 4;
  return 2;
}

void report_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

struct Common {
  std::string out;
  std::string format = "json";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separation-rank toolkit: exact oracle, certified bounds, depth/width planner"};
  app.require_subcommand(1);

  // oracle -------------------------------------------------------------------
  Common oracle_opts;
  std::string oracle_spec;
  std::vector<std::uint64_t> oracle_seeds{0};
  std::string inf_mode = "min_of_min";
  auto* oracle = app.add_subcommand("oracle", "Exact separation-rank profile of a network spec");
  oracle->add_option("--spec", oracle_spec, "ArchSpec JSON file")->required();
  oracle->add_option("--seeds", oracle_seeds, "Weight seeds")->delimiter(',');
  oracle->add_option("--inf-mode", inf_mode, "inf-sep aggregation")
      ->check(CLI::IsMember({"min_of_min", "min_of_max"}));
  oracle->add_option("--out", oracle_opts.out, "Output path (default stdout)");

  // bound --------------------------------------------------------------------
  Common bound_opts;
  std::string bound_spec, bound_family = "mixer", bound_mode = "closed", bound_p = "1";
  std::uint64_t bound_n = 2, bound_m = 2, bound_heads = 1, bound_degree = 3;
  std::optional<double> bound_a;
  auto* bound = app.add_subcommand("bound", "Certified separation-rank bounds");
  bound->add_option("--spec", bound_spec, "ArchSpec JSON file (propagate/closed)");
  bound->add_option("--family", bound_family, "mixer | transformer");
  bound->add_option("--mode", bound_mode, "propagate | closed | lower")
      ->check(CLI::IsMember({"propagate", "closed", "lower"}));
  bound->add_option("--p", bound_p, "Depth, or A..B for a curve");
  bound->add_option("--n", bound_n, "Rows of X");
  bound->add_option("--m", bound_m, "Columns of X");
  bound->add_option("--heads", bound_heads, "Attention heads H");
  bound->add_option("--degree", bound_degree, "Attention degree d");
  bound->add_option("--a", bound_a, "Override of the lower-bound additive constant");
  bound->add_option("--format", bound_opts.format)->check(CLI::IsMember({"json", "csv"}));
  bound->add_option("--out", bound_opts.out);

  // verify -------------------------------------------------------------------
  Common verify_opts;
  std::string verify_family = "mixer", verify_p = "1..2", verify_n = "2", verify_m = "2";
  std::size_t verify_trials = 0, verify_heads = 1, verify_degree = 3;
  std::uint64_t verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "Randomized oracle <= propagated <= closed-form check");
  verify->add_option("--family", verify_family, "mixer | transformer");
  verify->add_option("--trials", verify_trials, "Number of random specs");
  verify->add_option("--p", verify_p, "Depth range A..B");
  verify->add_option("--n", verify_n, "Row range A..B");
  verify->add_option("--m", verify_m, "Column range A..B");
  verify->add_option("--heads", verify_heads, "Maximum heads");
  verify->add_option("--degree", verify_degree, "Attention degree");
  verify->add_option("--seeds", verify_seed, "Generator seed");
  verify->add_option("--out", verify_opts.out);

  // plan ---------------------------------------------------------------------
  Common plan_opts;
  std::string plan_family = "transformer";
  std::string plan_budget = "59049";
  std::optional<double> plan_alpha;
  double plan_constant = 1.0;
  auto* plan = app.add_subcommand("plan", "Optimal depth/width under a p*d^2 budget");
  plan->add_option("--family", plan_family, "transformer | mixer");
  plan->add_option("--budget", plan_budget, "Parameter budget B");
  plan->add_option("--alpha", plan_alpha, "Exponent base (default 3 transformer, 2 mixer)");
  plan->add_option("--budget-constant", plan_constant, "C in |Theta| = C p d^2");
  plan->add_option("--out", plan_opts.out);

  // gap ----------------------------------------------------------------------
  Common gap_opts;
  gap_opts.format = "csv";
  std::string gap_p = "4..30";
  double gap_m = 81;
  auto* gap = app.add_subcommand("gap", "Mixer-vs-transformer log-bound gap curve");
  gap->add_option("--p", gap_p, "Depth range A..B (A >= 4)");
  gap->add_option("--m", gap_m, "Width m");
  gap->add_option("--format", gap_opts.format)->check(CLI::IsMember({"json", "csv"}));
  gap->add_option("--out", gap_opts.out);

  // sweep --------------------------------------------------------------------
  Common sweep_opts;
  std::vector<std::string> sweep_budgets;
  std::vector<double> sweep_ratios = srk::default_sweep_ratios();
  std::vector<std::uint64_t> sweep_seeds = srk::default_sweep_seeds();
  std::uint64_t sweep_pmax = srk::kDefaultMaxDepth;
  auto* sweep = app.add_subcommand("sweep", "Depth-to-width experiment grid for the training harness");
  sweep->add_option("--budgets", sweep_budgets, "Budgets, e.g. 32K,64K")->delimiter(',');
  sweep->add_option("--ratios", sweep_ratios, "Target ratios R")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "Training seeds")->delimiter(',');
  sweep->add_option("--p-max", sweep_pmax, "Depth search limit");
  sweep->add_option("--out", sweep_opts.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("UsageError", e.what());
    return 2;
  }

  try {
    if (*oracle) {
      srk::ArchSpec spec = srk::arch_from_json(read_json_file(oracle_spec));
      srk::OracleConfig cfg;
      cfg.inf_mode = inf_mode == "min_of_max" ? srk::InfSepMode::MinOfMax : srk::InfSepMode::MinOfMin;
      emit(oracle_opts.out, srk::run_oracle(spec, oracle_seeds, cfg).dump(2) + "\n");
      return 0;
    }

    if (*bound) {
      const srk::Family family =
          bound_spec.empty() ? parse_family(bound_family) : srk::Family::Mixer;  // overwritten below
      std::vector<std::pair<std::uint64_t, srk::Bound>> rows;
      std::string family_label;
      if (!bound_spec.empty()) {
        if (bound_mode == "lower") throw srk::ParseError("--mode lower takes --family/--p/--m, not --spec");
        const srk::ArchSpec spec = srk::arch_from_json(read_json_file(bound_spec));
        family_label = srk::family_name(spec.family);
        rows.emplace_back(spec.p, bound_mode == "propagate" ? srk::propagate_bound(spec) : srk::closed_form(spec));
      } else {
        family_label = srk::family_name(family);
        const Range pr = parse_range(bound_p);
        for (std::uint64_t p = pr.lo; p <= pr.hi; ++p) {
          if (bound_mode == "lower") {
            if (family != srk::Family::LinearTransformer) throw srk::ParseError("--mode lower is transformer-only");
            rows.emplace_back(p, srk::transformer_lower_bound(p, bound_m, bound_heads, bound_a));
          } else if (bound_mode == "closed") {
            rows.emplace_back(p, family == srk::Family::Mixer
                                     ? srk::mixer_closed_form(p, bound_n, bound_m, bound_heads)
                                     : srk::transformer_closed_form(p, bound_n, bound_m, bound_heads, bound_degree));
          } else {
            const srk::ArchSpec spec = family == srk::Family::Mixer
                                           ? srk::build_mixer(p, bound_n, bound_m)
                                           : srk::build_linear_transformer(p, bound_n, bound_m, bound_heads,
                                                                           bound_degree);
            rows.emplace_back(p, srk::propagate_bound(spec));
          }
        }
      }
      if (bound_opts.format == "csv") {
        std::ostringstream os;
        os << "p,family,log3_upper,log3_lower,exact_upper_if_available,rule_trace_id\n";
        for (const auto& [p, b] : rows) {
          const bool lower = bound_mode == "lower";
          os << p << ',' << family_label << ',' << (lower ? "" : srk::format_log3(b.log3)) << ','
             << (lower ? srk::format_log3(b.log3) : "") << ',' << (!lower && b.exact ? b.exact->str() : "") << ','
             << srk::trace_id(b) << '\n';
        }
        emit(bound_opts.out, os.str());
      } else {
        nlohmann::json out;
        if (rows.size() == 1) {
          out = srk::to_json(rows.front().second);
          out["p"] = rows.front().first;
        } else {
          out = nlohmann::json::array();
          for (const auto& [p, b] : rows) {
            auto j = srk::to_json(b);
            j["p"] = p;
            out.push_back(std::move(j));
          }
        }
        nlohmann::json wrapped{{"family", family_label}, {"mode", bound_mode}, {"bounds", out}};
        emit(bound_opts.out, wrapped.dump(2) + "\n");
      }
      return 0;
    }

    if (*verify) {
      srk::VerifyConfig cfg;
      cfg.trials = verify_trials;
      cfg.family = parse_family(verify_family);
      const Range pr = parse_range(verify_p);
      const Range nr = parse_range(verify_n);
      const Range mr = parse_range(verify_m);
      cfg.p_min = pr.lo;
      cfg.p_max = pr.hi;
      cfg.n_min = nr.lo;
      cfg.n_max = nr.hi;
      cfg.m_min = mr.lo;
      cfg.m_max = mr.hi;
      cfg.heads_max = verify_heads;
      cfg.degree = verify_degree;
      cfg.seed = verify_seed;
      const auto report = srk::run_verify(cfg);
      auto j = srk::to_json(report);
      j["summary"]["generator_seed"] = verify_seed;
      emit(verify_opts.out, j.dump(2) + "\n");
      return report.failures == 0 ? 0 : 1;
    }

    if (*plan) {
      const auto family = srk::parse_plan_family(plan_family);
      const double alpha = plan_alpha.value_or(srk::default_alpha(family));
      const srk::BudgetLaw law{plan_constant};
      const auto d = static_cast<std::uint64_t>(law.depth_width_budget(static_cast<double>(parse_budget(plan_budget))));
      const auto result = srk::grid_search_optimum(d, alpha);
      auto j = srk::to_json(result, family, alpha);
      j["budget_D"] = d;
      emit(plan_opts.out, j.dump(2) + "\n");
      return 0;
    }

    if (*gap) {
      const Range pr = parse_range(gap_p);
      std::ostringstream os;
      os.precision(12);
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      os << "p,log3_mixer_upper,log3_transformer_lower,ratio,ratio_exact,quotient\n";
      for (std::uint64_t p = pr.lo; p <= pr.hi; ++p) {
        const double ratio = srk::gap_ratio(p, gap_m);
        const srk::Rational exact = srk::gap_ratio_exact(p);
        std::string quotient;
        if (p > pr.lo) quotient = srk::to_string(exact / srk::gap_ratio_exact(p - 1));
        os << p << ',' << srk::gap_mixer_upper_log3(p, gap_m) << ',' << srk::gap_transformer_lower_log3(p, gap_m)
           << ',' << ratio << ',' << srk::to_string(exact) << ',' << quotient << '\n';
        rows.push_back({{"p", p},
                        {"log3_mixer_upper", srk::gap_mixer_upper_log3(p, gap_m)},
                        {"log3_transformer_lower", srk::gap_transformer_lower_log3(p, gap_m)},
                        {"ratio", ratio},
                        {"ratio_exact", srk::to_string(exact)},
                        {"quotient", quotient}});
      }
      emit(gap_opts.out, gap_opts.format == "csv" ? os.str() : rows.dump(2) + "\n");
      return 0;
    }

    if (*sweep) {
      std::vector<std::uint64_t> budgets;
      for (const auto& b : sweep_budgets) budgets.push_back(parse_budget(b));
      if (budgets.empty()) budgets = srk::default_sweep_budgets();
      const auto cfg = srk::make_sweep_config(budgets, sweep_ratios, sweep_seeds, {}, sweep_pmax);
      emit(sweep_opts.out, srk::to_json(cfg).dump(2) + "\n");
      return 0;
    }
  } catch (const srk::Error& e) {
    report_error(e.kind(), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return 2;
  }
  return 0;
}
