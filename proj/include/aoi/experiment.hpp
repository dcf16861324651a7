#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoi/constrained.hpp"
#include "aoi/sim.hpp"

namespace aoi {

inline constexpr int kSchemaVersion = 1;

struct ExperimentSpec {
  std::vector<double> p{0.3};
  std::vector<double> gamma{0.3};
  std::vector<double> gamma_max{0.3};
  int delta_max = 1000;
  int l_max = 10;
  double span_tol = 1e-6;
  int max_iters = 100000;
  double epsilon_lambda = 0.01;
  long long horizon = 10000;
  int trials = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool trace = false;

  ModelParams model_params(double pv, double gv, double gmax) const {
    ModelParams mp;
    mp.p = pv;
    mp.gamma = gv;
    mp.gamma_max = gmax;
    mp.delta_max = delta_max;
    mp.l_max = l_max;
    mp.validate();
    return mp;
  }

  RviConfig rvi_config() const {
    RviConfig cfg;
    cfg.span_tol = span_tol;
    cfg.max_iters = max_iters;
    return cfg;
  }

  SimConfig sim_config(const ModelParams& mp) const {
    SimConfig cfg;
    cfg.horizon = horizon;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.params = mp;
    return cfg;
  }

  void validate() const {
    for (double pv : p)
      for (double gv : gamma)
        for (double gm : gamma_max) model_params(pv, gv, gm);
    rvi_config().validate();
    if (horizon < 1 || trials < 1)
      throw std::invalid_argument("ExperimentSpec: horizon and trials must be >= 1");
    if (!(epsilon_lambda > 0.0))
      throw std::invalid_argument("ExperimentSpec: epsilon_lambda must be > 0");
  }
};

namespace detail {

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list value: '" + text + "'");
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline std::string grid_tag(double p, double gamma, double gamma_max) {
  return "p" + num(p) + "_g" + num(gamma) + "_G" + num(gamma_max);
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (!path.parent_path().empty())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << std::setprecision(17);
  return out;
}

} // namespace detail

/// Flat key = value configuration file; '#' starts a comment. Keys p, gamma
/// and gamma_max accept comma-separated lists.
inline ExperimentSpec parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  ExperimentSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "p") spec.p = detail::parse_list(value);
    else if (key == "gamma") spec.gamma = detail::parse_list(value);
    else if (key == "gamma_max") spec.gamma_max = detail::parse_list(value);
    else if (key == "delta_max") spec.delta_max = std::stoi(value);
    else if (key == "l_max") spec.l_max = std::stoi(value);
    else if (key == "span_tol") spec.span_tol = std::stod(value);
    else if (key == "max_iters") spec.max_iters = std::stoi(value);
    else if (key == "epsilon_lambda") spec.epsilon_lambda = std::stod(value);
    else if (key == "horizon") spec.horizon = std::stoll(value);
    else if (key == "trials") spec.trials = std::stoi(value);
    else if (key == "seed") spec.seed = std::stoull(value);
    else if (key == "out") spec.out_dir = value;
    else if (key == "trace") spec.trace = (value == "1" || value == "true");
    else
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
  }
  return spec;
}

namespace detail {

inline void write_policy_map(const std::filesystem::path& path,
                             const DeterministicPolicy& policy,
                             const StateSpace& space) {
  auto out = open_out(path);
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "delta,l,b,action\n";
  for (int s = 0; s < space.size(); ++s) {
    const State& st = space.state(s);
    out << st.delta << ',' << st.l << ',' << st.b << ','
        << action_id(policy.at(s)) << "\n";
  }
}

inline void write_boundary(const std::filesystem::path& path,
                           const ThresholdBoundary& boundary) {
  auto out = open_out(path);
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "l,b,delta_star\n";
  for (const auto& e : boundary.entries) {
    out << e.l << ',' << e.b << ',';
    if (e.delta_star == ThresholdBoundary::kNever)
      out << "never";
    else
      out << e.delta_star;
    out << "\n";
  }
}

inline nlohmann::json summary_json(const ExperimentSpec& spec, const ModelParams& mp,
                                   const MixturePolicy& mix, const Kernel& kernel) {
  const auto [expected_aoi, expected_tx] = mixture_targets(mix, mp.gamma_max);
  return nlohmann::json{
      {"schema_version", kSchemaVersion},
      {"p", mp.p},
      {"gamma", mp.gamma},
      {"gamma_max", mp.gamma_max},
      {"delta_max", mp.delta_max},
      {"l_max", mp.l_max},
      {"epsilon_lambda", spec.epsilon_lambda},
      {"lambda1", mix.lambda1},
      {"lambda2", mix.lambda2},
      {"mu", mix.mu},
      {"C1", mix.eval1.avg_aoi},
      {"C2", mix.eval2.avg_aoi},
      {"D1", mix.eval1.avg_tx},
      {"D2", mix.eval2.avg_tx},
      {"expected_aoi", expected_aoi},
      {"expected_tx", expected_tx},
      {"p_fresh_given_generated", fresh_tx_given_generated(mix, kernel)},
  };
}

template <typename Fn>
inline int for_grid(const ExperimentSpec& spec, Fn&& fn) {
  int count = 0;
  for (double pv : spec.p)
    for (double gv : spec.gamma)
      for (double gm : spec.gamma_max) {
        fn(spec.model_params(pv, gv, gm));
        ++count;
      }
  return count;
}

} // namespace detail

/// solve pipeline: per grid point, the two deterministic policies as policy
/// maps, their threshold boundaries, and a JSON summary of the mixture.
inline int run_solve(const ExperimentSpec& spec) {
  spec.validate();
  const std::filesystem::path dir(spec.out_dir);
  return detail::for_grid(spec, [&](const ModelParams& mp) {
    const std::string tag = detail::grid_tag(mp.p, mp.gamma, mp.gamma_max);
    try {
      const Kernel kernel = build_kernel(mp);
      const MixturePolicy mix = solve_cmdp(mp, spec.epsilon_lambda, spec.rvi_config());
      detail::write_policy_map(dir / ("policy1_" + tag + ".csv"), mix.pi1,
                               kernel.space());
      detail::write_policy_map(dir / ("policy2_" + tag + ".csv"), mix.pi2,
                               kernel.space());
      detail::write_boundary(dir / ("boundary1_" + tag + ".csv"),
                             extract_boundary(mix.pi1, kernel.space()));
      detail::write_boundary(dir / ("boundary2_" + tag + ".csv"),
                             extract_boundary(mix.pi2, kernel.space()));
      auto out = detail::open_out(dir / ("summary_" + tag + ".json"));
      out << detail::summary_json(spec, mp, mix, kernel).dump(2) << "\n";
    } catch (const std::exception& e) {
      throw std::runtime_error("grid point " + tag + ": " + e.what());
    }
  });
}

/// verify pipeline: structural checks of both policies at each grid point.
/// Returns the number of grid points with any violation.
inline int run_verify(const ExperimentSpec& spec, std::ostream& log) {
  spec.validate();
  const std::filesystem::path dir(spec.out_dir);
  int bad = 0;
  detail::for_grid(spec, [&](const ModelParams& mp) {
    const std::string tag = detail::grid_tag(mp.p, mp.gamma, mp.gamma_max);
    const Kernel kernel = build_kernel(mp);
    const MixturePolicy mix = solve_cmdp(mp, spec.epsilon_lambda, spec.rvi_config());
    nlohmann::json report{{"schema_version", kSchemaVersion},
                          {"p", mp.p},
                          {"gamma", mp.gamma},
                          {"gamma_max", mp.gamma_max}};
    bool ok = true;
    std::vector<std::string> violations;
    for (const auto* pi : {&mix.pi1, &mix.pi2}) {
      for (auto& v : check_monotone_delta(*pi, kernel.space()).violations)
        violations.push_back(v);
      for (auto& v : check_monotone_l(*pi, kernel.space()).violations)
        violations.push_back(v);
    }
    if (violations.empty()) {
      const auto b1 = extract_boundary(mix.pi1, kernel.space());
      const auto b2 = extract_boundary(mix.pi2, kernel.space());
      const bool roundtrip =
          reconstruct(b1, kernel.space()).action == mix.pi1.action &&
          reconstruct(b2, kernel.space()).action == mix.pi2.action;
      const bool dominance = thresholds_dominate(b1, b2);
      report["roundtrip"] = roundtrip;
      report["lambda_dominance"] = dominance;
      ok = roundtrip && dominance;
    } else {
      ok = false;
    }
    report["monotonicity_violations"] = violations;
    if (!ok) ++bad;
    log << (ok ? "pass " : "FAIL ") << tag << "\n";
    auto out = detail::open_out(dir / ("verify_" + tag + ".json"));
    out << report.dump(2) << "\n";
  });
  return bad;
}

/// simulate pipeline: Monte Carlo of the solved mixture and the calibrated
/// random baseline on common random numbers.
inline int run_simulate(const ExperimentSpec& spec) {
  spec.validate();
  const std::filesystem::path dir(spec.out_dir);
  return detail::for_grid(spec, [&](const ModelParams& mp) {
    const std::string tag = detail::grid_tag(mp.p, mp.gamma, mp.gamma_max);
    const Kernel kernel = build_kernel(mp);
    const MixturePolicy mix = solve_cmdp(mp, spec.epsilon_lambda, spec.rvi_config());
    const RandomBaseline baseline = calibrate_random_baseline(mp);
    MixtureSimPolicy optimal(mix.pi1, mix.pi2, mix.mu, kernel.space());
    RandomSimPolicy random(baseline.q, mp.l_max);
    const SimConfig cfg = spec.sim_config(mp);

    TraceSink sink = nullptr;
    std::ofstream trace_out;
    if (spec.trace) {
      trace_out = detail::open_out(dir / ("trace_optimal_" + tag + ".csv"));
      trace_out << "# schema_version=" << kSchemaVersion << "\n";
      trace_out << "t,delta,l,b,action,outcome\n";
      sink = [&](const SimStep& step) {
        trace_out << step.t << ',' << step.delta << ',' << step.l << ','
                  << step.b << ',' << action_id(step.action) << ','
                  << step.outcome << "\n";
      };
    }
    const SimReport opt_report = run_policy(optimal, cfg, sink);
    const SimReport rnd_report = run_policy(random, cfg);

    auto report_json = [](const SimReport& r) {
      return nlohmann::json{{"mean_aoi", r.mean_aoi},
                            {"stderr_aoi", r.stderr_aoi},
                            {"mean_tx", r.mean_tx},
                            {"stderr_tx", r.stderr_tx}};
    };
    nlohmann::json j{{"schema_version", kSchemaVersion},
                     {"p", mp.p},
                     {"gamma", mp.gamma},
                     {"gamma_max", mp.gamma_max},
                     {"horizon", spec.horizon},
                     {"trials", spec.trials},
                     {"seed", spec.seed},
                     {"baseline_q", baseline.q},
                     {"baseline_exact_freq", baseline.exact_freq},
                     {"optimal", report_json(opt_report)},
                     {"random", report_json(rnd_report)}};
    auto out = detail::open_out(dir / ("sim_" + tag + ".json"));
    out << j.dump(2) << "\n";
  });
}

/// sweep pipeline: one tradeoff row per grid point combining the analytic
/// optimum, simulated optimal and random-baseline performance, and the
/// conditional fresh-transmission probability.
inline int run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const std::filesystem::path dir(spec.out_dir);
  auto out = detail::open_out(dir / "tradeoff.csv");
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "p,gamma,gamma_max,expected_aoi,expected_tx,p_fresh_given_generated,"
         "opt_mean_aoi,opt_stderr_aoi,opt_mean_tx,opt_stderr_tx,"
         "rnd_mean_aoi,rnd_stderr_aoi,rnd_mean_tx,rnd_stderr_tx,baseline_q\n";
  return detail::for_grid(spec, [&](const ModelParams& mp) {
    const Kernel kernel = build_kernel(mp);
    const MixturePolicy mix = solve_cmdp(mp, spec.epsilon_lambda, spec.rvi_config());
    const auto [expected_aoi, expected_tx] = mixture_targets(mix, mp.gamma_max);
    const RandomBaseline baseline = calibrate_random_baseline(mp);
    MixtureSimPolicy optimal(mix.pi1, mix.pi2, mix.mu, kernel.space());
    RandomSimPolicy random(baseline.q, mp.l_max);
    const SimConfig cfg = spec.sim_config(mp);
    const SimReport opt_report = run_policy(optimal, cfg);
    const SimReport rnd_report = run_policy(random, cfg);
    out << mp.p << ',' << mp.gamma << ',' << mp.gamma_max << ','
        << expected_aoi << ',' << expected_tx << ','
        << fresh_tx_given_generated(mix, kernel) << ','
        << opt_report.mean_aoi << ',' << opt_report.stderr_aoi << ','
        << opt_report.mean_tx << ',' << opt_report.stderr_tx << ','
        << rnd_report.mean_aoi << ',' << rnd_report.stderr_aoi << ','
        << rnd_report.mean_tx << ',' << rnd_report.stderr_tx << ','
        << baseline.q << "\n";
  });
}

} // namespace aoi
