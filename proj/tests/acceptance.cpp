// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any criterion fails. Solve/simulation results are cached and
// shared across criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "aoi/constrained.hpp"
#include "aoi/sim.hpp"
#include "aoi/structure.hpp"
#include "oracle.hpp"

using namespace aoi;

namespace {

struct SolvedPoint {
  ModelParams mp;
  MixturePolicy mix;
  double expected_aoi = 0.0;
  double expected_tx = 0.0;
  double p_fresh = 0.0;
  RandomBaseline baseline;
  double rnd_analytic_aoi = 0.0;
  double q1_freq = 0.0; // largest achievable frequency (q = 1)
  SimReport opt_sim, rnd_sim;
};

ModelParams make_params(double p, double gamma, double gamma_max,
                        int delta_max = 1000, int l_max = 10) {
  ModelParams mp;
  mp.p = p;
  mp.gamma = gamma;
  mp.gamma_max = gamma_max;
  mp.delta_max = delta_max;
  mp.l_max = l_max;
  return mp;
}

SolvedPoint solve_point(const ModelParams& mp, long long horizon, int trials,
                        std::uint64_t seed) {
  SolvedPoint pt;
  pt.mp = mp;
  const Kernel kernel = build_kernel(mp);
  pt.mix = solve_cmdp(mp, 0.01, RviConfig{});
  std::tie(pt.expected_aoi, pt.expected_tx) = mixture_targets(pt.mix, mp.gamma_max);
  pt.p_fresh = fresh_tx_given_generated(pt.mix, kernel);
  pt.baseline = calibrate_random_baseline(mp);
  pt.rnd_analytic_aoi = evaluate_random_policy(pt.baseline.q, kernel).avg_aoi;
  pt.q1_freq = evaluate_random_policy(1.0, kernel).avg_tx;

  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.params = mp;
  MixtureSimPolicy optimal(pt.mix.pi1, pt.mix.pi2, pt.mix.mu, kernel.space());
  RandomSimPolicy random(pt.baseline.q, mp.l_max);
  pt.opt_sim = run_policy(optimal, cfg);
  pt.rnd_sim = run_policy(random, cfg);
  return pt;
}

class Reporter {
 public:
  void report(int id, const std::string& name, bool pass,
              const std::string& detail) {
    std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", id,
                name.c_str(), detail.empty() ? "" : " -- ",
                detail.c_str());
    std::fflush(stdout);
    all_pass_ = all_pass_ && pass;
  }
  bool all_pass() const { return all_pass_; }

 private:
  bool all_pass_ = true;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

} // namespace

int main() {
  const long long kHorizon = 10000;
  const int kTrials = 1000;
  const std::uint64_t kSeed = 2024;
  Reporter reporter;
  const auto t0 = std::chrono::steady_clock::now();

  // ---- Shared solves -------------------------------------------------
  std::fprintf(stderr, "[accept] solving Table-I grid...\n");
  const std::vector<double> table_p{0.3, 0.4, 0.5, 0.6, 0.7, 1.0};
  std::vector<SolvedPoint> table_points;
  for (double p : table_p) {
    table_points.push_back(
        solve_point(make_params(p, 0.3, 0.3), kHorizon, kTrials, kSeed));
    std::fprintf(stderr, "[accept]   p=%.1f done (%.0fs)\n", p, elapsed_s(t0));
  }

  std::fprintf(stderr, "[accept] solving tradeoff grid...\n");
  const std::vector<std::pair<double, double>> pg_pairs{
      {0.3, 0.3}, {0.5, 0.3}, {0.3, 0.5}, {0.5, 0.5}};
  std::vector<double> budgets;
  for (int i = 1; i <= 10; ++i) budgets.push_back(0.05 * i);
  // curves[pair index][budget index]
  std::vector<std::vector<SolvedPoint>> curves;
  for (const auto& [p, gamma] : pg_pairs) {
    curves.emplace_back();
    for (double gmax : budgets) {
      curves.back().push_back(
          solve_point(make_params(p, gamma, gmax), kHorizon, kTrials, kSeed));
    }
    std::fprintf(stderr, "[accept]   (p=%.1f,gamma=%.1f) done (%.0fs)\n", p,
                 gamma, elapsed_s(t0));
  }

  // ---- Criterion 1: Table I reproduction -----------------------------
  {
    const std::vector<double> want_aoi{4.01, 3.53, 3.33, 3.21, 3.10, 2.99};
    const std::vector<double> want_pf{0.83, 0.62, 0.53, 0.47, 0.41, 0.30};
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < table_points.size(); ++i) {
      const SolvedPoint& pt = table_points[i];
      const bool ok_aoi = std::abs(pt.expected_aoi - want_aoi[i]) <= 0.05;
      const bool ok_pf = std::abs(pt.p_fresh - want_pf[i]) <= 0.03;
      if (!(ok_aoi && ok_pf))
        detail += " p=" + fmt(pt.mp.p) + ": aoi=" + fmt(pt.expected_aoi) +
                  " (want " + fmt(want_aoi[i]) + "), pf=" + fmt(pt.p_fresh) +
                  " (want " + fmt(want_pf[i]) + ");";
      pass = pass && ok_aoi && ok_pf;
    }
    if (pass) {
      detail = "aoi = (";
      for (const SolvedPoint& pt : table_points) detail += fmt(pt.expected_aoi) + " ";
      detail += "), pf = (";
      for (const SolvedPoint& pt : table_points) detail += fmt(pt.p_fresh) + " ";
      detail += ")";
    }
    reporter.report(1, "Table I reproduction", pass, detail);
  }

  // ---- Criterion 2: tradeoff curves ----------------------------------
  {
    bool pass = true;
    std::string detail;
    for (std::size_t c = 0; c < curves.size(); ++c) {
      for (std::size_t i = 0; i < curves[c].size(); ++i) {
        const SolvedPoint& pt = curves[c][i];
        const double se_pair = pt.opt_sim.stderr_aoi + pt.rnd_sim.stderr_aoi;
        // (a) optimal never above random; clearly below where the analytic
        // gap exceeds 0.05.
        if (pt.opt_sim.mean_aoi > pt.rnd_sim.mean_aoi + 3.0 * se_pair) {
          pass = false;
          detail += " (a) opt>rnd at p=" + fmt(pt.mp.p) + ",g=" + fmt(pt.mp.gamma) +
                    ",G=" + fmt(pt.mp.gamma_max) + ";";
        }
        if (pt.rnd_analytic_aoi - pt.expected_aoi > 0.05 &&
            !(pt.rnd_sim.mean_aoi - pt.opt_sim.mean_aoi > 3.0 * se_pair)) {
          pass = false;
          detail += " (a) gap not significant at p=" + fmt(pt.mp.p) +
                    ",g=" + fmt(pt.mp.gamma) + ",G=" + fmt(pt.mp.gamma_max) + ";";
        }
        // (b) curves coincide once the budget exceeds the q=1 frequency.
        if (pt.mp.gamma_max > pt.q1_freq &&
            std::abs(pt.opt_sim.mean_aoi - pt.rnd_sim.mean_aoi) > 3.0 * se_pair) {
          pass = false;
          detail += " (b) curves differ at p=" + fmt(pt.mp.p) +
                    ",g=" + fmt(pt.mp.gamma) + ",G=" + fmt(pt.mp.gamma_max) + ";";
        }
        // (c) monotone in the budget: analytic strictly, simulated up to
        // Monte Carlo noise.
        if (i > 0) {
          const SolvedPoint& prev = curves[c][i - 1];
          if (pt.expected_aoi > prev.expected_aoi + 1e-9) {
            pass = false;
            detail += " (c) analytic increase at p=" + fmt(pt.mp.p) +
                      ",g=" + fmt(pt.mp.gamma) + ",G=" + fmt(pt.mp.gamma_max) + ";";
          }
          if (pt.opt_sim.mean_aoi >
              prev.opt_sim.mean_aoi +
                  3.0 * (pt.opt_sim.stderr_aoi + prev.opt_sim.stderr_aoi)) {
            pass = false;
            detail += " (c) simulated increase at p=" + fmt(pt.mp.p) +
                      ",g=" + fmt(pt.mp.gamma) + ",G=" + fmt(pt.mp.gamma_max) + ";";
          }
        }
      }
    }
    reporter.report(2, "tradeoff-curve reproduction", pass, detail);
  }

  // ---- Criterion 3: oracle equivalence -------------------------------
  {
    std::fprintf(stderr, "[accept] oracle enumeration... (%.0fs)\n", elapsed_s(t0));
    bool pass = true;
    std::string detail;
    int instances = 0;
    double worst = 0.0;
    for (int l_max : {1, 2})
      for (int delta_max = l_max + 2; delta_max <= 6; ++delta_max)
        for (double p : {0.3, 0.7})
          for (double gamma : {0.2, 0.5}) {
            const Kernel kernel =
                build_kernel(make_params(p, gamma, 1.0, delta_max, l_max));
            const auto values = oracle::all_policy_values(kernel);
            for (double lambda : {0.0, 0.5, 2.0}) {
              RviConfig cfg;
              cfg.lambda = lambda;
              cfg.span_tol = 1e-9;
              const RviSolution sol = rvi_solve(kernel, cfg);
              const double exact = oracle::optimal_gain(values, lambda);
              const double err = std::abs(sol.gain - exact);
              worst = std::max(worst, err);
              if (!(sol.converged && err < 1e-4)) {
                pass = false;
                detail += " dmax=" + std::to_string(delta_max) +
                          ",lmax=" + std::to_string(l_max) + ",p=" + fmt(p) +
                          ",g=" + fmt(gamma) + ",lam=" + fmt(lambda) +
                          ": rvi=" + fmt(sol.gain) + " oracle=" + fmt(exact) + ";";
              }
              ++instances;
            }
          }
    if (pass)
      detail = std::to_string(instances) + " instances, worst |gain error| = " +
               fmt(worst);
    reporter.report(3, "RVI matches exhaustive enumeration", pass, detail);
  }

  // ---- Criterion 4: structure suite ----------------------------------
  {
    bool pass = true;
    std::string detail;
    auto check_point = [&](const SolvedPoint& pt) {
      const StateSpace space(pt.mp);
      const std::string tag = "p=" + fmt(pt.mp.p) + ",g=" + fmt(pt.mp.gamma) +
                              ",G=" + fmt(pt.mp.gamma_max);
      for (const auto* pi : {&pt.mix.pi1, &pt.mix.pi2}) {
        if (!check_monotone_delta(*pi, space).ok() ||
            !check_monotone_l(*pi, space).ok()) {
          pass = false;
          detail += " monotonicity violated at " + tag + ";";
          return;
        }
      }
      const ThresholdBoundary b1 = extract_boundary(pt.mix.pi1, space);
      const ThresholdBoundary b2 = extract_boundary(pt.mix.pi2, space);
      if (reconstruct(b1, space).action != pt.mix.pi1.action ||
          reconstruct(b2, space).action != pt.mix.pi2.action) {
        pass = false;
        detail += " boundary round-trip failed at " + tag + ";";
      }
      if (!thresholds_dominate(b1, b2)) {
        pass = false;
        detail += " lambda2 thresholds below lambda1 at " + tag + ";";
      }
    };
    for (const SolvedPoint& pt : table_points) check_point(pt);
    for (const auto& curve : curves)
      for (const SolvedPoint& pt : curve) check_point(pt);

    // Boundary-shift comparison at gamma_max = 0.1 (budget index 1):
    // raising gamma or p must not lower the fresh-transmission thresholds.
    {
      const StateSpace space(curves[0][1].mp);
      auto b1_thresholds = [&](const SolvedPoint& pt) {
        return std::pair{extract_boundary(pt.mix.pi1, space),
                         extract_boundary(pt.mix.pi2, space)};
      };
      const auto base = b1_thresholds(curves[0][1]);   // (0.3, 0.3)
      const auto hi_p = b1_thresholds(curves[1][1]);   // (0.5, 0.3)
      const auto hi_g = b1_thresholds(curves[2][1]);   // (0.3, 0.5)
      auto shift_ok = [&](const ThresholdBoundary& lo, const ThresholdBoundary& hi) {
        for (const auto& e : lo.entries)
          if (e.b == 1 && hi.threshold(e.l, e.b) < e.delta_star) return false;
        return true;
      };
      if (!shift_ok(base.first, hi_p.first) || !shift_ok(base.second, hi_p.second)) {
        pass = false;
        detail += " b=1 boundary moved left when p rose;";
      }
      if (!shift_ok(base.first, hi_g.first) || !shift_ok(base.second, hi_g.second)) {
        pass = false;
        detail += " b=1 boundary moved left when gamma rose;";
      }
    }
    reporter.report(4, "threshold structure of all solved policies", pass, detail);
  }

  // ---- Criterion 5: model invariants ---------------------------------
  {
    bool pass = true;
    std::string detail;
    const ModelParams mp = make_params(0.3, 0.3, 0.3);
    const Kernel kernel = build_kernel(mp);
    for (int s = 0; s < kernel.num_states() && pass; ++s) {
      const State& st = kernel.space().state(s);
      const bool in_s1 = st.b == 1;
      const bool in_s2 =
          st.b == 0 && st.l > 0 && st.l < mp.l_max && st.delta != st.l;
      const int rows = kernel.row_end(s) - kernel.row_begin(s);
      if (rows != (in_s1 || in_s2 ? 2 : 1)) {
        pass = false;
        detail = "action elimination broken at " + to_string(st);
        break;
      }
      if (kernel.find_row(s, Action::retransmit) >= 0 && !in_s2) {
        pass = false;
        detail = "retransmit allowed outside S2 at " + to_string(st);
        break;
      }
      if (kernel.find_row(s, Action::fresh) >= 0 && !in_s1) {
        pass = false;
        detail = "fresh allowed outside S1 at " + to_string(st);
        break;
      }
      for (int r = kernel.row_begin(s); r < kernel.row_end(s); ++r) {
        const Kernel::Row& row = kernel.row(r);
        double sum = 0.0;
        for (int k = 0; k < row.count; ++k) sum += row.prob[k];
        if (std::abs(sum - 1.0) > 1e-12) {
          pass = false;
          detail = "row mass " + fmt(sum) + " at " + to_string(st);
          break;
        }
      }
    }

    // Empirical one-step frequencies over a million slots.
    if (pass) {
      const ModelParams sp = make_params(0.4, 0.3, 0.3, 30, 3);
      SimConfig cfg;
      cfg.horizon = 1000000;
      cfg.trials = 1;
      cfg.seed = kSeed;
      cfg.params = sp;
      RandomSimPolicy policy(0.5, sp.l_max);
      std::map<std::array<int, 4>, long long> visits;
      std::map<std::array<int, 7>, long long> jumps;
      long long pd = -1;
      int pl = -1, pb = -1, pa = -1;
      TraceSink sink = [&](const SimStep& step) {
        const int d = static_cast<int>(std::min<long long>(step.delta, sp.delta_max));
        if (pd >= 0) {
          ++visits[{static_cast<int>(pd), pl, pb, pa}];
          ++jumps[{static_cast<int>(pd), pl, pb, pa, d, step.l, step.b}];
        }
        pd = d;
        pl = step.l;
        pb = step.b;
        pa = action_id(step.action);
      };
      run_trial(policy, cfg, 0, sink);
      int rows_checked = 0;
      for (const auto& [sa, n] : visits) {
        if (n < 2000) continue;
        const State st{sa[0], sa[1], sa[2]};
        for (const Outcome& o : transition(st, static_cast<Action>(sa[3]), sp)) {
          const auto it = jumps.find(
              {sa[0], sa[1], sa[2], sa[3], o.next.delta, o.next.l, o.next.b});
          const double freq =
              it == jumps.end() ? 0.0 : static_cast<double>(it->second) / n;
          const double se = std::sqrt(o.prob * (1.0 - o.prob) / n);
          if (std::abs(freq - o.prob) > 3.0 * se + 1e-12) {
            pass = false;
            detail += " empirical " + fmt(freq) + " vs " + fmt(o.prob) +
                      " from " + to_string(st) + ";";
          }
          ++rows_checked;
        }
      }
      if (pass)
        detail = "kernel exact to 1e-12; " + std::to_string(rows_checked) +
                 " empirical branches within 3 SE";
    }
    reporter.report(5, "model invariant suite", pass, detail);
  }

  // ---- Criterion 6: constraint compliance ----------------------------
  {
    bool pass = true;
    std::string detail;
    auto check_point = [&](const SolvedPoint& pt) {
      const std::string tag = "p=" + fmt(pt.mp.p) + ",g=" + fmt(pt.mp.gamma) +
                              ",G=" + fmt(pt.mp.gamma_max);
      if (!(pt.mix.mu >= 0.0 && pt.mix.mu <= 1.0)) {
        pass = false;
        detail += " mu=" + fmt(pt.mix.mu) + " at " + tag + ";";
      }
      if (pt.expected_tx > pt.mp.gamma_max + 1e-6) {
        pass = false;
        detail += " expected_tx above budget at " + tag + ";";
      }
      if (!pt.mix.degenerate()) { // binding mixture
        if (std::abs(pt.expected_tx - pt.mp.gamma_max) > 1e-6) {
          pass = false;
          detail += " binding expected_tx=" + fmt(pt.expected_tx) + " at " + tag + ";";
        }
        if (std::abs(pt.opt_sim.mean_tx - pt.mp.gamma_max) >
            3.0 * pt.opt_sim.stderr_tx) {
          pass = false;
          detail += " simulated tx " + fmt(pt.opt_sim.mean_tx) + " (se " +
                    fmt(pt.opt_sim.stderr_tx) + ") at " + tag + ";";
        }
      }
    };
    for (const SolvedPoint& pt : table_points) check_point(pt);
    for (const auto& curve : curves)
      for (const SolvedPoint& pt : curve) check_point(pt);
    reporter.report(6, "constraint compliance", pass, detail);
  }

  // ---- Criterion 7: special-case regression --------------------------
  {
    bool pass = true;
    std::string detail;
    // Perfect channel, always-fresh generation, budget at the 2-slot cycle.
    const ModelParams mp = make_params(1.0, 0.0, 0.5, 100, 2);
    const MixturePolicy mix = solve_cmdp(mp, 0.01, RviConfig{});
    const auto [aoi, tx] = mixture_targets(mix, mp.gamma_max);
    if (std::abs(aoi - 1.5) > 1e-6 || std::abs(tx - 0.5) > 1e-6) {
      pass = false;
      detail += " cycle regime: aoi=" + fmt(aoi) + " tx=" + fmt(tx) + ";";
    }
    // Idle policy pins the chain at the truncation bound.
    const Kernel kernel = build_kernel(make_params(0.3, 0.3, 0.3, 100, 2));
    DeterministicPolicy idle;
    idle.action.assign(kernel.num_states(), Action::idle);
    const PolicyEvaluation ev = evaluate_policy(idle, kernel);
    if (!(ev.avg_tx == 0.0) || std::abs(ev.avg_aoi - 100.0) > 1e-6) {
      pass = false;
      detail += " idle policy: aoi=" + fmt(ev.avg_aoi) + " tx=" + fmt(ev.avg_tx) + ";";
    }
    if (pass)
      detail = "cycle aoi=" + fmt(aoi) + ", idle aoi=" + fmt(ev.avg_aoi);
    reporter.report(7, "special-case regression", pass, detail);
  }

  std::fprintf(stderr, "[accept] finished in %.0fs\n", elapsed_s(t0));
  return reporter.all_pass() ? 0 : 1;
}
