#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "aoi/evaluate.hpp"

namespace aoi {

struct DualProbe {
  double lambda = 0.0;
  double gain = 0.0;
  double avg_aoi = 0.0;
  double avg_tx = 0.0;
};

/// Optimal randomized stationary policy: a Bernoulli(mu) draw at time zero
/// selects pi1 (probability mu) or pi2, which then runs forever.
struct MixturePolicy {
  DeterministicPolicy pi1, pi2;
  double mu = 1.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  PolicyEvaluation eval1, eval2;
  std::vector<DualProbe> probes; // every dual-search evaluation, in probe order

  bool degenerate() const { return mu == 0.0 || mu == 1.0; }
};

/// (mu*C1 + (1-mu)*C2, mu*D1 + (1-mu)*D2); the second component equals
/// gamma_max by construction whenever the constraint binds.
inline std::pair<double, double> mixture_targets(const MixturePolicy& m,
                                                 double /*gamma_max*/) {
  return {m.mu * m.eval1.avg_aoi + (1.0 - m.mu) * m.eval2.avg_aoi,
          m.mu * m.eval1.avg_tx + (1.0 - m.mu) * m.eval2.avg_tx};
}

/// P(a = fresh | b = 1) under the mixture: per-policy conditional from the
/// stationary distribution, combined with weights (mu, 1-mu). The b marginal
/// is Bernoulli(p) under any policy, so this equals the long-run ratio.
inline double fresh_tx_given_generated(const MixturePolicy& m, const Kernel& kernel) {
  auto conditional = [&](const DeterministicPolicy& pi, const PolicyEvaluation& ev) {
    double num = 0.0, den = 0.0;
    for (int s = 0; s < kernel.num_states(); ++s) {
      if (kernel.space().state(s).b != 1) continue;
      den += ev.stationary[s];
      if (pi.at(s) == Action::fresh) num += ev.stationary[s];
    }
    return den > 0.0 ? num / den : 0.0;
  };
  return m.mu * conditional(m.pi1, m.eval1) +
         (1.0 - m.mu) * conditional(m.pi2, m.eval2);
}

/// Three-step CMDP solution: lambda = 0 check, bracket-and-bisect dual
/// search for (lambda1, lambda2) with D(pi1) > gamma_max > D(pi2) and
/// bracket width <= epsilon_lambda, then the mixing weight
/// mu = (gamma_max - D2) / (D1 - D2).
inline MixturePolicy solve_cmdp(const ModelParams& params, double epsilon_lambda,
                                RviConfig cfg) {
  params.validate();
  if (!(epsilon_lambda > 0.0))
    throw std::invalid_argument("epsilon_lambda must be > 0");
  const Kernel kernel = build_kernel(params);
  const double target = params.gamma_max;
  constexpr double kBindingTol = 1e-9;

  MixturePolicy out;
  auto probe = [&](double lambda) {
    cfg.lambda = lambda;
    RviSolution sol = rvi_solve(kernel, cfg);
    if (!sol.converged)
      throw std::runtime_error("RVI did not converge at lambda = " +
                               std::to_string(lambda));
    PolicyEvaluation ev = evaluate_policy(sol.policy, kernel);
    out.probes.push_back({lambda, sol.gain, ev.avg_aoi, ev.avg_tx});
    return std::make_pair(std::move(sol.policy), std::move(ev));
  };
  auto deterministic = [&](double lambda, DeterministicPolicy pi,
                           PolicyEvaluation ev, double mu) {
    out.lambda1 = out.lambda2 = lambda;
    out.pi1 = out.pi2 = std::move(pi);
    out.eval1 = out.eval2 = std::move(ev);
    out.mu = mu;
    return out;
  };

  // Step 1: unconstrained optimum.
  auto [pi0, ev0] = probe(0.0);
  if (ev0.avg_tx <= target + kBindingTol)
    return deterministic(0.0, std::move(pi0), std::move(ev0), 1.0);

  // Step 2: bracket lambda by doubling, then bisect.
  double lambda1 = 0.0;
  DeterministicPolicy pi1 = std::move(pi0);
  PolicyEvaluation ev1 = std::move(ev0);
  double lambda2 = 0.0;
  DeterministicPolicy pi2;
  PolicyEvaluation ev2;
  {
    double lambda = 1.0;
    bool bracketed = false;
    for (int i = 0; i < 60 && !bracketed; ++i, lambda *= 2.0) {
      auto [pi, ev] = probe(lambda);
      if (std::abs(ev.avg_tx - target) < kBindingTol)
        return deterministic(lambda, std::move(pi), std::move(ev), 1.0);
      if (ev.avg_tx < target) {
        lambda2 = lambda;
        pi2 = std::move(pi);
        ev2 = std::move(ev);
        bracketed = true;
      } else {
        lambda1 = lambda;
        pi1 = std::move(pi);
        ev1 = std::move(ev);
      }
    }
    if (!bracketed)
      throw std::runtime_error(
          "dual bracketing failed after 60 doublings; problem looks "
          "infeasible or the model is inconsistent");
  }
  while (lambda2 - lambda1 > epsilon_lambda) {
    const double mid = 0.5 * (lambda1 + lambda2);
    auto [pi, ev] = probe(mid);
    if (std::abs(ev.avg_tx - target) < kBindingTol)
      return deterministic(mid, std::move(pi), std::move(ev), 1.0);
    if (ev.avg_tx > target) {
      lambda1 = mid;
      pi1 = std::move(pi);
      ev1 = std::move(ev);
    } else {
      lambda2 = mid;
      pi2 = std::move(pi);
      ev2 = std::move(ev);
    }
  }

  // Step 3: mixing weight.
  out.lambda1 = lambda1;
  out.lambda2 = lambda2;
  out.mu = (target - ev2.avg_tx) / (ev1.avg_tx - ev2.avg_tx);
  out.pi1 = std::move(pi1);
  out.pi2 = std::move(pi2);
  out.eval1 = std::move(ev1);
  out.eval2 = std::move(ev2);
  return out;
}

} // namespace aoi
