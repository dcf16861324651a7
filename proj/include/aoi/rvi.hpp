#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

struct RviConfig {
  double lambda = 0.0;
  double span_tol = 1e-6;
  int max_iters = 100000;
  State ref_state{1, 1, 0};

  void validate() const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("RviConfig: lambda must be >= 0");
    if (!(span_tol > 0.0)) throw std::invalid_argument("RviConfig: span_tol must be > 0");
    if (max_iters < 1) throw std::invalid_argument("RviConfig: max_iters must be >= 1");
  }
};

struct DeterministicPolicy {
  std::vector<Action> action; // indexed by dense state index

  Action at(int state_idx) const { return action[state_idx]; }
};

struct RviSolution {
  DeterministicPolicy policy;
  double gain = 0.0;           // optimal average reward of the relaxed MDP
  std::vector<double> bias;    // relative value function, bias[ref] = 0
  int iterations = 0;
  bool converged = false;
};

/// Q_lambda(s,a) = delta + lambda*1[a != idle] + E[h(next)].
inline double q_value(int state_idx, Action a, std::span<const double> h,
                      double lambda, const Kernel& kernel) {
  const int r = kernel.find_row(state_idx, a);
  if (r < 0)
    throw std::invalid_argument("action " + std::to_string(action_id(a)) +
                                " not allowed in state " +
                                to_string(kernel.space().state(state_idx)));
  const Kernel::Row& row = kernel.row(r);
  double expect = 0.0;
  for (int k = 0; k < row.count; ++k) expect += row.prob[k] * h[row.next[k]];
  return kernel.reward(state_idx) + lambda * Kernel::cost(a) + expect;
}

inline double q_value(const State& s, Action a, std::span<const double> h,
                      double lambda, const Kernel& kernel) {
  return q_value(kernel.space().index(s), a, h, lambda, kernel);
}

/// Relative value iteration for the lambda-relaxed average-reward MDP.
///
/// Runs on the aperiodicity-transformed kernel P' = (1-tau) I + tau P, which
/// has the same optimal gain and policy and keeps the iteration convergent on
/// periodic chains (e.g. gamma = 0). The returned bias is rescaled back to
/// the untransformed optimality equation. Ties in the per-state minimization
/// break toward the smaller action index.
inline RviSolution rvi_solve(const Kernel& kernel, const RviConfig& cfg) {
  cfg.validate();
  const int n = kernel.num_states();
  const int ref = kernel.space().index(cfg.ref_state);
  const double lambda = cfg.lambda;
  constexpr double tau = 0.5;

  std::vector<double> h(n, 0.0), next(n, 0.0);
  std::vector<Action> best_action(n, Action::idle);

  RviSolution sol;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    // One sweep of the transformed Bellman operator.
    for (int s = 0; s < n; ++s) {
      double best = std::numeric_limits<double>::infinity();
      Action arg = Action::idle;
      for (int r = kernel.row_begin(s); r < kernel.row_end(s); ++r) {
        const Kernel::Row& row = kernel.row(r);
        double expect = 0.0;
        for (int k = 0; k < row.count; ++k) expect += row.prob[k] * h[row.next[k]];
        const double q = kernel.reward(s) + lambda * Kernel::cost(row.action) +
                         (1.0 - tau) * h[s] + tau * expect;
        if (q < best) { // strict: rows are in increasing action order
          best = q;
          arg = row.action;
        }
      }
      next[s] = best;
      best_action[s] = arg;
    }
    const double shift = next[ref];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < n; ++s) {
      const double diff = next[s] - h[s];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
      h[s] = next[s] - shift;
    }
    sol.iterations = iter;
    if (hi - lo < cfg.span_tol) {
      sol.converged = true;
      sol.gain = shift; // T h(ref) with h(ref)=0 is the gain estimate
      break;
    }
    sol.gain = shift;
  }

  // Rescale to the untransformed optimality equation J + h = min_a Q(s,a,h).
  sol.bias.resize(n);
  for (int s = 0; s < n; ++s) sol.bias[s] = tau * h[s];
  sol.policy.action = std::move(best_action);
  return sol;
}

} // namespace aoi
