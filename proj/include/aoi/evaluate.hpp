#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "aoi/rvi.hpp"

namespace aoi {

struct PolicyEvaluation {
  double avg_aoi = 0.0;           // C(pi), slots
  double avg_tx = 0.0;            // D(pi), transmissions per slot
  std::vector<double> stationary; // per-state long-run occupancy
  int iterations = 0;
};

namespace detail {

/// Long-run occupancy of a stationary (possibly randomized) policy given as
/// per-state weighted kernel rows. Power iteration on the lazy chain
/// (I + P)/2, which shares the stationary distribution and is aperiodic,
/// started from the initial-state distribution (1,1,b0), b0 ~ Bernoulli(p).
inline PolicyEvaluation evaluate_rows(
    const Kernel& kernel,
    const std::function<void(int, std::vector<std::pair<int, double>>&)>& rows_of,
    double l1_tol = 1e-9, long long max_iters = 1000000) {
  const int n = kernel.num_states();
  const StateSpace& space = kernel.space();
  const double p = kernel.params().p;

  std::vector<double> pi(n, 0.0), next(n, 0.0);
  pi[space.index(State{1, 1, 1})] = p;
  if (p < 1.0) pi[space.index(State{1, 1, 0})] = 1.0 - p;

  // Flatten the blended rows once.
  std::vector<int> begin(n + 1, 0);
  std::vector<std::pair<int, double>> flat;
  {
    std::vector<std::pair<int, double>> buf;
    flat.reserve(4 * n);
    for (int s = 0; s < n; ++s) {
      begin[s] = static_cast<int>(flat.size());
      buf.clear();
      rows_of(s, buf);
      for (auto& e : buf) flat.push_back(e);
    }
    begin[n] = static_cast<int>(flat.size());
  }

  PolicyEvaluation ev;
  double residual = 1.0;
  for (long long iter = 1; iter <= max_iters; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < n; ++s) {
      const double mass = pi[s];
      if (mass == 0.0) continue;
      next[s] += 0.5 * mass;
      for (int k = begin[s]; k < begin[s + 1]; ++k)
        next[flat[k].first] += 0.5 * mass * flat[k].second;
    }
    residual = 0.0;
    for (int s = 0; s < n; ++s) residual += std::abs(next[s] - pi[s]);
    pi.swap(next);
    ev.iterations = static_cast<int>(iter);
    if (residual < l1_tol) break;
  }
  if (residual >= l1_tol)
    throw std::runtime_error(
        "policy evaluation did not converge; last L1 residual = " +
        std::to_string(residual) +
        " (unichain assumption violated or iteration cap too low)");
  ev.stationary = std::move(pi);
  return ev;
}

} // namespace detail

/// Exact long-run average AoI and transmission frequency of a deterministic
/// policy on the truncated chain.
inline PolicyEvaluation evaluate_policy(const DeterministicPolicy& policy,
                                        const Kernel& kernel) {
  const int n = kernel.num_states();
  for (int s = 0; s < n; ++s)
    if (kernel.find_row(s, policy.at(s)) < 0)
      throw std::invalid_argument("policy takes disallowed action in state " +
                                  to_string(kernel.space().state(s)));
  PolicyEvaluation ev = detail::evaluate_rows(
      kernel, [&](int s, std::vector<std::pair<int, double>>& out) {
        const Kernel::Row& row = kernel.row(kernel.find_row(s, policy.at(s)));
        for (int k = 0; k < row.count; ++k)
          out.emplace_back(row.next[k], row.prob[k]);
      });
  for (int s = 0; s < n; ++s) {
    ev.avg_aoi += ev.stationary[s] * kernel.reward(s);
    ev.avg_tx += ev.stationary[s] * Kernel::cost(policy.at(s));
  }
  return ev;
}

/// Evaluation of the randomized baseline that transmits with probability q
/// in every state where a transmitting action is allowed.
inline PolicyEvaluation evaluate_random_policy(double q, const Kernel& kernel) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("transmit probability must be in [0,1]");
  const int n = kernel.num_states();
  PolicyEvaluation ev = detail::evaluate_rows(
      kernel, [&](int s, std::vector<std::pair<int, double>>& out) {
        const int idle_row = kernel.find_row(s, Action::idle);
        const int b = kernel.row_begin(s);
        const int e = kernel.row_end(s);
        for (int r = b; r < e; ++r) {
          const Kernel::Row& row = kernel.row(r);
          const double w = (r == idle_row) ? (e - b > 1 ? 1.0 - q : 1.0) : q;
          if (w == 0.0) continue;
          for (int k = 0; k < row.count; ++k)
            out.emplace_back(row.next[k], w * row.prob[k]);
        }
      });
  for (int s = 0; s < n; ++s) {
    ev.avg_aoi += ev.stationary[s] * kernel.reward(s);
    if (kernel.row_end(s) - kernel.row_begin(s) > 1)
      ev.avg_tx += ev.stationary[s] * q;
  }
  return ev;
}

} // namespace aoi
