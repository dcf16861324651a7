#pragma once

#include <limits>
#include <string>
#include <vector>

#include "aoi/rvi.hpp"

namespace aoi {

struct MonotonicityReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

struct Slice {
  int l;
  int b;
  int delta_lo;      // smallest delta in the S1/S2 domain of the slice
  Action tx_action;  // fresh in S1 slices, retransmit in S2 slices
};

/// The (l,b) slices carrying a non-trivial action set.
inline std::vector<Slice> slices(const StateSpace& space) {
  std::vector<Slice> out;
  for (int l = 0; l <= space.l_max(); ++l)
    out.push_back({l, 1, std::max(l, 1), Action::fresh});
  for (int l = 1; l < space.l_max(); ++l)
    out.push_back({l, 0, l + 1, Action::retransmit});
  return out;
}

} // namespace detail

/// Lemma-1 check along delta: within every (l,b) slice the chosen action is
/// nondecreasing in delta under the order idle < retransmit < fresh.
inline MonotonicityReport check_monotone_delta(const DeterministicPolicy& policy,
                                               const StateSpace& space) {
  MonotonicityReport report;
  for (const auto& slice : detail::slices(space)) {
    int prev = 0;
    for (int delta = slice.delta_lo; delta <= space.delta_max(); ++delta) {
      const int a = action_id(policy.at(space.index(State{delta, slice.l, slice.b})));
      if (a < prev)
        report.violations.push_back(
            "slice (l=" + std::to_string(slice.l) + ",b=" + std::to_string(slice.b) +
            "): action drops from " + std::to_string(prev) + " to " +
            std::to_string(a) + " at delta=" + std::to_string(delta));
      prev = a;
    }
  }
  return report;
}

/// Lemma-1 check along l: for fixed (delta, b=0), over the retransmission
/// range 0 < l < l_max, once the policy idles it stays idle at larger l.
inline MonotonicityReport check_monotone_l(const DeterministicPolicy& policy,
                                           const StateSpace& space) {
  MonotonicityReport report;
  for (int delta = 1; delta <= space.delta_max(); ++delta) {
    int prev = std::numeric_limits<int>::max();
    const int l_hi = std::min(delta - 1, space.l_max() - 1);
    for (int l = 1; l <= l_hi; ++l) {
      const int a = action_id(policy.at(space.index(State{delta, l, 0})));
      if (a > prev)
        report.violations.push_back(
            "row delta=" + std::to_string(delta) + ",b=0: action rises from " +
            std::to_string(prev) + " to " + std::to_string(a) +
            " at l=" + std::to_string(l));
      prev = a;
    }
  }
  return report;
}

/// Per-slice switching point of a monotone policy: the smallest delta at
/// which the slice starts transmitting, or kNever.
struct ThresholdBoundary {
  static constexpr int kNever = std::numeric_limits<int>::max();

  struct Entry {
    int l;
    int b;
    int delta_star;
  };
  std::vector<Entry> entries;

  int threshold(int l, int b) const {
    for (const auto& e : entries)
      if (e.l == l && e.b == b) return e.delta_star;
    throw std::invalid_argument("no slice (l=" + std::to_string(l) +
                                ",b=" + std::to_string(b) + ")");
  }
};

inline ThresholdBoundary extract_boundary(const DeterministicPolicy& policy,
                                          const StateSpace& space) {
  auto rep_d = check_monotone_delta(policy, space);
  auto rep_l = check_monotone_l(policy, space);
  if (!rep_d.ok() || !rep_l.ok()) {
    const std::string& first =
        rep_d.ok() ? rep_l.violations.front() : rep_d.violations.front();
    throw std::invalid_argument("policy is not monotone: " + first);
  }
  ThresholdBoundary boundary;
  for (const auto& slice : detail::slices(space)) {
    int delta_star = ThresholdBoundary::kNever;
    for (int delta = slice.delta_lo; delta <= space.delta_max(); ++delta) {
      if (transmits(policy.at(space.index(State{delta, slice.l, slice.b})))) {
        delta_star = delta;
        break;
      }
    }
    boundary.entries.push_back({slice.l, slice.b, delta_star});
  }
  return boundary;
}

/// Inverse of extract_boundary: transmit at and above each slice threshold,
/// idle everywhere else (all class-3 states only allow idle anyway).
inline DeterministicPolicy reconstruct(const ThresholdBoundary& boundary,
                                       const StateSpace& space) {
  DeterministicPolicy policy;
  policy.action.assign(space.size(), Action::idle);
  for (const auto& slice : detail::slices(space)) {
    const int delta_star = boundary.threshold(slice.l, slice.b);
    if (delta_star == ThresholdBoundary::kNever) continue;
    for (int delta = delta_star; delta <= space.delta_max(); ++delta)
      policy.action[space.index(State{delta, slice.l, slice.b})] = slice.tx_action;
  }
  return policy;
}

/// True when every slice threshold of `more_expensive` (larger lambda) is at
/// or above the matching threshold of `cheaper`.
inline bool thresholds_dominate(const ThresholdBoundary& cheaper,
                                const ThresholdBoundary& more_expensive) {
  for (const auto& e : cheaper.entries)
    if (more_expensive.threshold(e.l, e.b) < e.delta_star) return false;
  return true;
}

} // namespace aoi
