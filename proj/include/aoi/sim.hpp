#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "aoi/evaluate.hpp"
#include "aoi/structure.hpp"

namespace aoi {

struct SimConfig {
  long long horizon = 10000; // slots per trial
  int trials = 1000;
  std::uint64_t seed = 0;
  ModelParams params;

  void validate() const {
    params.validate();
    if (horizon < 1) throw std::invalid_argument("SimConfig: horizon must be >= 1");
    if (trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
  }
};

struct TrialResult {
  double aoi_avg = 0.0;
  double tx_freq = 0.0;
};

struct SimReport {
  double mean_aoi = 0.0, stderr_aoi = 0.0;
  double mean_tx = 0.0, stderr_tx = 0.0;
  std::vector<TrialResult> per_trial;
  std::uint64_t base_seed = 0;
};

/// One step of a simulated trajectory; delta is not truncated.
struct SimStep {
  long long t;
  long long delta;
  int l;
  int b;
  Action action;
  int outcome; // 1 success, 0 failure, -1 no transmission
};
using TraceSink = std::function<void(const SimStep&)>;

/// A policy as executed by the simulator. begin_trial runs once per trial
/// (mixture selection); act may consume the policy RNG stream (randomized
/// baseline) but never touches the environment streams.
class SimPolicy {
 public:
  virtual ~SimPolicy() = default;
  virtual void begin_trial(std::mt19937_64& /*policy_rng*/) {}
  virtual Action act(long long delta, int l, int b, std::mt19937_64& policy_rng) = 0;
};

namespace detail {

inline bool sim_action_allowed(Action a, long long delta, int l, int b, int l_max) {
  if (a == Action::idle) return true;
  if (a == Action::fresh) return b == 1;
  return b == 0 && l > 0 && l < l_max && delta != l;
}

} // namespace detail

/// Deterministic policy lifted to the untruncated chain: queries with
/// delta > delta_max clamp to the delta_max row. Construction rejects
/// policies whose action still changes at the truncation boundary, since
/// clamping is only exact when every slice boundary lies strictly below it.
class ClampedPolicy : public SimPolicy {
 public:
  ClampedPolicy(DeterministicPolicy policy, const StateSpace& space)
      : policy_(std::move(policy)), space_(space) {
    const int dm = space.delta_max();
    for (const auto& slice : detail::slices(space)) {
      const State top{dm, slice.l, slice.b};
      const State below{dm - 1, slice.l, slice.b};
      if (space.valid(below) &&
          policy_.at(space.index(top)) != policy_.at(space.index(below)))
        throw std::invalid_argument(
            "policy switches action at delta_max in slice (l=" +
            std::to_string(slice.l) + ",b=" + std::to_string(slice.b) +
            "); clamping would be inexact");
    }
  }

  Action act(long long delta, int l, int b, std::mt19937_64&) override {
    const int d = static_cast<int>(std::min<long long>(delta, space_.delta_max()));
    return policy_.at(space_.index(State{d, l, b}));
  }

 private:
  DeterministicPolicy policy_;
  StateSpace space_; // by value: a sim policy outlives the solver kernel
};

/// Mixture execution: one Bernoulli(mu) draw at trial start selects which
/// deterministic policy runs for the whole trial.
class MixtureSimPolicy : public SimPolicy {
 public:
  MixtureSimPolicy(DeterministicPolicy pi1, DeterministicPolicy pi2, double mu,
                   const StateSpace& space)
      : pi1_(std::move(pi1), space), pi2_(std::move(pi2), space), mu_(mu) {}

  void begin_trial(std::mt19937_64& policy_rng) override {
    use_first_ = std::bernoulli_distribution(mu_)(policy_rng);
  }

  Action act(long long delta, int l, int b, std::mt19937_64& rng) override {
    return use_first_ ? pi1_.act(delta, l, b, rng) : pi2_.act(delta, l, b, rng);
  }

 private:
  ClampedPolicy pi1_, pi2_;
  double mu_;
  bool use_first_ = true;
};

struct RandomBaseline {
  double q = 1.0;          // per-eligible-slot transmission probability
  double exact_freq = 0.0; // long-run frequency at q on the truncated chain
};

/// Random baseline: whenever a transmitting action is eligible, take it with
/// probability q (fresh in S1 states, retransmit in S2 states).
class RandomSimPolicy : public SimPolicy {
 public:
  RandomSimPolicy(double q, int l_max) : q_(q), l_max_(l_max) {}

  Action act(long long delta, int l, int b, std::mt19937_64& rng) override {
    Action tx;
    if (b == 1)
      tx = Action::fresh;
    else if (l > 0 && l < l_max_ && delta != l)
      tx = Action::retransmit;
    else
      return Action::idle;
    return std::bernoulli_distribution(q_)(rng) ? tx : Action::idle;
  }

 private:
  double q_;
  int l_max_;
};

/// Calibrates q so the exact long-run transmission frequency of the random
/// baseline meets gamma_max, or returns q = 1 when the budget never binds.
inline RandomBaseline calibrate_random_baseline(const ModelParams& params) {
  params.validate();
  const Kernel kernel = build_kernel(params);
  auto freq = [&](double q) { return evaluate_random_policy(q, kernel).avg_tx; };
  RandomBaseline out;
  const double at_one = freq(1.0);
  if (at_one <= params.gamma_max) {
    out.q = 1.0;
    out.exact_freq = at_one;
    return out;
  }
  double lo = 0.0, hi = 1.0;
  double f = at_one;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    f = freq(mid);
    if (f > params.gamma_max)
      hi = mid;
    else
      lo = mid;
    if (f <= params.gamma_max && f >= params.gamma_max - 1e-6) {
      out.q = mid;
      out.exact_freq = f;
      return out;
    }
  }
  out.q = lo;
  out.exact_freq = freq(lo);
  return out;
}

/// One seeded trial on the untruncated dynamics. Three RNG streams: status
/// generation, channel, policy; the environment streams are independent of
/// the policy so trials are comparable across policies under common seeds.
/// AoI is recorded after each slot's state update, starting from s0=(1,1,b0).
inline TrialResult run_trial(SimPolicy& policy, const SimConfig& cfg,
                             std::uint64_t trial_seed,
                             const TraceSink& trace = nullptr) {
  cfg.validate();
  const auto& mp = cfg.params;
  auto make_rng = [&](std::uint64_t stream) {
    std::seed_seq seq{cfg.seed, trial_seed, stream};
    return std::mt19937_64(seq);
  };
  std::mt19937_64 gen_rng = make_rng(0);
  std::mt19937_64 chan_rng = make_rng(1);
  std::mt19937_64 policy_rng = make_rng(2);
  std::bernoulli_distribution fresh(mp.p);
  std::bernoulli_distribution fail(mp.gamma);

  policy.begin_trial(policy_rng);
  long long delta = 1;
  int l = 1;
  int b = fresh(gen_rng) ? 1 : 0;

  double sum_aoi = 0.0;
  long long tx_count = 0;
  for (long long t = 1; t <= cfg.horizon; ++t) {
    const Action a = policy.act(delta, l, b, policy_rng);
    if (!detail::sim_action_allowed(a, delta, l, b, mp.l_max))
      throw std::logic_error("policy returned disallowed action " +
                             std::to_string(action_id(a)) + " at state (" +
                             std::to_string(delta) + "," + std::to_string(l) +
                             "," + std::to_string(b) + ")");
    int outcome = -1;
    if (transmits(a)) {
      ++tx_count;
      outcome = fail(chan_rng) ? 0 : 1;
    }
    if (trace) trace({t, delta, l, b, a, outcome});
    switch (a) {
      case Action::idle:
        delta += 1;
        l = 0;
        break;
      case Action::retransmit:
        delta = (outcome == 1) ? l + 1 : delta + 1;
        l += 1;
        break;
      case Action::fresh:
        delta = (outcome == 1) ? 1 : delta + 1;
        l = 1;
        break;
    }
    b = fresh(gen_rng) ? 1 : 0;
    sum_aoi += static_cast<double>(delta);
  }
  return {sum_aoi / static_cast<double>(cfg.horizon),
          static_cast<double>(tx_count) / static_cast<double>(cfg.horizon)};
}

/// Runs cfg.trials independent trials (trial i seeded by i) and aggregates.
inline SimReport run_policy(SimPolicy& policy, const SimConfig& cfg,
                            const TraceSink& trace = nullptr) {
  cfg.validate();
  SimReport report;
  report.base_seed = cfg.seed;
  report.per_trial.reserve(cfg.trials);
  double sa = 0.0, sa2 = 0.0, st = 0.0, st2 = 0.0;
  for (int i = 0; i < cfg.trials; ++i) {
    const TrialResult r =
        run_trial(policy, cfg, static_cast<std::uint64_t>(i), i == 0 ? trace : nullptr);
    report.per_trial.push_back(r);
    sa += r.aoi_avg;
    sa2 += r.aoi_avg * r.aoi_avg;
    st += r.tx_freq;
    st2 += r.tx_freq * r.tx_freq;
  }
  const double n = cfg.trials;
  report.mean_aoi = sa / n;
  report.mean_tx = st / n;
  if (cfg.trials > 1) {
    const double va = (sa2 - sa * sa / n) / (n - 1.0);
    const double vt = (st2 - st * st / n) / (n - 1.0);
    report.stderr_aoi = std::sqrt(std::max(va, 0.0) / n);
    report.stderr_tx = std::sqrt(std::max(vt, 0.0) / n);
  }
  return report;
}

/// Per-policy reports on common random numbers: every policy sees the same
/// per-trial generation and channel streams.
inline std::map<std::string, SimReport> compare_policies(
    const SimConfig& cfg, const std::map<std::string, SimPolicy*>& policies) {
  std::map<std::string, SimReport> out;
  for (const auto& [name, policy] : policies) out[name] = run_policy(*policy, cfg);
  return out;
}

} // namespace aoi
