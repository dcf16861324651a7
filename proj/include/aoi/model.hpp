#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoi {

/// Actions of the update scheduler. The numeric order 1 < 2 < 3 matters:
/// the monotone-policy results are stated with respect to it.
enum class Action : int { idle = 1, retransmit = 2, fresh = 3 };

inline constexpr int action_id(Action a) { return static_cast<int>(a); }
inline constexpr bool transmits(Action a) { return a != Action::idle; }

struct ModelParams {
  double p = 0.3;         // per-slot fresh-update generation probability
  double gamma = 0.3;     // transmission failure probability
  double gamma_max = 0.3; // average transmission-probability budget
  int delta_max = 1000;   // AoI truncation bound
  int l_max = 10;         // max transmissions per update

  void validate() const {
    if (!(p > 0.0 && p <= 1.0))
      throw std::invalid_argument("ModelParams: p must be in (0,1]");
    if (!(gamma >= 0.0 && gamma < 1.0))
      throw std::invalid_argument("ModelParams: gamma must be in [0,1)");
    if (!(gamma_max > 0.0 && gamma_max <= 1.0))
      throw std::invalid_argument("ModelParams: gamma_max must be in (0,1]");
    if (l_max < 1)
      throw std::invalid_argument("ModelParams: l_max must be >= 1");
    if (delta_max < l_max + 2)
      throw std::invalid_argument("ModelParams: delta_max must be >= l_max + 2");
  }
};

/// CMDP state: AoI delta, transmission count l of the last-sent update,
/// fresh-update flag b. Valid states satisfy 1 <= delta <= delta_max,
/// 0 <= l <= min(delta, l_max), b in {0,1}.
struct State {
  int delta = 1;
  int l = 0;
  int b = 0;

  friend bool operator==(const State&, const State&) = default;
};

inline std::string to_string(const State& s) {
  return "(" + std::to_string(s.delta) + "," + std::to_string(s.l) + "," +
         std::to_string(s.b) + ")";
}

/// Dense bijective enumeration of the truncated state space.
class StateSpace {
 public:
  explicit StateSpace(const ModelParams& params)
      : delta_max_(params.delta_max), l_max_(params.l_max) {
    params.validate();
    offset_.resize(delta_max_ + 2, 0);
    for (int delta = 1; delta <= delta_max_; ++delta) {
      offset_[delta] = size_;
      size_ += 2 * (std::min(delta, l_max_) + 1);
    }
    offset_[delta_max_ + 1] = size_;
    states_.reserve(size_);
    for (int delta = 1; delta <= delta_max_; ++delta)
      for (int l = 0; l <= std::min(delta, l_max_); ++l)
        for (int b = 0; b <= 1; ++b) states_.push_back(State{delta, l, b});
  }

  int size() const { return size_; }
  int delta_max() const { return delta_max_; }
  int l_max() const { return l_max_; }

  bool valid(const State& s) const {
    return s.delta >= 1 && s.delta <= delta_max_ && s.l >= 0 &&
           s.l <= std::min(s.delta, l_max_) && (s.b == 0 || s.b == 1);
  }

  int index(const State& s) const {
    if (!valid(s)) throw std::invalid_argument("invalid state " + to_string(s));
    return offset_[s.delta] + 2 * s.l + s.b;
  }

  const State& state(int idx) const { return states_[idx]; }

 private:
  int delta_max_;
  int l_max_;
  int size_ = 0;
  std::vector<int> offset_;
  std::vector<State> states_;
};

inline std::vector<Action> allowed_actions_impl(const State& s, int l_max) {
  if (s.b == 1) return {Action::idle, Action::fresh};
  if (s.l > 0 && s.l < l_max && s.delta != s.l)
    return {Action::idle, Action::retransmit};
  return {Action::idle};
}

/// State classes of the reduced action space:
///   b=1                          -> {idle, fresh}
///   b=0, 0 < l < l_max, delta!=l -> {idle, retransmit}
///   otherwise                    -> {idle}
inline std::vector<Action> allowed_actions(const State& s, const ModelParams& params) {
  params.validate();
  if (s.delta < 1 || s.delta > params.delta_max || s.l < 0 ||
      s.l > std::min(s.delta, params.l_max) || (s.b != 0 && s.b != 1))
    throw std::invalid_argument("invalid state " + to_string(s));
  return allowed_actions_impl(s, params.l_max);
}

struct Outcome {
  State next;
  double prob;
};

/// Successor distribution per the slotted dynamics: the fresh-update flag
/// is redrawn Bernoulli(p) each slot and delta saturates at delta_max.
inline std::vector<Outcome> transition(const State& s, Action a,
                                       const ModelParams& params) {
  const auto allowed = allowed_actions(s, params); // validates state too
  bool ok = false;
  for (Action x : allowed) ok = ok || x == a;
  if (!ok)
    throw std::invalid_argument("action " + std::to_string(action_id(a)) +
                                " not allowed in state " + to_string(s));
  const double p = params.p;
  const int up = std::min(s.delta + 1, params.delta_max);
  std::vector<Outcome> out;
  auto push = [&](int delta, int l, double prob) {
    if (prob <= 0.0) return;
    for (int b = 1; b >= 0; --b) {
      const double pb = (b == 1) ? p : 1.0 - p;
      if (pb > 0.0) out.push_back({State{delta, l, b}, prob * pb});
    }
  };
  switch (a) {
    case Action::idle:
      push(up, 0, 1.0);
      break;
    case Action::retransmit:
      push(up, s.l + 1, params.gamma);
      push(s.l + 1, s.l + 1, 1.0 - params.gamma);
      break;
    case Action::fresh:
      push(up, 1, params.gamma);
      push(1, 1, 1.0 - params.gamma);
      break;
  }
  return out;
}

class Kernel;
inline Kernel build_kernel(const ModelParams& params);

/// Transition/reward/cost tensors over states x allowed actions, stored as
/// CSR rows of at most four weighted successors.
class Kernel {
 public:
  struct Row {
    Action action;
    int count = 0;
    std::array<int, 4> next{};
    std::array<double, 4> prob{};
  };

  explicit Kernel(const ModelParams& params)
      : params_(params), space_(params) {
    row_begin_.resize(space_.size() + 1, 0);
    rows_.reserve(2 * space_.size());
    for (int idx = 0; idx < space_.size(); ++idx) {
      row_begin_[idx] = static_cast<int>(rows_.size());
      const State& s = space_.state(idx);
      for (Action a : allowed_actions(s)) {
        Row row;
        row.action = a;
        for (const Outcome& o : transition(s, a)) {
          row.next[row.count] = space_.index(o.next);
          row.prob[row.count] = o.prob;
          ++row.count;
        }
        rows_.push_back(row);
      }
    }
    row_begin_[space_.size()] = static_cast<int>(rows_.size());
  }

  const ModelParams& params() const { return params_; }
  const StateSpace& space() const { return space_; }

  std::vector<Action> allowed_actions(const State& s) const {
    if (!space_.valid(s))
      throw std::invalid_argument("invalid state " + to_string(s));
    return allowed_actions_impl(s, params_.l_max);
  }

  std::vector<Outcome> transition(const State& s, Action a) const {
    return aoi::transition(s, a, params_);
  }

  int num_states() const { return space_.size(); }
  int row_begin(int state_idx) const { return row_begin_[state_idx]; }
  int row_end(int state_idx) const { return row_begin_[state_idx + 1]; }
  const Row& row(int r) const { return rows_[r]; }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  double reward(int state_idx) const { return space_.state(state_idx).delta; }
  static double cost(Action a) { return transmits(a) ? 1.0 : 0.0; }

  /// Row index of (state, action); -1 if the action is eliminated there.
  int find_row(int state_idx, Action a) const {
    for (int r = row_begin_[state_idx]; r < row_end(state_idx); ++r)
      if (rows_[r].action == a) return r;
    return -1;
  }

 private:
  ModelParams params_;
  StateSpace space_;
  std::vector<int> row_begin_;
  std::vector<Row> rows_;
};

inline Kernel build_kernel(const ModelParams& params) { return Kernel(params); }

} // namespace aoi
