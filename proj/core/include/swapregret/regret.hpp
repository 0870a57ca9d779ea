#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "swapregret/errors.hpp"

namespace swapregret {

// A per-day reward vector; one entry per action.
using RewardVector = std::vector<double>;

// Declared range of a reward stream: every entry lies in [lo, lo + width].
// Regret formulas are offset-agnostic, so lo may be negative (the hard
// sequence uses lo = -1); guarantees scale with width only.
struct RewardBounds {
  double lo = 0.0;
  double width = 1.0;

  double hi() const { return lo + width; }
  bool contains(double x) const;
  void validate() const;  // width > 0
};

// A probability distribution over n actions.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> probs);
  static ActionDistribution uniform(int n);
  static ActionDistribution point_mass(int n, int action);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  std::span<const double> probs() const { return probs_; }

  bool operator==(const ActionDistribution&) const = default;

 private:
  std::vector<double> probs_;
};

// A fixed remapping of actions; entry i holds phi(i). Indices are 0-based
// in memory and 1-based in serialized form.
struct SwapFunction {
  std::vector<int> map;

  static SwapFunction identity(int n);
  void validate(int n) const;
  bool operator==(const SwapFunction&) const = default;
};

// The full (strategy, reward) history of one run: the interface between
// learners, adversaries, and the regret oracles.
class PlayRecord {
 public:
  PlayRecord() = default;
  explicit PlayRecord(RewardBounds bounds) : bounds_(bounds) {}

  void add_day(ActionDistribution strategy, RewardVector reward);
  void append(const PlayRecord& other);

  std::int64_t horizon() const { return static_cast<std::int64_t>(days_.size()); }
  bool empty() const { return days_.empty(); }
  int num_actions() const;

  const ActionDistribution& strategy(std::int64_t t) const { return days_[check(t)].first; }
  const RewardVector& reward(std::int64_t t) const { return days_[check(t)].second; }

  const RewardBounds& bounds() const { return bounds_; }
  void set_bounds(RewardBounds b) { bounds_ = b; }

 private:
  std::size_t check(std::int64_t t) const;
  std::vector<std::pair<ActionDistribution, RewardVector>> days_;
  RewardBounds bounds_{};
};

struct RegretReport {
  double external = 0.0;
  double swap = 0.0;
  SwapFunction best_swap;
  int best_fixed_action = 0;
};

// Gap to the best fixed action in hindsight.
double external_regret(const PlayRecord& record);

// Gap to the best fixed action remapping. The objective is separable per
// source action, so the optimum is an argmax per row of the n x n gain
// matrix G(i, j) = sum_t p_t(i) r_t(j); ties break to the smallest index.
std::pair<double, SwapFunction> swap_regret(const PlayRecord& record);

RegretReport regret_report(const PlayRecord& record);

// Minimal learner interface: commit a strategy, then observe the day's
// rewards. Instances are single-owner and not internally synchronized.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;
  virtual int num_actions() const = 0;
  virtual ActionDistribution act() = 0;
  virtual void update(const RewardVector& reward) = 0;
};

// Multiplicative weights over n actions: p_t(i) proportional to
// exp(eta * cumulative reward of i), evaluated in shifted log-domain.
class MwuLearner : public OnlineLearner {
 public:
  // Step size sqrt(log(n)/T)/B tuned for the declared horizon and width.
  MwuLearner(int n, std::int64_t horizon, double width, double lo = 0.0);

  static MwuLearner with_step_size(int n, double eta, std::int64_t horizon,
                                   double width, double lo = 0.0);

  int num_actions() const override { return n_; }
  ActionDistribution act() override;
  void update(const RewardVector& reward) override;

  double step_size() const { return eta_; }
  std::int64_t days_played() const { return t_; }
  std::int64_t horizon() const { return horizon_; }
  RewardBounds bounds() const { return {lo_, width_}; }

 private:
  MwuLearner(int n, double eta, std::int64_t horizon, double width, double lo, bool derived);

  int n_;
  std::int64_t horizon_;
  double width_;
  double lo_;
  double eta_;
  std::int64_t t_ = 0;
  std::vector<double> cum_;
  std::vector<double> cum_carry_;
};

// Plays uniform forever; the reporting baseline the lower-bound diagnostics use.
class UniformLearner : public OnlineLearner {
 public:
  explicit UniformLearner(int n);
  int num_actions() const override { return n_; }
  ActionDistribution act() override;
  void update(const RewardVector& reward) override;

 private:
  int n_;
};

// Runs a fresh learner instance every segment_length days. Swap regret of the
// composite is at most the sum of per-segment swap regrets.
class RestartingLearner : public OnlineLearner {
 public:
  using Factory = std::function<std::unique_ptr<OnlineLearner>()>;
  RestartingLearner(Factory factory, std::int64_t segment_length);

  int num_actions() const override;
  ActionDistribution act() override;
  void update(const RewardVector& reward) override;

 private:
  void ensure_current();
  Factory factory_;
  std::int64_t segment_length_;
  std::int64_t pos_ = 0;  // days consumed in the current segment
  std::unique_ptr<OnlineLearner> current_;
};

namespace detail {
// Shared entry validation; throws WidthViolation naming the offending entry.
void check_reward_width(const RewardVector& r, const RewardBounds& bounds,
                        const char* who);
}  // namespace detail

}  // namespace swapregret
