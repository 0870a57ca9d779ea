#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "swapregret/regret.hpp"

namespace swapregret {

// base^exp with overflow detection; the error message reports the magnitude.
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp);

// A (scale count, block size, horizon) triple with horizon = block^(2^scales).
struct Schedule {
  int scales = 0;            // S; the learner runs 2^S nested threads
  std::uint64_t block = 2;   // H
  std::uint64_t horizon = 4; // H^(2^S)
};

// The schedule targeting epsilon-per-day swap regret: S = ceil(log2(1/eps))+1,
// H = ceil(4 ln(max(n,2)) 4^S). Throws ConfigError when the horizon does not
// fit in 64 bits.
Schedule schedule_from_epsilon(double epsilon, double log_n);

// Largest schedule of the same shape fitting within max_days. Returns the
// exact schedule when it already fits; otherwise picks the (S, H) minimizing
// the per-day bound proxy 2^-S + 2 sqrt(log_n / H) subject to the budget.
Schedule schedule_within_budget(double epsilon, double log_n, std::uint64_t max_days);

struct MultiScaleConfig {
  int n = 1;
  double width = 1.0;  // B
  double lo = 0.0;     // rewards live in [lo, lo + width]
  int scales = 0;      // S
  std::uint64_t block = 2;    // H
  std::uint64_t horizon = 4;  // T = H^(2^S), enforced
  std::optional<double> epsilon;  // only recorded when derived from a target rate

  static MultiScaleConfig from_epsilon(double epsilon, int n, double width);
  static MultiScaleConfig from_epsilon_within_budget(double epsilon, int n, double width,
                                                     std::uint64_t max_days);
  static MultiScaleConfig with_schedule(int n, double width, int scales, std::uint64_t block,
                                        double lo = 0.0);

  int threads() const { return 1 << scales; }
  RewardBounds bounds() const { return {lo, width}; }
  void validate() const;
};

// 2^S nested multiplicative-weights threads. Thread k (0-based) treats H^k
// days as one meta-day, runs a fresh inner MWU of horizon H and width H^k * B
// per restart, and restarts every H^(k+1) days. act() plays the uniform
// mixture of thread strategies. The full trajectory is a pure function of
// (config, reward stream).
class MultiScaleLearner : public OnlineLearner {
 public:
  explicit MultiScaleLearner(MultiScaleConfig config);

  int num_actions() const override { return config_.n; }
  ActionDistribution act() override;
  void update(const RewardVector& reward) override;

  const MultiScaleConfig& config() const { return config_; }
  std::uint64_t days_played() const { return t_; }
  bool completed() const { return t_ == config_.horizon; }

  // Thread k's current strategy q_{k,t}; constant within each of its meta-days.
  ActionDistribution thread_strategy(int k) const;

 private:
  struct Thread {
    std::uint64_t meta_len;     // H^k
    std::uint64_t restart_len;  // H^(k+1)
    double inner_width;         // H^k * B
    std::unique_ptr<MwuLearner> inner;
    std::vector<double> buffer;        // current meta-day aggregate, offset-shifted
    std::vector<double> buffer_carry;  // compensation terms
  };

  void reset_thread(Thread& th) const;

  MultiScaleConfig config_;
  std::vector<Thread> threads_;
  std::uint64_t t_ = 0;
};

// Deterministic per-stream swap-regret bound for the multi-scale learner:
// 2^-S (sum_t ||r_t||_inf - ||sum_t r_t||_inf) + delta T B with
// delta = 2 sqrt(ln(n)/H). Requires the record to span the full horizon.
double eq3_bound(const PlayRecord& record, int scales, std::uint64_t block, double width);

}  // namespace swapregret
