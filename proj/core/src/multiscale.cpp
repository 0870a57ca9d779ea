#include "swapregret/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swapregret/numeric.hpp"

namespace swapregret {

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  if (base == 0) return exp == 0 ? 1 : 0;
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (out > std::numeric_limits<std::uint64_t>::max() / base) {
      double magnitude = static_cast<double>(exp) * std::log10(static_cast<double>(base));
      throw ConfigError("horizon overflow: " + std::to_string(base) + "^" +
                        std::to_string(exp) + " ~ 10^" + std::to_string(magnitude) +
                        " exceeds 64 bits; use a larger epsilon or a day budget");
    }
    out *= base;
  }
  return out;
}

Schedule schedule_from_epsilon(double epsilon, double log_n) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw ParameterError("schedule_from_epsilon: epsilon must be in (0, 1]");
  }
  if (log_n < 0.0) throw ParameterError("schedule_from_epsilon: negative log_n");
  Schedule s;
  s.scales = static_cast<int>(std::ceil(std::log2(1.0 / epsilon))) + 1;
  double pow4s = std::ldexp(1.0, 2 * s.scales);  // 4^S
  s.block = static_cast<std::uint64_t>(std::ceil(4.0 * std::max(log_n, std::log(2.0)) * pow4s));
  s.horizon = checked_pow(s.block, std::uint64_t{1} << s.scales);
  return s;
}

Schedule schedule_within_budget(double epsilon, double log_n, std::uint64_t max_days) {
  if (max_days < 4) throw ParameterError("schedule_within_budget: budget too small");
  // Exact schedule if it fits. Sizes are checked in log-space first so that an
  // unrepresentable horizon is not an error here.
  {
    int scales = static_cast<int>(std::ceil(std::log2(1.0 / epsilon))) + 1;
    double block =
        std::ceil(4.0 * std::max(log_n, std::log(2.0)) * std::ldexp(1.0, 2 * scales));
    double log_horizon = std::ldexp(1.0, scales) * std::log(block);
    if (log_horizon <= std::log(static_cast<double>(max_days)) + 1e-12) {
      Schedule s = schedule_from_epsilon(epsilon, log_n);
      if (s.horizon <= max_days) return s;
    }
  }
  Schedule best;
  double best_score = std::numeric_limits<double>::infinity();
  for (int scales = 0; scales < 6; ++scales) {
    std::uint64_t reps = std::uint64_t{1} << scales;  // 2^S factors in the horizon
    if (reps >= 63 || (std::uint64_t{1} << reps) > max_days) break;
    auto horizon_of = [&](std::uint64_t b) -> std::uint64_t {
      std::uint64_t t = 1;
      for (std::uint64_t i = 0; i < reps; ++i) {
        if (t > max_days / b) return 0;  // exceeds budget
        t *= b;
      }
      return t;
    };
    // Largest H with H^(2^S) <= max_days; the float root overshoots by at
    // most a couple of units.
    double root = std::pow(static_cast<double>(max_days), 1.0 / static_cast<double>(reps));
    auto block = static_cast<std::uint64_t>(root + 2.0);
    while (block > 2 && horizon_of(block) == 0) --block;
    std::uint64_t horizon = horizon_of(block);
    if (block < 2 || horizon == 0) continue;
    double score = std::ldexp(1.0, -scales) + 2.0 * std::sqrt(log_n / static_cast<double>(block));
    if (score < best_score) {
      best_score = score;
      best = Schedule{scales, block, horizon};
    }
  }
  if (!std::isfinite(best_score)) {
    throw ConfigError("schedule_within_budget: no feasible schedule under budget " +
                      std::to_string(max_days));
  }
  return best;
}

MultiScaleConfig MultiScaleConfig::from_epsilon(double epsilon, int n, double width) {
  if (n < 1) throw ParameterError("MultiScaleConfig: n must be >= 1");
  Schedule s = schedule_from_epsilon(epsilon, std::log(static_cast<double>(std::max(n, 2))));
  MultiScaleConfig cfg;
  cfg.n = n;
  cfg.width = width;
  cfg.scales = s.scales;
  cfg.block = s.block;
  cfg.horizon = s.horizon;
  cfg.epsilon = epsilon;
  cfg.validate();
  return cfg;
}

MultiScaleConfig MultiScaleConfig::from_epsilon_within_budget(double epsilon, int n, double width,
                                                              std::uint64_t max_days) {
  if (n < 1) throw ParameterError("MultiScaleConfig: n must be >= 1");
  Schedule s = schedule_within_budget(epsilon, std::log(static_cast<double>(std::max(n, 2))),
                                      max_days);
  MultiScaleConfig cfg;
  cfg.n = n;
  cfg.width = width;
  cfg.scales = s.scales;
  cfg.block = s.block;
  cfg.horizon = s.horizon;
  cfg.epsilon = epsilon;
  cfg.validate();
  return cfg;
}

MultiScaleConfig MultiScaleConfig::with_schedule(int n, double width, int scales,
                                                 std::uint64_t block, double lo) {
  MultiScaleConfig cfg;
  cfg.n = n;
  cfg.width = width;
  cfg.lo = lo;
  cfg.scales = scales;
  cfg.block = block;
  cfg.horizon = checked_pow(block, std::uint64_t{1} << scales);
  cfg.validate();
  return cfg;
}

void MultiScaleConfig::validate() const {
  if (n < 1) throw ParameterError("MultiScaleConfig: n must be >= 1");
  if (!(width > 0.0)) throw ParameterError("MultiScaleConfig: width must be positive");
  if (scales < 0 || scales > 62) throw ParameterError("MultiScaleConfig: scales out of range");
  if (block < 2) throw ParameterError("MultiScaleConfig: block must be >= 2");
  if (horizon != checked_pow(block, std::uint64_t{1} << scales)) {
    throw ParameterError("MultiScaleConfig: horizon must equal block^(2^scales)");
  }
}

MultiScaleLearner::MultiScaleLearner(MultiScaleConfig config) : config_(std::move(config)) {
  config_.validate();
  int count = config_.threads();
  threads_.reserve(static_cast<std::size_t>(count));
  std::uint64_t meta = 1;
  for (int k = 0; k < count; ++k) {
    std::uint64_t restart = meta * config_.block;  // fits: meta * block <= horizon
    Thread th;
    th.meta_len = meta;
    th.restart_len = restart;
    th.inner_width = static_cast<double>(meta) * config_.width;
    th.buffer.assign(static_cast<std::size_t>(config_.n), 0.0);
    th.buffer_carry.assign(static_cast<std::size_t>(config_.n), 0.0);
    reset_thread(th);
    threads_.push_back(std::move(th));
    meta = restart;
  }
}

void MultiScaleLearner::reset_thread(Thread& th) const {
  th.inner = std::make_unique<MwuLearner>(config_.n, static_cast<std::int64_t>(config_.block),
                                          th.inner_width);
  std::fill(th.buffer.begin(), th.buffer.end(), 0.0);
  std::fill(th.buffer_carry.begin(), th.buffer_carry.end(), 0.0);
}

ActionDistribution MultiScaleLearner::act() {
  if (t_ >= config_.horizon) {
    throw LifecycleError("MultiScaleLearner::act: horizon exhausted");
  }
  std::vector<double> p(static_cast<std::size_t>(config_.n), 0.0);
  for (auto& th : threads_) {
    ActionDistribution q = th.inner->act();
    for (int i = 0; i < config_.n; ++i) p[static_cast<std::size_t>(i)] += q[i];
  }
  double inv = 1.0 / static_cast<double>(threads_.size());
  for (double& x : p) x *= inv;
  return ActionDistribution(std::move(p));
}

ActionDistribution MultiScaleLearner::thread_strategy(int k) const {
  if (k < 0 || k >= static_cast<int>(threads_.size())) {
    throw ParameterError("thread_strategy: thread index out of range");
  }
  return threads_[static_cast<std::size_t>(k)].inner->act();
}

void MultiScaleLearner::update(const RewardVector& reward) {
  if (t_ >= config_.horizon) {
    throw LifecycleError("MultiScaleLearner::update: horizon exhausted");
  }
  if (static_cast<int>(reward.size()) != config_.n) {
    throw StructuralError("MultiScaleLearner::update: dimension mismatch");
  }
  detail::check_reward_width(reward, config_.bounds(), "MultiScaleLearner::update");
  // Offset-shifted so inner threads see [0, B] entries; the softmax outputs
  // are invariant under the shift.
  for (auto& th : threads_) {
    for (int i = 0; i < config_.n; ++i) {
      auto idx = static_cast<std::size_t>(i);
      double x = reward[idx] - config_.lo;
      double y = x - th.buffer_carry[idx];
      double t = th.buffer[idx] + y;
      th.buffer_carry[idx] = (t - th.buffer[idx]) - y;
      th.buffer[idx] = t;
    }
  }
  ++t_;
  for (auto& th : threads_) {
    if (t_ % th.meta_len == 0) {
      th.inner->update(th.buffer);
      std::fill(th.buffer.begin(), th.buffer.end(), 0.0);
      std::fill(th.buffer_carry.begin(), th.buffer_carry.end(), 0.0);
    }
    if (t_ % th.restart_len == 0 && t_ < config_.horizon) {
      reset_thread(th);
    }
  }
}

double eq3_bound(const PlayRecord& record, int scales, std::uint64_t block, double width) {
  if (scales < 0 || block < 1) throw ParameterError("eq3_bound: bad schedule");
  std::uint64_t expected = checked_pow(block, std::uint64_t{1} << scales);
  if (record.empty() || static_cast<std::uint64_t>(record.horizon()) != expected) {
    throw StructuralError("eq3_bound: record length must equal block^(2^scales)");
  }
  int n = record.num_actions();
  KahanSum sup_sum;  // sum_t ||r_t||_inf
  std::vector<KahanSum> totals(static_cast<std::size_t>(n));
  for (std::int64_t t = 0; t < record.horizon(); ++t) {
    const auto& r = record.reward(t);
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      auto idx = static_cast<std::size_t>(i);
      m = std::max(m, std::abs(r[idx]));
      totals[idx].add(r[idx]);
    }
    sup_sum.add(m);
  }
  double total_norm = 0.0;
  for (const auto& k : totals) total_norm = std::max(total_norm, std::abs(k.value()));
  double delta = 2.0 * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(block));
  return std::ldexp(sup_sum.value() - total_norm, -scales) +
         delta * static_cast<double>(record.horizon()) * width;
}

}  // namespace swapregret
