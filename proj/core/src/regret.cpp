#include "swapregret/regret.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swapregret/numeric.hpp"

namespace swapregret {

namespace {
constexpr double kDistributionTolerance = 1e-12;
}

bool RewardBounds::contains(double x) const {
  // Small relative slack so exact-width aggregates do not trip on float dust.
  double slack = 1e-9 * (1.0 + std::abs(width));
  return x >= lo - slack && x <= hi() + slack;
}

void RewardBounds::validate() const {
  if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(lo)) {
    throw ParameterError("RewardBounds: width must be positive and finite");
  }
}

ActionDistribution::ActionDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw StructuralError("ActionDistribution: empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw StructuralError("ActionDistribution: negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance * static_cast<double>(probs_.size() + 1)) {
    throw StructuralError("ActionDistribution: entries sum to " + std::to_string(sum));
  }
}

ActionDistribution ActionDistribution::uniform(int n) {
  if (n < 1) throw ParameterError("ActionDistribution::uniform: n must be >= 1");
  return ActionDistribution(std::vector<double>(n, 1.0 / n));
}

ActionDistribution ActionDistribution::point_mass(int n, int action) {
  if (n < 1) throw ParameterError("ActionDistribution::point_mass: n must be >= 1");
  if (action < 0 || action >= n) throw ParameterError("point_mass: action out of range");
  std::vector<double> p(n, 0.0);
  p[static_cast<std::size_t>(action)] = 1.0;
  return ActionDistribution(std::move(p));
}

SwapFunction SwapFunction::identity(int n) {
  SwapFunction phi;
  phi.map.resize(n);
  for (int i = 0; i < n; ++i) phi.map[static_cast<std::size_t>(i)] = i;
  return phi;
}

void SwapFunction::validate(int n) const {
  if (static_cast<int>(map.size()) != n) {
    throw StructuralError("SwapFunction: wrong arity");
  }
  for (int v : map) {
    if (v < 0 || v >= n) throw StructuralError("SwapFunction: target out of range");
  }
}

void PlayRecord::add_day(ActionDistribution strategy, RewardVector reward) {
  if (static_cast<std::size_t>(strategy.size()) != reward.size()) {
    throw StructuralError("PlayRecord: strategy/reward dimension mismatch");
  }
  if (!days_.empty() && strategy.size() != num_actions()) {
    throw StructuralError("PlayRecord: day has different action count");
  }
  days_.emplace_back(std::move(strategy), std::move(reward));
}

void PlayRecord::append(const PlayRecord& other) {
  for (std::int64_t t = 0; t < other.horizon(); ++t) {
    add_day(other.strategy(t), other.reward(t));
  }
}

int PlayRecord::num_actions() const {
  if (days_.empty()) throw StructuralError("PlayRecord: empty record has no action count");
  return days_.front().first.size();
}

std::size_t PlayRecord::check(std::int64_t t) const {
  if (t < 0 || t >= horizon()) throw StructuralError("PlayRecord: day index out of range");
  return static_cast<std::size_t>(t);
}

namespace {

// Cumulative reward per action and the learner's own cumulative reward.
struct Totals {
  std::vector<double> per_action;
  double algorithm;
};

Totals accumulate(const PlayRecord& record) {
  int n = record.num_actions();
  std::vector<KahanSum> per_action(static_cast<std::size_t>(n));
  KahanSum alg;
  for (std::int64_t t = 0; t < record.horizon(); ++t) {
    const auto& p = record.strategy(t);
    const auto& r = record.reward(t);
    for (int i = 0; i < n; ++i) {
      per_action[static_cast<std::size_t>(i)].add(r[static_cast<std::size_t>(i)]);
      alg.add(p[i] * r[static_cast<std::size_t>(i)]);
    }
  }
  Totals out;
  out.per_action.reserve(static_cast<std::size_t>(n));
  for (const auto& k : per_action) out.per_action.push_back(k.value());
  out.algorithm = alg.value();
  return out;
}

// G(i, j) = sum_t p_t(i) r_t(j).
std::vector<std::vector<double>> gain_matrix(const PlayRecord& record) {
  int n = record.num_actions();
  std::vector<std::vector<KahanSum>> g(
      static_cast<std::size_t>(n), std::vector<KahanSum>(static_cast<std::size_t>(n)));
  for (std::int64_t t = 0; t < record.horizon(); ++t) {
    const auto& p = record.strategy(t);
    const auto& r = record.reward(t);
    for (int i = 0; i < n; ++i) {
      if (p[i] == 0.0) continue;
      auto& row = g[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        row[static_cast<std::size_t>(j)].add(p[i] * r[static_cast<std::size_t>(j)]);
      }
    }
  }
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].value();
  return out;
}

}  // namespace

double external_regret(const PlayRecord& record) {
  if (record.empty()) throw StructuralError("external_regret: empty record");
  Totals totals = accumulate(record);
  double best = *std::max_element(totals.per_action.begin(), totals.per_action.end());
  return best - totals.algorithm;
}

std::pair<double, SwapFunction> swap_regret(const PlayRecord& record) {
  if (record.empty()) throw StructuralError("swap_regret: empty record");
  int n = record.num_actions();
  auto g = gain_matrix(record);
  SwapFunction phi;
  phi.map.resize(static_cast<std::size_t>(n));
  KahanSum swapped;
  KahanSum played;
  for (int i = 0; i < n; ++i) {
    const auto& row = g[static_cast<std::size_t>(i)];
    int best = 0;
    for (int j = 1; j < n; ++j) {
      if (row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(best)]) best = j;
    }
    phi.map[static_cast<std::size_t>(i)] = best;
    swapped.add(row[static_cast<std::size_t>(best)]);
    played.add(row[static_cast<std::size_t>(i)]);
  }
  return {swapped.value() - played.value(), std::move(phi)};
}

RegretReport regret_report(const PlayRecord& record) {
  if (record.empty()) throw StructuralError("regret_report: empty record");
  RegretReport report;
  Totals totals = accumulate(record);
  int best = 0;
  for (int i = 1; i < record.num_actions(); ++i) {
    if (totals.per_action[static_cast<std::size_t>(i)] >
        totals.per_action[static_cast<std::size_t>(best)])
      best = i;
  }
  report.best_fixed_action = best;
  report.external = totals.per_action[static_cast<std::size_t>(best)] - totals.algorithm;
  auto [swap, phi] = swap_regret(record);
  report.swap = swap;
  report.best_swap = std::move(phi);
  return report;
}

namespace detail {
void check_reward_width(const RewardVector& r, const RewardBounds& bounds, const char* who) {
  for (double x : r) {
    if (!bounds.contains(x)) {
      throw WidthViolation(std::string(who) + ": reward " + std::to_string(x) +
                           " outside declared [" + std::to_string(bounds.lo) + ", " +
                           std::to_string(bounds.hi()) + "]");
    }
  }
}
}  // namespace detail

MwuLearner::MwuLearner(int n, double eta, std::int64_t horizon, double width, double lo,
                       bool /*derived*/)
    : n_(n),
      horizon_(horizon),
      width_(width),
      lo_(lo),
      eta_(eta),
      cum_(static_cast<std::size_t>(n), 0.0),
      cum_carry_(static_cast<std::size_t>(n), 0.0) {
  if (n < 1) throw ParameterError("MwuLearner: n must be >= 1");
  if (horizon < 1) throw ParameterError("MwuLearner: horizon must be >= 1");
  if (!(width > 0.0)) throw ParameterError("MwuLearner: width must be positive");
  if (eta < 0.0 || !std::isfinite(eta)) throw ParameterError("MwuLearner: bad step size");
}

MwuLearner::MwuLearner(int n, std::int64_t horizon, double width, double lo)
    : MwuLearner(n,
                 (n >= 1 && horizon >= 1 && width > 0.0)
                     ? std::sqrt(std::log(static_cast<double>(std::max(n, 1))) /
                                 static_cast<double>(horizon)) /
                           width
                     : -1.0,
                 horizon, width, lo, true) {}

MwuLearner MwuLearner::with_step_size(int n, double eta, std::int64_t horizon, double width,
                                      double lo) {
  return MwuLearner(n, eta, horizon, width, lo, true);
}

ActionDistribution MwuLearner::act() {
  // Shifted log-domain softmax: exponents are <= 0, so no overflow for any
  // magnitude of eta * cumulative reward.
  double m = eta_ * *std::max_element(cum_.begin(), cum_.end());
  std::vector<double> w(cum_.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < cum_.size(); ++i) {
    w[i] = std::exp(eta_ * cum_[i] - m);
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return ActionDistribution(std::move(w));
}

void MwuLearner::update(const RewardVector& reward) {
  if (static_cast<int>(reward.size()) != n_) {
    throw StructuralError("MwuLearner::update: dimension mismatch");
  }
  if (t_ >= horizon_) {
    throw LifecycleError("MwuLearner::update: horizon exhausted");
  }
  detail::check_reward_width(reward, bounds(), "MwuLearner::update");
  for (std::size_t i = 0; i < cum_.size(); ++i) {
    double y = reward[i] - cum_carry_[i];
    double t = cum_[i] + y;
    cum_carry_[i] = (t - cum_[i]) - y;
    cum_[i] = t;
  }
  ++t_;
}

UniformLearner::UniformLearner(int n) : n_(n) {
  if (n < 1) throw ParameterError("UniformLearner: n must be >= 1");
}

ActionDistribution UniformLearner::act() { return ActionDistribution::uniform(n_); }

void UniformLearner::update(const RewardVector& reward) {
  if (static_cast<int>(reward.size()) != n_) {
    throw StructuralError("UniformLearner::update: dimension mismatch");
  }
}

RestartingLearner::RestartingLearner(Factory factory, std::int64_t segment_length)
    : factory_(std::move(factory)), segment_length_(segment_length) {
  if (segment_length < 1) throw ParameterError("RestartingLearner: segment length must be >= 1");
  ensure_current();
}

void RestartingLearner::ensure_current() {
  if (!current_ || pos_ == segment_length_) {
    current_ = factory_();
    pos_ = 0;
  }
}

int RestartingLearner::num_actions() const { return current_->num_actions(); }

ActionDistribution RestartingLearner::act() {
  ensure_current();
  return current_->act();
}

void RestartingLearner::update(const RewardVector& reward) {
  ensure_current();
  current_->update(reward);
  ++pos_;
}

}  // namespace swapregret
