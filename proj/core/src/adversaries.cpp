#include "swapregret/adversaries.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swapregret {

PlayRecord play(OnlineLearner& learner, Adversary& adversary, std::int64_t max_days) {
  if (learner.num_actions() != adversary.num_actions()) {
    throw StructuralError("play: learner/adversary action counts differ");
  }
  PlayRecord record(adversary.bounds());
  for (std::int64_t t = 0; max_days < 0 || t < max_days; ++t) {
    if (adversary.finished()) {
      if (max_days < 0) break;
      throw LifecycleError("play: adversary exhausted before max_days");
    }
    ActionDistribution p = learner.act();
    RewardVector r = adversary.next(p);
    learner.update(r);
    record.add_day(std::move(p), std::move(r));
  }
  if (max_days < 0 && !adversary.finished()) {
    throw LifecycleError("play: open-ended run requires a finite adversary");
  }
  return record;
}

// --- HardSequence ------------------------------------------------------------

std::int64_t HardSeqConfig::block_days() const {
  return std::max<std::int64_t>(1, std::llround(1.0 / (400.0 * bias * bias)));
}

double HardSeqConfig::skip_probability() const { return 1.0 / (2.0 * branching); }

std::int64_t HardSeqConfig::num_actions() const {
  std::int64_t n = 2;
  for (int i = 0; i < depth; ++i) n *= branching;
  return n;
}

void HardSeqConfig::validate() const {
  if (branching < 1) throw ParameterError("HardSeqConfig: branching must be >= 1");
  if (depth < 0) throw ParameterError("HardSeqConfig: depth must be >= 0");
  if (!(bias > 0.0) || bias > 0.05) {
    throw ParameterError("HardSeqConfig: bias must be in (0, 1/20]");
  }
  if (num_actions() > (std::int64_t{1} << 30)) {
    throw ParameterError("HardSeqConfig: action count too large");
  }
}

double expected_length(const HardSeqConfig& config) {
  config.validate();
  double q = config.skip_probability();
  double c = 0.0;
  for (int k = 0; k < config.branching; ++k) c += std::pow(1.0 - q, k);
  return static_cast<double>(config.block_days()) * std::pow(c, config.depth);
}

HardSequence::HardSequence(HardSeqConfig config)
    : config_(config), rng_(make_rng(config.seed, "hardseq")) {
  config_.validate();
  template_.assign(static_cast<std::size_t>(config_.num_actions()), 0.0);
  stack_.push_back(Frame{config_.depth, 0, 0});
  // Fill for the root; deeper fills are written on the way down.
  double fill = 0.0;  // (L - L)/(16(L+1))
  std::fill(template_.begin(), template_.end(), fill);
  descend_to_leaf();
}

std::int64_t HardSequence::block_width(int level) const {
  std::int64_t w = 2;
  for (int i = 0; i < level; ++i) w *= config_.branching;
  return w;
}

void HardSequence::descend_to_leaf() {
  int levels = config_.depth + 1;
  while (stack_.back().level > 0) {
    const Frame& top = stack_.back();
    int child_level = top.level - 1;
    std::int64_t child_offset = top.offset + top.next_child * block_width(child_level);
    if (child_level >= 1) {
      // Internal-node fill; a leaf's two entries keep the ancestor fill until
      // the per-day coin draws shadow them.
      double fill = static_cast<double>(config_.depth - child_level) / (16.0 * levels);
      for (std::int64_t i = 0; i < block_width(child_level); ++i) {
        template_[static_cast<std::size_t>(child_offset + i)] = fill;
      }
    }
    stack_.push_back(Frame{child_level, child_offset, 0});
  }
  // Leaf setup: pick which of the two actions carries the biased coin.
  const Frame& leaf = stack_.back();
  int star = next_bernoulli(rng_, 0.5) ? 1 : 0;
  biased_idx_ = leaf.offset + star;
  fair_idx_ = leaf.offset + (1 - star);
  remaining_ = config_.block_days();
  visits_.push_back(LeafVisit{leaf.offset / 2, static_cast<int>(biased_idx_), days_ + 1,
                              config_.block_days()});
}

void HardSequence::unwind() {
  // The finished leaf's actions are passed for good.
  template_[static_cast<std::size_t>(biased_idx_)] = -1.0;
  template_[static_cast<std::size_t>(fair_idx_)] = -1.0;
  stack_.pop_back();
  while (!stack_.empty()) {
    Frame& node = stack_.back();
    ++node.next_child;
    if (next_bernoulli(rng_, config_.skip_probability())) {
      // Skip the rest of this subtree.
      for (std::int64_t i = 0; i < block_width(node.level); ++i) {
        template_[static_cast<std::size_t>(node.offset + i)] = -1.0;
      }
      stack_.pop_back();
      continue;
    }
    if (node.next_child < config_.branching) {
      descend_to_leaf();
      return;
    }
    stack_.pop_back();  // all children visited; every action below is already -1
  }
  finished_ = true;
}

RewardVector HardSequence::next(const ActionDistribution& /*strategy*/) {
  if (finished_) throw LifecycleError("HardSequence::next: stream finished");
  RewardVector out = template_;
  int levels = config_.depth + 1;
  double base = static_cast<double>(config_.depth) / (16.0 * levels);
  double unit = 1.0 / (16.0 * levels);
  out[static_cast<std::size_t>(biased_idx_)] =
      base + unit * (next_bernoulli(rng_, 0.5 + config_.bias) ? 1.0 : 0.0);
  out[static_cast<std::size_t>(fair_idx_)] =
      base + unit * (next_bernoulli(rng_, 0.5) ? 1.0 : 0.0);
  ++days_;
  if (--remaining_ == 0) unwind();
  return out;
}

ZeroPadded::ZeroPadded(std::unique_ptr<Adversary> inner) : inner_(std::move(inner)) {
  if (!inner_) throw ParameterError("ZeroPadded: null inner adversary");
}

RewardBounds ZeroPadded::bounds() const {
  RewardBounds b = inner_->bounds();
  // Padding emits zeros; widen if the declared range excludes them.
  if (b.lo > 0.0) b = {0.0, b.hi()};
  if (b.hi() < 0.0) b = {b.lo, -b.lo};
  return b;
}

RewardVector ZeroPadded::next(const ActionDistribution& strategy) {
  if (!inner_->finished()) {
    ++real_;
    return inner_->next(strategy);
  }
  ++padded_;
  return RewardVector(static_cast<std::size_t>(inner_->num_actions()), 0.0);
}

// --- TwoCoinGame -------------------------------------------------------------

std::int64_t TwoCoinConfig::block_days() const {
  return std::max<std::int64_t>(1, std::llround(1.0 / (400.0 * bias * bias)));
}

void TwoCoinConfig::validate() const {
  if (!(bias > 0.0) || bias > 0.05) {
    throw ParameterError("TwoCoinConfig: bias must be in (0, 1/20]");
  }
}

TwoCoinGame::TwoCoinGame(TwoCoinConfig config)
    : config_(config), rng_(make_rng(config.seed, "twocoin")) {
  config_.validate();
  biased_ = next_bernoulli(rng_, 0.5) ? 1 : 0;
}

RewardVector TwoCoinGame::next(const ActionDistribution& /*strategy*/) {
  if (finished()) throw LifecycleError("TwoCoinGame::next: game exhausted");
  ++day_;
  RewardVector r(3, 0.0);
  double mean0 = biased_ == 0 ? 0.5 + config_.bias : 0.5;
  double mean1 = biased_ == 1 ? 0.5 + config_.bias : 0.5;
  r[0] = next_bernoulli(rng_, mean0) ? 1.0 : 0.0;
  r[1] = next_bernoulli(rng_, mean1) ? 1.0 : 0.0;
  return r;
}

double twocoin_uniform_policy_gain(const TwoCoinConfig& config) {
  config.validate();
  return config.bias * static_cast<double>(config.block_days()) / 2.0;
}

// --- Plumbing adversaries ----------------------------------------------------

AdaptiveBestResponse::AdaptiveBestResponse(int n) : n_(n) {
  if (n < 1) throw ParameterError("AdaptiveBestResponse: n must be >= 1");
}

RewardVector AdaptiveBestResponse::next(const ActionDistribution& strategy) {
  if (strategy.size() != n_) {
    throw StructuralError("AdaptiveBestResponse: dimension mismatch");
  }
  int least = 0;
  for (int i = 1; i < n_; ++i) {
    if (strategy[i] < strategy[least]) least = i;
  }
  RewardVector r(static_cast<std::size_t>(n_), 0.0);
  r[static_cast<std::size_t>(least)] = 1.0;
  return r;
}

UniformRewards::UniformRewards(int n, double width, std::uint64_t seed)
    : n_(n), width_(width), rng_(make_rng(seed, "uniform-rewards")) {
  if (n < 1) throw ParameterError("UniformRewards: n must be >= 1");
  if (!(width > 0.0)) throw ParameterError("UniformRewards: width must be positive");
}

RewardVector UniformRewards::next(const ActionDistribution& /*strategy*/) {
  RewardVector r(static_cast<std::size_t>(n_));
  for (double& x : r) x = next_double(rng_) * width_;
  return r;
}

BernoulliRewards::BernoulliRewards(int n, std::uint64_t seed)
    : n_(n), rng_(make_rng(seed, "bernoulli-rewards")) {
  if (n < 1) throw ParameterError("BernoulliRewards: n must be >= 1");
  means_.resize(static_cast<std::size_t>(n));
  for (double& m : means_) m = next_double(rng_);
}

RewardVector BernoulliRewards::next(const ActionDistribution& /*strategy*/) {
  RewardVector r(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    r[static_cast<std::size_t>(i)] = next_bernoulli(rng_, means_[static_cast<std::size_t>(i)]) ? 1.0 : 0.0;
  }
  return r;
}

}  // namespace swapregret
