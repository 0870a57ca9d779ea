#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "swapregret/random.hpp"
#include "swapregret/regret.hpp"

namespace swapregret {

// A reward-stream generator. Oblivious generators ignore the committed
// strategy; it is part of the signature so adaptive adversaries fit the same
// harness. Generators are single-owner.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual int num_actions() const = 0;
  virtual RewardBounds bounds() const = 0;
  virtual bool finished() const { return false; }
  virtual RewardVector next(const ActionDistribution& strategy) = 0;
};

// Runs learner vs adversary, collecting the full (strategy, reward) history.
// Stops after max_days, or earlier when the adversary runs out; max_days < 0
// plays a finite adversary to completion.
PlayRecord play(OnlineLearner& learner, Adversary& adversary, std::int64_t max_days);

// --- Depth-first hard sequence --------------------------------------------

// Parameters of the K-ary depth-first reward stream. Internally actions are
// 0-based: leaf a (read as a base-K integer) owns actions 2a and 2a+1, which
// print as 2a+1 and 2a+2 in serialized form.
struct HardSeqConfig {
  int branching = 2;       // K
  int depth = 1;           // L; root sits at level L, leaves at level 0
  double bias = 0.05;      // Delta in (0, 1/20]
  std::uint64_t seed = 0;

  std::int64_t block_days() const;    // days per leaf visit: max(1, round(1/(400 Delta^2)))
  double skip_probability() const;    // 1/(2K)
  std::int64_t num_actions() const;   // 2 K^L
  static RewardBounds reward_bounds() { return {-1.0, 1.0 + 1.0 / 16.0}; }
  void validate() const;
};

// E[stream length] = block_days * C_K^L with C_K = sum_{k<K} (1 - 1/(2K))^k.
double expected_length(const HardSeqConfig& config);

struct LeafVisit {
  std::int64_t leaf = 0;         // 0-based leaf index
  int biased_action = 0;         // 0-based action holding the biased coin
  std::int64_t first_day = 0;    // 1-based day the visit started
  std::int64_t days = 0;
};

// Oblivious depth-first stream. Nature walks the leaves left to right,
// skipping the rest of a subtree with probability 1/(2K) after each child.
// A visited leaf emits block_days of coin draws on its two actions; passed
// actions read -1 forever after; actions ahead of the walk read the fill
// value (L - level)/(16(L+1)) of their lowest ancestor on the current path.
// The stream is a pure function of the seed.
class HardSequence : public Adversary {
 public:
  explicit HardSequence(HardSeqConfig config);

  int num_actions() const override { return static_cast<int>(config_.num_actions()); }
  RewardBounds bounds() const override { return HardSeqConfig::reward_bounds(); }
  bool finished() const override { return finished_; }
  RewardVector next(const ActionDistribution& strategy) override;

  const HardSeqConfig& config() const { return config_; }
  std::int64_t days_emitted() const { return days_; }
  // Chronological log of leaf visits (diagnostics; grows as the walk proceeds).
  const std::vector<LeafVisit>& leaf_visits() const { return visits_; }
  // Current fill/passed values per action; all -1 once finished.
  const std::vector<double>& current_rewards() const { return template_; }

 private:
  struct Frame {
    int level;                 // of this node
    std::int64_t offset;       // first action (0-based) of its block
    int next_child;            // child currently under visit
  };

  void descend_to_leaf();
  void unwind();
  std::int64_t block_width(int level) const;  // 2 K^level

  HardSeqConfig config_;
  Rng rng_;
  std::vector<double> template_;
  std::vector<Frame> stack_;
  std::vector<LeafVisit> visits_;
  std::int64_t remaining_ = 0;   // days left at the current leaf
  std::int64_t biased_idx_ = 0;
  std::int64_t fair_idx_ = 0;
  std::int64_t days_ = 0;
  bool finished_ = false;
};

// Wraps a finite stream and continues with all-zero days forever; the padding
// day count is exposed as stream metadata.
class ZeroPadded : public Adversary {
 public:
  explicit ZeroPadded(std::unique_ptr<Adversary> inner);
  int num_actions() const override { return inner_->num_actions(); }
  RewardBounds bounds() const override;
  bool finished() const override { return false; }
  RewardVector next(const ActionDistribution& strategy) override;
  std::int64_t padded_days() const { return padded_; }
  std::int64_t real_days() const { return real_; }

 private:
  std::unique_ptr<Adversary> inner_;
  std::int64_t padded_ = 0;
  std::int64_t real_ = 0;
};

// --- Two-coin game ----------------------------------------------------------

struct TwoCoinConfig {
  double bias = 0.05;      // Delta in (0, 1/20]
  std::uint64_t seed = 0;
  std::int64_t block_days() const;  // max(1, round(1/(400 Delta^2)))
  void validate() const;
};

// One fair coin, one Delta-biased coin (identity drawn uniformly at
// construction), plus a dummy action paying 0. Runs for block_days days.
class TwoCoinGame : public Adversary {
 public:
  explicit TwoCoinGame(TwoCoinConfig config);
  int num_actions() const override { return 3; }
  RewardBounds bounds() const override { return {0.0, 1.0}; }
  bool finished() const override { return day_ >= config_.block_days(); }
  RewardVector next(const ActionDistribution& strategy) override;

  int biased_coin() const { return biased_; }  // 0 or 1
  const TwoCoinConfig& config() const { return config_; }

 private:
  TwoCoinConfig config_;
  Rng rng_;
  int biased_;
  std::int64_t day_ = 0;
};

// Expected per-game gain of the play-both-coins-uniformly policy when
// swapping both coins to the biased one: Delta * H / 2.
double twocoin_uniform_policy_gain(const TwoCoinConfig& config);

// --- Plumbing adversaries ---------------------------------------------------

// Puts reward 1 on the learner's currently least-played action, 0 elsewhere
// (ties to the smallest index). A strong adaptive stress adversary.
class AdaptiveBestResponse : public Adversary {
 public:
  explicit AdaptiveBestResponse(int n);
  int num_actions() const override { return n_; }
  RewardBounds bounds() const override { return {0.0, 1.0}; }
  RewardVector next(const ActionDistribution& strategy) override;

 private:
  int n_;
};

// Entries drawn iid uniform from [0, width].
class UniformRewards : public Adversary {
 public:
  UniformRewards(int n, double width, std::uint64_t seed);
  int num_actions() const override { return n_; }
  RewardBounds bounds() const override { return {0.0, width_}; }
  RewardVector next(const ActionDistribution& strategy) override;

 private:
  int n_;
  double width_;
  Rng rng_;
};

// Entries drawn iid Bernoulli, one fixed mean per action (means drawn once
// uniformly at construction).
class BernoulliRewards : public Adversary {
 public:
  BernoulliRewards(int n, std::uint64_t seed);
  int num_actions() const override { return n_; }
  RewardBounds bounds() const override { return {0.0, 1.0}; }
  RewardVector next(const ActionDistribution& strategy) override;
  const std::vector<double>& means() const { return means_; }

 private:
  int n_;
  std::vector<double> means_;
  Rng rng_;
};

}  // namespace swapregret
