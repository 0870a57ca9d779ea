#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "swapregret/multiscale.hpp"
#include "swapregret/random.hpp"
#include "swapregret/regret.hpp"

namespace swapregret::nfg {

// An m-player game with n actions per player and utilities in [0, 1], backed
// either by a dense tensor or by a payoff oracle. query() is the metered
// access path; utility() is unmetered and needs the dense tensor.
class NormalFormGame {
 public:
  using Oracle = std::function<double(int player, std::span<const int> profile)>;

  static NormalFormGame dense(int players, int actions, std::vector<double> utilities);
  static NormalFormGame from_oracle(int players, int actions, Oracle oracle);
  // Utilities drawn iid uniform from [0, 1].
  static NormalFormGame random(int players, int actions, Rng& rng);

  int players() const { return players_; }
  int actions() const { return actions_; }
  bool is_dense() const { return !utilities_.empty(); }
  std::int64_t profiles() const { return profiles_; }

  // Metered payoff query; one call = one query.
  double query(int player, std::span<const int> profile) const;
  std::uint64_t query_count() const { return queries_; }
  void reset_query_count() const { queries_ = 0; }

  // Unmetered dense access for exact computation and verification.
  double utility(int player, std::span<const int> profile) const;

  std::int64_t profile_index(std::span<const int> profile) const;

 private:
  NormalFormGame(int players, int actions);
  void check_profile(std::span<const int> profile) const;

  int players_;
  int actions_;
  std::int64_t profiles_;
  std::vector<double> utilities_;  // [player * profiles_ + index], empty for oracle games
  Oracle oracle_;
  mutable std::uint64_t queries_ = 0;
};

// A mixture of product strategy profiles; the correlated-equilibrium
// candidate produced by uncoupled dynamics.
struct JointDistribution {
  struct Atom {
    double weight;
    std::vector<ActionDistribution> factors;  // one per player
  };
  std::vector<Atom> atoms;

  void validate(int players, int actions) const;
  ActionDistribution marginal(int player) const;
};

struct PlayerDeviation {
  SwapFunction best_swap;
  double gain = 0.0;
};

struct CeCertificate {
  std::vector<PlayerDeviation> per_player;
  double epsilon_achieved = 0.0;
};

// Expected reward of each own action against the opponents' mixed product;
// exact sum over the opponent profile space. strategies supplies one factor
// per player; entry `player` is ignored. Unmetered on dense games, metered on
// oracle games, and refused beyond 1e7 opponent profiles.
RewardVector exact_reward_vector(const NormalFormGame& game, int player,
                                 const std::vector<ActionDistribution>& strategies);

// Empirical reward estimate from full sampled profiles (own coordinate is
// replaced by each candidate action); n queries per sample.
RewardVector reward_from_samples(const NormalFormGame& game, int player,
                                 std::span<const std::vector<int>> samples);

// Draws its own samples from the opponents' product distribution.
RewardVector sampled_reward_vector(const NormalFormGame& game, int player,
                                   const std::vector<ActionDistribution>& strategies,
                                   int sample_count, Rng& rng);

// K = ceil(32 ln^2(max(mn, 3)) / eps^3), matching the exp(-eps^2 K / 32)
// deviation exponent.
std::int64_t chernoff_sample_count(int players, int actions, double epsilon);

struct DynamicsOptions {
  enum class Mode { exact, sampled };
  Mode mode = Mode::exact;
  // Cap on the learner horizon. The exact schedule for the target rate is
  // used when it fits; otherwise the largest same-shape schedule within the
  // budget. Unset means exact-or-error.
  std::optional<std::uint64_t> max_days;
  bool share_samples = true;   // one profile batch per round, reused by every player
  bool compute_certificate = true;  // requires a dense game
};

struct DynamicsResult {
  JointDistribution output;
  std::optional<CeCertificate> certificate;
  std::uint64_t payoff_queries = 0;
  std::int64_t sample_count = 0;  // K per (player, day); 0 in exact mode
  MultiScaleConfig learner_config;
  std::vector<PlayRecord> records;  // per player, rewards as fed to its learner
};

// Every player runs an independent multi-scale learner with regret budget
// eps/2 (the other eps/2 covers sampling error); outputs the uniform mixture
// of the played product profiles.
DynamicsResult run_uncoupled_dynamics(const NormalFormGame& game, double epsilon,
                                      const DynamicsOptions& options, Rng& rng);

// Exact best-swap certificate per player; dense games only.
CeCertificate verify_ce(const NormalFormGame& game, const JointDistribution& dist);

// Game file: header "nfg m n", then one line per profile "a_1 .. a_m u_1 .. u_m"
// with 1-based actions.
void write_game(std::ostream& os, const NormalFormGame& game);
NormalFormGame read_game(std::istream& is);

// Joint distribution CSV: header "atom_weight,player,action,prob"; rows are
// grouped by atom, players and actions in order and 1-based.
void write_joint_distribution(std::ostream& os, const JointDistribution& dist);
JointDistribution read_joint_distribution(std::istream& is);

}  // namespace swapregret::nfg
