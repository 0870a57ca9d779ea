#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swapregret/multiscale.hpp"
#include "swapregret/random.hpp"
#include "swapregret/regret.hpp"

namespace swapregret::efg {

// --- Game tree ---------------------------------------------------------------

struct TreeNode {
  enum class Kind { decision, chance, terminal };
  Kind kind = Kind::terminal;
  std::string name;
  int player = -1;   // decision nodes, 0-based
  int infoset = -1;  // decision nodes, global infoset index
  std::vector<double> chance_probs;  // chance nodes, parallel to children
  std::vector<double> payoffs;       // terminal nodes, one per player, in [0, 1]
  std::vector<int> children;         // decision children ordered by infoset action order
  std::vector<std::string> edge_labels;
  int parent = -1;
};

struct Infoset {
  int player = -1;
  std::string name;
  std::vector<std::string> actions;
  std::vector<int> nodes;  // member node ids
};

// One player's infoset forest plus the terminal grouping the partition
// recursion runs on. Positions index the player's infosets in topological
// order (parents first, load order breaking ties). Terminal "dummy infosets"
// (buckets) group terminals behind one (infoset, action) pair of this player;
// the root bucket collects terminals the player never acts before.
struct PlayerLayout {
  std::vector<int> infosets;      // position -> global infoset index
  std::vector<int> parent;        // position -> parent position or -1
  std::vector<int> parent_action; // action index taken at the parent
  std::vector<std::vector<std::vector<int>>> children;  // [pos][action] -> child positions
  std::vector<std::vector<int>> bucket;                 // [pos][action] -> bucket id or -1
  std::vector<int> root_infosets;                       // positions with no parent
  int root_bucket = -1;                                 // bucket id or -1
  int bucket_count = 0;
  std::vector<double> subtree_log_actions;  // per position: sum of ln|A| over the subtree
  double total_log_actions = 0.0;           // ln of the player's pure-strategy count
};

// Root-to-terminal facts used by utilities and partition sums.
struct Terminal {
  int node = -1;
  double chance_prob = 1.0;
  std::vector<double> payoffs;
  // Per player: that player's (position, action) sequence along the path.
  std::vector<std::vector<std::pair<int, int>>> sequences;
  // Per player: bucket the terminal belongs to in that player's layout.
  std::vector<int> bucket;
};

class GameTreeBuilder;

// An extensive-form game with perfect recall. Immutable once built; all
// derived structure (layouts, terminals) is precomputed at build time.
class GameTree {
 public:
  int players() const { return players_; }
  int root() const { return root_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int num_infosets() const { return static_cast<int>(infosets_.size()); }
  const Infoset& infoset(int id) const { return infosets_[static_cast<std::size_t>(id)]; }
  const PlayerLayout& layout(int player) const;
  const std::vector<Terminal>& terminals() const { return terminals_; }
  // Position of a global infoset in its owner's layout.
  int infoset_position(int infoset_id) const {
    return positions_[static_cast<std::size_t>(infoset_id)];
  }

 private:
  friend class GameTreeBuilder;
  GameTree() = default;

  int players_ = 0;
  int root_ = -1;
  std::vector<TreeNode> nodes_;
  std::vector<Infoset> infosets_;
  std::vector<PlayerLayout> layouts_;
  std::vector<Terminal> terminals_;
  std::vector<int> positions_;
};

// Assembles and validates a tree: perfect recall, disjoint action sets,
// per-node edge/action agreement, chance probabilities summing to one.
class GameTreeBuilder {
 public:
  int add_decision(const std::string& name, int player, const std::string& infoset);
  int add_chance(const std::string& name, std::vector<double> probs);
  int add_terminal(const std::string& name, std::vector<double> payoffs);
  void add_infoset(int player, const std::string& name, std::vector<std::string> actions);
  void add_edge(const std::string& parent, const std::string& child, const std::string& label);
  GameTree build();

 private:
  struct PendingNode {
    TreeNode node;
    std::string infoset_name;
  };
  int node_id(const std::string& name) const;
  std::vector<PendingNode> nodes_;
  std::vector<Infoset> infosets_;
  std::vector<std::pair<int, int>> players_of_infosets_;
};

// Line-oriented tree format:
//   node <id> decision <player> <infoset>
//   node <id> chance p1 ... pk
//   node <id> terminal u1 ... um
//   edge <parent> <child> <action-label>
//   infoset <player> <id> actions a1 ... ak
// Players and actions are 1-based on disk.
GameTree read_tree(std::istream& is);
void write_tree(std::ostream& os, const GameTree& tree);

// --- Strategies and utilities -------------------------------------------------

// One action per infoset, indexed by layout position.
struct PureStrategy {
  int player = -1;
  std::vector<int> actions;
};

using StrategyProfile = std::vector<PureStrategy>;  // one entry per player

// Exact chance-weighted expected payoff per player; one tree pass.
std::vector<double> eval_utility(const GameTree& tree, std::span<const PureStrategy> profile);

// Product of |A_h| over the player's infosets; throws CapacityError past cap.
std::int64_t strategy_count(const GameTree& tree, int player, std::int64_t cap);

std::vector<PureStrategy> enumerate_pure_strategies(const GameTree& tree, int player,
                                                    std::int64_t cap);

// --- Partition functions and sampling -----------------------------------------

// Log-domain partition tables for softmax sampling over the player's pure
// strategies: p(s) proportional to exp(eta * sum_t u_i(s, s_{-i,t})).
// Immutable after build; borrow the tree they were built from.
class PartitionTables {
 public:
  int player() const { return player_; }
  double eta() const { return eta_; }
  double log_v(int pos) const { return log_v_[static_cast<std::size_t>(pos)]; }
  double log_u(int pos, int action) const {
    return log_u_[static_cast<std::size_t>(pos)][static_cast<std::size_t>(action)];
  }
  double lambda(int bucket) const { return lambda_[static_cast<std::size_t>(bucket)]; }
  // log of the full partition sum over the player's strategy space.
  double log_partition() const { return log_z_; }
  const GameTree& tree() const { return *tree_; }

 private:
  friend PartitionTables build_partition_from_bucket_sums(const GameTree&, int,
                                                          std::span<const double>, double);
  const GameTree* tree_ = nullptr;
  int player_ = -1;
  double eta_ = 0.0;
  std::vector<double> log_v_;
  std::vector<std::vector<double>> log_u_;
  std::vector<double> lambda_;
  double log_z_ = 0.0;
};

// Per-bucket utility of the player given one opponent profile:
// sum over the bucket's terminals of chance_prob * payoff * [opponents on path].
std::vector<double> day_bucket_utilities(const GameTree& tree, int player,
                                         std::span<const PureStrategy> profile);

PartitionTables build_partition_from_bucket_sums(const GameTree& tree, int player,
                                                 std::span<const double> bucket_sums, double eta);

// Bottom-up pass over the opponents' played profiles.
PartitionTables build_partition(const GameTree& tree, int player,
                                std::span<const StrategyProfile> opponent_profiles, double eta);

// Top-down draw: at a reachable infoset, action a with probability
// U(h.a)/V(h); at an unreachable one, uniform.
PureStrategy sample_strategy(const PartitionTables& tables, Rng& rng);

// Log-probability the sampler assigns the given action prefix (over the first
// prefix.size() positions of the layout order).
double sampler_prefix_log_prob(const PartitionTables& tables, std::span<const int> prefix);

// --- NFCE dynamics -------------------------------------------------------------

// Multi-scale learner over the pure-strategy space, realized through
// partition-function sampling; the strategy weights are never materialized.
class EfgMultiScaleLearner {
 public:
  EfgMultiScaleLearner(const GameTree& tree, int player, const Schedule& schedule, Rng rng);

  PureStrategy act();
  void update(std::span<const PureStrategy> profile);
  std::uint64_t days_played() const { return t_; }
  const Schedule& schedule() const { return schedule_; }

 private:
  struct Thread {
    std::uint64_t meta_len;
    std::uint64_t restart_len;
    double eta;
    std::vector<double> sums;        // per bucket, completed meta-days of this restart
    std::vector<double> sums_carry;
    std::vector<double> buffer;      // current meta-day
    std::vector<double> buffer_carry;
    bool dirty = true;
    std::optional<PartitionTables> tables;
  };

  const GameTree* tree_;
  int player_;
  Schedule schedule_;
  Rng rng_;
  std::vector<Thread> threads_;
  std::uint64_t t_ = 0;
};

struct StrategyProfileDist {
  struct Atom {
    double weight;
    StrategyProfile profile;
  };
  std::vector<Atom> atoms;
};

struct NfceCertificate {
  std::vector<double> per_player_gain;
  double epsilon_achieved = 0.0;
};

// Exhaustive separable best-swap over each player's strategy space;
// max_strategies caps the enumeration per player.
NfceCertificate verify_nfce(const GameTree& tree, const StrategyProfileDist& dist,
                            std::int64_t max_strategies = 12);

struct NfceOptions {
  std::optional<std::uint64_t> max_days;
  bool compute_certificate = true;
  std::int64_t verify_cap = 12;
};

struct NfceResult {
  StrategyProfileDist output;
  std::optional<NfceCertificate> certificate;
  Schedule schedule;
};

// Uncoupled dynamics over strategy space: every player samples from its
// implicit multi-scale mixture; the day's sampled pure profiles are the
// reward context. Output is the uniform mixture of played profiles.
NfceResult run_nfce_dynamics(const GameTree& tree, double epsilon, const NfceOptions& options,
                             Rng& rng);

// --- Random trees (experiment plumbing) ----------------------------------------

struct RandomTreeConfig {
  int players = 2;
  int max_depth = 4;
  int max_actions = 2;         // actions per decision node (2..max)
  double chance_prob = 0.3;    // chance node probability at internal spots
  double terminal_prob = 0.25; // early-terminal probability below the root
  std::int64_t max_strategies = 30;  // per-player cap on |S_i|
};

// Random tree with singleton infosets (always perfect recall) and uniform
// random payoffs; includes chance nodes.
GameTree random_tree(const RandomTreeConfig& config, Rng& rng);

// Two-player tree with genuine information hiding: a chance deal both players
// are blind to, two 2-action infosets per player (the second one conditioned
// on the first action), random payoffs. |S_i| = 4 for both players.
GameTree blind_two_by_two_tree(int chance_outcomes, Rng& rng);

}  // namespace swapregret::efg
