#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "swapregret/multiscale.hpp"
#include "swapregret/nfg.hpp"
#include "swapregret/random.hpp"
#include "swapregret/regret.hpp"

namespace swapregret::comm {

// Bit-exact accounting of an alternating two-party protocol. Payload hashes
// let tests compare message contents without storing them.
struct Transcript {
  struct Message {
    std::int64_t round;
    char sender;  // 'A' or 'B'
    std::uint64_t bits;
    std::uint64_t payload_hash;
  };
  std::vector<Message> messages;
  std::uint64_t total_bits = 0;

  void add(std::int64_t round, char sender, std::uint64_t bits, std::uint64_t payload_hash);
};

// Fixed-width index encoding: ceil(log2 n) bits, 0 for n = 1.
std::uint64_t bits_per_index(int n);
std::uint64_t hash_indices(std::span<const int> indices);

// A joint distribution over [n] x [n] (row player = Alice). Stored dense;
// support sizes are computed from the nonzero pattern.
class TwoPlayerCeMatrix {
 public:
  explicit TwoPlayerCeMatrix(int n);
  static TwoPlayerCeMatrix from_entries(int n, std::vector<double> mass);

  int size() const { return n_; }
  double at(int row, int col) const;
  void add(int row, int col, double mass);

  double total_mass() const;
  void validate() const;  // entries >= 0, total mass 1 within 1e-9
  double row_mass(int row) const;
  int row_support() const;
  int column_support() const;

  // The matrix as n^2 point-mass atoms (zero entries skipped), for the exact
  // CE verifier.
  nfg::JointDistribution to_joint() const;

 private:
  int n_;
  std::vector<double> mass_;  // row-major
};

// Bob's side: holds only Bob's utility matrix (row-major [alice][bob]) and
// best-responds to a received multiset of Alice actions, ties to the
// smallest index.
class BobEndpoint {
 public:
  BobEndpoint(int n, std::vector<double> utilities);
  int best_response(std::span<const int> alice_samples) const;

 private:
  int n_;
  std::vector<double> u_;  // u_B(j; i) = u_[i * n + j]
};

// Alice's side: holds only Alice's utility matrix, her multi-scale learner,
// and the growing output matrix. The protocol driver moves messages between
// endpoints; neither side can reach the other's matrix.
class AliceEndpoint {
 public:
  AliceEndpoint(int n, std::vector<double> utilities, const MultiScaleConfig& config,
                std::int64_t sample_count, Rng rng);

  std::vector<int> commit_and_sample();   // commits p_t, samples K action indices
  void receive_reply(int bob_action);     // builds r_t(i) = u_A(i; j_t), updates
  TwoPlayerCeMatrix output() const;       // (1/T) sum_t p_t (x) e_{j_t}
  const PlayRecord& record() const { return record_; }

 private:
  int n_;
  std::vector<double> u_;  // u_A(i; j) = u_[i * n + j]
  MultiScaleLearner learner_;
  std::int64_t sample_count_;
  Rng rng_;
  PlayRecord record_;
  std::optional<ActionDistribution> committed_;
  TwoPlayerCeMatrix accum_;
  std::int64_t rounds_ = 0;
};

// K = ceil(8 ln^2(max(n, 3)) / eps^3), matching the exp(-K eps^2 / 8)
// deviation exponent.
std::int64_t comm_sample_count(int n, double epsilon);

struct CommOptions {
  std::optional<std::uint64_t> max_days;  // learner-horizon budget, as in nfg dynamics
};

struct CommResult {
  TwoPlayerCeMatrix output;
  Transcript transcript;
  MultiScaleConfig learner_config;
  std::int64_t sample_count = 0;  // K
  PlayRecord alice_record;
  std::vector<int> bob_replies;
};

// Runs the T-round sample/best-response protocol. Per round Alice sends K
// indices (K * ceil(log2 n) bits), Bob replies with one (ceil(log2 n) bits).
CommResult run_comm_protocol(int n, std::vector<double> alice_utilities,
                             std::vector<double> bob_utilities, double epsilon,
                             const CommOptions& options, Rng& rng);

// Number of rows drawn by sparsify: D = ceil(8 S^2 ln(max(n,2)) / delta^2).
std::int64_t sparsify_row_count(int column_support, int n, double delta);

// Row-sampling sparsification: draws D rows from the row marginals and emits
// the normalized row mixture. Utility-agnostic; column support never grows,
// row support is at most D.
TwoPlayerCeMatrix sparsify(const TwoPlayerCeMatrix& p, double delta, Rng& rng);

// Transcript CSV: header "round,sender,bits,payload_hash".
void write_transcript(std::ostream& os, const Transcript& transcript);

// Sparse triplet text, one "row col mass" line per nonzero entry, 1-based.
void write_matrix(std::ostream& os, const TwoPlayerCeMatrix& matrix);
TwoPlayerCeMatrix read_matrix(std::istream& is, int n);

}  // namespace swapregret::comm
