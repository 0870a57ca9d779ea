#include "swapregret/comm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "swapregret/io.hpp"
#include "swapregret/numeric.hpp"

namespace swapregret::comm {

void Transcript::add(std::int64_t round, char sender, std::uint64_t bits,
                     std::uint64_t payload_hash) {
  messages.push_back(Message{round, sender, bits, payload_hash});
  total_bits += bits;
}

std::uint64_t bits_per_index(int n) {
  if (n < 1) throw ParameterError("bits_per_index: n must be >= 1");
  if (n == 1) return 0;
  return std::bit_width(static_cast<unsigned>(n - 1));
}

std::uint64_t hash_indices(std::span<const int> indices) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (int v : indices) {
    for (int b = 0; b < 4; ++b) {
      h ^= static_cast<unsigned char>(v >> (8 * b));
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

TwoPlayerCeMatrix::TwoPlayerCeMatrix(int n) : n_(n) {
  if (n < 1) throw ParameterError("TwoPlayerCeMatrix: n must be >= 1");
  mass_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
}

TwoPlayerCeMatrix TwoPlayerCeMatrix::from_entries(int n, std::vector<double> mass) {
  TwoPlayerCeMatrix m(n);
  if (mass.size() != m.mass_.size()) {
    throw StructuralError("TwoPlayerCeMatrix: wrong entry count");
  }
  m.mass_ = std::move(mass);
  m.validate();
  return m;
}

double TwoPlayerCeMatrix::at(int row, int col) const {
  if (row < 0 || row >= n_ || col < 0 || col >= n_) {
    throw StructuralError("TwoPlayerCeMatrix::at: index out of range");
  }
  return mass_[static_cast<std::size_t>(row) * n_ + col];
}

void TwoPlayerCeMatrix::add(int row, int col, double mass) {
  if (row < 0 || row >= n_ || col < 0 || col >= n_) {
    throw StructuralError("TwoPlayerCeMatrix::add: index out of range");
  }
  mass_[static_cast<std::size_t>(row) * n_ + col] += mass;
}

double TwoPlayerCeMatrix::total_mass() const {
  KahanSum s;
  for (double x : mass_) s.add(x);
  return s.value();
}

void TwoPlayerCeMatrix::validate() const {
  for (double x : mass_) {
    if (!(x >= 0.0)) throw StructuralError("TwoPlayerCeMatrix: negative mass");
  }
  double total = total_mass();
  if (std::abs(total - 1.0) > 1e-9) {
    throw StructuralError("TwoPlayerCeMatrix: total mass " + std::to_string(total));
  }
}

double TwoPlayerCeMatrix::row_mass(int row) const {
  KahanSum s;
  for (int j = 0; j < n_; ++j) s.add(at(row, j));
  return s.value();
}

int TwoPlayerCeMatrix::row_support() const {
  int count = 0;
  for (int i = 0; i < n_; ++i) count += row_mass(i) > 0.0 ? 1 : 0;
  return count;
}

int TwoPlayerCeMatrix::column_support() const {
  int count = 0;
  for (int j = 0; j < n_; ++j) {
    bool nonzero = false;
    for (int i = 0; i < n_ && !nonzero; ++i) nonzero = at(i, j) > 0.0;
    count += nonzero ? 1 : 0;
  }
  return count;
}

nfg::JointDistribution TwoPlayerCeMatrix::to_joint() const {
  nfg::JointDistribution dist;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      double w = at(i, j);
      if (w == 0.0) continue;
      dist.atoms.push_back({w,
                            {ActionDistribution::point_mass(n_, i),
                             ActionDistribution::point_mass(n_, j)}});
    }
  }
  if (dist.atoms.empty()) throw StructuralError("TwoPlayerCeMatrix::to_joint: zero matrix");
  return dist;
}

namespace {
void check_square_utilities(int n, const std::vector<double>& u, const char* who) {
  if (static_cast<std::int64_t>(u.size()) != static_cast<std::int64_t>(n) * n) {
    throw StructuralError(std::string(who) + ": utility matrix must be n x n");
  }
  for (double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw StructuralError(std::string(who) + ": utilities must lie in [0, 1]");
    }
  }
}
}  // namespace

BobEndpoint::BobEndpoint(int n, std::vector<double> utilities) : n_(n), u_(std::move(utilities)) {
  check_square_utilities(n, u_, "BobEndpoint");
}

int BobEndpoint::best_response(std::span<const int> alice_samples) const {
  if (alice_samples.empty()) throw StructuralError("BobEndpoint: empty sample multiset");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_), 0);
  for (int i : alice_samples) {
    if (i < 0 || i >= n_) throw StructuralError("BobEndpoint: sample out of range");
    ++counts[static_cast<std::size_t>(i)];
  }
  int best = 0;
  double best_value = -1.0;
  for (int j = 0; j < n_; ++j) {
    double v = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (counts[static_cast<std::size_t>(i)] == 0) continue;
      v += static_cast<double>(counts[static_cast<std::size_t>(i)]) *
           u_[static_cast<std::size_t>(i) * n_ + j];
    }
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  return best;
}

AliceEndpoint::AliceEndpoint(int n, std::vector<double> utilities, const MultiScaleConfig& config,
                             std::int64_t sample_count, Rng rng)
    : n_(n),
      u_(std::move(utilities)),
      learner_(config),
      sample_count_(sample_count),
      rng_(rng),
      record_(RewardBounds{0.0, 1.0}),
      accum_(n) {
  check_square_utilities(n, u_, "AliceEndpoint");
  if (config.n != n) throw StructuralError("AliceEndpoint: learner/game size mismatch");
  if (sample_count < 1) throw ParameterError("AliceEndpoint: need K >= 1");
}

std::vector<int> AliceEndpoint::commit_and_sample() {
  if (committed_) throw LifecycleError("AliceEndpoint: reply pending");
  committed_ = learner_.act();
  std::vector<int> samples(static_cast<std::size_t>(sample_count_));
  for (auto& s : samples) s = sample_categorical(rng_, committed_->probs());
  return samples;
}

void AliceEndpoint::receive_reply(int bob_action) {
  if (!committed_) throw LifecycleError("AliceEndpoint: no strategy committed");
  if (bob_action < 0 || bob_action >= n_) {
    throw StructuralError("AliceEndpoint: reply out of range");
  }
  RewardVector r(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    r[static_cast<std::size_t>(i)] = u_[static_cast<std::size_t>(i) * n_ + bob_action];
  }
  learner_.update(r);
  ++rounds_;
  for (int i = 0; i < n_; ++i) accum_.add(i, bob_action, (*committed_)[i]);
  record_.add_day(std::move(*committed_), std::move(r));
  committed_.reset();
}

TwoPlayerCeMatrix AliceEndpoint::output() const {
  if (rounds_ == 0) throw LifecycleError("AliceEndpoint: no rounds played");
  TwoPlayerCeMatrix out(n_);
  double inv = 1.0 / static_cast<double>(rounds_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) out.add(i, j, accum_.at(i, j) * inv);
  }
  return out;
}

std::int64_t comm_sample_count(int n, double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw ParameterError("comm_sample_count: epsilon must be in (0, 1]");
  }
  double l = std::log(static_cast<double>(std::max(n, 3)));
  return static_cast<std::int64_t>(std::ceil(8.0 * l * l / (epsilon * epsilon * epsilon)));
}

CommResult run_comm_protocol(int n, std::vector<double> alice_utilities,
                             std::vector<double> bob_utilities, double epsilon,
                             const CommOptions& options, Rng& rng) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw ParameterError("run_comm_protocol: epsilon must be in (0, 1]");
  }
  double regret_budget = epsilon / 2.0;
  MultiScaleConfig cfg =
      options.max_days
          ? MultiScaleConfig::from_epsilon_within_budget(regret_budget, n, 1.0, *options.max_days)
          : MultiScaleConfig::from_epsilon(regret_budget, n, 1.0);
  std::int64_t K = comm_sample_count(n, epsilon);

  AliceEndpoint alice(n, std::move(alice_utilities), cfg, K, make_rng(rng(), "comm-alice"));
  BobEndpoint bob(n, std::move(bob_utilities));

  CommResult result{TwoPlayerCeMatrix(n), {}, cfg, K, PlayRecord{RewardBounds{0.0, 1.0}}, {}};
  std::uint64_t index_bits = bits_per_index(n);
  auto T = static_cast<std::int64_t>(cfg.horizon);
  result.bob_replies.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 1; t <= T; ++t) {
    std::vector<int> samples = alice.commit_and_sample();
    result.transcript.add(t, 'A', static_cast<std::uint64_t>(K) * index_bits,
                          hash_indices(samples));
    int reply = bob.best_response(samples);
    result.transcript.add(t, 'B', index_bits, hash_indices(std::span<const int>(&reply, 1)));
    alice.receive_reply(reply);
    result.bob_replies.push_back(reply);
  }
  result.output = alice.output();
  result.alice_record = alice.record();
  return result;
}

std::int64_t sparsify_row_count(int column_support, int n, double delta) {
  if (!(delta > 0.0) || delta >= 1.0) {
    throw ParameterError("sparsify_row_count: delta must be in (0, 1)");
  }
  if (column_support < 1) throw ParameterError("sparsify_row_count: empty column support");
  double s = static_cast<double>(column_support);
  return static_cast<std::int64_t>(
      std::ceil(8.0 * s * s * std::log(static_cast<double>(std::max(n, 2))) / (delta * delta)));
}

TwoPlayerCeMatrix sparsify(const TwoPlayerCeMatrix& p, double delta, Rng& rng) {
  int n = p.size();
  if (p.total_mass() <= 0.0) throw StructuralError("sparsify: zero-mass input");
  int support = p.column_support();
  std::int64_t rows = sparsify_row_count(support, n, delta);

  std::vector<double> marginals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) marginals[static_cast<std::size_t>(i)] = p.row_mass(i);

  // Draw counts first; emitting count/D * row/R_i keeps the single-row case
  // exactly equal to its input.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
  for (std::int64_t d = 0; d < rows; ++d) {
    ++counts[static_cast<std::size_t>(sample_categorical(rng, marginals))];
  }
  TwoPlayerCeMatrix out(n);
  for (int i = 0; i < n; ++i) {
    auto c = counts[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    double scale = (static_cast<double>(c) / static_cast<double>(rows)) /
                   marginals[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      double mass = p.at(i, j);
      if (mass > 0.0) out.add(i, j, mass * scale);
    }
  }
  return out;
}

void write_transcript(std::ostream& os, const Transcript& transcript) {
  os << "round,sender,bits,payload_hash\n";
  for (const auto& msg : transcript.messages) {
    os << msg.round << ',' << msg.sender << ',' << msg.bits << ',' << msg.payload_hash << '\n';
  }
}

void write_matrix(std::ostream& os, const TwoPlayerCeMatrix& matrix) {
  for (int i = 0; i < matrix.size(); ++i) {
    for (int j = 0; j < matrix.size(); ++j) {
      double mass = matrix.at(i, j);
      if (mass != 0.0) {
        os << (i + 1) << ' ' << (j + 1) << ' ' << fmt_double(mass) << '\n';
      }
    }
  }
}

TwoPlayerCeMatrix read_matrix(std::istream& is, int n) {
  TwoPlayerCeMatrix out(n);
  std::string line;
  while (std::getline(is, line)) {
    auto f = split_fields(line, " \t");
    if (f.empty()) continue;
    if (f.size() != 3) throw StructuralError("read_matrix: expected 'row col mass'");
    long long row = parse_int(f[0], "read_matrix row") - 1;
    long long col = parse_int(f[1], "read_matrix col") - 1;
    out.add(static_cast<int>(row), static_cast<int>(col), parse_double(f[2], "read_matrix mass"));
  }
  return out;
}

}  // namespace swapregret::comm
