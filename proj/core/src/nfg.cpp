#include "swapregret/nfg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "swapregret/io.hpp"
#include "swapregret/numeric.hpp"

namespace swapregret::nfg {

namespace {
constexpr std::int64_t kDenseOpponentCap = 10'000'000;

// Odometer over opponent action profiles; calls fn(profile, weight) for every
// combination, with `player`'s coordinate left unset.
template <typename Fn>
void for_each_opponent_profile(int players, int actions, int player,
                               const std::vector<ActionDistribution>& strategies, Fn&& fn) {
  std::vector<int> profile(static_cast<std::size_t>(players), 0);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < players; ++i) {
      if (i == player) continue;
      w *= strategies[static_cast<std::size_t>(i)][profile[static_cast<std::size_t>(i)]];
    }
    fn(profile, w);
    int pos = players - 1;
    while (pos >= 0) {
      if (pos == player) {
        --pos;
        continue;
      }
      auto idx = static_cast<std::size_t>(pos);
      if (++profile[idx] < actions) break;
      profile[idx] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
}
}  // namespace

NormalFormGame::NormalFormGame(int players, int actions)
    : players_(players), actions_(actions) {
  if (players < 1) throw ParameterError("NormalFormGame: players must be >= 1");
  if (actions < 1) throw ParameterError("NormalFormGame: actions must be >= 1");
  double count = std::pow(static_cast<double>(actions), players);
  profiles_ = count <= 9.0e18 ? static_cast<std::int64_t>(std::llround(count)) : -1;
}

NormalFormGame NormalFormGame::dense(int players, int actions, std::vector<double> utilities) {
  NormalFormGame g(players, actions);
  if (g.profiles_ < 0 || g.profiles_ > kDenseOpponentCap) {
    throw CapacityError("NormalFormGame::dense: profile space exceeds dense threshold");
  }
  if (static_cast<std::int64_t>(utilities.size()) != g.profiles_ * players) {
    throw StructuralError("NormalFormGame::dense: utility table has wrong size");
  }
  for (double u : utilities) {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw StructuralError("NormalFormGame::dense: utilities must lie in [0, 1]");
    }
  }
  g.utilities_ = std::move(utilities);
  return g;
}

NormalFormGame NormalFormGame::from_oracle(int players, int actions, Oracle oracle) {
  NormalFormGame g(players, actions);
  if (!oracle) throw ParameterError("NormalFormGame::from_oracle: null oracle");
  g.oracle_ = std::move(oracle);
  return g;
}

NormalFormGame NormalFormGame::random(int players, int actions, Rng& rng) {
  NormalFormGame g(players, actions);
  if (g.profiles_ < 0 || g.profiles_ > kDenseOpponentCap) {
    throw CapacityError("NormalFormGame::random: profile space exceeds dense threshold");
  }
  std::vector<double> u(static_cast<std::size_t>(g.profiles_ * players));
  for (double& x : u) x = next_double(rng);
  g.utilities_ = std::move(u);
  return g;
}

void NormalFormGame::check_profile(std::span<const int> profile) const {
  if (static_cast<int>(profile.size()) != players_) {
    throw StructuralError("NormalFormGame: profile arity mismatch");
  }
  for (int a : profile) {
    if (a < 0 || a >= actions_) throw StructuralError("NormalFormGame: action out of range");
  }
}

std::int64_t NormalFormGame::profile_index(std::span<const int> profile) const {
  check_profile(profile);
  std::int64_t idx = 0;
  for (int a : profile) idx = idx * actions_ + a;
  return idx;
}

double NormalFormGame::query(int player, std::span<const int> profile) const {
  ++queries_;
  if (is_dense()) return utility(player, profile);
  if (player < 0 || player >= players_) throw ParameterError("query: player out of range");
  check_profile(profile);
  return oracle_(player, profile);
}

double NormalFormGame::utility(int player, std::span<const int> profile) const {
  if (!is_dense()) {
    throw CapacityError("NormalFormGame::utility: oracle-only game has no dense tensor");
  }
  if (player < 0 || player >= players_) throw ParameterError("utility: player out of range");
  std::int64_t idx = profile_index(profile);
  return utilities_[static_cast<std::size_t>(player * profiles_ + idx)];
}

void JointDistribution::validate(int players, int actions) const {
  if (atoms.empty()) throw StructuralError("JointDistribution: no atoms");
  KahanSum total;
  for (const auto& atom : atoms) {
    if (!(atom.weight >= 0.0)) throw StructuralError("JointDistribution: negative weight");
    total.add(atom.weight);
    if (static_cast<int>(atom.factors.size()) != players) {
      throw StructuralError("JointDistribution: atom arity mismatch");
    }
    for (const auto& f : atom.factors) {
      if (f.size() != actions) throw StructuralError("JointDistribution: factor size mismatch");
    }
  }
  if (std::abs(total.value() - 1.0) > 1e-9) {
    throw StructuralError("JointDistribution: weights sum to " + std::to_string(total.value()));
  }
}

ActionDistribution JointDistribution::marginal(int player) const {
  if (atoms.empty()) throw StructuralError("JointDistribution: no atoms");
  auto p = static_cast<std::size_t>(player);
  if (p >= atoms.front().factors.size()) throw ParameterError("marginal: player out of range");
  int n = atoms.front().factors[p].size();
  std::vector<KahanSum> acc(static_cast<std::size_t>(n));
  for (const auto& atom : atoms) {
    for (int i = 0; i < n; ++i) {
      acc[static_cast<std::size_t>(i)].add(atom.weight * atom.factors[p][i]);
    }
  }
  std::vector<double> out;
  out.reserve(acc.size());
  double sum = 0.0;
  for (const auto& k : acc) sum += k.value();
  for (const auto& k : acc) out.push_back(k.value() / sum);
  return ActionDistribution(std::move(out));
}

RewardVector exact_reward_vector(const NormalFormGame& game, int player,
                                 const std::vector<ActionDistribution>& strategies) {
  int m = game.players();
  int n = game.actions();
  if (static_cast<int>(strategies.size()) != m) {
    throw StructuralError("exact_reward_vector: need one strategy per player");
  }
  for (const auto& s : strategies) {
    if (s.size() != n) throw StructuralError("exact_reward_vector: strategy size mismatch");
  }
  double opp_profiles = std::pow(static_cast<double>(n), m - 1);
  if (opp_profiles > static_cast<double>(kDenseOpponentCap)) {
    throw CapacityError("exact_reward_vector: opponent profile space exceeds 1e7 terms");
  }
  std::vector<KahanSum> acc(static_cast<std::size_t>(n));
  for_each_opponent_profile(m, n, player, strategies, [&](std::vector<int>& profile, double w) {
    if (w == 0.0) return;
    for (int j = 0; j < n; ++j) {
      profile[static_cast<std::size_t>(player)] = j;
      double u = game.is_dense() ? game.utility(player, profile) : game.query(player, profile);
      acc[static_cast<std::size_t>(j)].add(w * u);
    }
  });
  RewardVector r;
  r.reserve(acc.size());
  for (const auto& k : acc) r.push_back(k.value());
  return r;
}

RewardVector reward_from_samples(const NormalFormGame& game, int player,
                                 std::span<const std::vector<int>> samples) {
  if (samples.empty()) throw ParameterError("reward_from_samples: need at least one sample");
  int n = game.actions();
  std::vector<KahanSum> acc(static_cast<std::size_t>(n));
  std::vector<int> profile;
  for (const auto& s : samples) {
    profile.assign(s.begin(), s.end());
    for (int j = 0; j < n; ++j) {
      profile[static_cast<std::size_t>(player)] = j;
      acc[static_cast<std::size_t>(j)].add(game.query(player, profile));
    }
  }
  RewardVector r;
  r.reserve(acc.size());
  double inv = 1.0 / static_cast<double>(samples.size());
  for (const auto& k : acc) r.push_back(k.value() * inv);
  return r;
}

namespace {
std::vector<int> draw_profile(const std::vector<ActionDistribution>& strategies, Rng& rng) {
  std::vector<int> profile(strategies.size());
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    profile[i] = sample_categorical(rng, strategies[i].probs());
  }
  return profile;
}
}  // namespace

RewardVector sampled_reward_vector(const NormalFormGame& game, int player,
                                   const std::vector<ActionDistribution>& strategies,
                                   int sample_count, Rng& rng) {
  if (sample_count < 1) throw ParameterError("sampled_reward_vector: need K >= 1");
  std::vector<std::vector<int>> samples;
  samples.reserve(static_cast<std::size_t>(sample_count));
  for (int k = 0; k < sample_count; ++k) samples.push_back(draw_profile(strategies, rng));
  return reward_from_samples(game, player, samples);
}

std::int64_t chernoff_sample_count(int players, int actions, double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw ParameterError("chernoff_sample_count: epsilon must be in (0, 1]");
  }
  double l = std::log(static_cast<double>(std::max(players * actions, 3)));
  return static_cast<std::int64_t>(std::ceil(32.0 * l * l / (epsilon * epsilon * epsilon)));
}

DynamicsResult run_uncoupled_dynamics(const NormalFormGame& game, double epsilon,
                                      const DynamicsOptions& options, Rng& rng) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw ParameterError("run_uncoupled_dynamics: epsilon must be in (0, 1]");
  }
  int m = game.players();
  int n = game.actions();
  double regret_budget = epsilon / 2.0;  // the other half covers estimation error
  MultiScaleConfig cfg =
      options.max_days
          ? MultiScaleConfig::from_epsilon_within_budget(regret_budget, n, 1.0, *options.max_days)
          : MultiScaleConfig::from_epsilon(regret_budget, n, 1.0);

  DynamicsResult result;
  result.learner_config = cfg;
  game.reset_query_count();

  std::vector<MultiScaleLearner> learners;
  learners.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) learners.emplace_back(cfg);
  result.records.assign(static_cast<std::size_t>(m), PlayRecord{RewardBounds{0.0, 1.0}});

  bool sampled = options.mode == DynamicsOptions::Mode::sampled;
  std::int64_t K = sampled ? chernoff_sample_count(m, n, epsilon) : 0;
  result.sample_count = K;

  auto T = static_cast<std::int64_t>(cfg.horizon);
  double atom_weight = 1.0 / static_cast<double>(T);
  result.output.atoms.reserve(static_cast<std::size_t>(T));

  std::vector<std::vector<int>> shared_samples;
  for (std::int64_t t = 0; t < T; ++t) {
    std::vector<ActionDistribution> strategies;
    strategies.reserve(static_cast<std::size_t>(m));
    for (auto& l : learners) strategies.push_back(l.act());

    if (sampled && options.share_samples) {
      shared_samples.clear();
      for (std::int64_t k = 0; k < K; ++k) {
        shared_samples.push_back(draw_profile(strategies, rng));
      }
    }
    for (int i = 0; i < m; ++i) {
      RewardVector r;
      if (!sampled) {
        r = exact_reward_vector(game, i, strategies);
      } else if (options.share_samples) {
        r = reward_from_samples(game, i, shared_samples);
      } else {
        r = sampled_reward_vector(game, i, strategies, static_cast<int>(K), rng);
      }
      learners[static_cast<std::size_t>(i)].update(r);
      result.records[static_cast<std::size_t>(i)].add_day(strategies[static_cast<std::size_t>(i)],
                                                          std::move(r));
    }
    result.output.atoms.push_back({atom_weight, std::move(strategies)});
  }
  result.payoff_queries = game.query_count();
  if (options.compute_certificate) {
    result.certificate = verify_ce(game, result.output);
  }
  return result;
}

CeCertificate verify_ce(const NormalFormGame& game, const JointDistribution& dist) {
  if (!game.is_dense()) {
    throw CapacityError("verify_ce: oracle-only game; dense tensor required");
  }
  int m = game.players();
  int n = game.actions();
  dist.validate(m, n);
  CeCertificate cert;
  cert.per_player.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    // Row j of the deviation table holds sum over atoms of w * p_i(j) * r_atom(j').
    std::vector<std::vector<KahanSum>> rows(
        static_cast<std::size_t>(n), std::vector<KahanSum>(static_cast<std::size_t>(n)));
    for (const auto& atom : dist.atoms) {
      RewardVector r = exact_reward_vector(game, i, atom.factors);
      const auto& own = atom.factors[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        double mass = atom.weight * own[j];
        if (mass == 0.0) continue;
        for (int jp = 0; jp < n; ++jp) {
          rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(jp)].add(
              mass * r[static_cast<std::size_t>(jp)]);
        }
      }
    }
    auto& dev = cert.per_player[static_cast<std::size_t>(i)];
    dev.best_swap.map.resize(static_cast<std::size_t>(n));
    KahanSum gain;
    for (int j = 0; j < n; ++j) {
      const auto& row = rows[static_cast<std::size_t>(j)];
      int best = 0;
      for (int jp = 1; jp < n; ++jp) {
        if (row[static_cast<std::size_t>(jp)].value() >
            row[static_cast<std::size_t>(best)].value()) {
          best = jp;
        }
      }
      dev.best_swap.map[static_cast<std::size_t>(j)] = best;
      gain.add(row[static_cast<std::size_t>(best)].value() -
               row[static_cast<std::size_t>(j)].value());
    }
    dev.gain = gain.value();
    cert.epsilon_achieved = std::max(cert.epsilon_achieved, dev.gain);
  }
  return cert;
}

void write_game(std::ostream& os, const NormalFormGame& game) {
  if (!game.is_dense()) throw CapacityError("write_game: oracle-only game");
  int m = game.players();
  int n = game.actions();
  os << "nfg " << m << ' ' << n << '\n';
  std::vector<int> profile(static_cast<std::size_t>(m), 0);
  for (std::int64_t idx = 0; idx < game.profiles(); ++idx) {
    std::int64_t rest = idx;
    for (int i = m - 1; i >= 0; --i) {
      profile[static_cast<std::size_t>(i)] = static_cast<int>(rest % n);
      rest /= n;
    }
    for (int i = 0; i < m; ++i) os << (profile[static_cast<std::size_t>(i)] + 1) << ' ';
    for (int i = 0; i < m; ++i) {
      os << fmt_double(game.utility(i, profile));
      os << (i + 1 == m ? '\n' : ' ');
    }
  }
}

NormalFormGame read_game(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw StructuralError("read_game: empty input");
  auto header = split_fields(line, " \t");
  if (header.size() != 3 || header[0] != "nfg") {
    throw StructuralError("read_game: expected header 'nfg m n'");
  }
  int m = static_cast<int>(parse_int(header[1], "read_game players"));
  int n = static_cast<int>(parse_int(header[2], "read_game actions"));
  if (m < 1 || n < 1) throw StructuralError("read_game: bad dimensions");
  double count = std::pow(static_cast<double>(n), m);
  if (count > 1e7) throw CapacityError("read_game: profile space too large");
  auto profiles = static_cast<std::int64_t>(std::llround(count));
  std::vector<double> utilities(static_cast<std::size_t>(profiles * m));
  std::vector<bool> seen(static_cast<std::size_t>(profiles), false);
  std::int64_t rows = 0;
  while (std::getline(is, line)) {
    auto f = split_fields(line, " \t");
    if (f.empty()) continue;
    if (static_cast<int>(f.size()) != 2 * m) {
      throw StructuralError("read_game: expected " + std::to_string(2 * m) + " fields");
    }
    std::int64_t idx = 0;
    for (int i = 0; i < m; ++i) {
      long long a = parse_int(f[static_cast<std::size_t>(i)], "read_game action") - 1;
      if (a < 0 || a >= n) throw StructuralError("read_game: action out of range");
      idx = idx * n + a;
    }
    for (int i = 0; i < m; ++i) {
      utilities[static_cast<std::size_t>(i * profiles + idx)] =
          parse_double(f[static_cast<std::size_t>(m + i)], "read_game utility");
    }
    if (!seen[static_cast<std::size_t>(idx)]) ++rows;
    seen[static_cast<std::size_t>(idx)] = true;
  }
  if (rows != profiles) throw StructuralError("read_game: missing profiles");
  return NormalFormGame::dense(m, n, std::move(utilities));
}

void write_joint_distribution(std::ostream& os, const JointDistribution& dist) {
  os << "atom_weight,player,action,prob\n";
  for (const auto& atom : dist.atoms) {
    for (std::size_t i = 0; i < atom.factors.size(); ++i) {
      for (int a = 0; a < atom.factors[i].size(); ++a) {
        os << fmt_double(atom.weight) << ',' << (i + 1) << ',' << (a + 1) << ','
           << fmt_double(atom.factors[i][a]) << '\n';
      }
    }
  }
}

JointDistribution read_joint_distribution(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || split_fields(line, ",")[0] != "atom_weight") {
    throw StructuralError("read_joint_distribution: missing header");
  }
  JointDistribution dist;
  JointDistribution::Atom atom;
  atom.weight = 0.0;
  std::vector<double> probs;
  auto flush_factor = [&]() {
    if (!probs.empty()) {
      atom.factors.emplace_back(probs);
      probs.clear();
    }
  };
  auto flush_atom = [&]() {
    flush_factor();
    if (!atom.factors.empty()) {
      dist.atoms.push_back(std::move(atom));
      atom = {};
      atom.weight = 0.0;
    }
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split_fields(line, ",");
    if (f.size() != 4) throw StructuralError("read_joint_distribution: expected 4 fields");
    double w = parse_double(f[0], "joint weight");
    long long player = parse_int(f[1], "joint player");
    long long action = parse_int(f[2], "joint action");
    double prob = parse_double(f[3], "joint prob");
    if (player == 1 && action == 1 && !(atom.factors.empty() && probs.empty())) {
      flush_atom();
    }
    if (action == 1) flush_factor();
    if (probs.empty() && static_cast<long long>(atom.factors.size()) + 1 != player) {
      throw StructuralError("read_joint_distribution: players out of order");
    }
    atom.weight = w;
    probs.push_back(prob);
  }
  flush_atom();
  return dist;
}

}  // namespace swapregret::nfg
