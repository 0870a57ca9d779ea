// Acceptance suite: runs every guarantee the library is built around at desk
// scale and prints one PASS/FAIL line per criterion. Exit code is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "swapregret/adversaries.hpp"
#include "swapregret/comm.hpp"
#include "swapregret/efg.hpp"
#include "swapregret/io.hpp"
#include "swapregret/multiscale.hpp"
#include "swapregret/nfg.hpp"
#include "swapregret/numeric.hpp"
#include "swapregret/random.hpp"
#include "swapregret/regret.hpp"

namespace sr = swapregret;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

// --- 1. swap-regret oracle equivalence ---------------------------------------

Outcome swap_oracle_equivalence() {
  sr::Rng rng = sr::make_rng(2024, "acceptance-swap-oracle");
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    int n = 2 + sr::next_index(rng, 4);          // n in [2, 5]
    std::int64_t days = 1 + sr::next_index(rng, 6);  // T in [1, 6]
    sr::PlayRecord record = oracles::random_record(n, days, rng);
    double fast = sr::swap_regret(record).first;
    double brute = oracles::swap_regret_bruteforce(record);
    worst = std::max(worst, std::abs(fast - brute));
    if (std::abs(fast - brute) > 1e-9) {
      return {false, "record " + std::to_string(rep) + " differs by " + fmt(fast - brute)};
    }
  }
  return {true, "1000 records, max |diff| = " + fmt(worst)};
}

// --- 2. MWU external regret bound ---------------------------------------------

Outcome mwu_bound() {
  struct HardShape {
    int n;
    int branching;
    int depth;
  };
  const std::vector<HardShape> shapes{{2, 2, 0}, {8, 2, 2}, {32, 4, 2}};
  const std::vector<std::int64_t> horizons{1000, 10000};
  int runs = 0;
  double worst_margin = 1e300;
  for (const auto& shape : shapes) {
    for (std::int64_t horizon : horizons) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (int kind = 0; kind < 3; ++kind) {
          std::unique_ptr<sr::Adversary> adversary;
          if (kind == 0) {
            adversary = std::make_unique<sr::UniformRewards>(shape.n, 1.0,
                                                             sr::splitmix64(seed * 977 + kind));
          } else if (kind == 1) {
            adversary = std::make_unique<sr::AdaptiveBestResponse>(shape.n);
          } else {
            sr::HardSeqConfig cfg{shape.branching, shape.depth, 0.05,
                                  sr::splitmix64(seed * 31 + 7)};
            adversary = std::make_unique<sr::ZeroPadded>(std::make_unique<sr::HardSequence>(cfg));
          }
          sr::RewardBounds bounds = adversary->bounds();
          sr::MwuLearner learner(shape.n, horizon, bounds.width, bounds.lo);
          sr::PlayRecord record = sr::play(learner, *adversary, horizon);
          double bound = 2.0 * bounds.width *
                         std::sqrt(static_cast<double>(horizon) * std::log(shape.n));
          double regret = sr::external_regret(record);
          worst_margin = std::min(worst_margin, bound - regret);
          ++runs;
          if (regret > bound) {
            return {false, "violation at n=" + std::to_string(shape.n) +
                               " T=" + std::to_string(horizon) + " seed=" + std::to_string(seed) +
                               " kind=" + std::to_string(kind)};
          }
        }
      }
    }
  }
  return {true, std::to_string(runs) + " runs, min bound margin = " + fmt(worst_margin)};
}

// --- 3. deterministic eq3 bound -------------------------------------------------

Outcome eq3_holds() {
  struct Shape {
    std::uint64_t block;
    int scales;
  };
  const std::vector<Shape> shapes{{4, 1}, {4, 2}, {8, 2}};
  int runs = 0;
  double worst_margin = 1e300;
  for (const auto& shape : shapes) {
    for (int n : {2, 4, 8}) {
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (int kind = 0; kind < 2; ++kind) {
          std::unique_ptr<sr::Adversary> adversary;
          if (kind == 0) {
            adversary = std::make_unique<sr::UniformRewards>(n, 1.0, sr::splitmix64(seed + 555));
          } else {
            adversary = std::make_unique<sr::AdaptiveBestResponse>(n);
          }
          sr::MultiScaleConfig cfg =
              sr::MultiScaleConfig::with_schedule(n, 1.0, shape.scales, shape.block);
          sr::MultiScaleLearner learner(cfg);
          sr::PlayRecord record =
              sr::play(learner, *adversary, static_cast<std::int64_t>(cfg.horizon));
          double swap = sr::swap_regret(record).first;
          double bound = sr::eq3_bound(record, shape.scales, shape.block, 1.0);
          worst_margin = std::min(worst_margin, bound - swap);
          ++runs;
          if (swap > bound) {
            return {false, "violation at H=" + std::to_string(shape.block) +
                               " S=" + std::to_string(shape.scales) + " n=" + std::to_string(n) +
                               " seed=" + std::to_string(seed)};
          }
        }
      }
    }
  }
  return {true, std::to_string(runs) + " runs, min bound margin = " + fmt(worst_margin)};
}

// --- 4. hard-sequence expected length -------------------------------------------

Outcome hardseq_length() {
  std::string detail;
  for (int depth : {1, 2}) {
    sr::HardSeqConfig base{2, depth, 0.05, 0};
    const int runs = 100000;
    sr::KahanSum sum;
    sr::KahanSum sq;
    for (int i = 0; i < runs; ++i) {
      sr::HardSeqConfig cfg = base;
      cfg.seed = sr::splitmix64(static_cast<std::uint64_t>(i) * 2654435761u + depth);
      sr::HardSequence seq(cfg);
      sr::UniformLearner dummy(static_cast<int>(cfg.num_actions()));
      auto len = static_cast<double>(sr::play(dummy, seq, -1).horizon());
      sum.add(len);
      sq.add(len * len);
    }
    double mean = sum.value() / runs;
    double se = std::sqrt((sq.value() / runs - mean * mean) / runs);
    double expected = sr::expected_length(base);
    if (std::abs(mean - expected) > 3.0 * se) {
      return {false, "L=" + std::to_string(depth) + ": mean " + fmt(mean) + " vs " +
                         fmt(expected) + " (se " + fmt(se) + ")"};
    }
    detail += "L=" + std::to_string(depth) + ": mean " + fmt(mean) + " vs " + fmt(expected) +
              " (" + fmt(std::abs(mean - expected) / se) + " se) ";
  }
  return {true, detail};
}

// --- 5. two-coin game sanity ------------------------------------------------------

Outcome twocoin_sanity() {
  sr::TwoCoinConfig base{0.05, 0};
  const std::int64_t games = 1000000;  // one draw per game at delta = 1/20
  sr::KahanSum biased;
  sr::KahanSum gains;
  sr::KahanSum gains_sq;
  std::int64_t draws = 0;
  for (std::int64_t i = 0; i < games; ++i) {
    sr::TwoCoinConfig cfg = base;
    cfg.seed = sr::splitmix64(static_cast<std::uint64_t>(i) + 17);
    sr::TwoCoinGame game(cfg);
    sr::ActionDistribution both(std::vector<double>{0.5, 0.5, 0.0});
    double gain = 0.0;
    while (!game.finished()) {
      sr::RewardVector r = game.next(both);
      biased.add(r[static_cast<std::size_t>(game.biased_coin())]);
      gain += r[static_cast<std::size_t>(game.biased_coin())] - 0.5 * (r[0] + r[1]);
      ++draws;
    }
    gains.add(gain);
    gains_sq.add(gain * gain);
  }
  double mean_biased = biased.value() / static_cast<double>(draws);
  double sigma = std::sqrt(0.55 * 0.45 / static_cast<double>(draws));
  if (std::abs(mean_biased - 0.55) > 3.0 * sigma) {
    return {false, "biased coin mean " + fmt(mean_biased) + " off 0.55 by more than 3 sigma"};
  }
  double mean_gain = gains.value() / static_cast<double>(games);
  double var = gains_sq.value() / static_cast<double>(games) - mean_gain * mean_gain;
  double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(games));
  double predicted = sr::twocoin_uniform_policy_gain(base);  // delta * H / 2
  if (!(mean_gain > 0.0)) return {false, "uniform-policy gain not positive"};
  if (std::abs(mean_gain - predicted) > 3.0 * se) {
    return {false, "gain " + fmt(mean_gain) + " vs predicted " + fmt(predicted) + " (se " +
                       fmt(se) + ")"};
  }
  return {true, "biased mean " + fmt(mean_biased) + ", gain " + fmt(mean_gain) + " vs " +
                    fmt(predicted) + " (" + fmt(std::abs(mean_gain - predicted) / se) + " se)"};
}

// --- 6. uncoupled dynamics converge to an approximate CE ---------------------------

Outcome dynamics_ce() {
  double worst_eps = 0.0;
  double worst_swap_rate = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sr::Rng rng = sr::make_rng(seed, "acceptance-dynamics");
    sr::nfg::NormalFormGame game = sr::nfg::NormalFormGame::random(2, 4, rng);
    sr::nfg::DynamicsOptions options;
    options.max_days = 65536;
    auto result = sr::nfg::run_uncoupled_dynamics(game, 0.4, options, rng);
    double eps = result.certificate->epsilon_achieved;
    worst_eps = std::max(worst_eps, eps);
    if (eps > 0.4) {
      return {false, "seed " + std::to_string(seed) + " certified only " + fmt(eps)};
    }
    auto T = static_cast<double>(result.learner_config.horizon);
    for (const auto& record : result.records) {
      double swap = sr::swap_regret(record).first;
      worst_swap_rate = std::max(worst_swap_rate, swap / T);
      if (swap > 0.2 * T) {
        return {false, "seed " + std::to_string(seed) + " swap regret " + fmt(swap) +
                           " above 0.2*T"};
      }
    }
  }
  return {true, "20 seeds, worst epsilon " + fmt(worst_eps) + ", worst swap rate " +
                    fmt(worst_swap_rate) + " (cap 0.2)"};
}

// --- 7. query accounting ------------------------------------------------------------

Outcome query_accounting() {
  sr::Rng rng = sr::make_rng(7, "acceptance-queries");
  // Dense table accessed through an external oracle with its own counter.
  sr::nfg::NormalFormGame table = sr::nfg::NormalFormGame::random(3, 3, rng);
  std::uint64_t external_counter = 0;
  sr::nfg::NormalFormGame game = sr::nfg::NormalFormGame::from_oracle(
      3, 3, [&](int player, std::span<const int> profile) {
        ++external_counter;
        return table.utility(player, profile);
      });
  sr::nfg::DynamicsOptions options;
  options.mode = sr::nfg::DynamicsOptions::Mode::sampled;
  options.max_days = 16;
  options.compute_certificate = false;  // verification is not a payoff query
  auto result = sr::nfg::run_uncoupled_dynamics(game, 0.5, options, rng);
  auto expected = 3ull * 3ull * static_cast<std::uint64_t>(result.sample_count) *
                  result.learner_config.horizon;
  if (result.payoff_queries != expected) {
    return {false, "metered " + std::to_string(result.payoff_queries) + " vs m*n*K*T = " +
                       std::to_string(expected)};
  }
  if (external_counter != expected) {
    return {false, "oracle saw " + std::to_string(external_counter) + " calls vs " +
                       std::to_string(expected)};
  }
  return {true, "m*n*K*T = " + std::to_string(expected) + " matches both counters (K=" +
                    std::to_string(result.sample_count) + ", T=" +
                    std::to_string(result.learner_config.horizon) + ")"};
}

// --- 8. communication protocol -------------------------------------------------------

Outcome comm_protocol() {
  double worst_eps = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sr::Rng rng = sr::make_rng(seed, "acceptance-comm");
    sr::nfg::NormalFormGame game = sr::nfg::NormalFormGame::random(2, 4, rng);
    std::vector<double> alice;
    std::vector<double> bob;
    std::vector<int> profile(2);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        profile[0] = i;
        profile[1] = j;
        alice.push_back(game.utility(0, profile));
        bob.push_back(game.utility(1, profile));
      }
    }
    sr::comm::CommOptions options;
    options.max_days = 65536;
    auto result = sr::comm::run_comm_protocol(4, alice, bob, 0.4, options, rng);
    std::uint64_t expected_bits = static_cast<std::uint64_t>(result.learner_config.horizon) *
                                  (static_cast<std::uint64_t>(result.sample_count) + 1) *
                                  sr::comm::bits_per_index(4);
    if (result.transcript.total_bits != expected_bits) {
      return {false, "seed " + std::to_string(seed) + " bits " +
                         std::to_string(result.transcript.total_bits) + " vs " +
                         std::to_string(expected_bits)};
    }
    double eps = sr::nfg::verify_ce(game, result.output.to_joint()).epsilon_achieved;
    worst_eps = std::max(worst_eps, eps);
    if (eps > 0.4) {
      return {false, "seed " + std::to_string(seed) + " certified only " + fmt(eps)};
    }
  }
  return {true, "20 seeds, bits exact, worst epsilon " + fmt(worst_eps)};
}

// --- 9. sparsification ----------------------------------------------------------------

Outcome sparsification() {
  double worst_excess = -1e300;
  int runs = 0;
  for (std::uint64_t g = 0; g < 10; ++g) {
    sr::Rng rng = sr::make_rng(g, "acceptance-sparsify");
    sr::nfg::NormalFormGame game = sr::nfg::NormalFormGame::random(2, 3, rng);
    sr::nfg::DynamicsOptions options;
    options.max_days = 65536;
    options.compute_certificate = false;
    auto dynamics = sr::nfg::run_uncoupled_dynamics(game, 0.4, options, rng);
    sr::comm::TwoPlayerCeMatrix input(3);
    for (const auto& atom : dynamics.output.atoms) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          input.add(i, j, atom.weight * atom.factors[0][i] * atom.factors[1][j]);
        }
      }
    }
    double eps_in = sr::nfg::verify_ce(game, input.to_joint()).epsilon_achieved;
    std::int64_t rows_bound = sr::comm::sparsify_row_count(input.column_support(), 3, 0.2);
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      sr::Rng sub = sr::make_rng(g * 100 + rep, "acceptance-sparsify-rep");
      sr::comm::TwoPlayerCeMatrix out = sr::comm::sparsify(input, 0.2, sub);
      out.validate();
      double eps_out = sr::nfg::verify_ce(game, out.to_joint()).epsilon_achieved;
      worst_excess = std::max(worst_excess, eps_out - eps_in);
      ++runs;
      if (eps_out > eps_in + 0.2 + 1e-12) {
        return {false, "game " + std::to_string(g) + " rep " + std::to_string(rep) +
                           ": eps " + fmt(eps_in) + " -> " + fmt(eps_out)};
      }
      if (out.column_support() > input.column_support()) {
        return {false, "column support grew"};
      }
      if (out.row_support() > rows_bound) {
        return {false, "row support above D"};
      }
    }
  }
  return {true, std::to_string(runs) + " draws, worst epsilon excess " + fmt(worst_excess) +
                    " (slack 0.2)"};
}

// --- 10. EFG partition and sampling ------------------------------------------------------

Outcome efg_partition_sampling() {
  sr::Rng rng = sr::make_rng(10, "acceptance-efg");
  double worst_log_gap = 0.0;

  auto lse = [](const std::vector<double>& xs) {
    double m = xs.front();
    for (double x : xs) m = std::max(m, x);
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
  };

  for (int rep = 0; rep < 50; ++rep) {
    sr::efg::RandomTreeConfig cfg;
    cfg.players = 2;
    cfg.max_depth = 5;
    cfg.max_strategies = 30;
    cfg.chance_prob = 0.35;
    sr::efg::GameTree tree = sr::efg::random_tree(cfg, rng);
    int days = 1 + sr::next_index(rng, 3);
    std::vector<sr::efg::StrategyProfile> profiles;
    for (int t = 0; t < days; ++t) {
      sr::efg::StrategyProfile profile;
      for (int pl = 0; pl < 2; ++pl) {
        sr::efg::PureStrategy s;
        s.player = pl;
        for (int global : tree.layout(pl).infosets) {
          s.actions.push_back(
              sr::next_index(rng, static_cast<int>(tree.infoset(global).actions.size())));
        }
        profile.push_back(std::move(s));
      }
      profiles.push_back(std::move(profile));
    }
    double eta = sr::next_double(rng) * 2.0;
    for (int player = 0; player < 2; ++player) {
      auto tables = sr::efg::build_partition(tree, player, profiles, eta);
      auto strategies = sr::efg::enumerate_pure_strategies(tree, player, 30);
      std::vector<double> weights;
      for (const auto& s : strategies) {
        double total = 0.0;
        for (const auto& ctx : profiles) {
          sr::efg::StrategyProfile p = ctx;
          p[static_cast<std::size_t>(player)] = s;
          total += sr::efg::eval_utility(tree, p)[static_cast<std::size_t>(player)];
        }
        weights.push_back(eta * total);
      }
      double log_total = lse(weights);
      const auto& layout = tree.layout(player);
      std::vector<int> prefix;
      bool failed = false;
      std::function<void()> walk = [&]() {
        if (failed) return;
        if (!prefix.empty()) {
          std::vector<double> matched;
          for (std::size_t s = 0; s < strategies.size(); ++s) {
            bool match = true;
            for (std::size_t p = 0; p < prefix.size(); ++p) {
              if (strategies[s].actions[p] != prefix[p]) {
                match = false;
                break;
              }
            }
            if (match) matched.push_back(weights[s]);
          }
          double expected = lse(matched) - log_total;
          double got = sr::efg::sampler_prefix_log_prob(tables, prefix);
          worst_log_gap = std::max(worst_log_gap, std::abs(expected - got));
          if (std::abs(expected - got) > 1e-9) {
            failed = true;
            return;
          }
        }
        if (prefix.size() == layout.infosets.size()) return;
        int actions = static_cast<int>(
            tree.infoset(layout.infosets[prefix.size()]).actions.size());
        for (int a = 0; a < actions && !failed; ++a) {
          prefix.push_back(a);
          walk();
          prefix.pop_back();
        }
      };
      walk();
      if (failed) {
        return {false, "tree " + std::to_string(rep) + " player " + std::to_string(player) +
                           ": prefix probability differs by more than 1e-9"};
      }
    }
  }

  // Empirical TV on three trees at 1e6 draws each.
  double worst_tv = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    sr::efg::RandomTreeConfig cfg;
    cfg.players = 1;
    cfg.max_depth = 4;
    cfg.max_strategies = 16;
    sr::efg::GameTree tree = sr::efg::random_tree(cfg, rng);
    std::vector<sr::efg::StrategyProfile> profiles;
    for (int t = 0; t < 2; ++t) {
      sr::efg::PureStrategy s;
      s.player = 0;
      for (int global : tree.layout(0).infosets) {
        s.actions.push_back(
            sr::next_index(rng, static_cast<int>(tree.infoset(global).actions.size())));
      }
      profiles.push_back({std::move(s)});
    }
    double eta = 1.5;
    auto tables = sr::efg::build_partition(tree, 0, profiles, eta);
    auto strategies = sr::efg::enumerate_pure_strategies(tree, 0, 16);
    std::vector<double> weights;
    for (const auto& s : strategies) {
      double total = 0.0;
      for (const auto& ctx : profiles) {
        sr::efg::StrategyProfile p = ctx;
        p[0] = s;
        total += sr::efg::eval_utility(tree, p)[0];
      }
      weights.push_back(std::exp(eta * total));
    }
    double z = 0.0;
    for (double w : weights) z += w;
    std::map<std::vector<int>, std::int64_t> counts;
    const std::int64_t draws = 1000000;
    for (std::int64_t i = 0; i < draws; ++i) {
      ++counts[sr::efg::sample_strategy(tables, rng).actions];
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      double expect = weights[s] / z;
      auto it = counts.find(strategies[s].actions);
      double got = it == counts.end() ? 0.0
                                      : static_cast<double>(it->second) /
                                            static_cast<double>(draws);
      tv += std::abs(expect - got);
    }
    tv /= 2.0;
    worst_tv = std::max(worst_tv, tv);
    if (tv > 0.01) {
      return {false, "tree " + std::to_string(rep) + ": sampling TV " + fmt(tv)};
    }
  }
  return {true, "50 trees exact (worst log gap " + fmt(worst_log_gap) +
                    "), 3 trees empirical (worst TV " + fmt(worst_tv) + ")"};
}

// --- 11. NFCE dynamics ---------------------------------------------------------------------

Outcome nfce_dynamics() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    sr::Rng rng = sr::make_rng(seed, "acceptance-nfce");
    sr::efg::GameTree tree = sr::efg::blind_two_by_two_tree(2, rng);
    sr::efg::NfceOptions options;
    options.max_days = 65536;
    options.compute_certificate = false;
    auto result = sr::efg::run_nfce_dynamics(tree, 0.5, options, rng);

    // Full swap enumeration (4^4 = 256 swap functions per player), checked
    // against the separable verifier.
    auto cert = sr::efg::verify_nfce(tree, result.output, 12);
    for (int player = 0; player < 2; ++player) {
      auto strategies = sr::efg::enumerate_pure_strategies(tree, player, 12);
      std::map<std::vector<int>, int> index_of;
      for (std::size_t s = 0; s < strategies.size(); ++s) {
        index_of[strategies[s].actions] = static_cast<int>(s);
      }
      // Collapse atoms to distinct profiles first.
      std::map<std::vector<std::vector<int>>, double> collapsed;
      for (const auto& atom : result.output.atoms) {
        std::vector<std::vector<int>> key;
        for (const auto& s : atom.profile) key.push_back(s.actions);
        collapsed[key] += atom.weight;
      }
      double best = 0.0;
      std::vector<int> phi(strategies.size());
      for (std::int64_t code = 0; code < 256; ++code) {
        std::int64_t rest = code;
        for (std::size_t i = 0; i < 4; ++i) {
          phi[i] = static_cast<int>(rest % 4);
          rest /= 4;
        }
        double gain = 0.0;
        for (const auto& [key, w] : collapsed) {
          sr::efg::StrategyProfile profile;
          for (int pl = 0; pl < 2; ++pl) {
            profile.push_back({pl, key[static_cast<std::size_t>(pl)]});
          }
          double u_rec = sr::efg::eval_utility(tree, profile)[static_cast<std::size_t>(player)];
          int rec = index_of.at(key[static_cast<std::size_t>(player)]);
          profile[static_cast<std::size_t>(player)] =
              strategies[static_cast<std::size_t>(phi[static_cast<std::size_t>(rec)])];
          double u_dev = sr::efg::eval_utility(tree, profile)[static_cast<std::size_t>(player)];
          gain += w * (u_dev - u_rec);
        }
        best = std::max(best, gain);
      }
      if (std::abs(best - cert.per_player_gain[static_cast<std::size_t>(player)]) > 1e-9) {
        return {false, "seed " + std::to_string(seed) +
                           ": verifier disagrees with 256-swap enumeration"};
      }
      worst = std::max(worst, best);
      if (best > 0.5) {
        return {false, "seed " + std::to_string(seed) + " player " + std::to_string(player + 1) +
                           " gain " + fmt(best)};
      }
    }
  }
  return {true, "10 trees, worst best-swap gain " + fmt(worst) + " (target 0.5)"};
}

// --- 12. lower-bound diagnostic via the CLI ---------------------------------------------------

Outcome lower_bound_diagnostic() {
  const char* cli = std::getenv("SWAPREGRET_CLI");
  if (cli == nullptr) {
    return {false, "SWAPREGRET_CLI is not set; cannot drive the hardseq experiment"};
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  auto parse_summary = [&](const fs::path& p) {
    std::map<std::string, std::string> kv;
    std::ifstream is(p);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
      auto comma = line.find(',');
      if (comma != std::string::npos) kv[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return kv;
  };
  double min_uniform_swap = 1e300;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    fs::path out_a = fs::temp_directory_path() / ("swapregret-acc12-a-" + std::to_string(seed));
    fs::path out_b = fs::temp_directory_path() / ("swapregret-acc12-b-" + std::to_string(seed));
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    std::string base = std::string(cli) + " --experiment hardseq --K 2 --L 3 --delta 0.05 --seed " +
                       std::to_string(seed) + " --out ";
    if (std::system((base + out_a.string() + " > /dev/null 2>&1").c_str()) != 0) {
      return {false, "hardseq experiment failed for seed " + std::to_string(seed)};
    }
    if (std::system((base + out_b.string() + " > /dev/null 2>&1").c_str()) != 0) {
      return {false, "hardseq experiment rerun failed for seed " + std::to_string(seed)};
    }
    if (slurp(out_a / "hardseq_stream.csv") != slurp(out_b / "hardseq_stream.csv") ||
        slurp(out_a / "hardseq_summary.csv") != slurp(out_b / "hardseq_summary.csv")) {
      return {false, "seed " + std::to_string(seed) + ": reruns are not byte-identical"};
    }
    auto kv = parse_summary(out_a / "hardseq_summary.csv");
    double uniform_swap = std::strtod(kv["uniform_swap_regret"].c_str(), nullptr);
    min_uniform_swap = std::min(min_uniform_swap, uniform_swap);
    if (!(uniform_swap > 0.0)) {
      return {false, "seed " + std::to_string(seed) + ": uniform learner swap regret " +
                         kv["uniform_swap_regret"] + " is not positive"};
    }
  }
  return {true, "10 seeds deterministic, min uniform-learner swap regret " +
                    fmt(min_uniform_swap)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "swap-regret oracle equivalence", swap_oracle_equivalence},
      {2, "mwu external-regret bound", mwu_bound},
      {3, "multi-scale deterministic swap bound", eq3_holds},
      {4, "hard-sequence expected length", hardseq_length},
      {5, "two-coin game sanity", twocoin_sanity},
      {6, "uncoupled dynamics to approximate CE", dynamics_ce},
      {7, "payoff query accounting", query_accounting},
      {8, "communication protocol", comm_protocol},
      {9, "ce sparsification", sparsification},
      {10, "efg partition and sampling", efg_partition_sampling},
      {11, "nfce dynamics", nfce_dynamics},
      {12, "lower-bound diagnostic", lower_bound_diagnostic},
  };

  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%2d] %s %s — %s (%.1fs)\n", criterion.id, outcome.pass ? "PASS" : "FAIL",
                criterion.name, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
