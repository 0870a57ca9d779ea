#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "swapregret/adversaries.hpp"
#include "swapregret/regret.hpp"

using namespace swapregret;

namespace {
std::vector<RewardVector> drain(HardSequence& seq) {
  std::vector<RewardVector> stream;
  ActionDistribution dummy = ActionDistribution::uniform(seq.num_actions());
  while (!seq.finished()) stream.push_back(seq.next(dummy));
  return stream;
}
}  // namespace

TEST_CASE("hard sequence config arithmetic") {
  HardSeqConfig cfg{2, 1, 0.05, 0};
  CHECK(cfg.num_actions() == 4);
  CHECK(cfg.block_days() == 1);
  CHECK(cfg.skip_probability() == doctest::Approx(0.25));
  HardSeqConfig fine{2, 3, 0.025, 0};
  CHECK(fine.block_days() == 4);  // 1/(400 * (1/40)^2 / ... ) = 1600/400
  CHECK_THROWS_AS((HardSeqConfig{2, 1, 0.2, 0}.validate()), ParameterError);
  CHECK_THROWS_AS((HardSeqConfig{0, 1, 0.05, 0}.validate()), ParameterError);
}

TEST_CASE("expected length closed forms") {
  CHECK(expected_length(HardSeqConfig{2, 2, 0.05, 0}) == doctest::Approx(49.0 / 16.0));
  CHECK(expected_length(HardSeqConfig{2, 0, 0.05, 0}) == doctest::Approx(1.0));
  CHECK(expected_length(HardSeqConfig{2, 3, 0.025, 0}) == doctest::Approx(343.0 / 16.0));
}

TEST_CASE("depth-one hard sequence first day values") {
  // K = 2, L = 1: n = 4, one day per leaf. Actions 0 and 1 carry the coins
  // (base 1/32 plus a 1/32 coin), actions 2 and 3 read the level-1 fill 0.
  HardSeqConfig cfg{2, 1, 0.05, 12};
  HardSequence seq(cfg);
  RewardVector r = seq.next(ActionDistribution::uniform(4));
  double base = 1.0 / 32.0;
  for (int i = 0; i < 2; ++i) {
    bool ok = r[static_cast<std::size_t>(i)] == doctest::Approx(base) ||
              r[static_cast<std::size_t>(i)] == doctest::Approx(base + 1.0 / 32.0);
    CHECK(ok);
  }
  CHECK(r[2] == 0.0);
  CHECK(r[3] == 0.0);
}

TEST_CASE("after the stream finishes every action reads -1") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    HardSequence seq(HardSeqConfig{2, 2, 0.05, seed});
    drain(seq);
    for (double v : seq.current_rewards()) CHECK(v == -1.0);
    CHECK_THROWS_AS(seq.next(ActionDistribution::uniform(8)), LifecycleError);
  }
}

TEST_CASE("streams are oblivious to the opponent's strategies") {
  HardSeqConfig cfg{2, 2, 0.05, 99};
  HardSequence a(cfg);
  HardSequence b(cfg);
  ActionDistribution uniform = ActionDistribution::uniform(8);
  ActionDistribution biased = ActionDistribution::point_mass(8, 3);
  while (!a.finished()) {
    REQUIRE_FALSE(b.finished());
    CHECK(a.next(uniform) == b.next(biased));
  }
  CHECK(b.finished());
}

TEST_CASE("reward entries only take the documented values") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    HardSeqConfig cfg{3, 2, 0.05, seed};
    int levels = cfg.depth + 1;
    std::set<double> allowed{-1.0};
    for (int l = 0; l <= cfg.depth; ++l) {
      allowed.insert(static_cast<double>(cfg.depth - l) / (16.0 * levels));
    }
    allowed.insert(static_cast<double>(cfg.depth) / (16.0 * levels) + 1.0 / (16.0 * levels));
    HardSequence seq(cfg);
    for (const auto& day : drain(seq)) {
      for (double v : day) {
        CHECK(allowed.count(v) == 1);
      }
    }
  }
}

TEST_CASE("visited leaves form per-node prefixes in depth-first order") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    HardSeqConfig cfg{3, 3, 0.05, seed};
    HardSequence seq(cfg);
    drain(seq);
    std::int64_t previous = -1;
    std::map<std::int64_t, int> max_child;   // node key -> highest visited child
    std::map<std::int64_t, std::set<int>> seen;
    for (const auto& visit : seq.leaf_visits()) {
      CHECK(visit.leaf > previous);  // strict left-to-right order
      previous = visit.leaf;
      // Decompose the leaf index into per-level digits.
      std::int64_t rest = visit.leaf;
      std::vector<int> digits(static_cast<std::size_t>(cfg.depth));
      for (int l = 0; l < cfg.depth; ++l) {
        digits[static_cast<std::size_t>(cfg.depth - 1 - l)] = static_cast<int>(rest % cfg.branching);
        rest /= cfg.branching;
      }
      std::int64_t key = 0;
      for (int l = 0; l < cfg.depth; ++l) {
        int d = digits[static_cast<std::size_t>(l)];
        seen[key].insert(d);
        max_child[key] = std::max(max_child[key], d);
        key = key * cfg.branching + d + 1;  // unique key per internal node
      }
    }
    for (const auto& [key, children] : seen) {
      // A visited child set {0..max} is exactly a prefix.
      CHECK(static_cast<int>(children.size()) == max_child[key] + 1);
    }
  }
}

TEST_CASE("empirical mean length matches the closed form") {
  HardSeqConfig base{2, 1, 0.05, 0};
  const int runs = 20000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < runs; ++i) {
    HardSeqConfig cfg = base;
    cfg.seed = splitmix64(static_cast<std::uint64_t>(i) + 1000);
    HardSequence seq(cfg);
    auto len = static_cast<double>(drain(seq).size());
    sum += len;
    sq += len * len;
  }
  double mean = sum / runs;
  double se = std::sqrt((sq / runs - mean * mean) / runs);
  CHECK(std::abs(mean - expected_length(base)) <= 3.0 * se);
}

TEST_CASE("zero padding extends a finished stream") {
  HardSeqConfig cfg{2, 1, 0.05, 5};
  ZeroPadded padded(std::make_unique<HardSequence>(cfg));
  UniformLearner learner(4);
  PlayRecord record = play(learner, padded, 50);
  CHECK(record.horizon() == 50);
  CHECK(padded.real_days() + padded.padded_days() == 50);
  CHECK(padded.padded_days() > 0);
  const auto& last = record.reward(49);
  for (double v : last) CHECK(v == 0.0);
}

TEST_CASE("two-coin game draws and bounds") {
  TwoCoinConfig cfg{0.05, 3};
  CHECK(cfg.block_days() == 1);
  TwoCoinGame game(cfg);
  RewardVector r = game.next(ActionDistribution::uniform(3));
  CHECK((r[0] == 0.0 || r[0] == 1.0));
  CHECK((r[1] == 0.0 || r[1] == 1.0));
  CHECK(r[2] == 0.0);
  CHECK(game.finished());
  CHECK_THROWS_AS(game.next(ActionDistribution::uniform(3)), LifecycleError);
  CHECK_THROWS_AS((TwoCoinConfig{0.3, 0}.validate()), ParameterError);
}

TEST_CASE("two-coin biased arm empirical mean") {
  const int games = 100000;
  double sum = 0.0;
  for (int i = 0; i < games; ++i) {
    TwoCoinGame game(TwoCoinConfig{0.05, splitmix64(static_cast<std::uint64_t>(i))});
    RewardVector r = game.next(ActionDistribution::uniform(3));
    sum += r[static_cast<std::size_t>(game.biased_coin())];
  }
  double mean = sum / games;
  double se = std::sqrt(0.55 * 0.45 / games);
  CHECK(std::abs(mean - 0.55) <= 3.0 * se);
}

TEST_CASE("adaptive best response rewards the least-played action") {
  AdaptiveBestResponse adversary(2);
  RewardVector r = adversary.next(ActionDistribution::uniform(2));
  CHECK(r == RewardVector{1.0, 0.0});  // tie goes to the smallest index
  r = adversary.next(ActionDistribution::point_mass(2, 1));
  CHECK(r == RewardVector{1.0, 0.0});
  r = adversary.next(ActionDistribution::point_mass(2, 0));
  CHECK(r == RewardVector{0.0, 1.0});
}

TEST_CASE("mwu meets its regret bound against the adaptive adversary") {
  MwuLearner learner(8, 10000, 1.0);
  AdaptiveBestResponse adversary(8);
  PlayRecord record = play(learner, adversary, 10000);
  CHECK(external_regret(record) <= 2.0 * std::sqrt(10000.0 * std::log(8.0)));
}

TEST_CASE("uniform learner accumulates positive swap regret on hard streams") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    HardSeqConfig cfg{2, 2, 0.05, seed};
    HardSequence seq(cfg);
    UniformLearner learner(8);
    PlayRecord record = play(learner, seq, -1);
    CHECK(swap_regret(record).first > 0.0);
  }
}

TEST_CASE("play harness validates and records bounds") {
  HardSeqConfig cfg{2, 1, 0.05, 1};
  HardSequence seq(cfg);
  UniformLearner wrong(3);
  CHECK_THROWS_AS(play(wrong, seq, 5), StructuralError);
  UniformLearner ok(4);
  CHECK_THROWS_AS(play(ok, seq, 50), LifecycleError);  // stream is shorter than 50
  HardSequence seq2(cfg);
  PlayRecord record = play(ok, seq2, -1);
  CHECK(record.bounds().lo == doctest::Approx(-1.0));
  CHECK(record.bounds().width == doctest::Approx(1.0 + 1.0 / 16.0));
}
