// Experiment runner: every run is reproducible from (config, seed) and emits
// CSV artifacts only; plotting is left to external tooling.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

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

struct Options {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config_file;

  int n = 4;
  double eps = 0.5;
  int players = 2;
  int K = 2;
  int L = 1;
  double delta = 0.05;
  std::uint64_t H = 4;
  int S = 1;
  std::int64_t T = 0;  // 0 = derived
  double B = 1.0;
  std::int64_t runs = 1;
  std::uint64_t max_days = 65536;
  std::string learner = "mwu";
  std::string adversary = "uniform";
  std::string mode = "exact";
  std::string game_file;
  std::string tree_file;
};

int worker_count() {
  if (const char* env = std::getenv("SWAPREGRET_WORKERS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count) across workers; outputs are indexed, so the
// aggregate is independent of scheduling.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
  int workers = std::min<std::int64_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::int64_t> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        std::int64_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::ofstream open_out(const Options& opt, const std::string& name) {
  fs::path dir(opt.out);
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw sr::StructuralError("cannot open output file " + (dir / name).string());
  return os;
}

std::unique_ptr<sr::Adversary> make_adversary(const Options& opt, std::uint64_t seed) {
  if (opt.adversary == "uniform") {
    return std::make_unique<sr::UniformRewards>(opt.n, opt.B, seed);
  }
  if (opt.adversary == "bernoulli") {
    return std::make_unique<sr::BernoulliRewards>(opt.n, seed);
  }
  if (opt.adversary == "adaptive") {
    return std::make_unique<sr::AdaptiveBestResponse>(opt.n);
  }
  if (opt.adversary == "hardseq") {
    sr::HardSeqConfig cfg{opt.K, opt.L, opt.delta, seed};
    if (cfg.num_actions() != opt.n) {
      throw sr::ParameterError("hardseq adversary: n must equal 2*K^L = " +
                               std::to_string(cfg.num_actions()));
    }
    return std::make_unique<sr::ZeroPadded>(std::make_unique<sr::HardSequence>(cfg));
  }
  throw sr::ParameterError("unknown adversary kind: " + opt.adversary);
}

std::unique_ptr<sr::OnlineLearner> make_learner(const Options& opt, const sr::RewardBounds& bounds,
                                                std::int64_t horizon) {
  if (opt.learner == "mwu") {
    return std::make_unique<sr::MwuLearner>(opt.n, horizon, bounds.width, bounds.lo);
  }
  if (opt.learner == "uniform") {
    return std::make_unique<sr::UniformLearner>(opt.n);
  }
  if (opt.learner == "msmwu") {
    auto cfg = sr::MultiScaleConfig::with_schedule(opt.n, bounds.width, opt.S, opt.H, bounds.lo);
    return std::make_unique<sr::MultiScaleLearner>(cfg);
  }
  throw sr::ParameterError("unknown learner kind: " + opt.learner);
}

// Prefix regrets maintained incrementally from the (p_t, r_t) stream.
class RegretTracker {
 public:
  explicit RegretTracker(int n)
      : n_(n),
        gains_(static_cast<std::size_t>(n),
               std::vector<sr::KahanSum>(static_cast<std::size_t>(n))),
        totals_(static_cast<std::size_t>(n)) {}

  void add(const sr::ActionDistribution& p, const sr::RewardVector& r) {
    for (int i = 0; i < n_; ++i) {
      totals_[static_cast<std::size_t>(i)].add(r[static_cast<std::size_t>(i)]);
      algo_.add(p[i] * r[static_cast<std::size_t>(i)]);
      if (p[i] == 0.0) continue;
      for (int j = 0; j < n_; ++j) {
        gains_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].add(
            p[i] * r[static_cast<std::size_t>(j)]);
      }
    }
  }

  double external() const {
    double best = totals_[0].value();
    for (const auto& k : totals_) best = std::max(best, k.value());
    return best - algo_.value();
  }

  double swap() const {
    double swapped = 0.0;
    double played = 0.0;
    for (int i = 0; i < n_; ++i) {
      double best = gains_[static_cast<std::size_t>(i)][0].value();
      for (int j = 1; j < n_; ++j) {
        best = std::max(best, gains_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].value());
      }
      swapped += best;
      played += gains_[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)].value();
    }
    return swapped - played;
  }

 private:
  int n_;
  std::vector<std::vector<sr::KahanSum>> gains_;
  std::vector<sr::KahanSum> totals_;
  sr::KahanSum algo_;
};

int run_regret_curve(const Options& opt) {
  std::int64_t T = opt.T > 0 ? opt.T : 1000;
  auto adversary = make_adversary(opt, sr::splitmix64(opt.seed));
  auto learner = make_learner(opt, adversary->bounds(), T);
  auto os = open_out(opt, "regret_curve.csv");
  os << "day,algo_reward,external_regret,swap_regret\n";
  RegretTracker tracker(opt.n);
  for (std::int64_t t = 1; t <= T; ++t) {
    sr::ActionDistribution p = learner->act();
    sr::RewardVector r = adversary->next(p);
    learner->update(r);
    double day_reward = 0.0;
    for (int i = 0; i < opt.n; ++i) day_reward += p[i] * r[static_cast<std::size_t>(i)];
    tracker.add(p, r);
    os << t << ',' << sr::fmt_double(day_reward) << ',' << sr::fmt_double(tracker.external())
       << ',' << sr::fmt_double(tracker.swap()) << '\n';
  }
  std::cout << "regret-curve: T=" << T << " external=" << tracker.external()
            << " swap=" << tracker.swap() << '\n';
  return 0;
}

int run_eq3_check(const Options& opt) {
  auto cfg = sr::MultiScaleConfig::with_schedule(opt.n, opt.B, opt.S, opt.H);
  sr::MultiScaleLearner learner(cfg);
  auto adversary = make_adversary(opt, sr::splitmix64(opt.seed));
  auto T = static_cast<std::int64_t>(cfg.horizon);

  auto os = open_out(opt, "eq3_check.csv");
  os << "day,swap_regret_so_far,eq3_bound\n";
  RegretTracker tracker(opt.n);
  sr::PlayRecord record(adversary->bounds());
  sr::KahanSum sup_sum;
  std::vector<sr::KahanSum> totals(static_cast<std::size_t>(opt.n));
  double delta = 2.0 * std::sqrt(std::log(static_cast<double>(opt.n)) /
                                 static_cast<double>(cfg.block));
  for (std::int64_t t = 1; t <= T; ++t) {
    sr::ActionDistribution p = learner.act();
    sr::RewardVector r = adversary->next(p);
    learner.update(r);
    tracker.add(p, r);
    double m = 0.0;
    for (int i = 0; i < opt.n; ++i) {
      m = std::max(m, std::abs(r[static_cast<std::size_t>(i)]));
      totals[static_cast<std::size_t>(i)].add(r[static_cast<std::size_t>(i)]);
    }
    sup_sum.add(m);
    double total_norm = 0.0;
    for (const auto& k : totals) total_norm = std::max(total_norm, std::abs(k.value()));
    double bound = std::ldexp(sup_sum.value() - total_norm, -opt.S) +
                   delta * static_cast<double>(t) * opt.B;
    os << t << ',' << sr::fmt_double(tracker.swap()) << ',' << sr::fmt_double(bound) << '\n';
    record.add_day(std::move(p), std::move(r));
  }
  double swap = sr::swap_regret(record).first;
  double bound = sr::eq3_bound(record, opt.S, opt.H, opt.B);
  bool ok = swap <= bound;
  std::cout << "eq3-check: T=" << T << " swap=" << swap << " bound=" << bound
            << (ok ? " OK" : " VIOLATED") << '\n';
  return ok ? 0 : 1;
}

int run_hardseq(const Options& opt) {
  sr::HardSeqConfig cfg{opt.K, opt.L, opt.delta, opt.seed};
  cfg.validate();
  if (opt.runs > 1) {
    // Length statistics across seeded runs; workers fan out, outputs stay
    // index-ordered.
    std::vector<std::int64_t> lengths(static_cast<std::size_t>(opt.runs));
    parallel_for(opt.runs, [&](std::int64_t i) {
      sr::HardSeqConfig run_cfg = cfg;
      run_cfg.seed = sr::splitmix64(opt.seed ^ sr::fnv1a64("run-" + std::to_string(i)));
      sr::HardSequence seq(run_cfg);
      sr::UniformLearner dummy(static_cast<int>(run_cfg.num_actions()));
      lengths[static_cast<std::size_t>(i)] = sr::play(dummy, seq, -1).horizon();
    });
    auto os = open_out(opt, "hardseq_lengths.csv");
    os << "run,length\n";
    sr::KahanSum sum;
    sr::KahanSum sq;
    for (std::int64_t i = 0; i < opt.runs; ++i) {
      os << (i + 1) << ',' << lengths[static_cast<std::size_t>(i)] << '\n';
      auto x = static_cast<double>(lengths[static_cast<std::size_t>(i)]);
      sum.add(x);
      sq.add(x * x);
    }
    double mean = sum.value() / static_cast<double>(opt.runs);
    double var = sq.value() / static_cast<double>(opt.runs) - mean * mean;
    double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(opt.runs));
    std::cout << "hardseq: runs=" << opt.runs << " mean_length=" << mean
              << " expected=" << sr::expected_length(cfg) << " se=" << se << '\n';
    return 0;
  }

  auto n = static_cast<int>(cfg.num_actions());
  // One seeded stream, dumped and replayed against the reporting learners.
  std::vector<sr::RewardVector> stream;
  {
    sr::HardSequence seq(cfg);
    sr::ActionDistribution uniform = sr::ActionDistribution::uniform(n);
    while (!seq.finished()) stream.push_back(seq.next(uniform));
  }
  {
    auto os = open_out(opt, "hardseq_stream.csv");
    sr::write_reward_stream(os, stream);
  }
  auto replay = [&](sr::OnlineLearner& learner) {
    sr::PlayRecord record(sr::HardSeqConfig::reward_bounds());
    for (const auto& r : stream) {
      sr::ActionDistribution p = learner.act();
      learner.update(r);
      record.add_day(std::move(p), r);
    }
    return record;
  };
  sr::RewardBounds bounds = sr::HardSeqConfig::reward_bounds();
  sr::MwuLearner mwu(n, static_cast<std::int64_t>(stream.size()), bounds.width, bounds.lo);
  sr::UniformLearner uniform(n);
  auto mwu_report = sr::regret_report(replay(mwu));
  auto uniform_report = sr::regret_report(replay(uniform));

  auto os = open_out(opt, "hardseq_summary.csv");
  os << "key,value\n";
  os << "n," << n << '\n';
  os << "realized_length," << stream.size() << '\n';
  os << "expected_length," << sr::fmt_double(sr::expected_length(cfg)) << '\n';
  os << "block_days," << cfg.block_days() << '\n';
  os << "padded_days,0\n";
  os << "mwu_swap_regret," << sr::fmt_double(mwu_report.swap) << '\n';
  os << "mwu_external_regret," << sr::fmt_double(mwu_report.external) << '\n';
  os << "uniform_swap_regret," << sr::fmt_double(uniform_report.swap) << '\n';
  os << "uniform_external_regret," << sr::fmt_double(uniform_report.external) << '\n';
  std::cout << "hardseq: length=" << stream.size() << " mwu_swap=" << mwu_report.swap
            << " uniform_swap=" << uniform_report.swap << '\n';
  return 0;
}

int run_nfg_dynamics(const Options& opt) {
  sr::Rng rng = sr::make_rng(opt.seed, "nfg-dynamics");
  sr::nfg::NormalFormGame game = [&]() {
    if (!opt.game_file.empty()) {
      std::ifstream is(opt.game_file);
      if (!is) throw sr::StructuralError("cannot open game file " + opt.game_file);
      return sr::nfg::read_game(is);
    }
    return sr::nfg::NormalFormGame::random(opt.players, opt.n, rng);
  }();
  if (opt.game_file.empty()) {
    auto os = open_out(opt, "game.nfg");
    sr::nfg::write_game(os, game);
  }
  sr::nfg::DynamicsOptions dyn;
  dyn.mode = opt.mode == "sampled" ? sr::nfg::DynamicsOptions::Mode::sampled
                                   : sr::nfg::DynamicsOptions::Mode::exact;
  dyn.max_days = opt.max_days;
  auto result = sr::nfg::run_uncoupled_dynamics(game, opt.eps, dyn, rng);
  {
    auto os = open_out(opt, "joint_distribution.csv");
    sr::nfg::write_joint_distribution(os, result.output);
  }
  auto os = open_out(opt, "nfg_summary.csv");
  os << "key,value\n";
  os << "players," << game.players() << '\n';
  os << "n," << game.actions() << '\n';
  os << "T," << result.learner_config.horizon << '\n';
  os << "K," << result.sample_count << '\n';
  os << "payoff_queries," << result.payoff_queries << '\n';
  os << "epsilon_achieved," << sr::fmt_double(result.certificate->epsilon_achieved) << '\n';
  for (int i = 0; i < game.players(); ++i) {
    auto report = sr::regret_report(result.records[static_cast<std::size_t>(i)]);
    os << "player" << (i + 1) << "_swap_regret," << sr::fmt_double(report.swap) << '\n';
  }
  std::cout << "nfg-dynamics: T=" << result.learner_config.horizon
            << " queries=" << result.payoff_queries
            << " epsilon_achieved=" << result.certificate->epsilon_achieved << '\n';
  return 0;
}

int run_comm(const Options& opt) {
  sr::Rng rng = sr::make_rng(opt.seed, "comm");
  sr::nfg::NormalFormGame game = sr::nfg::NormalFormGame::random(2, opt.n, rng);
  std::vector<double> alice;
  std::vector<double> bob;
  std::vector<int> profile(2);
  for (int i = 0; i < opt.n; ++i) {
    for (int j = 0; j < opt.n; ++j) {
      profile[0] = i;
      profile[1] = j;
      alice.push_back(game.utility(0, profile));
      bob.push_back(game.utility(1, profile));
    }
  }
  sr::comm::CommOptions copts;
  copts.max_days = opt.max_days;
  auto result = sr::comm::run_comm_protocol(opt.n, alice, bob, opt.eps, copts, rng);
  {
    auto os = open_out(opt, "transcript.csv");
    sr::comm::write_transcript(os, result.transcript);
  }
  {
    auto os = open_out(opt, "comm_matrix.txt");
    sr::comm::write_matrix(os, result.output);
  }
  auto cert = sr::nfg::verify_ce(game, result.output.to_joint());
  std::uint64_t expected_bits = static_cast<std::uint64_t>(result.learner_config.horizon) *
                                (static_cast<std::uint64_t>(result.sample_count) + 1) *
                                sr::comm::bits_per_index(opt.n);
  auto os = open_out(opt, "comm_summary.csv");
  os << "key,value\n";
  os << "n," << opt.n << '\n';
  os << "T," << result.learner_config.horizon << '\n';
  os << "K," << result.sample_count << '\n';
  os << "total_bits," << result.transcript.total_bits << '\n';
  os << "expected_bits," << expected_bits << '\n';
  os << "epsilon_achieved," << sr::fmt_double(cert.epsilon_achieved) << '\n';
  std::cout << "comm: T=" << result.learner_config.horizon
            << " bits=" << result.transcript.total_bits
            << " epsilon_achieved=" << cert.epsilon_achieved << '\n';
  return 0;
}

int run_sparsify(const Options& opt) {
  sr::Rng rng = sr::make_rng(opt.seed, "sparsify");
  sr::nfg::NormalFormGame game = sr::nfg::NormalFormGame::random(2, opt.n, rng);
  sr::nfg::DynamicsOptions dyn;
  dyn.max_days = opt.max_days;
  auto dynamics = sr::nfg::run_uncoupled_dynamics(game, opt.eps, dyn, rng);
  // Collapse the product-mixture output into a correlated matrix.
  sr::comm::TwoPlayerCeMatrix input(opt.n);
  for (const auto& atom : dynamics.output.atoms) {
    for (int i = 0; i < opt.n; ++i) {
      for (int j = 0; j < opt.n; ++j) {
        input.add(i, j, atom.weight * atom.factors[0][i] * atom.factors[1][j]);
      }
    }
  }
  auto before = sr::nfg::verify_ce(game, input.to_joint());
  auto output = sr::comm::sparsify(input, opt.delta, rng);
  auto after = sr::nfg::verify_ce(game, output.to_joint());
  {
    auto os = open_out(opt, "sparsify_input.txt");
    sr::comm::write_matrix(os, input);
  }
  {
    auto os = open_out(opt, "sparsify_output.txt");
    sr::comm::write_matrix(os, output);
  }
  auto os = open_out(opt, "sparsify_summary.csv");
  os << "key,value\n";
  os << "delta," << sr::fmt_double(opt.delta) << '\n';
  os << "rows_drawn," << sr::comm::sparsify_row_count(input.column_support(), opt.n, opt.delta)
     << '\n';
  os << "input_epsilon," << sr::fmt_double(before.epsilon_achieved) << '\n';
  os << "output_epsilon," << sr::fmt_double(after.epsilon_achieved) << '\n';
  os << "input_row_support," << input.row_support() << '\n';
  os << "output_row_support," << output.row_support() << '\n';
  os << "input_column_support," << input.column_support() << '\n';
  os << "output_column_support," << output.column_support() << '\n';
  std::cout << "sparsify: eps_in=" << before.epsilon_achieved
            << " eps_out=" << after.epsilon_achieved << '\n';
  return 0;
}

int run_efg_nfce(const Options& opt) {
  sr::Rng rng = sr::make_rng(opt.seed, "efg-nfce");
  sr::efg::GameTree tree = [&]() {
    if (!opt.tree_file.empty()) {
      std::ifstream is(opt.tree_file);
      if (!is) throw sr::StructuralError("cannot open tree file " + opt.tree_file);
      return sr::efg::read_tree(is);
    }
    return sr::efg::blind_two_by_two_tree(2, rng);
  }();
  if (opt.tree_file.empty()) {
    auto os = open_out(opt, "tree.txt");
    sr::efg::write_tree(os, tree);
  }
  sr::efg::NfceOptions nopts;
  nopts.max_days = opt.max_days;
  auto result = sr::efg::run_nfce_dynamics(tree, opt.eps, nopts, rng);
  {
    auto os = open_out(opt, "nfce_profiles.csv");
    os << "atom_weight,player,infoset,action\n";
    for (const auto& atom : result.output.atoms) {
      for (const auto& s : atom.profile) {
        const auto& layout = tree.layout(s.player);
        for (std::size_t p = 0; p < s.actions.size(); ++p) {
          os << sr::fmt_double(atom.weight) << ',' << (s.player + 1) << ','
             << tree.infoset(layout.infosets[p]).name << ','
             << (s.actions[p] + 1) << '\n';
        }
      }
    }
  }
  auto os = open_out(opt, "nfce_summary.csv");
  os << "key,value\n";
  os << "players," << tree.players() << '\n';
  os << "T," << result.schedule.horizon << '\n';
  os << "H," << result.schedule.block << '\n';
  os << "S," << result.schedule.scales << '\n';
  os << "epsilon_achieved," << sr::fmt_double(result.certificate->epsilon_achieved) << '\n';
  for (int i = 0; i < tree.players(); ++i) {
    os << "player" << (i + 1) << "_gain,"
       << sr::fmt_double(result.certificate->per_player_gain[static_cast<std::size_t>(i)]) << '\n';
  }
  std::cout << "efg-nfce: T=" << result.schedule.horizon
            << " epsilon_achieved=" << result.certificate->epsilon_achieved << '\n';
  return 0;
}

int run_twocoin(const Options& opt) {
  sr::TwoCoinConfig base{opt.delta, opt.seed};
  base.validate();
  std::int64_t runs = std::max<std::int64_t>(opt.runs, 1);
  std::vector<double> gains(static_cast<std::size_t>(runs));
  std::vector<double> biased_sum(static_cast<std::size_t>(runs));
  std::vector<std::int64_t> biased_count(static_cast<std::size_t>(runs));
  parallel_for(runs, [&](std::int64_t i) {
    sr::TwoCoinConfig cfg = base;
    cfg.seed = sr::splitmix64(opt.seed ^ sr::fnv1a64("game-" + std::to_string(i)));
    sr::TwoCoinGame game(cfg);
    sr::ActionDistribution both_coins(std::vector<double>{0.5, 0.5, 0.0});
    double gain = 0.0;
    double bsum = 0.0;
    std::int64_t bcount = 0;
    while (!game.finished()) {
      sr::RewardVector r = game.next(both_coins);
      double star = r[static_cast<std::size_t>(game.biased_coin())];
      gain += star - 0.5 * (r[0] + r[1]);
      bsum += star;
      ++bcount;
    }
    gains[static_cast<std::size_t>(i)] = gain;
    biased_sum[static_cast<std::size_t>(i)] = bsum;
    biased_count[static_cast<std::size_t>(i)] = bcount;
  });
  auto os = open_out(opt, "twocoin_gains.csv");
  os << "run,gain\n";
  sr::KahanSum sum;
  sr::KahanSum sq;
  sr::KahanSum bias_total;
  std::int64_t draws = 0;
  for (std::int64_t i = 0; i < runs; ++i) {
    os << (i + 1) << ',' << sr::fmt_double(gains[static_cast<std::size_t>(i)]) << '\n';
    sum.add(gains[static_cast<std::size_t>(i)]);
    sq.add(gains[static_cast<std::size_t>(i)] * gains[static_cast<std::size_t>(i)]);
    bias_total.add(biased_sum[static_cast<std::size_t>(i)]);
    draws += biased_count[static_cast<std::size_t>(i)];
  }
  double mean = sum.value() / static_cast<double>(runs);
  double var = sq.value() / static_cast<double>(runs) - mean * mean;
  double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(runs));
  double predicted = sr::twocoin_uniform_policy_gain(base);
  std::cout << "twocoin: runs=" << runs << " mean_gain=" << mean << " predicted=" << predicted
            << " se=" << se << " biased_coin_mean=" << bias_total.value() / static_cast<double>(draws)
            << '\n';
  return 0;
}

// Config file lines "key value" override parsed flags.
void apply_config_file(Options& opt) {
  std::ifstream is(opt.config_file);
  if (!is) throw sr::StructuralError("cannot open config file " + opt.config_file);
  std::string line;
  while (std::getline(is, line)) {
    auto f = sr::split_fields(line, " \t=");
    if (f.empty() || f[0].starts_with("#")) continue;
    if (f.size() != 2) throw sr::StructuralError("config: bad line '" + line + "'");
    const std::string& key = f[0];
    const std::string& value = f[1];
    if (key == "experiment") opt.experiment = value;
    else if (key == "seed") opt.seed = static_cast<std::uint64_t>(sr::parse_int(value, "config seed"));
    else if (key == "out") opt.out = value;
    else if (key == "n") opt.n = static_cast<int>(sr::parse_int(value, "config n"));
    else if (key == "eps") opt.eps = sr::parse_double(value, "config eps");
    else if (key == "players") opt.players = static_cast<int>(sr::parse_int(value, "config players"));
    else if (key == "K") opt.K = static_cast<int>(sr::parse_int(value, "config K"));
    else if (key == "L") opt.L = static_cast<int>(sr::parse_int(value, "config L"));
    else if (key == "delta") opt.delta = sr::parse_double(value, "config delta");
    else if (key == "H") opt.H = static_cast<std::uint64_t>(sr::parse_int(value, "config H"));
    else if (key == "S") opt.S = static_cast<int>(sr::parse_int(value, "config S"));
    else if (key == "T") opt.T = sr::parse_int(value, "config T");
    else if (key == "B") opt.B = sr::parse_double(value, "config B");
    else if (key == "runs") opt.runs = sr::parse_int(value, "config runs");
    else if (key == "max-days") opt.max_days = static_cast<std::uint64_t>(sr::parse_int(value, "config max-days"));
    else if (key == "learner") opt.learner = value;
    else if (key == "adversary") opt.adversary = value;
    else if (key == "mode") opt.mode = value;
    else if (key == "game") opt.game_file = value;
    else if (key == "tree") opt.tree_file = value;
    else throw sr::StructuralError("config: unknown key '" + key + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swapregret experiment runner"};
  Options opt;
  app.add_option("--experiment", opt.experiment,
                 "regret-curve | eq3-check | hardseq | nfg-dynamics | comm | sparsify | "
                 "efg-nfce | twocoin")
      ->required();
  app.add_option("--seed", opt.seed, "global seed; per-component streams are derived from it");
  app.add_option("--out", opt.out, "output directory");
  app.add_option("--config", opt.config_file, "key-value file; entries override flags");
  app.add_option("--n", opt.n, "action count");
  app.add_option("--eps", opt.eps, "target epsilon");
  app.add_option("--players", opt.players, "player count");
  app.add_option("--K", opt.K, "hard-sequence branching factor");
  app.add_option("--L", opt.L, "hard-sequence depth");
  app.add_option("--delta", opt.delta, "coin bias / sparsification slack");
  app.add_option("--H", opt.H, "multi-scale block size");
  app.add_option("--S", opt.S, "multi-scale scale count");
  app.add_option("--T", opt.T, "horizon (0 = derived)");
  app.add_option("--B", opt.B, "reward width");
  app.add_option("--runs", opt.runs, "repetition count");
  app.add_option("--max-days", opt.max_days, "learner horizon budget for dynamics");
  app.add_option("--learner", opt.learner, "mwu | msmwu | uniform");
  app.add_option("--adversary", opt.adversary, "uniform | bernoulli | adaptive | hardseq");
  app.add_option("--mode", opt.mode, "exact | sampled");
  app.add_option("--game", opt.game_file, "game file (nfg format)");
  app.add_option("--tree", opt.tree_file, "tree file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!opt.config_file.empty()) apply_config_file(opt);
    if (opt.experiment == "regret-curve") return run_regret_curve(opt);
    if (opt.experiment == "eq3-check") return run_eq3_check(opt);
    if (opt.experiment == "hardseq") return run_hardseq(opt);
    if (opt.experiment == "nfg-dynamics") return run_nfg_dynamics(opt);
    if (opt.experiment == "comm") return run_comm(opt);
    if (opt.experiment == "sparsify") return run_sparsify(opt);
    if (opt.experiment == "efg-nfce") return run_efg_nfce(opt);
    if (opt.experiment == "twocoin") return run_twocoin(opt);
    std::cerr << "unknown experiment kind: " << opt.experiment << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
