#include "swapregret/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace swapregret {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line, const char* delims) {
  std::vector<std::string> out;
  std::string cur;
  auto is_delim = [&](char c) {
    for (const char* d = delims; *d; ++d)
      if (*d == c) return true;
    return false;
  };
  for (char c : line) {
    if (is_delim(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s, const char* context) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw StructuralError(std::string(context) + ": bad number '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& s, const char* context) {
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw StructuralError(std::string(context) + ": bad integer '" + s + "'");
  }
  return v;
}

void write_play_record(std::ostream& os, const PlayRecord& record) {
  os << "day,action,prob,reward\n";
  for (std::int64_t t = 0; t < record.horizon(); ++t) {
    const auto& p = record.strategy(t);
    const auto& r = record.reward(t);
    for (int i = 0; i < p.size(); ++i) {
      os << (t + 1) << ',' << (i + 1) << ',' << fmt_double(p[i]) << ','
         << fmt_double(r[static_cast<std::size_t>(i)]) << '\n';
    }
  }
}

void write_play_record(const std::filesystem::path& path, const PlayRecord& record) {
  std::ofstream os(path);
  if (!os) throw StructuralError("write_play_record: cannot open " + path.string());
  write_play_record(os, record);
}

PlayRecord read_play_record(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || split_fields(line, ",")[0] != "day") {
    throw StructuralError("read_play_record: missing header");
  }
  PlayRecord record;
  std::vector<double> probs;
  std::vector<double> rewards;
  long long current_day = 0;
  auto flush = [&]() {
    if (probs.empty()) return;
    record.add_day(ActionDistribution(probs), rewards);
    probs.clear();
    rewards.clear();
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split_fields(line, ",");
    if (f.size() != 4) throw StructuralError("read_play_record: expected 4 fields");
    long long day = parse_int(f[0], "read_play_record day");
    long long action = parse_int(f[1], "read_play_record action");
    if (day != current_day) {
      if (day != current_day + 1) throw StructuralError("read_play_record: days out of order");
      flush();
      current_day = day;
    }
    if (action != static_cast<long long>(probs.size()) + 1) {
      throw StructuralError("read_play_record: actions out of order");
    }
    probs.push_back(parse_double(f[2], "read_play_record prob"));
    rewards.push_back(parse_double(f[3], "read_play_record reward"));
  }
  flush();
  return record;
}

PlayRecord read_play_record(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw StructuralError("read_play_record: cannot open " + path.string());
  return read_play_record(is);
}

void write_reward_stream(std::ostream& os, const std::vector<RewardVector>& stream) {
  os << "day,action,reward\n";
  for (std::size_t t = 0; t < stream.size(); ++t) {
    for (std::size_t i = 0; i < stream[t].size(); ++i) {
      os << (t + 1) << ',' << (i + 1) << ',' << fmt_double(stream[t][i]) << '\n';
    }
  }
}

void write_multiscale_config(std::ostream& os, const MultiScaleConfig& config) {
  os << "n " << config.n << '\n';
  os << "B " << fmt_double(config.width) << '\n';
  os << "lo " << fmt_double(config.lo) << '\n';
  os << "S " << config.scales << '\n';
  os << "H " << config.block << '\n';
  os << "T " << config.horizon << '\n';
  if (config.epsilon) os << "epsilon " << fmt_double(*config.epsilon) << '\n';
}

MultiScaleConfig read_multiscale_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    auto f = split_fields(line, " \t");
    if (f.empty()) continue;
    if (f.size() != 2) throw StructuralError("read_multiscale_config: bad line '" + line + "'");
    kv[f[0]] = f[1];
  }
  for (const char* key : {"n", "B", "S", "H", "T"}) {
    if (!kv.count(key)) {
      throw StructuralError(std::string("read_multiscale_config: missing key ") + key);
    }
  }
  MultiScaleConfig cfg;
  cfg.n = static_cast<int>(parse_int(kv["n"], "config n"));
  cfg.width = parse_double(kv["B"], "config B");
  cfg.lo = kv.count("lo") ? parse_double(kv["lo"], "config lo") : 0.0;
  cfg.scales = static_cast<int>(parse_int(kv["S"], "config S"));
  cfg.block = static_cast<std::uint64_t>(parse_int(kv["H"], "config H"));
  cfg.horizon = static_cast<std::uint64_t>(parse_int(kv["T"], "config T"));
  if (kv.count("epsilon")) cfg.epsilon = parse_double(kv["epsilon"], "config epsilon");
  cfg.validate();
  return cfg;
}

}  // namespace swapregret
