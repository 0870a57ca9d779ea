#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "swapregret/multiscale.hpp"
#include "swapregret/regret.hpp"

namespace swapregret {

// Round-trippable decimal rendering (%.17g); all emitted files use it so
// reruns are byte-identical.
std::string fmt_double(double x);

// Splits on any of the given delimiters, dropping empty fields.
std::vector<std::string> split_fields(const std::string& line, const char* delims);

double parse_double(const std::string& s, const char* context);
long long parse_int(const std::string& s, const char* context);

// PlayRecord CSV: header "day,action,prob,reward", one row per (day, action);
// days and actions are 1-based on disk.
void write_play_record(std::ostream& os, const PlayRecord& record);
void write_play_record(const std::filesystem::path& path, const PlayRecord& record);
PlayRecord read_play_record(std::istream& is);
PlayRecord read_play_record(const std::filesystem::path& path);

// Reward stream dump: header "day,action,reward".
void write_reward_stream(std::ostream& os, const std::vector<RewardVector>& stream);

// Multi-scale config as "key value" lines with keys n, B, lo, S, H, T and an
// optional epsilon line.
void write_multiscale_config(std::ostream& os, const MultiScaleConfig& config);
MultiScaleConfig read_multiscale_config(std::istream& is);

}  // namespace swapregret
