#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace rtm {

inline constexpr const char* kVersion = "rtm 1.0.0";

// Shared CLI knobs. Reports never embed wall-clock time, so a rerun of the
// same config is byte-identical; timing goes to stderr.
struct CommonConfig {
    std::uint64_t seed = 0;
    int threads = 1;
    std::size_t max_p = 4096;
};

// Every run_* returns a report of the shape
//   { version, command, config: {...}, rows: [...], ... }
// where rows is a flat table (the CSV projection).

struct MpEsdConfig {
    CommonConfig common;
    int n = 40;
    int d = 2;
    std::uint64_t N = 1560;
    std::string dist = "rademacher";
};
nlohmann::ordered_json run_mp_esd(const MpEsdConfig& cfg);

struct QformVarConfig {
    CommonConfig common;
    int n = 32;
    int d = 2;
    std::string dist = "gaussian";
    // "identity", "zero-diag-signs", "projection:<frac>"
    std::vector<std::string> matrices = {"identity", "zero-diag-signs", "projection:0.5"};
    std::uint64_t reps = 10000;
};
nlohmann::ordered_json run_qform_var(const QformVarConfig& cfg);

struct EspLlnConfig {
    CommonConfig common;
    std::string z_dist = "exp";
    std::string d_rule = "floor(n^0.3)";
    std::vector<int> n_grid = {500, 2000, 8000};
    std::uint64_t reps = 50;
};
nlohmann::ordered_json run_esp_lln(const EspLlnConfig& cfg);

struct GammaConfig {
    CommonConfig common;
    int n_max = 8;
    int d_max = 3;
};
nlohmann::ordered_json run_gamma(const GammaConfig& cfg);

struct ConditionsConfig {
    CommonConfig common;
    std::string dist = "gaussian";
    std::string d_rule = "floor(n^0.4)";
    std::vector<int> n_grid = {100, 400, 1600};
    std::uint64_t reps = 1000000;
};
nlohmann::ordered_json run_conditions(const ConditionsConfig& cfg);

// Flattens report["rows"] into RFC-4180-ish CSV (header + one line per row).
std::string to_csv(const nlohmann::ordered_json& report);

} // namespace rtm
