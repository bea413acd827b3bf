#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "emit.hpp"
#include "stats.hpp"

namespace emrsim {

/// A configuration together with where it came from and the digests of its
/// source files (recorded in run manifests for reproducibility).
struct LoadedConfig {
    ConfigSet config;
    std::string source_dir;
    std::vector<std::pair<std::string, std::string>> file_digests;
};

LoadedConfig load_config_with_digests(const std::string& dir);

struct GenerateOptions {
    std::optional<std::uint64_t> n;     // overrides params.n_patients
    std::optional<std::uint64_t> seed;  // overrides params.master_seed
    unsigned workers = 0;               // 0 = hardware concurrency
    bool gzip = false;
    ProgressFn progress;
};

/// Validates, generates, writes the four-file repository and a manifest.txt
/// that pins tool version, seed, parameter snapshot, config digests and
/// output digests. Throws ConfigError when validation fails, IoError on
/// filesystem problems.
EmitStats run_generate(const LoadedConfig& loaded, const std::string& out_dir,
                       const GenerateOptions& opts);

struct StatsOptions {
    std::optional<DateTime> cutoff;
    const LoadedConfig* expect = nullptr;  // adds the deviation report
    double z = 0.0;                        // <= 0 keeps the default profile
    std::string report_path;  // machine-readable TSV; empty = default
};

struct StatsResult {
    CohortSummary summary;
    std::string text;  // human-readable report
    bool compared = false;
    bool pass = true;
};

StatsResult run_stats(const std::string& repo_dir, const StatsOptions& opts);

std::string run_expect(const LoadedConfig& loaded,
                       std::optional<std::uint64_t> n_override);

}  // namespace emrsim
