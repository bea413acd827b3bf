#include "runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "sha256.hpp"
#include "version.hpp"

namespace emrsim {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

unsigned effective_workers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace

LoadedConfig load_config_with_digests(const std::string& dir) {
    LoadedConfig loaded;
    loaded.source_dir = dir;
    loaded.config = load_config_dir(dir);
    for (const char* name :
         {"population.csv", "population_ranges.csv", "labs.csv",
          "complaints.csv", "params.cfg"}) {
        loaded.file_digests.emplace_back(
            name, Sha256::of_file(dir + "/" + name));
    }
    return loaded;
}

EmitStats run_generate(const LoadedConfig& loaded, const std::string& out_dir,
                       const GenerateOptions& opts) {
    ConfigSet config = loaded.config;
    if (opts.n) config.params.n_patients = *opts.n;
    if (opts.seed) config.params.master_seed = *opts.seed;

    const ValidationReport report = validate(config);
    if (!report.ok()) throw ConfigError(report.to_string());

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);

    const std::string started = utc_now();
    RepositoryLayout layout{out_dir, opts.gzip};
    const EmitStats stats =
        write_cohort(layout, config, config.params.n_patients,
                     effective_workers(opts.workers), opts.progress);
    const std::string finished = utc_now();

    std::ostringstream manifest;
    manifest << "tool_version=" << kVersion << '\n';
    manifest << "started_at=" << started << '\n';
    manifest << "finished_at=" << finished << '\n';
    manifest << "workers=" << effective_workers(opts.workers) << '\n';
    manifest << "gzip=" << (opts.gzip ? 1 : 0) << '\n';
    manifest << "config_dir=" << loaded.source_dir << '\n';
    for (const auto& [name, digest] : loaded.file_digests)
        manifest << "config_sha256." << name << '=' << digest << '\n';
    // Effective parameter snapshot, overrides applied.
    std::istringstream params(serialize_params(config.params));
    for (std::string line; std::getline(params, line);)
        if (!line.empty()) manifest << "param." << line << '\n';
    const auto output_lines = [&](const char* base, const FileStats& fstats) {
        const std::string path = layout.path(base);
        const std::string file = fs::path(path).filename().string();
        manifest << "output." << file << ".rows=" << fstats.rows << '\n';
        manifest << "output." << file << ".bytes=" << fstats.bytes << '\n';
        manifest << "output." << file << ".sha256=" << Sha256::of_file(path)
                 << '\n';
    };
    output_lines(RepositoryLayout::kPatients, stats.patients);
    output_lines(RepositoryLayout::kAdmissions, stats.admissions);
    output_lines(RepositoryLayout::kDiagnoses, stats.diagnoses);
    output_lines(RepositoryLayout::kLabs, stats.labs);

    const std::string manifest_path = out_dir + "/manifest.txt";
    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + manifest_path);
    out << manifest.str();
    out.close();
    if (out.fail()) throw IoError("cannot write " + manifest_path);
    return stats;
}

StatsResult run_stats(const std::string& repo_dir, const StatsOptions& opts) {
    const RepositoryLayout layout = detect_layout(repo_dir);
    const ConfigSet* config =
        opts.expect ? &opts.expect->config : nullptr;

    DateTime cutoff = datetime_from_civil(2015, 1, 1);
    if (config) cutoff = config->params.cutoff_date;
    if (opts.cutoff) cutoff = *opts.cutoff;

    StatsResult result;
    result.summary = summarize(layout, cutoff, config);
    std::ostringstream text;
    text << render_summary(result.summary);

    if (opts.expect) {
        const ExpectedSummary expected = expected_from_config(
            opts.expect->config, result.summary.n_patients, cutoff);
        ToleranceProfile profile;
        if (opts.z > 0.0) profile.z = opts.z;
        const DeviationReport report =
            compare(result.summary, expected, profile);
        result.compared = true;
        result.pass = report.pass;
        text << '\n' << render_deviations(report);

        std::string report_path = opts.report_path;
        if (report_path.empty()) report_path = repo_dir + "/validation.tsv";
        std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + report_path);
        out << machine_report(report);
        out.close();
        if (out.fail()) throw IoError("cannot write " + report_path);
    }
    result.text = text.str();
    return result;
}

std::string run_expect(const LoadedConfig& loaded,
                       std::optional<std::uint64_t> n_override) {
    ConfigSet config = loaded.config;
    if (n_override) config.params.n_patients = *n_override;
    const ValidationReport report = validate(config);
    if (!report.ok()) throw ConfigError(report.to_string());
    const ExpectedSummary expected = expected_from_config(
        config, config.params.n_patients, config.params.cutoff_date);
    return render_expected(expected);
}

}  // namespace emrsim
