// Command-line front end for the emrsim shared library. Talks to the
// library exclusively through the C interface in emrsim.h.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "emrsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitUsage = 4;

int exit_code_for(emrsim_status status) {
    switch (status) {
        case EMRSIM_OK: return kExitOk;
        case EMRSIM_STATUS_VALIDATION: return kExitValidation;
        case EMRSIM_STATUS_IO: return kExitIo;
        case EMRSIM_STATUS_ARG: return kExitUsage;
        default: return 5;
    }
}

void print_error(char* errmsg) {
    if (errmsg) {
        std::fprintf(stderr, "error: %s\n", errmsg);
        emrsim_string_free(errmsg);
    } else {
        std::fprintf(stderr, "error: unspecified failure\n");
    }
}

struct ConfigHandle {
    emrsim_config* config = nullptr;
    ~ConfigHandle() { emrsim_config_close(config); }
};

int open_config(const std::string& dir, ConfigHandle& handle) {
    char* errmsg = nullptr;
    const emrsim_status rc =
        emrsim_config_open(dir.c_str(), &handle.config, &errmsg);
    if (rc != EMRSIM_OK) {
        print_error(errmsg);
        return exit_code_for(rc);
    }
    return kExitOk;
}

struct ProgressState {
    std::chrono::steady_clock::time_point start;
    std::chrono::steady_clock::time_point last_print;
};

void progress_cb(uint64_t patients, uint64_t lab_rows, void* user) {
    auto* state = static_cast<ProgressState*>(user);
    const auto now = std::chrono::steady_clock::now();
    if (now - state->last_print < std::chrono::milliseconds(500)) return;
    state->last_print = now;
    const double secs =
        std::chrono::duration<double>(now - state->start).count();
    if (secs <= 0.0) return;
    std::fprintf(stderr,
                 "progress: %" PRIu64 " patients (%.0f/s), %" PRIu64
                 " lab rows (%.0f/s)\n",
                 patients, patients / secs, lab_rows, lab_rows / secs);
}

int cmd_generate(const std::string& config_dir, const std::string& out_dir,
                 uint64_t seed, bool has_n, uint64_t n,
                 const std::string& size, int workers, bool gzip,
                 bool progress) {
    ConfigHandle handle;
    if (const int rc = open_config(config_dir, handle)) return rc;

    emrsim_generate_opts opts{};
    opts.has_seed = 1;
    opts.seed = seed;
    if (has_n) {
        opts.has_n = 1;
        opts.n_patients = n;
    } else if (!size.empty()) {
        opts.has_n = 1;
        if (size == "small")
            opts.n_patients = 100;
        else if (size == "medium")
            opts.n_patients = 10000;
        else
            opts.n_patients = 100000;
    }
    opts.workers = workers;
    opts.gzip = gzip ? 1 : 0;

    ProgressState state{std::chrono::steady_clock::now(),
                        std::chrono::steady_clock::now()};
    if (progress) {
        opts.progress = progress_cb;
        opts.progress_user = &state;
    }

    emrsim_emit_stats stats{};
    char* errmsg = nullptr;
    const emrsim_status rc =
        emrsim_generate(handle.config, out_dir.c_str(), &opts, &stats,
                        &errmsg);
    if (rc != EMRSIM_OK) {
        print_error(errmsg);
        return exit_code_for(rc);
    }
    const char* suffix = gzip ? ".gz" : "";
    std::printf("patients.tsv%s: %" PRIu64 " rows, %" PRIu64 " bytes\n",
                suffix, stats.patients.rows, stats.patients.bytes);
    std::printf("admissions.tsv%s: %" PRIu64 " rows, %" PRIu64 " bytes\n",
                suffix, stats.admissions.rows, stats.admissions.bytes);
    std::printf("diagnoses.tsv%s: %" PRIu64 " rows, %" PRIu64 " bytes\n",
                suffix, stats.diagnoses.rows, stats.diagnoses.bytes);
    std::printf("labs.tsv%s: %" PRIu64 " rows, %" PRIu64 " bytes\n", suffix,
                stats.labs.rows, stats.labs.bytes);
    return kExitOk;
}

int cmd_stats(const std::string& repo_dir, const std::string& expect_dir,
              const std::string& cutoff, const std::string& report_path,
              double z) {
    ConfigHandle handle;
    if (!expect_dir.empty()) {
        if (const int rc = open_config(expect_dir, handle)) return rc;
    }

    char* text = nullptr;
    char* errmsg = nullptr;
    emrsim_status rc;
    int pass = 1;
    if (handle.config) {
        rc = emrsim_compare(repo_dir.c_str(), handle.config,
                            report_path.empty() ? nullptr
                                                : report_path.c_str(),
                            z, &text, &pass, &errmsg);
    } else {
        rc = emrsim_summarize(repo_dir.c_str(), nullptr,
                              cutoff.empty() ? nullptr : cutoff.c_str(),
                              &text, &errmsg);
    }
    if (rc != EMRSIM_OK) {
        print_error(errmsg);
        return exit_code_for(rc);
    }
    std::fputs(text, stdout);
    emrsim_string_free(text);
    return pass ? kExitOk : kExitValidation;
}

int cmd_check(const std::string& config_dir) {
    ConfigHandle handle;
    if (const int rc = open_config(config_dir, handle)) return rc;
    char* report = nullptr;
    char* errmsg = nullptr;
    const emrsim_status rc =
        emrsim_config_check(handle.config, &report, &errmsg);
    if (report) {
        std::fputs(report, stdout);
        emrsim_string_free(report);
    }
    if (errmsg) emrsim_string_free(errmsg);
    return exit_code_for(rc);
}

int cmd_expect(const std::string& config_dir, bool has_n, uint64_t n,
               const std::string& size) {
    ConfigHandle handle;
    if (const int rc = open_config(config_dir, handle)) return rc;
    uint64_t n_override = 0;
    if (has_n) {
        n_override = n;
    } else if (!size.empty()) {
        n_override = size == "small" ? 100
                     : size == "medium" ? 10000
                                        : 100000;
    }
    char* text = nullptr;
    char* errmsg = nullptr;
    const emrsim_status rc =
        emrsim_expected(handle.config, n_override, &text, &errmsg);
    if (rc != EMRSIM_OK) {
        print_error(errmsg);
        return exit_code_for(rc);
    }
    std::fputs(text, stdout);
    emrsim_string_free(text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emrsim: deterministic virtual patient repository generator"};
    app.set_version_flag("--version", emrsim_version());
    app.require_subcommand(1);

    const std::vector<std::string> sizes{"small", "medium", "large"};

    // generate
    auto* generate = app.add_subcommand(
        "generate", "Generate a repository from a configuration directory");
    std::string gen_config, gen_out, gen_size;
    uint64_t gen_seed = 0, gen_n = 0;
    int gen_workers = 0;
    bool gen_gzip = false, gen_progress = false;
    generate->add_option("--config", gen_config, "configuration directory")
        ->required();
    generate->add_option("--out", gen_out, "output directory")->required();
    generate->add_option("--seed", gen_seed, "master seed (required for "
                                             "reproducibility)")
        ->required();
    auto* gen_n_opt =
        generate->add_option("--n", gen_n, "number of patients");
    generate->add_option("--size", gen_size,
                         "preset cohort size: small=100, medium=10000, "
                         "large=100000")
        ->check(CLI::IsMember(sizes));
    generate->add_option("--workers", gen_workers,
                         "worker threads (0 = hardware)");
    generate->add_flag("--gzip", gen_gzip, "write gzip-compressed tables");
    generate->add_flag("--progress", gen_progress,
                       "print throughput to stderr");

    // stats
    auto* stats = app.add_subcommand(
        "stats", "Summarize a repository, optionally against expectations");
    std::string stats_repo, stats_expect, stats_cutoff, stats_report;
    double stats_z = 0.0;
    stats->add_option("repository", stats_repo, "repository directory")
        ->required();
    stats->add_option("--expect", stats_expect,
                      "configuration directory to compare against");
    stats->add_option("--cutoff", stats_cutoff,
                      "age cutoff date YYYY-MM-DD (summary only)");
    stats->add_option("--report", stats_report,
                      "machine-readable TSV path (with --expect; default "
                      "<repository>/validation.tsv)");
    stats->add_option("--z", stats_z,
                      "tolerance in standard errors (default 4)");

    // check
    auto* check =
        app.add_subcommand("check", "Validate a configuration directory");
    std::string check_config;
    check->add_option("--config", check_config, "configuration directory")
        ->required();

    // expect
    auto* expect = app.add_subcommand(
        "expect", "Print analytic expectations without generating");
    std::string expect_config, expect_size;
    uint64_t expect_n = 0;
    expect->add_option("--config", expect_config, "configuration directory")
        ->required();
    auto* expect_n_opt =
        expect->add_option("--n", expect_n, "number of patients");
    expect->add_option("--size", expect_size, "preset cohort size")
        ->check(CLI::IsMember(sizes));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (generate->parsed())
        return cmd_generate(gen_config, gen_out, gen_seed,
                            gen_n_opt->count() > 0, gen_n, gen_size,
                            gen_workers, gen_gzip, gen_progress);
    if (stats->parsed())
        return cmd_stats(stats_repo, stats_expect, stats_cutoff, stats_report,
                         stats_z);
    if (check->parsed()) return cmd_check(check_config);
    if (expect->parsed())
        return cmd_expect(expect_config, expect_n_opt->count() > 0, expect_n,
                          expect_size);
    return kExitUsage;
}
