#include "emrsim.h"

#include <cstring>
#include <new>
#include <string>

#include "errors.hpp"
#include "runner.hpp"
#include "version.hpp"

using namespace emrsim;

struct emrsim_config {
    LoadedConfig loaded;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_error(char** errmsg, const std::string& msg) {
    if (errmsg) *errmsg = dup_string(msg);
}

/// Runs `fn`, translating exceptions into status codes + messages.
template <typename Fn>
emrsim_status guarded(char** errmsg, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        set_error(errmsg, e.what());
        return EMRSIM_STATUS_VALIDATION;
    } catch (const DataError& e) {
        set_error(errmsg, e.what());
        return EMRSIM_STATUS_VALIDATION;
    } catch (const IoError& e) {
        set_error(errmsg, e.what());
        return EMRSIM_STATUS_IO;
    } catch (const std::invalid_argument& e) {
        set_error(errmsg, e.what());
        return EMRSIM_STATUS_ARG;
    } catch (const std::exception& e) {
        set_error(errmsg, e.what());
        return EMRSIM_STATUS_INTERNAL;
    } catch (...) {
        set_error(errmsg, "unknown failure");
        return EMRSIM_STATUS_INTERNAL;
    }
}

}  // namespace

extern "C" {

const char* emrsim_version(void) { return kVersion; }

emrsim_status emrsim_config_open(const char* config_dir,
                                 emrsim_config** out_config, char** errmsg) {
    if (!config_dir || !out_config) {
        set_error(errmsg, "config_dir and out_config must be non-NULL");
        return EMRSIM_STATUS_ARG;
    }
    *out_config = nullptr;
    return guarded(errmsg, [&] {
        auto* handle = new emrsim_config{load_config_with_digests(config_dir)};
        *out_config = handle;
        return EMRSIM_OK;
    });
}

void emrsim_config_close(emrsim_config* config) { delete config; }

emrsim_status emrsim_config_check(const emrsim_config* config,
                                  char** out_report, char** errmsg) {
    if (!config) {
        set_error(errmsg, "config must be non-NULL");
        return EMRSIM_STATUS_ARG;
    }
    return guarded(errmsg, [&] {
        const ValidationReport report = validate(config->loaded.config);
        if (out_report) *out_report = dup_string(report.to_string());
        if (report.ok()) return EMRSIM_OK;
        set_error(errmsg, report.to_string());
        return EMRSIM_STATUS_VALIDATION;
    });
}

emrsim_status emrsim_generate(const emrsim_config* config,
                              const char* out_dir,
                              const emrsim_generate_opts* opts,
                              emrsim_emit_stats* out_stats, char** errmsg) {
    if (!config || !out_dir) {
        set_error(errmsg, "config and out_dir must be non-NULL");
        return EMRSIM_STATUS_ARG;
    }
    return guarded(errmsg, [&] {
        GenerateOptions gen;
        if (opts) {
            if (opts->has_n) gen.n = opts->n_patients;
            if (opts->has_seed) gen.seed = opts->seed;
            if (opts->workers > 0)
                gen.workers = static_cast<unsigned>(opts->workers);
            gen.gzip = opts->gzip != 0;
            if (opts->progress) {
                emrsim_progress_fn fn = opts->progress;
                void* user = opts->progress_user;
                gen.progress = [fn, user](std::uint64_t patients,
                                          std::uint64_t labs) {
                    fn(patients, labs, user);
                };
            }
        }
        const EmitStats stats = run_generate(config->loaded, out_dir, gen);
        if (out_stats) {
            const auto fill = [](emrsim_file_stats& dst,
                                 const FileStats& src) {
                dst.rows = src.rows;
                dst.bytes = src.bytes;
            };
            fill(out_stats->patients, stats.patients);
            fill(out_stats->admissions, stats.admissions);
            fill(out_stats->diagnoses, stats.diagnoses);
            fill(out_stats->labs, stats.labs);
        }
        return EMRSIM_OK;
    });
}

emrsim_status emrsim_summarize(const char* repo_dir,
                               const emrsim_config* config,
                               const char* cutoff_date, char** out_text,
                               char** errmsg) {
    if (!repo_dir) {
        set_error(errmsg, "repo_dir must be non-NULL");
        return EMRSIM_STATUS_ARG;
    }
    return guarded(errmsg, [&] {
        const RepositoryLayout layout = detect_layout(repo_dir);
        DateTime cutoff = config ? config->loaded.config.params.cutoff_date
                                 : datetime_from_civil(2015, 1, 1);
        if (cutoff_date) {
            if (!parse_date(cutoff_date, cutoff))
                throw std::invalid_argument(
                    std::string("bad cutoff date `") + cutoff_date + "`");
        }
        const CohortSummary summary = summarize(
            layout, cutoff, config ? &config->loaded.config : nullptr);
        if (out_text) *out_text = dup_string(render_summary(summary));
        return EMRSIM_OK;
    });
}

emrsim_status emrsim_compare(const char* repo_dir,
                             const emrsim_config* config,
                             const char* report_path, double z_tolerance,
                             char** out_text, int* out_pass, char** errmsg) {
    if (!repo_dir || !config) {
        set_error(errmsg, "repo_dir and config must be non-NULL");
        return EMRSIM_STATUS_ARG;
    }
    return guarded(errmsg, [&] {
        StatsOptions opts;
        opts.expect = &config->loaded;
        opts.z = z_tolerance;
        if (report_path) opts.report_path = report_path;
        const StatsResult result = run_stats(repo_dir, opts);
        if (out_text) *out_text = dup_string(result.text);
        if (out_pass) *out_pass = result.pass ? 1 : 0;
        return EMRSIM_OK;
    });
}

emrsim_status emrsim_expected(const emrsim_config* config,
                              uint64_t n_override, char** out_text,
                              char** errmsg) {
    if (!config) {
        set_error(errmsg, "config must be non-NULL");
        return EMRSIM_STATUS_ARG;
    }
    return guarded(errmsg, [&] {
        std::optional<std::uint64_t> n;
        if (n_override > 0) n = n_override;
        const std::string text = run_expect(config->loaded, n);
        if (out_text) *out_text = dup_string(text);
        return EMRSIM_OK;
    });
}

void emrsim_string_free(char* s) { delete[] s; }

}  // extern "C"
