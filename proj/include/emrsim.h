/* emrsim — deterministic virtual patient repository generator.
 *
 * C interface to the emrsim shared library. Handles are opaque; every
 * function that can fail returns an emrsim_status and, when `errmsg` is
 * non-NULL, stores a heap-allocated description the caller releases with
 * emrsim_string_free(). Output strings follow the same ownership rule.
 */

#ifndef EMRSIM_H
#define EMRSIM_H

#include <stdint.h>

#if defined(_WIN32)
#define EMRSIM_API __declspec(dllexport)
#else
#define EMRSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum emrsim_status {
    EMRSIM_OK = 0,
    /* Configuration or repository content failed validation. */
    EMRSIM_STATUS_VALIDATION = 2,
    /* Missing, unreadable or unwritable files. */
    EMRSIM_STATUS_IO = 3,
    /* Bad argument to an API call (NULL handle, bad date string, ...). */
    EMRSIM_STATUS_ARG = 4,
    EMRSIM_STATUS_INTERNAL = 5
} emrsim_status;

/* Loaded configuration (population weights, lab table, complaint catalog,
 * generation parameters). Immutable once opened; safe to share across
 * threads. */
typedef struct emrsim_config emrsim_config;

typedef struct emrsim_file_stats {
    uint64_t rows;  /* data rows, header excluded */
    uint64_t bytes; /* bytes on disk */
} emrsim_file_stats;

typedef struct emrsim_emit_stats {
    emrsim_file_stats patients;
    emrsim_file_stats admissions;
    emrsim_file_stats diagnoses;
    emrsim_file_stats labs;
} emrsim_emit_stats;

typedef void (*emrsim_progress_fn)(uint64_t patients_done,
                                   uint64_t lab_rows_done, void* user);

typedef struct emrsim_generate_opts {
    /* Nonzero `has_*` fields override the corresponding params.cfg value. */
    int has_n;
    uint64_t n_patients;
    int has_seed;
    uint64_t seed;
    int workers; /* <= 0 uses hardware concurrency */
    int gzip;    /* nonzero writes .tsv.gz files */
    emrsim_progress_fn progress; /* optional */
    void* progress_user;
} emrsim_generate_opts;

EMRSIM_API const char* emrsim_version(void);

/* Parses the five config files in `config_dir`. Parse errors return
 * EMRSIM_STATUS_VALIDATION with the offending file and line in *errmsg;
 * missing files return EMRSIM_STATUS_IO. */
EMRSIM_API emrsim_status emrsim_config_open(const char* config_dir,
                                            emrsim_config** out_config,
                                            char** errmsg);

EMRSIM_API void emrsim_config_close(emrsim_config* config);

/* Runs semantic validation. *out_report always receives the full report
 * text; the return value is EMRSIM_OK exactly when there are no errors. */
EMRSIM_API emrsim_status emrsim_config_check(const emrsim_config* config,
                                             char** out_report,
                                             char** errmsg);

/* Validates, generates n patients and writes patients/admissions/diagnoses/
 * labs tables plus manifest.txt into `out_dir`. Identical configuration and
 * seed produce byte-identical tables for any worker count. */
EMRSIM_API emrsim_status emrsim_generate(const emrsim_config* config,
                                         const char* out_dir,
                                         const emrsim_generate_opts* opts,
                                         emrsim_emit_stats* out_stats,
                                         char** errmsg);

/* Table-style summary of a generated repository. `config` may be NULL;
 * when given, its catalog tags drive the comorbidity section and lab values
 * are checked against their configured ranges. `cutoff_date` is
 * "YYYY-MM-DD" or NULL for the configured / default cutoff. */
EMRSIM_API emrsim_status emrsim_summarize(const char* repo_dir,
                                          const emrsim_config* config,
                                          const char* cutoff_date,
                                          char** out_text, char** errmsg);

/* Summary plus observed-vs-expected deviation report. *out_pass is set to 1
 * when every statistic is within tolerance (z standard errors; z <= 0 keeps
 * the default of 4). The machine-readable TSV goes to `report_path`, or to
 * <repo_dir>/validation.tsv when NULL. */
EMRSIM_API emrsim_status emrsim_compare(const char* repo_dir,
                                        const emrsim_config* config,
                                        const char* report_path,
                                        double z_tolerance, char** out_text,
                                        int* out_pass, char** errmsg);

/* Analytic expectations for an n-patient run of this configuration, without
 * generating anything. n_override of 0 keeps the configured n_patients. */
EMRSIM_API emrsim_status emrsim_expected(const emrsim_config* config,
                                         uint64_t n_override, char** out_text,
                                         char** errmsg);

EMRSIM_API void emrsim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* EMRSIM_H */
