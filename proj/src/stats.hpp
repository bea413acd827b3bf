#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "emit.hpp"

namespace emrsim {

/// One-pass mean/variance accumulator (Welford). Population denominator:
/// the summary SDs describe the emitted cohort itself, not a sample of a
/// larger one, and the uniform-range reference SDs use the same convention.
class Welford {
  public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return n_ ? mean_ : 0.0; }
    double variance() const {
        return n_ ? m2_ / static_cast<double>(n_) : 0.0;
    }
    double sd() const;

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct LabSummary {
    std::string name;
    std::uint64_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
};

/// Observed Table-style statistics of a generated repository.
struct CohortSummary {
    std::uint64_t n_patients = 0;
    double age_mean = 0.0;
    double age_sd = 0.0;
    std::vector<std::pair<std::string, double>> gender_pct;
    std::vector<std::pair<std::string, double>> ethnicity_pct;
    double admissions_mean = 0.0;
    double admissions_sd = 0.0;
    double los_mean = 0.0;
    double los_sd = 0.0;
    // Follow-up (last admission end minus first admission start) share per
    // bucket: under 10 years, 10 to 15, over 15.
    double followup_pct[3] = {0.0, 0.0, 0.0};
    double poverty_mean = 0.0;
    std::vector<std::pair<std::string, double>> prevalence_pct;
    std::vector<LabSummary> labs;  // first-seen order
    std::uint64_t total_admissions = 0;
    std::uint64_t total_lab_rows = 0;
};

/// An expectation plus the standard error of the matching observed
/// statistic at the summary's scale (Monte-Carlo noise folded in where the
/// expectation itself is simulated).
struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct ExpectedLab {
    std::string name;
    Estimate mean;
    Estimate sd;
    double expected_count = 0.0;
};

/// Analytic counterpart of CohortSummary, derived from configuration alone.
struct ExpectedSummary {
    std::uint64_t n_patients = 0;
    Estimate age_mean, age_sd;
    std::vector<std::pair<std::string, Estimate>> gender_pct;
    std::vector<std::pair<std::string, Estimate>> ethnicity_pct;
    Estimate admissions_mean, admissions_sd;
    Estimate los_mean, los_sd;
    Estimate followup_pct[3];
    Estimate poverty_mean;
    std::vector<std::pair<std::string, Estimate>> prevalence_pct;
    std::vector<ExpectedLab> labs;
    Estimate total_admissions, total_lab_rows;
};

struct Deviation {
    std::string statistic;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct DeviationReport {
    std::vector<Deviation> stats;
    bool pass = true;
};

struct ToleranceProfile {
    double z = 4.0;  // standard errors
    double pct_floor = 0.1;  // absolute floor for percentage points
    double lab_rel_floor = 0.005;  // relative floor for lab means/SDs
};

/// Finds the four repository files under `dir` (plain or .gz).
/// Throws IoError when the layout is incomplete.
RepositoryLayout detect_layout(const std::string& dir);

/// Single streaming pass over each repository file.
///
/// Verifies referential integrity (admissions reference known patients,
/// labs reference known admissions, one diagnosis per admission) and, when
/// `config` is given, that every lab value sits inside its configured range
/// and every lab timestamp inside its admission; violations raise DataError
/// naming the offending row. Comorbidity prevalence requires `config` for
/// the catalog's category tags and is left empty otherwise.
CohortSummary summarize(const RepositoryLayout& layout, DateTime cutoff,
                        const ConfigSet* config);

/// Expected patient-level prevalence of a category whose per-admission
/// probability is p: one minus the chance every admission misses it.
double prevalence_expected(double p, const AdmissionCountDist& dist);

ExpectedSummary expected_from_config(const ConfigSet& config, std::uint64_t n,
                                     DateTime cutoff);

/// Per-statistic pass when |observed - expected| <= max(floor, z * SE).
/// Throws DataError when the two summaries do not describe the same
/// statistic set (different lab tables or unknown categorical levels).
DeviationReport compare(const CohortSummary& observed,
                        const ExpectedSummary& expected,
                        const ToleranceProfile& profile = {});

std::string render_summary(const CohortSummary& s);
std::string render_expected(const ExpectedSummary& e);
std::string render_deviations(const DeviationReport& report);
/// One `statistic<TAB>observed<TAB>expected<TAB>pass` row per statistic.
std::string machine_report(const DeviationReport& report);

}  // namespace emrsim
