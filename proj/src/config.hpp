#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "date_time.hpp"

namespace emrsim {

/// Absolute tolerance when checking that percentage weights sum to 100.
/// The source tables use integer percentages; the slack admits fractional
/// user configs without accepting genuinely broken ones.
constexpr double kWeightSumTolerance = 0.01;

struct CategoricalLevel {
    std::string value;
    double weight = 0.0;  // percent of the population
};

/// Weighted categorical variable (gender, marital status, language, ...).
struct CategoricalSpec {
    std::string name;
    std::vector<CategoricalLevel> levels;

    double weight_total() const;
};

struct RangeBucket {
    double lo = 0.0;  // epoch seconds when the variable is date-typed
    double hi = 0.0;
    double weight = 0.0;
};

/// Weighted range buckets for a continuous variable; values are drawn
/// uniformly inside the picked bucket.
struct RangeBucketSpec {
    std::string name;
    bool is_date = false;
    std::vector<RangeBucket> buckets;

    double weight_total() const;
};

struct PopulationConfig {
    std::vector<CategoricalSpec> categoricals;  // file order preserved
    std::vector<RangeBucketSpec> ranges;

    const CategoricalSpec* find_categorical(std::string_view name) const;
    const RangeBucketSpec* find_range(std::string_view name) const;
};

// Variable names the generator samples from. Other variables load fine and
// validate, but only these feed patient records.
inline constexpr const char* kVarGender = "Gender";
inline constexpr const char* kVarMaritalStatus = "MaritalStatus";
inline constexpr const char* kVarLanguage = "Language";
inline constexpr const char* kVarEthnicity = "Ethnicity";
inline constexpr const char* kVarDateOfBirth = "DateOfBirth";
inline constexpr const char* kVarPoverty = "PopulationPercentageBelowPoverty";

/// One laboratory type: allowed value range, units, display precision.
struct LabSpec {
    std::string title;
    double min_value = 0.0;
    double max_value = 0.0;
    std::string units;
    int decimals = 1;
};

enum class SexRestriction { none, male_only, female_only };

struct ComplaintEntry {
    std::string code;  // ICD-10-CM
    std::string description;
    double weight = 0.0;
    std::vector<std::string> categories;  // comorbidity tags
    SexRestriction sex = SexRestriction::none;
};

/// Chief-complaint catalog. Only sex-unrestricted entries are ever sampled;
/// a cohort contains no code that applies to one sex only.
struct ComplaintCatalog {
    std::vector<ComplaintEntry> entries;

    std::vector<std::size_t> usable_indices() const;
    double usable_weight_total() const;
    /// Fraction of usable sampling mass carrying the given category tag.
    double category_mass(std::string_view category) const;
    /// All category tags on usable entries, in first-appearance order.
    std::vector<std::string> categories() const;
};

/// Weighted distribution over admission counts (support 1..10).
struct AdmissionCountDist {
    std::vector<std::pair<int, double>> buckets;  // (count, weight)

    double mean() const;
    double stddev() const;
    double weight_total() const;
};

AdmissionCountDist default_admission_count_dist();

struct GenerationParams {
    std::uint64_t n_patients = 100;
    std::uint64_t master_seed = 0;
    AdmissionCountDist admission_count_dist = default_admission_count_dist();
    int los_days_min = 1;
    int los_days_max = 20;
    int labs_per_type_max = 16;
    DateTime cutoff_date = datetime_from_civil(2015, 1, 1);
    int max_age_years = 95;
    double first_admission_offset_years = 1.0;
};

struct ValidationIssue {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;

    bool ok() const { return errors.empty(); }
    std::string to_string() const;
};

/// Everything generation needs, loaded and immutable thereafter; safe to
/// share across worker threads.
struct ConfigSet {
    PopulationConfig population;
    std::vector<LabSpec> labs;
    ComplaintCatalog catalog;
    GenerationParams params;
};

// --- loading (from text; `source_name` labels parse errors) ---------------

PopulationConfig load_population_config(std::string_view categorical_text,
                                        std::string_view range_text,
                                        const std::string& categorical_name,
                                        const std::string& range_name);

std::vector<LabSpec> load_lab_config(std::string_view text,
                                     const std::string& source_name);

ComplaintCatalog load_complaint_catalog(std::string_view text,
                                        const std::string& source_name);

GenerationParams load_generation_params(std::string_view text,
                                        const std::string& source_name);

/// Loads population.csv, population_ranges.csv, labs.csv, complaints.csv and
/// params.cfg from a directory. Missing/unreadable files raise IoError,
/// malformed content raises ConfigError.
ConfigSet load_config_dir(const std::string& dir);

// --- serialization (canonical form; load(serialize(x)) == x) ---------------

std::string serialize_categoricals(const PopulationConfig& pc);
std::string serialize_ranges(const PopulationConfig& pc);
std::string serialize_labs(const std::vector<LabSpec>& labs);
std::string serialize_complaints(const ComplaintCatalog& catalog);
std::string serialize_params(const GenerationParams& params);

/// Checks every structural invariant the generator relies on. An empty
/// error list means the configuration is usable for generation.
ValidationReport validate(const ConfigSet& config);

}  // namespace emrsim
