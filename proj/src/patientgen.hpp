#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "config.hpp"
#include "patient.hpp"
#include "rng.hpp"

namespace emrsim {

/// Result of placing a patient's admissions inside the eligible window.
struct AdmissionSchedule {
    std::vector<std::pair<DateTime, DateTime>> stays;  // sorted, disjoint
    int dropped = 0;  // admissions that could not fit after repair
};

std::int64_t first_admission_offset_seconds(const GenerationParams& params);

/// Draws `count` admission intervals. Starts are uniform over
/// [dob + offset, cutoff - los_max days); stays last a uniform whole number
/// of days. After sorting, overlaps are repaired by shifting the later stay
/// to begin one day after the previous end; a stay shifted past the cutoff
/// is clamped to end exactly at the cutoff, and dropped when even that
/// cannot fit. At least one stay always survives.
AdmissionSchedule schedule_admissions(RngStream& rng, DateTime dob, int count,
                                      const GenerationParams& params);

int sample_admission_count(RngStream& rng, const AdmissionCountDist& dist);

/// Builds complete patients from a validated configuration.
///
/// Every patient is a pure function of (config, params, patient_index); the
/// per-patient draw order is fixed (identifier, demographics, admission
/// count, starts, stays, diagnoses, then labs in lab-table order), so equal
/// inputs reproduce equal cohorts byte for byte on any worker count.
class PatientGenerator {
  public:
    explicit PatientGenerator(const ConfigSet& config);

    Patient generate(std::uint64_t patient_index) const;

    // Pipeline stages, exposed for targeted tests.
    void generate_demographics(RngStream& rng, Patient& out) const;
    std::size_t assign_diagnosis(RngStream& rng) const;  // catalog entry index
    std::vector<LabResult> generate_labs(RngStream& rng, DateTime start,
                                         DateTime end) const;

    const ConfigSet& config() const { return config_; }

  private:
    const ConfigSet& config_;
    const CategoricalSpec* gender_;
    const CategoricalSpec* marital_;
    const CategoricalSpec* language_;
    const CategoricalSpec* ethnicity_;
    const RangeBucketSpec* dob_;
    const RangeBucketSpec* poverty_;
    std::vector<std::size_t> usable_complaints_;
    std::vector<double> usable_weights_;
};

std::string format_patient_id(std::uint64_t hi, std::uint64_t lo);

/// Streams patients 0..n-1 to `sink` in index order. Generation itself runs
/// on `workers` threads; memory stays bounded by the reorder window, not n.
void for_each_patient(const ConfigSet& config, std::uint64_t n,
                      unsigned workers,
                      const std::function<void(const Patient&)>& sink);

}  // namespace emrsim
