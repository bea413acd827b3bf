#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "date_time.hpp"

namespace emrsim {

/// One timestamped measurement. The lab type is an index into the loaded
/// lab table; the table owns titles and units.
struct LabResult {
    std::uint32_t lab_index = 0;
    double value = 0.0;
    DateTime taken_at = 0;
};

struct Admission {
    int index = 1;  // 1-based per patient
    DateTime start = 0;
    DateTime end = 0;  // start + whole days of stay
    std::uint32_t complaint_index = 0;  // into ComplaintCatalog::entries
    std::vector<LabResult> labs;  // lab-table order, time-sorted per type
};

/// Full longitudinal record of one virtual patient.
struct Patient {
    std::string id;  // 8-4-4-4-12 hex
    std::string gender;
    DateTime date_of_birth = 0;
    std::string ethnicity;
    std::string marital_status;
    std::string language;
    double poverty_pct = 0.0;
    std::vector<Admission> admissions;  // chronological, non-overlapping
    // Admissions dropped because the eligible window could not fit them.
    int dropped_admissions = 0;
};

}  // namespace emrsim
