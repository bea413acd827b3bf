#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "config.hpp"
#include "patient.hpp"

namespace emrsim {

/// On-disk layout of a generated repository: four tab-delimited files in one
/// directory (".gz" suffixed when compression is on).
struct RepositoryLayout {
    std::string dir;
    bool gzip = false;

    static constexpr const char* kPatients = "patients.tsv";
    static constexpr const char* kAdmissions = "admissions.tsv";
    static constexpr const char* kDiagnoses = "diagnoses.tsv";
    static constexpr const char* kLabs = "labs.tsv";

    std::string path(const char* base) const {
        std::string p = dir + "/" + base;
        if (gzip) p += ".gz";
        return p;
    }
};

struct FileStats {
    std::uint64_t rows = 0;   // data rows, header excluded
    std::uint64_t bytes = 0;  // bytes on disk
};

struct EmitStats {
    FileStats patients;
    FileStats admissions;
    FileStats diagnoses;
    FileStats labs;

    /// One `<filename>: <rows> rows, <bytes> bytes` line per file.
    std::string to_string(const RepositoryLayout& layout) const;
};

/// Fixed-point rendering, decimal half-up, no exponent or separators.
/// decimals must be in [0, 6]; non-finite values are rejected.
std::string format_value(double v, int decimals);

using ProgressFn =
    std::function<void(std::uint64_t patients_done, std::uint64_t lab_rows)>;

/// Generates patients 0..n-1 and streams them into the four-file layout.
///
/// Workers serialize fixed-size patient blocks in parallel; a single writer
/// appends the blocks in index order, so identical inputs yield byte
/// identical files for any worker count and memory stays independent of n.
/// On failure the partially written files are removed before rethrowing.
EmitStats write_cohort(const RepositoryLayout& layout, const ConfigSet& config,
                       std::uint64_t n, unsigned workers,
                       const ProgressFn& progress = nullptr);

}  // namespace emrsim
