#include "emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef EMRSIM_HAVE_ZLIB
#include <zlib.h>
#endif

#include "errors.hpp"
#include "ordered_pipeline.hpp"
#include "patientgen.hpp"
#include "rounding.hpp"

namespace emrsim {

namespace fs = std::filesystem;

std::string format_value(double v, int decimals) {
    if (!std::isfinite(v))
        throw std::invalid_argument("format_value: non-finite value");
    if (decimals < 0 || decimals > 6)
        throw std::invalid_argument("format_value: decimals outside [0, 6]");
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals,
                  round_half_up(v, decimals));
    return buf;
}

std::string EmitStats::to_string(const RepositoryLayout& layout) const {
    std::ostringstream out;
    const auto line = [&](const char* base, const FileStats& s) {
        out << fs::path(layout.path(base)).filename().string() << ": "
            << s.rows << " rows, " << s.bytes << " bytes\n";
    };
    line(RepositoryLayout::kPatients, patients);
    line(RepositoryLayout::kAdmissions, admissions);
    line(RepositoryLayout::kDiagnoses, diagnoses);
    line(RepositoryLayout::kLabs, labs);
    return out.str();
}

namespace {

/// Output file that is either plain or gzip-compressed.
class TableWriter {
  public:
    TableWriter(std::string path, bool gzip) : path_(std::move(path)) {
#ifdef EMRSIM_HAVE_ZLIB
        if (gzip) {
            gz_ = gzopen(path_.c_str(), "wb");
            if (!gz_) throw IoError("cannot open " + path_ + " for writing");
            return;
        }
#else
        if (gzip)
            throw IoError("gzip output requested but zlib support is not "
                          "compiled in");
#endif
        plain_.open(path_, std::ios::binary | std::ios::trunc);
        if (!plain_) throw IoError("cannot open " + path_ + " for writing");
    }

    ~TableWriter() { abandon(); }

    void write(std::string_view chunk) {
#ifdef EMRSIM_HAVE_ZLIB
        if (gz_) {
            if (gzwrite(gz_, chunk.data(),
                        static_cast<unsigned>(chunk.size())) !=
                static_cast<int>(chunk.size()))
                throw IoError("write failure: " + path_);
            return;
        }
#endif
        plain_.write(chunk.data(),
                     static_cast<std::streamsize>(chunk.size()));
        if (!plain_) throw IoError("write failure: " + path_);
    }

    std::uint64_t close() {
#ifdef EMRSIM_HAVE_ZLIB
        if (gz_) {
            const int rc = gzclose(gz_);
            gz_ = nullptr;
            if (rc != Z_OK) throw IoError("close failure: " + path_);
            return static_cast<std::uint64_t>(fs::file_size(path_));
        }
#endif
        plain_.close();
        if (plain_.fail()) throw IoError("close failure: " + path_);
        return static_cast<std::uint64_t>(fs::file_size(path_));
    }

    void abandon() {
#ifdef EMRSIM_HAVE_ZLIB
        if (gz_) {
            gzclose(gz_);
            gz_ = nullptr;
        }
#endif
        if (plain_.is_open()) plain_.close();
    }

  private:
    std::string path_;
    std::ofstream plain_;
#ifdef EMRSIM_HAVE_ZLIB
    gzFile gz_ = nullptr;
#endif
};

struct SerializedBlock {
    std::string patients;
    std::string admissions;
    std::string diagnoses;
    std::string labs;
    std::uint64_t patient_rows = 0;
    std::uint64_t admission_rows = 0;
    std::uint64_t lab_rows = 0;
};

void append_patient(const Patient& p, const ConfigSet& config,
                    SerializedBlock& block) {
    block.patients += p.id;
    block.patients += '\t';
    block.patients += p.gender;
    block.patients += '\t';
    block.patients += format_datetime(p.date_of_birth);
    block.patients += '\t';
    block.patients += p.ethnicity;
    block.patients += '\t';
    block.patients += p.marital_status;
    block.patients += '\t';
    block.patients += p.language;
    block.patients += '\t';
    block.patients += format_value(p.poverty_pct, 2);
    block.patients += '\n';
    ++block.patient_rows;

    char adm_id[16];
    for (const Admission& adm : p.admissions) {
        std::snprintf(adm_id, sizeof(adm_id), "%d", adm.index);

        block.admissions += p.id;
        block.admissions += '\t';
        block.admissions += adm_id;
        block.admissions += '\t';
        block.admissions += format_datetime(adm.start);
        block.admissions += '\t';
        block.admissions += format_datetime(adm.end);
        block.admissions += '\n';
        ++block.admission_rows;

        const ComplaintEntry& dx = config.catalog.entries[adm.complaint_index];
        block.diagnoses += p.id;
        block.diagnoses += '\t';
        block.diagnoses += adm_id;
        block.diagnoses += '\t';
        block.diagnoses += dx.code;
        block.diagnoses += '\t';
        block.diagnoses += dx.description;
        block.diagnoses += '\n';

        for (const LabResult& lab : adm.labs) {
            const LabSpec& spec = config.labs[lab.lab_index];
            block.labs += p.id;
            block.labs += '\t';
            block.labs += adm_id;
            block.labs += '\t';
            block.labs += spec.title;
            block.labs += '\t';
            block.labs += format_value(lab.value, spec.decimals);
            block.labs += '\t';
            block.labs += spec.units;
            block.labs += '\t';
            block.labs += format_datetime(lab.taken_at);
            block.labs += '\n';
            ++block.lab_rows;
        }
    }
}

constexpr const char* kPatientsHeader =
    "PatientID\tPatientGender\tPatientDateOfBirth\tPatientRace\t"
    "PatientMaritalStatus\tPatientLanguage\t"
    "PatientPopulationPercentageBelowPoverty\n";
constexpr const char* kAdmissionsHeader =
    "PatientID\tAdmissionID\tAdmissionStartDate\tAdmissionEndDate\n";
constexpr const char* kDiagnosesHeader =
    "PatientID\tAdmissionID\tPrimaryDiagnosisCode\t"
    "PrimaryDiagnosisDescription\n";
constexpr const char* kLabsHeader =
    "PatientID\tAdmissionID\tLabName\tLabValue\tLabUnits\tLabDateTime\n";

}  // namespace

EmitStats write_cohort(const RepositoryLayout& layout, const ConfigSet& config,
                       std::uint64_t n, unsigned workers,
                       const ProgressFn& progress) {
    const std::string patients_path = layout.path(RepositoryLayout::kPatients);
    const std::string admissions_path =
        layout.path(RepositoryLayout::kAdmissions);
    const std::string diagnoses_path =
        layout.path(RepositoryLayout::kDiagnoses);
    const std::string labs_path = layout.path(RepositoryLayout::kLabs);

    const auto cleanup = [&] {
        std::error_code ec;
        fs::remove(patients_path, ec);
        fs::remove(admissions_path, ec);
        fs::remove(diagnoses_path, ec);
        fs::remove(labs_path, ec);
    };

    try {
        TableWriter patients(patients_path, layout.gzip);
        TableWriter admissions(admissions_path, layout.gzip);
        TableWriter diagnoses(diagnoses_path, layout.gzip);
        TableWriter labs(labs_path, layout.gzip);

        patients.write(kPatientsHeader);
        admissions.write(kAdmissionsHeader);
        diagnoses.write(kDiagnosesHeader);
        labs.write(kLabsHeader);

        EmitStats stats;
        const PatientGenerator gen(config);
        std::uint64_t patients_done = 0;

        constexpr std::uint64_t kBlock = 16;
        ordered_blocks<SerializedBlock>(
            n, kBlock, workers,
            [&](std::uint64_t lo, std::uint64_t hi) {
                SerializedBlock block;
                for (std::uint64_t i = lo; i < hi; ++i)
                    append_patient(gen.generate(i), config, block);
                return block;
            },
            [&](SerializedBlock& block) {
                patients.write(block.patients);
                admissions.write(block.admissions);
                diagnoses.write(block.diagnoses);
                labs.write(block.labs);
                stats.patients.rows += block.patient_rows;
                stats.admissions.rows += block.admission_rows;
                stats.diagnoses.rows += block.admission_rows;
                stats.labs.rows += block.lab_rows;
                patients_done += block.patient_rows;
                if (progress) progress(patients_done, stats.labs.rows);
            });

        stats.patients.bytes = patients.close();
        stats.admissions.bytes = admissions.close();
        stats.diagnoses.bytes = diagnoses.close();
        stats.labs.bytes = labs.close();
        return stats;
    } catch (...) {
        cleanup();
        throw;
    }
}

}  // namespace emrsim
