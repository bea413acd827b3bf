#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#ifdef EMRSIM_HAVE_ZLIB
#include <zlib.h>
#endif

#include "csv.hpp"
#include "errors.hpp"
#include "patientgen.hpp"
#include "rng.hpp"

namespace emrsim {

namespace fs = std::filesystem;

double Welford::sd() const { return std::sqrt(variance()); }

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fixed(double v, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

/// Buffered line reader over a plain or gzip table file.
class TableReader {
  public:
    explicit TableReader(const std::string& path) : path_(path) {
#ifdef EMRSIM_HAVE_ZLIB
        if (path.size() > 3 && path.substr(path.size() - 3) == ".gz") {
            gz_ = gzopen(path.c_str(), "rb");
            if (!gz_) throw IoError("cannot open " + path);
            return;
        }
#endif
        plain_ = std::fopen(path.c_str(), "rb");
        if (!plain_) throw IoError("cannot open " + path);
    }

    ~TableReader() {
        if (plain_) std::fclose(plain_);
#ifdef EMRSIM_HAVE_ZLIB
        if (gz_) gzclose(gz_);
#endif
    }

    TableReader(const TableReader&) = delete;
    TableReader& operator=(const TableReader&) = delete;

    /// Next line without its newline; false at end of file.
    bool next(std::string_view& line) {
        for (;;) {
            const char* nl = static_cast<const char*>(
                std::memchr(buf_.data() + pos_, '\n', fill_ - pos_));
            if (nl) {
                std::size_t len = static_cast<std::size_t>(
                    nl - (buf_.data() + pos_));
                line = std::string_view(buf_.data() + pos_, len);
                if (!line.empty() && line.back() == '\r')
                    line.remove_suffix(1);
                pos_ += len + 1;
                ++line_no_;
                return true;
            }
            // Shift the partial tail to the front and refill.
            const std::size_t tail = fill_ - pos_;
            if (tail > 0 && pos_ > 0)
                std::memmove(buf_.data(), buf_.data() + pos_, tail);
            pos_ = 0;
            fill_ = tail;
            if (fill_ == buf_.size()) buf_.resize(buf_.size() * 2);
            const std::size_t got = read_chunk(buf_.data() + fill_,
                                               buf_.size() - fill_);
            if (got == 0) {
                if (fill_ == 0) return false;
                line = std::string_view(buf_.data(), fill_);
                if (!line.empty() && line.back() == '\r')
                    line.remove_suffix(1);
                pos_ = fill_ = 0;
                ++line_no_;
                return true;
            }
            fill_ += got;
        }
    }

    std::uint64_t line_no() const { return line_no_; }
    const std::string& path() const { return path_; }

  private:
    std::size_t read_chunk(char* dst, std::size_t cap) {
#ifdef EMRSIM_HAVE_ZLIB
        if (gz_) {
            const int got = gzread(gz_, dst, static_cast<unsigned>(cap));
            if (got < 0) throw IoError("read failure: " + path_);
            return static_cast<std::size_t>(got);
        }
#endif
        const std::size_t got = std::fread(dst, 1, cap, plain_);
        if (got < cap && std::ferror(plain_))
            throw IoError("read failure: " + path_);
        return got;
    }

    std::string path_;
    std::FILE* plain_ = nullptr;
#ifdef EMRSIM_HAVE_ZLIB
    gzFile gz_ = nullptr;
#endif
    std::vector<char> buf_ = std::vector<char>(1 << 20);
    std::size_t pos_ = 0;
    std::size_t fill_ = 0;
    std::uint64_t line_no_ = 0;
};

template <std::size_t N>
void split_tabs(const TableReader& reader, std::string_view line,
                std::string_view (&out)[N]) {
    std::size_t field = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            if (field >= N)
                throw DataError(reader.path(), reader.line_no(),
                                "too many columns");
            out[field++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    if (field != N)
        throw DataError(reader.path(), reader.line_no(),
                        "expected " + std::to_string(N) + " columns, got " +
                            std::to_string(field));
}

void expect_header(TableReader& reader, const char* expected) {
    std::string_view line;
    if (!reader.next(line) || line != std::string_view(expected))
        throw DataError(reader.path(), reader.line_no(),
                        "missing or unexpected header line");
}

double parse_number(const TableReader& reader, std::string_view s) {
    double v = 0.0;
    if (!parse_double(s, v))
        throw DataError(reader.path(), reader.line_no(),
                        "malformed number `" + std::string(s) + "`");
    return v;
}

DateTime parse_stamp(const TableReader& reader, std::string_view s) {
    DateTime t = 0;
    if (!parse_datetime(s, t))
        throw DataError(reader.path(), reader.line_no(),
                        "malformed datetime `" + std::string(s) + "`");
    return t;
}

struct PatientAgg {
    std::uint32_t admission_count = 0;
    std::uint32_t diagnosis_count = 0;
    DateTime first_start = 0;
    DateTime last_end = 0;
    std::uint64_t category_mask = 0;
    // (admission id, window) pairs; admission ids are small per patient.
    std::vector<std::tuple<int, DateTime, DateTime>> windows;

    const std::tuple<int, DateTime, DateTime>* find(int adm_id) const {
        for (const auto& w : windows)
            if (std::get<0>(w) == adm_id) return &w;
        return nullptr;
    }
};

std::vector<std::pair<std::string, double>> to_percentages(
    const std::vector<std::pair<std::string, std::uint64_t>>& counts,
    std::uint64_t total) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(counts.size());
    for (const auto& [name, c] : counts)
        out.emplace_back(name,
                         total ? 100.0 * static_cast<double>(c) /
                                     static_cast<double>(total)
                               : 0.0);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

}  // namespace

RepositoryLayout detect_layout(const std::string& dir) {
    RepositoryLayout plain{dir, false};
    RepositoryLayout zipped{dir, true};
    if (fs::exists(plain.path(RepositoryLayout::kPatients))) return plain;
    if (fs::exists(zipped.path(RepositoryLayout::kPatients))) return zipped;
    throw IoError("no repository found in " + dir + " (missing " +
                  plain.path(RepositoryLayout::kPatients) + "[.gz])");
}

CohortSummary summarize(const RepositoryLayout& layout, DateTime cutoff,
                        const ConfigSet* config) {
    CohortSummary s;

    // Category tags and lab ranges come from the configuration when present.
    std::vector<std::string> category_names;
    std::unordered_map<std::string, std::uint64_t> code_category_bits;
    std::unordered_map<std::string, const LabSpec*> lab_specs;
    if (config) {
        category_names = config->catalog.categories();
        std::unordered_map<std::string, std::size_t> category_index;
        for (std::size_t i = 0; i < category_names.size(); ++i)
            category_index[category_names[i]] = i;
        for (const auto& e : config->catalog.entries) {
            std::uint64_t mask = 0;
            for (const auto& c : e.categories) {
                auto it = category_index.find(c);
                if (it != category_index.end() && it->second < 64)
                    mask |= std::uint64_t{1} << it->second;
            }
            if (mask) code_category_bits[e.code] |= mask;
        }
        for (const auto& lab : config->labs) lab_specs[lab.title] = &lab;
    }

    std::unordered_map<std::string, PatientAgg> patients;
    Welford age;
    Welford poverty;
    std::vector<std::pair<std::string, std::uint64_t>> gender_counts;
    std::vector<std::pair<std::string, std::uint64_t>> ethnicity_counts;
    const auto bump = [](std::vector<std::pair<std::string, std::uint64_t>>& v,
                         std::string_view key) {
        for (auto& [name, c] : v) {
            if (name == key) {
                ++c;
                return;
            }
        }
        v.emplace_back(std::string(key), 1);
    };

    {
        TableReader reader(layout.path(RepositoryLayout::kPatients));
        expect_header(reader,
                      "PatientID\tPatientGender\tPatientDateOfBirth\t"
                      "PatientRace\tPatientMaritalStatus\tPatientLanguage\t"
                      "PatientPopulationPercentageBelowPoverty");
        std::string_view f[7];
        std::string_view line;
        while (reader.next(line)) {
            split_tabs(reader, line, f);
            auto [it, inserted] =
                patients.emplace(std::string(f[0]), PatientAgg{});
            if (!inserted)
                throw DataError(reader.path(), reader.line_no(),
                                "duplicate PatientID " + std::string(f[0]));
            bump(gender_counts, f[1]);
            age.add(years_between(parse_stamp(reader, f[2]), cutoff));
            bump(ethnicity_counts, f[3]);
            poverty.add(parse_number(reader, f[6]));
        }
        s.n_patients = patients.size();
    }

    Welford los_days;
    {
        TableReader reader(layout.path(RepositoryLayout::kAdmissions));
        expect_header(reader,
                      "PatientID\tAdmissionID\tAdmissionStartDate\t"
                      "AdmissionEndDate");
        std::string_view f[4];
        std::string_view line;
        while (reader.next(line)) {
            split_tabs(reader, line, f);
            auto it = patients.find(std::string(f[0]));
            if (it == patients.end())
                throw DataError(reader.path(), reader.line_no(),
                                "admission references unknown PatientID " +
                                    std::string(f[0]));
            int adm_id = 0;
            if (!parse_int(f[1], adm_id))
                throw DataError(reader.path(), reader.line_no(),
                                "malformed AdmissionID");
            const DateTime start = parse_stamp(reader, f[2]);
            const DateTime end = parse_stamp(reader, f[3]);
            if (end < start)
                throw DataError(reader.path(), reader.line_no(),
                                "admission ends before it starts");
            PatientAgg& agg = it->second;
            if (agg.find(adm_id))
                throw DataError(reader.path(), reader.line_no(),
                                "duplicate admission " + std::string(f[1]) +
                                    " for patient " + std::string(f[0]));
            if (agg.admission_count == 0 || start < agg.first_start)
                agg.first_start = start;
            if (agg.admission_count == 0 || end > agg.last_end)
                agg.last_end = end;
            ++agg.admission_count;
            agg.windows.emplace_back(adm_id, start, end);
            los_days.add(static_cast<double>(end - start) /
                         static_cast<double>(kSecondsPerDay));
            ++s.total_admissions;
        }
    }

    {
        TableReader reader(layout.path(RepositoryLayout::kDiagnoses));
        expect_header(reader,
                      "PatientID\tAdmissionID\tPrimaryDiagnosisCode\t"
                      "PrimaryDiagnosisDescription");
        std::string_view f[4];
        std::string_view line;
        while (reader.next(line)) {
            split_tabs(reader, line, f);
            auto it = patients.find(std::string(f[0]));
            if (it == patients.end())
                throw DataError(reader.path(), reader.line_no(),
                                "diagnosis references unknown PatientID " +
                                    std::string(f[0]));
            int adm_id = 0;
            if (!parse_int(f[1], adm_id))
                throw DataError(reader.path(), reader.line_no(),
                                "malformed AdmissionID");
            if (!it->second.find(adm_id))
                throw DataError(reader.path(), reader.line_no(),
                                "diagnosis references unknown admission " +
                                    std::string(f[1]) + " of patient " +
                                    std::string(f[0]));
            ++it->second.diagnosis_count;
            if (!code_category_bits.empty()) {
                auto bits = code_category_bits.find(std::string(f[2]));
                if (bits != code_category_bits.end())
                    it->second.category_mask |= bits->second;
            }
        }
    }

    std::vector<std::string> lab_order;
    std::unordered_map<std::string, Welford> lab_moments;
    {
        TableReader reader(layout.path(RepositoryLayout::kLabs));
        expect_header(reader,
                      "PatientID\tAdmissionID\tLabName\tLabValue\tLabUnits\t"
                      "LabDateTime");
        std::string_view f[6];
        std::string_view line;
        while (reader.next(line)) {
            split_tabs(reader, line, f);
            auto it = patients.find(std::string(f[0]));
            if (it == patients.end())
                throw DataError(reader.path(), reader.line_no(),
                                "lab references unknown PatientID " +
                                    std::string(f[0]));
            int adm_id = 0;
            if (!parse_int(f[1], adm_id))
                throw DataError(reader.path(), reader.line_no(),
                                "malformed AdmissionID");
            const auto* window = it->second.find(adm_id);
            if (!window)
                throw DataError(reader.path(), reader.line_no(),
                                "lab references unknown admission " +
                                    std::string(f[1]) + " of patient " +
                                    std::string(f[0]));
            const double value = parse_number(reader, f[3]);
            const std::string name(f[2]);
            if (config) {
                auto spec = lab_specs.find(name);
                if (spec == lab_specs.end())
                    throw DataError(reader.path(), reader.line_no(),
                                    "lab `" + name +
                                        "` is not in the configured table");
                if (value < spec->second->min_value ||
                    value > spec->second->max_value)
                    throw DataError(
                        reader.path(), reader.line_no(),
                        "lab `" + name + "` value " + num(value) +
                            " outside configured range [" +
                            num(spec->second->min_value) + ", " +
                            num(spec->second->max_value) + "]");
                const DateTime at = parse_stamp(reader, f[5]);
                if (at < std::get<1>(*window) || at > std::get<2>(*window))
                    throw DataError(reader.path(), reader.line_no(),
                                    "lab timestamp outside its admission");
            }
            auto [m, inserted] = lab_moments.emplace(name, Welford{});
            if (inserted) lab_order.push_back(name);
            m->second.add(value);
            ++s.total_lab_rows;
        }
    }

    // A well-formed repository carries exactly one diagnosis per admission.
    for (const auto& [id, agg] : patients) {
        if (agg.diagnosis_count != agg.admission_count)
            throw DataError(layout.path(RepositoryLayout::kDiagnoses), 0,
                            "patient " + id + " has " +
                                std::to_string(agg.diagnosis_count) +
                                " diagnoses for " +
                                std::to_string(agg.admission_count) +
                                " admissions");
    }

    s.age_mean = age.mean();
    s.age_sd = age.sd();
    s.poverty_mean = poverty.mean();
    s.gender_pct = to_percentages(gender_counts, s.n_patients);
    s.ethnicity_pct = to_percentages(ethnicity_counts, s.n_patients);
    s.los_mean = los_days.mean();
    s.los_sd = los_days.sd();

    Welford admissions_per_patient;
    std::uint64_t followup_counts[3] = {0, 0, 0};
    std::vector<std::uint64_t> category_counts(category_names.size(), 0);
    for (const auto& [id, agg] : patients) {
        admissions_per_patient.add(static_cast<double>(agg.admission_count));
        double fu = 0.0;
        if (agg.admission_count > 0)
            fu = years_between(agg.first_start, agg.last_end);
        if (fu < 10.0)
            ++followup_counts[0];
        else if (fu <= 15.0)
            ++followup_counts[1];
        else
            ++followup_counts[2];
        for (std::size_t c = 0; c < category_names.size(); ++c)
            if (agg.category_mask & (std::uint64_t{1} << c))
                ++category_counts[c];
    }
    s.admissions_mean = admissions_per_patient.mean();
    s.admissions_sd = admissions_per_patient.sd();
    for (int b = 0; b < 3; ++b)
        s.followup_pct[b] =
            s.n_patients ? 100.0 * static_cast<double>(followup_counts[b]) /
                               static_cast<double>(s.n_patients)
                         : 0.0;
    for (std::size_t c = 0; c < category_names.size(); ++c)
        s.prevalence_pct.emplace_back(
            category_names[c],
            s.n_patients ? 100.0 * static_cast<double>(category_counts[c]) /
                               static_cast<double>(s.n_patients)
                         : 0.0);

    s.labs.reserve(lab_order.size());
    for (const auto& name : lab_order) {
        const Welford& w = lab_moments[name];
        s.labs.push_back(LabSummary{name, w.count(), w.mean(), w.sd()});
    }
    return s;
}

double prevalence_expected(double p, const AdmissionCountDist& dist) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("prevalence_expected: p outside [0, 1]");
    const double total = dist.weight_total();
    double miss = 0.0;
    for (const auto& [m, w] : dist.buckets)
        miss += (w / total) * std::pow(1.0 - p, m);
    return 1.0 - miss;
}

namespace {

struct Mixture {
    double mean = 0.0;
    double sd = 0.0;
};

/// Mean and SD of a bucket mixture where values are uniform within buckets.
Mixture range_mixture(const RangeBucketSpec& spec,
                      const std::function<double(double)>& transform) {
    const double total = spec.weight_total();
    double mean = 0.0;
    double second = 0.0;
    for (const auto& b : spec.buckets) {
        const double w = b.weight / total;
        const double lo = transform(b.lo);
        const double hi = transform(b.hi);
        const double mid = 0.5 * (lo + hi);
        const double var = (hi - lo) * (hi - lo) / 12.0;
        mean += w * mid;
        second += w * (var + mid * mid);
    }
    return {mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

double pct_se(double pct, std::uint64_t n) {
    if (n == 0) return 0.0;
    const double p = pct / 100.0;
    return 100.0 * std::sqrt(std::max(0.0, p * (1.0 - p)) /
                             static_cast<double>(n));
}

}  // namespace

ExpectedSummary expected_from_config(const ConfigSet& config, std::uint64_t n,
                                     DateTime cutoff) {
    ExpectedSummary e;
    e.n_patients = n;
    const GenerationParams& params = config.params;
    const double dn = n > 0 ? static_cast<double>(n) : 1.0;

    const RangeBucketSpec* dob = config.population.find_range(kVarDateOfBirth);
    if (dob) {
        // The transform maps the older bucket edge to the larger age; the
        // squared width in the mixture formula absorbs the flipped order.
        const Mixture m = range_mixture(*dob, [&](double secs) {
            return years_between(static_cast<DateTime>(secs), cutoff);
        });
        e.age_mean = {m.mean, m.sd / std::sqrt(dn)};
        e.age_sd = {m.sd, m.sd / std::sqrt(2.0 * dn)};
    }
    const RangeBucketSpec* poverty = config.population.find_range(kVarPoverty);
    if (poverty) {
        const Mixture m =
            range_mixture(*poverty, [](double v) { return v; });
        e.poverty_mean = {m.mean, m.sd / std::sqrt(dn)};
    }

    const auto categorical_expectation =
        [&](const char* var,
            std::vector<std::pair<std::string, Estimate>>& out) {
            const CategoricalSpec* spec =
                config.population.find_categorical(var);
            if (!spec) return;
            const double total = spec->weight_total();
            for (const auto& level : spec->levels) {
                const double pct = 100.0 * level.weight / total;
                out.emplace_back(level.value, Estimate{pct, pct_se(pct, n)});
            }
        };
    categorical_expectation(kVarGender, e.gender_pct);
    categorical_expectation(kVarEthnicity, e.ethnicity_pct);

    const AdmissionCountDist& dist = params.admission_count_dist;
    const double adm_mean = dist.mean();
    const double adm_sd = dist.stddev();
    e.admissions_mean = {adm_mean, adm_sd / std::sqrt(dn)};
    e.admissions_sd = {adm_sd, adm_sd / std::sqrt(2.0 * dn)};

    // Discrete uniform stay length.
    const double k_values =
        static_cast<double>(params.los_days_max - params.los_days_min + 1);
    const double los_mean =
        0.5 * (params.los_days_min + params.los_days_max);
    const double los_sd = std::sqrt((k_values * k_values - 1.0) / 12.0);
    const double n_adm = dn * adm_mean;
    e.los_mean = {los_mean, los_sd / std::sqrt(std::max(1.0, n_adm))};
    e.los_sd = {los_sd, los_sd / std::sqrt(2.0 * std::max(1.0, n_adm))};

    for (const auto& category : config.catalog.categories()) {
        const double p = config.catalog.category_mass(category);
        const double prev = 100.0 * prevalence_expected(p, dist);
        e.prevalence_pct.emplace_back(category,
                                      Estimate{prev, pct_se(prev, n)});
    }

    const double labs_per_type =
        0.5 * (1.0 + static_cast<double>(params.labs_per_type_max));
    for (const auto& lab : config.labs) {
        ExpectedLab el;
        el.name = lab.title;
        const double range = lab.max_value - lab.min_value;
        const double mean = 0.5 * (lab.min_value + lab.max_value);
        // Emitted values are rounded to the display grid; a uniform draw
        // quantized to step s has variance (range^2 + 2 s^2) / 12, which
        // matters for ranges only a few steps wide.
        const double step = std::pow(10.0, -lab.decimals);
        const double sd =
            std::sqrt((range * range + 2.0 * step * step) / 12.0);
        el.expected_count = dn * adm_mean * labs_per_type;
        const double cnt = std::max(1.0, el.expected_count);
        el.mean = {mean, sd / std::sqrt(cnt)};
        el.sd = {sd, sd / std::sqrt(2.0 * cnt)};
        e.labs.push_back(std::move(el));
    }

    e.total_admissions = {dn * adm_mean, adm_sd * std::sqrt(dn)};
    {
        const double types = static_cast<double>(config.labs.size());
        const double k = static_cast<double>(params.labs_per_type_max);
        const double per_adm_mean = types * labs_per_type;
        const double per_adm_var = types * (k * k - 1.0) / 12.0;
        const double per_patient_var =
            adm_mean * per_adm_var +
            adm_sd * adm_sd * per_adm_mean * per_adm_mean;
        e.total_lab_rows = {dn * adm_mean * per_adm_mean,
                            std::sqrt(dn * per_patient_var)};
    }

    // Follow-up shape has no tidy closed form (order statistics over mixed
    // windows after overlap repair), so it is estimated by a fixed-seed
    // Monte-Carlo run over the real scheduler; the MC noise is folded into
    // the standard errors.
    if (dob) {
        constexpr int kSamples = 40000;
        RngStream mc(detail::mix64(0x5EED0F0110DA7AULL));
        std::uint64_t counts[3] = {0, 0, 0};
        for (int i = 0; i < kSamples; ++i) {
            const std::size_t bi = pick_weighted_index(
                mc, dob->buckets.size(),
                [&](std::size_t j) { return dob->buckets[j].weight; });
            const DateTime birth = uniform_datetime(
                mc, static_cast<DateTime>(dob->buckets[bi].lo),
                static_cast<DateTime>(dob->buckets[bi].hi));
            const int count = sample_admission_count(mc, dist);
            const AdmissionSchedule sched =
                schedule_admissions(mc, birth, count, params);
            double fu = 0.0;
            if (!sched.stays.empty())
                fu = years_between(sched.stays.front().first,
                                   sched.stays.back().second);
            if (fu < 10.0)
                ++counts[0];
            else if (fu <= 15.0)
                ++counts[1];
            else
                ++counts[2];
        }
        for (int b = 0; b < 3; ++b) {
            const double pct =
                100.0 * static_cast<double>(counts[b]) / kSamples;
            const double se_obs = pct_se(pct, n);
            const double se_mc = pct_se(pct, kSamples);
            e.followup_pct[b] = {pct,
                                 std::sqrt(se_obs * se_obs + se_mc * se_mc)};
        }
    }
    return e;
}

namespace {

void add_deviation(DeviationReport& report, const std::string& name,
                   double observed, const Estimate& expected, double floor,
                   double z) {
    Deviation d;
    d.statistic = name;
    d.observed = observed;
    d.expected = expected.value;
    d.tolerance = std::max(floor, z * expected.se);
    d.pass = std::fabs(observed - expected.value) <= d.tolerance;
    if (!d.pass) report.pass = false;
    report.stats.push_back(std::move(d));
}

// Every observed level must exist on the expected side; unknown levels mean
// the summaries describe different configurations.
void check_levels_known(
    const std::vector<std::pair<std::string, double>>& observed,
    const std::vector<std::pair<std::string, Estimate>>& expected,
    const std::string& group) {
    for (const auto& [name, pct] : observed) {
        bool known = false;
        for (const auto& [ename, est] : expected)
            if (ename == name) known = true;
        if (!known && pct > 0.0)
            throw DataError("compare: observed " + group + " level `" + name +
                            "` is not part of the expected configuration");
    }
}

}  // namespace

DeviationReport compare(const CohortSummary& observed,
                        const ExpectedSummary& expected,
                        const ToleranceProfile& profile) {
    DeviationReport report;
    const double z = profile.z;

    add_deviation(report, "n_patients",
                  static_cast<double>(observed.n_patients),
                  Estimate{static_cast<double>(expected.n_patients), 0.0}, 0.0,
                  z);
    add_deviation(report, "age_mean", observed.age_mean, expected.age_mean,
                  0.0, z);
    add_deviation(report, "age_sd", observed.age_sd, expected.age_sd, 0.0, z);

    check_levels_known(observed.gender_pct, expected.gender_pct, "gender");
    for (const auto& [name, est] : expected.gender_pct) {
        double pct = 0.0;
        for (const auto& [oname, opct] : observed.gender_pct)
            if (oname == name) pct = opct;
        add_deviation(report, "gender_pct." + name, pct, est,
                      profile.pct_floor, z);
    }
    check_levels_known(observed.ethnicity_pct, expected.ethnicity_pct,
                       "ethnicity");
    for (const auto& [name, est] : expected.ethnicity_pct) {
        double pct = 0.0;
        for (const auto& [oname, opct] : observed.ethnicity_pct)
            if (oname == name) pct = opct;
        add_deviation(report, "ethnicity_pct." + name, pct, est,
                      profile.pct_floor, z);
    }

    add_deviation(report, "admissions_mean", observed.admissions_mean,
                  expected.admissions_mean, 0.0, z);
    add_deviation(report, "admissions_sd", observed.admissions_sd,
                  expected.admissions_sd, 0.0, z);
    add_deviation(report, "los_mean", observed.los_mean, expected.los_mean,
                  0.0, z);
    add_deviation(report, "los_sd", observed.los_sd, expected.los_sd, 0.0, z);

    static const char* kFollowupNames[3] = {"followup_pct.0_9",
                                            "followup_pct.10_15",
                                            "followup_pct.over_15"};
    for (int b = 0; b < 3; ++b)
        add_deviation(report, kFollowupNames[b], observed.followup_pct[b],
                      expected.followup_pct[b], profile.pct_floor, z);

    add_deviation(report, "poverty_mean", observed.poverty_mean,
                  expected.poverty_mean, 0.0, z);

    for (const auto& [name, est] : expected.prevalence_pct) {
        double pct = 0.0;
        bool found = false;
        for (const auto& [oname, opct] : observed.prevalence_pct)
            if (oname == name) {
                pct = opct;
                found = true;
            }
        // The observed side only has prevalences when it was summarized
        // with the same catalog; skip silently when absent entirely.
        if (!found && observed.prevalence_pct.empty()) continue;
        add_deviation(report, "prevalence_pct." + name, pct, est,
                      profile.pct_floor, z);
    }

    std::unordered_map<std::string, const LabSummary*> observed_labs;
    for (const auto& lab : observed.labs) observed_labs[lab.name] = &lab;
    if (observed.labs.size() != expected.labs.size())
        throw DataError(
            "compare: observed and expected lab tables differ in size (" +
            std::to_string(observed.labs.size()) + " vs " +
            std::to_string(expected.labs.size()) + ")");
    for (const auto& el : expected.labs) {
        auto it = observed_labs.find(el.name);
        if (it == observed_labs.end())
            throw DataError("compare: lab `" + el.name +
                            "` missing from the observed summary");
        add_deviation(report, "lab_mean." + el.name, it->second->mean,
                      el.mean, profile.lab_rel_floor * std::fabs(el.mean.value),
                      z);
        add_deviation(report, "lab_sd." + el.name, it->second->sd, el.sd,
                      profile.lab_rel_floor * el.sd.value, z);
    }

    add_deviation(report, "total_admissions",
                  static_cast<double>(observed.total_admissions),
                  expected.total_admissions, 0.0, z);
    add_deviation(report, "total_lab_rows",
                  static_cast<double>(observed.total_lab_rows),
                  expected.total_lab_rows, 0.0, z);
    return report;
}

std::string render_summary(const CohortSummary& s) {
    std::ostringstream out;
    out << "Patients (n = " << s.n_patients << ")\n";
    out << "Mean age, years (SD): " << fixed(s.age_mean, 1) << " ("
        << fixed(s.age_sd, 1) << ")\n";
    out << "Gender (%)\n";
    for (const auto& [name, pct] : s.gender_pct)
        out << "  " << name << ": " << fixed(pct, 1) << "\n";
    out << "Ethnicity (%)\n";
    for (const auto& [name, pct] : s.ethnicity_pct)
        out << "  " << name << ": " << fixed(pct, 1) << "\n";
    out << "Mean number of admissions per patient (SD): "
        << fixed(s.admissions_mean, 1) << " (" << fixed(s.admissions_sd, 1)
        << ")\n";
    out << "Mean length of stay, days (SD): " << fixed(s.los_mean, 1) << " ("
        << fixed(s.los_sd, 1) << ")\n";
    out << "Length of follow-up (%)\n";
    out << "  0-9 years: " << fixed(s.followup_pct[0], 1) << "\n";
    out << "  10-15 years: " << fixed(s.followup_pct[1], 1) << "\n";
    out << "  >15 years: " << fixed(s.followup_pct[2], 1) << "\n";
    out << "Population below poverty (%): " << fixed(s.poverty_mean, 1)
        << "\n";
    if (!s.prevalence_pct.empty()) {
        out << "Comorbidities, prevalence (%)\n";
        auto sorted = s.prevalence_pct;
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) {
                      return a.second > b.second;
                  });
        for (const auto& [name, pct] : sorted)
            out << "  " << name << ": " << fixed(pct, 1) << "\n";
    }
    out << "Laboratory values (mean; SD) [n]\n";
    for (const auto& lab : s.labs)
        out << "  " << lab.name << ": " << fixed(lab.mean, 4) << "; "
            << fixed(lab.sd, 4) << " [" << lab.count << "]\n";
    out << "Total admissions: " << s.total_admissions << "\n";
    out << "Total laboratory rows: " << s.total_lab_rows << "\n";
    return out.str();
}

std::string render_expected(const ExpectedSummary& e) {
    std::ostringstream out;
    out << "Expected statistics for n = " << e.n_patients << "\n";
    out << "Mean age, years (SD): " << fixed(e.age_mean.value, 2) << " ("
        << fixed(e.age_sd.value, 2) << ")\n";
    out << "Gender (%)\n";
    for (const auto& [name, est] : e.gender_pct)
        out << "  " << name << ": " << fixed(est.value, 1) << "\n";
    out << "Ethnicity (%)\n";
    for (const auto& [name, est] : e.ethnicity_pct)
        out << "  " << name << ": " << fixed(est.value, 1) << "\n";
    out << "Mean number of admissions per patient (SD): "
        << fixed(e.admissions_mean.value, 2) << " ("
        << fixed(e.admissions_sd.value, 2) << ")\n";
    out << "Mean length of stay, days (SD): " << fixed(e.los_mean.value, 2)
        << " (" << fixed(e.los_sd.value, 2) << ")\n";
    out << "Length of follow-up (%)\n";
    out << "  0-9 years: " << fixed(e.followup_pct[0].value, 1) << "\n";
    out << "  10-15 years: " << fixed(e.followup_pct[1].value, 1) << "\n";
    out << "  >15 years: " << fixed(e.followup_pct[2].value, 1) << "\n";
    out << "Population below poverty (%): " << fixed(e.poverty_mean.value, 2)
        << "\n";
    if (!e.prevalence_pct.empty()) {
        out << "Comorbidities, prevalence (%)\n";
        for (const auto& [name, est] : e.prevalence_pct)
            out << "  " << name << ": " << fixed(est.value, 1) << "\n";
    }
    out << "Laboratory values (mean; SD) [expected n]\n";
    for (const auto& lab : e.labs)
        out << "  " << lab.name << ": " << fixed(lab.mean.value, 4) << "; "
            << fixed(lab.sd.value, 4) << " ["
            << static_cast<std::uint64_t>(lab.expected_count) << "]\n";
    out << "Expected total admissions: "
        << static_cast<std::uint64_t>(e.total_admissions.value) << "\n";
    out << "Expected total laboratory rows: "
        << static_cast<std::uint64_t>(e.total_lab_rows.value) << "\n";
    return out.str();
}

std::string render_deviations(const DeviationReport& report) {
    std::ostringstream out;
    std::size_t width = 10;
    for (const auto& d : report.stats)
        width = std::max(width, d.statistic.size());
    for (const auto& d : report.stats) {
        out << (d.pass ? "[pass] " : "[FAIL] ") << d.statistic;
        out << std::string(width + 2 - d.statistic.size(), ' ');
        out << "observed " << num(d.observed) << ", expected "
            << num(d.expected) << " +/- " << num(d.tolerance) << "\n";
    }
    out << (report.pass ? "RESULT: pass" : "RESULT: FAIL") << " ("
        << report.stats.size() << " statistics)\n";
    return out.str();
}

std::string machine_report(const DeviationReport& report) {
    std::ostringstream out;
    for (const auto& d : report.stats)
        out << d.statistic << '\t' << num(d.observed) << '\t'
            << num(d.expected) << '\t' << (d.pass ? "pass" : "fail") << '\n';
    return out.str();
}

}  // namespace emrsim
