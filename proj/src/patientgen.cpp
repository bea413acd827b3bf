#include "patientgen.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "errors.hpp"
#include "ordered_pipeline.hpp"
#include "rounding.hpp"

namespace emrsim {

namespace {

const CategoricalSpec* require_categorical(const PopulationConfig& pc,
                                           const char* name) {
    const CategoricalSpec* spec = pc.find_categorical(name);
    if (!spec)
        throw ConfigError(std::string("missing categorical variable `") +
                          name + "`");
    return spec;
}

const RangeBucketSpec* require_range(const PopulationConfig& pc,
                                     const char* name) {
    const RangeBucketSpec* spec = pc.find_range(name);
    if (!spec)
        throw ConfigError(std::string("missing range variable `") + name +
                          "`");
    return spec;
}

const std::string& pick_level(RngStream& rng, const CategoricalSpec& spec) {
    const std::size_t i = pick_weighted_index(
        rng, spec.levels.size(),
        [&](std::size_t j) { return spec.levels[j].weight; });
    return spec.levels[i].value;
}

const RangeBucket& pick_bucket(RngStream& rng, const RangeBucketSpec& spec) {
    const std::size_t i = pick_weighted_index(
        rng, spec.buckets.size(),
        [&](std::size_t j) { return spec.buckets[j].weight; });
    return spec.buckets[i];
}

}  // namespace

std::int64_t first_admission_offset_seconds(const GenerationParams& params) {
    return static_cast<std::int64_t>(
        params.first_admission_offset_years * kSecondsPerYear + 0.5);
}

int sample_admission_count(RngStream& rng, const AdmissionCountDist& dist) {
    const std::size_t i = pick_weighted_index(
        rng, dist.buckets.size(),
        [&](std::size_t j) { return dist.buckets[j].second; });
    return dist.buckets[i].first;
}

AdmissionSchedule schedule_admissions(RngStream& rng, DateTime dob, int count,
                                      const GenerationParams& params) {
    const DateTime window_lo = dob + first_admission_offset_seconds(params);
    const DateTime window_hi =
        params.cutoff_date -
        static_cast<std::int64_t>(params.los_days_max) * kSecondsPerDay;
    if (window_lo >= window_hi)
        throw std::invalid_argument(
            "schedule_admissions: empty eligible window");

    std::vector<DateTime> starts(count);
    for (int i = 0; i < count; ++i)
        starts[i] = uniform_datetime(rng, window_lo, window_hi);
    std::vector<int> stay_days(count);
    for (int i = 0; i < count; ++i)
        stay_days[i] = static_cast<int>(
            uniform_int(rng, params.los_days_min, params.los_days_max));

    std::vector<std::pair<DateTime, int>> events(count);
    for (int i = 0; i < count; ++i) events[i] = {starts[i], stay_days[i]};
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& a, const auto& b) {
                         return a.first < b.first;
                     });

    AdmissionSchedule sched;
    sched.stays.reserve(count);
    DateTime prev_end = std::numeric_limits<DateTime>::min();
    for (const auto& [orig_start, days] : events) {
        DateTime start = orig_start;
        if (start <= prev_end) start = prev_end + kSecondsPerDay;
        DateTime end = start + static_cast<std::int64_t>(days) * kSecondsPerDay;
        if (end > params.cutoff_date) {
            end = params.cutoff_date;
            start = end - static_cast<std::int64_t>(days) * kSecondsPerDay;
            if (start <= prev_end) {
                ++sched.dropped;
                continue;
            }
        }
        sched.stays.emplace_back(start, end);
        prev_end = end;
    }
    return sched;
}

PatientGenerator::PatientGenerator(const ConfigSet& config)
    : config_(config),
      gender_(require_categorical(config.population, kVarGender)),
      marital_(require_categorical(config.population, kVarMaritalStatus)),
      language_(require_categorical(config.population, kVarLanguage)),
      ethnicity_(require_categorical(config.population, kVarEthnicity)),
      dob_(require_range(config.population, kVarDateOfBirth)),
      poverty_(require_range(config.population, kVarPoverty)) {
    for (std::size_t i = 0; i < config.catalog.entries.size(); ++i) {
        const ComplaintEntry& e = config.catalog.entries[i];
        if (e.sex != SexRestriction::none) continue;
        usable_complaints_.push_back(i);
        usable_weights_.push_back(e.weight);
    }
    if (usable_complaints_.empty())
        throw ConfigError("complaint catalog has no usable entries");
}

void PatientGenerator::generate_demographics(RngStream& rng,
                                             Patient& out) const {
    out.gender = pick_level(rng, *gender_);
    const RangeBucket& dob_bucket = pick_bucket(rng, *dob_);
    out.date_of_birth = uniform_datetime(rng, static_cast<DateTime>(dob_bucket.lo),
                                         static_cast<DateTime>(dob_bucket.hi));
    out.ethnicity = pick_level(rng, *ethnicity_);
    out.marital_status = pick_level(rng, *marital_);
    out.language = pick_level(rng, *language_);
    const RangeBucket& pov_bucket = pick_bucket(rng, *poverty_);
    out.poverty_pct =
        pov_bucket.lo + rng.next_unit() * (pov_bucket.hi - pov_bucket.lo);
}

std::size_t PatientGenerator::assign_diagnosis(RngStream& rng) const {
    const std::size_t i = pick_weighted_index(
        rng, usable_weights_.size(),
        [&](std::size_t j) { return usable_weights_[j]; });
    return usable_complaints_[i];
}

std::vector<LabResult> PatientGenerator::generate_labs(RngStream& rng,
                                                       DateTime start,
                                                       DateTime end) const {
    std::vector<LabResult> results;
    results.reserve(config_.labs.size() *
                    (1 + config_.params.labs_per_type_max) / 2);
    std::vector<DateTime> times;
    for (std::uint32_t t = 0; t < config_.labs.size(); ++t) {
        const LabSpec& lab = config_.labs[t];
        const int count = static_cast<int>(
            uniform_int(rng, 1, config_.params.labs_per_type_max));
        times.clear();
        for (int i = 0; i < count; ++i)
            times.push_back(uniform_datetime(rng, start, end));
        std::sort(times.begin(), times.end());
        for (int i = 0; i < count; ++i) {
            double v = lab.min_value +
                       rng.next_unit() * (lab.max_value - lab.min_value);
            v = round_half_up(v, lab.decimals);
            // Rounding can step past an endpoint whose own precision is
            // finer than the display precision.
            v = std::min(std::max(v, lab.min_value), lab.max_value);
            results.push_back(LabResult{t, v, times[i]});
        }
    }
    return results;
}

std::string format_patient_id(std::uint64_t hi, std::uint64_t lo) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
                  static_cast<unsigned>(hi >> 32),
                  static_cast<unsigned>((hi >> 16) & 0xFFFF),
                  static_cast<unsigned>(hi & 0xFFFF),
                  static_cast<unsigned>(lo >> 48),
                  static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
    return buf;
}

Patient PatientGenerator::generate(std::uint64_t patient_index) const {
    const GenerationParams& params = config_.params;
    RngStream rng = stream_for_patient(params.master_seed, patient_index);

    Patient p;
    const std::uint64_t id_hi = rng.next_u64();
    const std::uint64_t id_lo = rng.next_u64();
    p.id = format_patient_id(id_hi, id_lo);

    generate_demographics(rng, p);

    const int count = sample_admission_count(rng, params.admission_count_dist);
    AdmissionSchedule sched =
        schedule_admissions(rng, p.date_of_birth, count, params);
    p.dropped_admissions = sched.dropped;

    p.admissions.resize(sched.stays.size());
    for (std::size_t i = 0; i < sched.stays.size(); ++i) {
        Admission& adm = p.admissions[i];
        adm.index = static_cast<int>(i + 1);
        adm.start = sched.stays[i].first;
        adm.end = sched.stays[i].second;
        adm.complaint_index =
            static_cast<std::uint32_t>(assign_diagnosis(rng));
    }
    for (Admission& adm : p.admissions)
        adm.labs = generate_labs(rng, adm.start, adm.end);
    return p;
}

void for_each_patient(const ConfigSet& config, std::uint64_t n,
                      unsigned workers,
                      const std::function<void(const Patient&)>& sink) {
    const PatientGenerator gen(config);
    constexpr std::uint64_t kBlock = 16;
    ordered_blocks<std::vector<Patient>>(
        n, kBlock, workers,
        [&](std::uint64_t lo, std::uint64_t hi) {
            std::vector<Patient> block;
            block.reserve(hi - lo);
            for (std::uint64_t i = lo; i < hi; ++i)
                block.push_back(gen.generate(i));
            return block;
        },
        [&](std::vector<Patient>& block) {
            for (const Patient& p : block) sink(p);
        });
}

}  // namespace emrsim
