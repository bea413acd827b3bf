#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "config.hpp"
#include "patientgen.hpp"
#include "stats.hpp"

using namespace emrsim;

namespace {

ConfigSet defaults() { return load_config_dir(EMRSIM_DEFAULT_CONFIG_DIR); }

// Minimal configuration for fast full-patient runs: one lab type, one
// measurement per type, small catalog.
ConfigSet tiny_config(double tagged_weight, double untagged_weight) {
    ConfigSet cfg = defaults();
    cfg.labs = load_lab_config("Glucose,60,140,mg/dL\n", "labs.csv");
    std::string catalog = "T01,Tagged complaint," +
                          std::to_string(tagged_weight) + ",Tagged,none\n";
    catalog += "U01,Untagged complaint," + std::to_string(untagged_weight) +
               ",,none\n";
    cfg.catalog = load_complaint_catalog(catalog, "complaints.csv");
    cfg.params.labs_per_type_max = 1;
    return cfg;
}

}  // namespace

TEST_CASE("demographic draws follow the configured mixtures") {
    const ConfigSet cfg = defaults();
    const PatientGenerator gen(cfg);
    const DateTime cutoff = cfg.params.cutoff_date;
    const DateTime decade_lo = datetime_from_civil(1940, 1, 1);
    const DateTime decade_hi = datetime_from_civil(1950, 1, 1);

    constexpr int kPatients = 100000;
    int in_decade = 0;
    double poverty_sum = 0.0;
    int max_age = 0;
    for (int i = 0; i < kPatients; ++i) {
        RngStream rng = stream_for_patient(11, static_cast<uint64_t>(i));
        Patient p;
        gen.generate_demographics(rng, p);
        if (p.date_of_birth >= decade_lo && p.date_of_birth < decade_hi)
            ++in_decade;
        poverty_sum += p.poverty_pct;
        max_age = std::max(max_age, civil_age_years(p.date_of_birth, cutoff));
        if (i < 1000) {
            CHECK(p.poverty_pct >= 0.0);
            CHECK(p.poverty_pct <= 100.0);
            CHECK(!p.gender.empty());
            CHECK(!p.ethnicity.empty());
        }
    }
    const double decade_frac = static_cast<double>(in_decade) / kPatients;
    CHECK(decade_frac > 0.146);
    CHECK(decade_frac < 0.154);
    const double poverty_mean = poverty_sum / kPatients;
    CHECK(poverty_mean > 21.2);
    CHECK(poverty_mean < 21.9);
    CHECK(max_age <= cfg.params.max_age_years);
}

TEST_CASE("admission counts follow the configured distribution") {
    RngStream rng = stream_for_patient(12, 0);

    const AdmissionCountDist always_three{{{3, 100.0}}};
    for (int i = 0; i < 100; ++i)
        CHECK(sample_admission_count(rng, always_three) == 3);

    const AdmissionCountDist dist = default_admission_count_dist();
    constexpr int kDraws = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const int m = sample_admission_count(rng, dist);
        REQUIRE(m >= 1);
        REQUIRE(m <= 10);
        sum += m;
        sumsq += static_cast<double>(m) * m;
    }
    const double mean = sum / kDraws;
    const double sd = std::sqrt(sumsq / kDraws - mean * mean);
    CHECK(mean > 3.5);
    CHECK(mean < 3.7);
    CHECK(sd > 1.35);
    CHECK(sd < 1.65);
}

TEST_CASE("schedules are chronological, bounded and non-overlapping") {
    const ConfigSet cfg = defaults();
    const GenerationParams& params = cfg.params;
    const std::int64_t offset = first_admission_offset_seconds(params);

    // Property sweep over random patients.
    for (int trial = 0; trial < 2000; ++trial) {
        RngStream rng = stream_for_patient(13, static_cast<uint64_t>(trial));
        const DateTime dob = uniform_datetime(
            rng, datetime_from_civil(1920, 1, 1),
            datetime_from_civil(1990, 1, 1));
        const int count = static_cast<int>(uniform_int(rng, 1, 10));
        const AdmissionSchedule sched =
            schedule_admissions(rng, dob, count, params);

        REQUIRE(!sched.stays.empty());
        CHECK(static_cast<int>(sched.stays.size()) + sched.dropped == count);
        DateTime prev_end = 0;
        bool first = true;
        for (const auto& [start, end] : sched.stays) {
            CHECK(start >= dob + offset);
            CHECK(end <= params.cutoff_date);
            const std::int64_t los_seconds = end - start;
            CHECK(los_seconds % kSecondsPerDay == 0);
            const int los_days =
                static_cast<int>(los_seconds / kSecondsPerDay);
            CHECK(los_days >= params.los_days_min);
            CHECK(los_days <= params.los_days_max);
            if (!first) CHECK(start > prev_end);
            prev_end = end;
            first = false;
        }
    }
}

TEST_CASE("tight windows drop extra admissions but never the last one") {
    GenerationParams params;
    // Roughly 70 days of start space cannot hold ten 1-20 day stays.
    params.cutoff_date = datetime_from_civil(1991, 4, 1);
    const DateTime dob = datetime_from_civil(1990, 1, 1);

    int total_dropped = 0;
    for (int trial = 0; trial < 500; ++trial) {
        RngStream rng = stream_for_patient(14, static_cast<uint64_t>(trial));
        const AdmissionSchedule sched =
            schedule_admissions(rng, dob, 10, params);
        REQUIRE(sched.stays.size() >= 1);
        total_dropped += sched.dropped;
        DateTime prev_end = 0;
        bool first = true;
        for (const auto& [start, end] : sched.stays) {
            CHECK(end <= params.cutoff_date);
            if (!first) CHECK(start > prev_end);
            prev_end = end;
            first = false;
        }
    }
    CHECK(total_dropped > 0);
}

TEST_CASE("diagnoses come only from the unrestricted catalog subset") {
    const ConfigSet cfg = defaults();
    const PatientGenerator gen(cfg);
    RngStream rng = stream_for_patient(15, 0);
    for (int i = 0; i < 20000; ++i) {
        const std::size_t idx = gen.assign_diagnosis(rng);
        REQUIRE(idx < cfg.catalog.entries.size());
        CHECK(cfg.catalog.entries[idx].sex == SexRestriction::none);
    }

    const ConfigSet tiny = tiny_config(1.0, 0.0);
    const PatientGenerator tiny_gen(tiny);
    for (int i = 0; i < 100; ++i) {
        const std::size_t idx = tiny_gen.assign_diagnosis(rng);
        CHECK(tiny.catalog.entries[idx].code == "T01");
    }
}

TEST_CASE("patient-level category prevalence matches the closed form") {
    const double p = 0.3;
    ConfigSet cfg = tiny_config(p * 100.0, (1.0 - p) * 100.0);
    const PatientGenerator gen(cfg);

    constexpr int kPatients = 5000;
    int with_tag = 0;
    for (int i = 0; i < kPatients; ++i) {
        const Patient patient = gen.generate(static_cast<uint64_t>(i));
        bool tagged = false;
        for (const Admission& adm : patient.admissions)
            tagged = tagged ||
                     cfg.catalog.entries[adm.complaint_index].code == "T01";
        with_tag += tagged;
    }
    const double observed = static_cast<double>(with_tag) / kPatients;
    const double expected =
        prevalence_expected(p, cfg.params.admission_count_dist);
    const double se = std::sqrt(expected * (1 - expected) / kPatients);
    INFO("observed ", observed, " expected ", expected, " se ", se);
    CHECK(std::abs(observed - expected) < 4 * se);
}

TEST_CASE("per-admission labs stay inside their ranges and windows") {
    const ConfigSet cfg = defaults();
    const PatientGenerator gen(cfg);
    RngStream rng = stream_for_patient(16, 0);
    const DateTime start = datetime_from_civil(2003, 5, 2, 8, 30, 0);
    const DateTime end = start + 3 * kSecondsPerDay;

    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<LabResult> labs = gen.generate_labs(rng, start, end);
        // With K = 16 over 35 types, between 35 and 560 rows.
        CHECK(labs.size() >= cfg.labs.size());
        CHECK(labs.size() <=
              cfg.labs.size() *
                  static_cast<std::size_t>(cfg.params.labs_per_type_max));
        std::uint32_t prev_type = 0;
        DateTime prev_time = 0;
        for (const LabResult& lab : labs) {
            const LabSpec& spec = cfg.labs[lab.lab_index];
            CHECK(lab.value >= spec.min_value);
            CHECK(lab.value <= spec.max_value);
            CHECK(lab.taken_at >= start);
            CHECK(lab.taken_at <= end);
            // Lab-table order, time-sorted within a type.
            CHECK(lab.lab_index >= prev_type);
            if (lab.lab_index == prev_type && prev_time != 0)
                CHECK(lab.taken_at >= prev_time);
            prev_type = lab.lab_index;
            prev_time = lab.taken_at;
        }
    }
}

TEST_CASE("labs_per_type_max of one forces exactly one row per type") {
    ConfigSet cfg = defaults();
    cfg.params.labs_per_type_max = 1;
    const PatientGenerator gen(cfg);
    const Patient p = gen.generate(0);
    for (const Admission& adm : p.admissions)
        CHECK(adm.labs.size() == cfg.labs.size());
}

TEST_CASE("generation is a pure function of seed and index") {
    const ConfigSet cfg = defaults();
    const PatientGenerator gen(cfg);
    const Patient a = gen.generate(123);
    const Patient b = gen.generate(123);
    CHECK(a.id == b.id);
    CHECK(a.gender == b.gender);
    CHECK(a.date_of_birth == b.date_of_birth);
    CHECK(a.poverty_pct == b.poverty_pct);
    REQUIRE(a.admissions.size() == b.admissions.size());
    for (std::size_t i = 0; i < a.admissions.size(); ++i) {
        CHECK(a.admissions[i].start == b.admissions[i].start);
        CHECK(a.admissions[i].end == b.admissions[i].end);
        CHECK(a.admissions[i].complaint_index ==
              b.admissions[i].complaint_index);
        REQUIRE(a.admissions[i].labs.size() == b.admissions[i].labs.size());
        for (std::size_t j = 0; j < a.admissions[i].labs.size(); ++j) {
            CHECK(a.admissions[i].labs[j].value ==
                  b.admissions[i].labs[j].value);
            CHECK(a.admissions[i].labs[j].taken_at ==
                  b.admissions[i].labs[j].taken_at);
        }
    }
}

TEST_CASE("patient identifiers are well-formed and collision-free") {
    std::set<std::string> ids;
    for (std::uint64_t i = 0; i < 100000; ++i) {
        RngStream rng = stream_for_patient(0, i);
        const std::uint64_t hi = rng.next_u64();
        const std::uint64_t lo = rng.next_u64();
        const std::string id = format_patient_id(hi, lo);
        REQUIRE(id.size() == 36);
        CHECK(id[8] == '-');
        CHECK(id[13] == '-');
        CHECK(id[18] == '-');
        CHECK(id[23] == '-');
        ids.insert(id);
    }
    CHECK(ids.size() == 100000);
}

TEST_CASE("for_each_patient yields index order for any worker count") {
    ConfigSet cfg = tiny_config(50.0, 50.0);
    cfg.params.master_seed = 77;

    const auto collect = [&](unsigned workers) {
        std::vector<std::string> ids;
        for_each_patient(cfg, 200, workers, [&](const Patient& p) {
            ids.push_back(p.id);
        });
        return ids;
    };
    const std::vector<std::string> serial = collect(1);
    REQUIRE(serial.size() == 200);

    const PatientGenerator gen(cfg);
    for (std::size_t i = 0; i < serial.size(); ++i)
        CHECK(serial[i] == gen.generate(i).id);

    CHECK(collect(4) == serial);
    CHECK(collect(8) == serial);

    std::size_t calls = 0;
    for_each_patient(cfg, 0, 4, [&](const Patient&) { ++calls; });
    CHECK(calls == 0);
}
