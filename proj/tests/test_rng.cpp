#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "rng.hpp"

using namespace emrsim;

namespace {

// Reference splitmix64, written straight from the published algorithm
// (Steele, Lea & Flood; public-domain constants). Kept independent of the
// library implementation on purpose.
struct ReferenceSplitmix {
    std::uint64_t x;
    std::uint64_t next() {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        return z;
    }
};

// Upper chi-square quantile via the Wilson-Hilferty transform.
double chi_square_critical(int df, double z_alpha) {
    const double a = 2.0 / (9.0 * df);
    const double t = 1.0 - a + z_alpha * std::sqrt(a);
    return df * t * t * t;
}

}  // namespace

TEST_CASE("patient streams match the reference splitmix64 sequence") {
    for (const auto& [seed, index] :
         std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {0, 0}, {0, 1}, {42, 7}, {0xDEADBEEF, 99999}}) {
        RngStream stream = stream_for_patient(seed, index);
        ReferenceSplitmix ref{stream.state()};
        for (int i = 0; i < 10000; ++i) {
            REQUIRE(stream.next_u64() == ref.next());
        }
    }
}

TEST_CASE("stream derivation is deterministic and index-sensitive") {
    RngStream a = stream_for_patient(123, 456);
    RngStream b = stream_for_patient(123, 456);
    CHECK(a.state() == b.state());
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // Master seed 0, index 0 mixes to the zero state.
    CHECK(stream_for_patient(0, 0).state() == 0);

    std::set<std::uint64_t> first_draws;
    for (std::uint64_t i = 0; i < 10000; ++i)
        first_draws.insert(stream_for_patient(7, i).next_u64());
    CHECK(first_draws.size() == 10000);  // no collisions across indices
}

TEST_CASE("next_unit maps the top 53 bits into [0, 1)") {
    CHECK(static_cast<double>(std::uint64_t{0} >> 11) * 0x1.0p-53 == 0.0);
    CHECK(static_cast<double>(~std::uint64_t{0} >> 11) * 0x1.0p-53 < 1.0);

    RngStream rng = stream_for_patient(1, 0);
    double sum = 0.0;
    double lo = 1.0, hi = 0.0;
    constexpr int kDraws = 1'000'000;
    for (int i = 0; i < kDraws; ++i) {
        const double u = rng.next_unit();
        sum += u;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    const double mean = sum / kDraws;
    CHECK(mean > 0.499);  // 3 sigma of a uniform mean at 1e6 draws
    CHECK(mean < 0.501);
}

TEST_CASE("uniform_int covers its range with the right mean") {
    RngStream rng = stream_for_patient(2, 0);

    for (int i = 0; i < 100; ++i) CHECK(uniform_int(rng, 7, 7) == 7);

    double sum = 0.0;
    bool hit_lo = false, hit_hi = false;
    constexpr int kDraws = 1'000'000;
    for (int i = 0; i < kDraws; ++i) {
        const std::int64_t v = uniform_int(rng, 1, 20);
        REQUIRE(v >= 1);
        REQUIRE(v <= 20);
        hit_lo = hit_lo || v == 1;
        hit_hi = hit_hi || v == 20;
        sum += static_cast<double>(v);
    }
    const double mean = sum / kDraws;
    CHECK(mean > 10.45);
    CHECK(mean < 10.55);
    CHECK(hit_lo);
    CHECK(hit_hi);

    for (int i = 0; i < 1000; ++i) {
        const std::int64_t v = uniform_int(rng, 1, 10);
        REQUIRE(v >= 1);
        REQUIRE(v <= 10);
    }

    CHECK_THROWS_AS(uniform_int(rng, 3, 2), std::invalid_argument);
}

TEST_CASE("uniform_int hits both endpoints for every small range") {
    RngStream rng = stream_for_patient(3, 0);
    for (const auto& [lo, hi] : std::vector<std::pair<int, int>>{
             {0, 1}, {-5, 5}, {1, 16}, {100, 999}}) {
        bool hit_lo = false, hit_hi = false;
        for (int i = 0; i < 100000; ++i) {
            const std::int64_t v = uniform_int(rng, lo, hi);
            hit_lo = hit_lo || v == lo;
            hit_hi = hit_hi || v == hi;
        }
        CHECK(hit_lo);
        CHECK(hit_hi);
    }
}

TEST_CASE("pick_weighted follows configured weights") {
    RngStream rng = stream_for_patient(4, 0);

    const std::vector<double> single{100.0};
    for (int i = 0; i < 100; ++i)
        CHECK(pick_weighted_index(rng, single.size(), [&](std::size_t j) {
                  return single[j];
              }) == 0);

    // Zero-weight levels are never selected.
    const std::vector<double> with_zero{0.0, 5.0, 0.0, 5.0};
    for (int i = 0; i < 10000; ++i) {
        const std::size_t p = pick_weighted_index(
            rng, with_zero.size(),
            [&](std::size_t j) { return with_zero[j]; });
        CHECK((p == 1 || p == 3));
    }

    const std::vector<double> gender{48.0, 52.0};  // male, female
    int female = 0;
    constexpr int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i)
        female += pick_weighted_index(rng, gender.size(), [&](std::size_t j) {
                      return gender[j];
                  }) == 1;
    const double female_frac = static_cast<double>(female) / kDraws;
    CHECK(female_frac > 0.515);
    CHECK(female_frac < 0.525);

    const std::vector<double> ethnicity{15.0, 23.0, 49.0, 13.0};
    std::vector<int> counts(4, 0);
    for (int i = 0; i < kDraws; ++i)
        ++counts[pick_weighted_index(rng, ethnicity.size(),
                                     [&](std::size_t j) {
                                         return ethnicity[j];
                                     })];
    for (std::size_t level = 0; level < ethnicity.size(); ++level) {
        const double p = ethnicity[level] / 100.0;
        const double got = static_cast<double>(counts[level]) / kDraws;
        const double bound = 3.0 * std::sqrt(p * (1 - p) / kDraws);
        CHECK(std::abs(got - p) < bound + 1e-12);
    }

    const std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(pick_weighted_index(
                        rng, zeros.size(),
                        [&](std::size_t j) { return zeros[j]; }),
                    std::invalid_argument);
}

TEST_CASE("uniform_datetime stays inside its window") {
    RngStream rng = stream_for_patient(5, 0);
    const DateTime t = datetime_from_civil(2000, 6, 15, 12, 0, 0);
    for (int i = 0; i < 100; ++i) CHECK(uniform_datetime(rng, t, t + 1) == t);

    const DateTime lo = datetime_from_civil(1940, 1, 1);
    const DateTime hi = datetime_from_civil(1950, 1, 1);
    double sum = 0.0;
    constexpr int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i) {
        const DateTime v = uniform_datetime(rng, lo, hi);
        REQUIRE(v >= lo);
        REQUIRE(v < hi);
        sum += static_cast<double>(v - lo);
    }
    const double span = static_cast<double>(hi - lo);
    const double mean_offset = sum / kDraws;
    CHECK(std::abs(mean_offset - span / 2) < 0.02 * span);

    CHECK_THROWS_AS(uniform_datetime(rng, hi, lo), std::invalid_argument);
    CHECK_THROWS_AS(uniform_datetime(rng, lo, lo), std::invalid_argument);
}

TEST_CASE("first draws of consecutive streams pass a uniformity test") {
    // Chi-square goodness of fit, 100 bins, alpha = 0.001.
    const double critical = chi_square_critical(99, 3.0902);
    for (const std::uint64_t seed : {0ULL, 42ULL, 0x1234567890ULL}) {
        constexpr int kStreams = 10000;
        constexpr int kBins = 100;
        std::vector<int> bins(kBins, 0);
        for (int i = 0; i < kStreams; ++i) {
            RngStream s = stream_for_patient(seed, static_cast<uint64_t>(i));
            const int b = static_cast<int>(s.next_unit() * kBins);
            ++bins[b < kBins ? b : kBins - 1];
        }
        const double expected = static_cast<double>(kStreams) / kBins;
        double chi2 = 0.0;
        for (int b = 0; b < kBins; ++b) {
            const double d = bins[b] - expected;
            chi2 += d * d / expected;
        }
        INFO("seed ", seed, " chi2 ", chi2, " critical ", critical);
        CHECK(chi2 < critical);
    }
}
