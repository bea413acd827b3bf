#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "date_time.hpp"

namespace emrsim {

/// Deterministic per-patient random substream (splitmix64).
///
/// Each patient owns an independent stream derived from
/// (master_seed, patient_index), so generation is bit-reproducible for any
/// worker count and individual patients can be regenerated in isolation.
/// A stream is single-owner; distinct streams need no coordination.
class RngStream {
  public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform real in [0, 1): top 53 bits of one 64-bit output.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

namespace detail {

// splitmix64 finalizer without the sequence increment.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Stream for one patient: a pure function of (master_seed, patient_index).
/// The index is spread by the 64-bit golden ratio before mixing so that
/// consecutive indices land far apart in state space.
inline RngStream stream_for_patient(std::uint64_t master_seed,
                                    std::uint64_t patient_index) {
    return RngStream(
        detail::mix64(master_seed ^ (patient_index * 0x9E3779B97F4A7C15ULL)));
}

/// Uniform integer in [lo, hi], one draw.
///
/// Scaled unit-real sampling, not rejection: the modulo-style bias is at most
/// 2^-43 for ranges up to ~2^10 values, far below anything observable here,
/// and it keeps the draws-per-record count fixed.
inline std::int64_t uniform_int(RngStream& rng, std::int64_t lo,
                                std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    const double span = static_cast<double>(hi - lo + 1);
    std::int64_t offset = static_cast<std::int64_t>(rng.next_unit() * span);
    if (offset > hi - lo) offset = hi - lo;
    return lo + offset;
}

/// Weighted pick by cumulative inversion of one unit draw.
/// Weights must be nonnegative with a positive total; selection probability
/// of item j is weight_j / sum(weights). Returns the chosen index.
template <typename WeightOf>
std::size_t pick_weighted_index(RngStream& rng, std::size_t count,
                                WeightOf&& weight_of) {
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double w = weight_of(i);
        if (w < 0.0)
            throw std::invalid_argument("pick_weighted: negative weight");
        total += w;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("pick_weighted: total weight is zero");
    const double u = rng.next_unit() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const double w = weight_of(i);
        if (w > 0.0) last_positive = i;
        acc += w;
        if (u < acc && w > 0.0) return i;
    }
    // Floating-point accumulation can leave u just at the top edge.
    return last_positive;
}

/// Uniform datetime in [lo, hi), 1-second resolution.
inline DateTime uniform_datetime(RngStream& rng, DateTime lo, DateTime hi) {
    if (lo >= hi) throw std::invalid_argument("uniform_datetime: lo >= hi");
    const double span = static_cast<double>(hi - lo);
    std::int64_t offset = static_cast<std::int64_t>(rng.next_unit() * span);
    if (offset >= hi - lo) offset = hi - lo - 1;
    return lo + offset;
}

}  // namespace emrsim
