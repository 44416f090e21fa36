#pragma once

#include <cstdint>

namespace collapsim {

// Deterministic random stream: xoshiro256** seeded through SplitMix64 from
// (seed, stream_id). Identical (seed, stream_id) reproduce identical draws
// bit-for-bit on any platform, independent of the standard library's
// distribution implementations. Distinct stream_ids give statistically
// independent streams, so trajectory ensembles can be farmed out to workers
// with stream_id = trajectory index.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    double uniform();                       // [0, 1)
    double normal();                        // N(0, 1), Box-Muller
    double normal(double mean, double stddev);
    double exponential(double rate);        // mean 1/rate
    bool bernoulli(double p);

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace collapsim
