#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <random>

namespace hedgefit {

// Seeded Gaussian stream. The engine is mt19937_64 (bit-exact everywhere) and
// the normal transform is an explicit Box-Muller, so a (seed, stream_id) pair
// replays identically across platforms. Streams with distinct ids are
// statistically independent.
class NoiseStream {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

    NoiseStream(std::uint64_t seed, std::uint64_t stream_id);

    // One standard normal draw.
    double normal();

    // n independent N(0, stddev^2) draws.
    std::vector<double> normal_vector(std::size_t n, double stddev);

    // Engine + cache state as text, for checkpointing.
    std::string save_state() const;
    void restore_state(const std::string& state);

private:
    double uniform_open01();

    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace hedgefit
