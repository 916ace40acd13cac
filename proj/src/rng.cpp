#include "hedgefit/rng.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "hedgefit/errors.hpp"

namespace hedgefit {

namespace {
// Distinct odd multipliers decorrelate stream keys that differ in one word.
std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream_id),
        static_cast<std::uint32_t>(stream_id >> 32), 0x9E3779B9u, 0x85EBCA6Bu};
    return std::mt19937_64(seq);
}
}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(keyed_engine(seed, stream_id)) {}

double NoiseStream::uniform_open01() {
    // (0, 1]: 53-bit mantissa, shifted away from zero.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NoiseStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform_open01();
    const double u2 = uniform_open01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

std::vector<double> NoiseStream::normal_vector(std::size_t n, double stddev) {
    std::vector<double> out(n);
    for (auto& v : out) v = stddev * normal();
    return out;
}

std::string NoiseStream::save_state() const {
    std::ostringstream os;
    // cached_ as raw bits so the round trip is exact
    os << engine_ << " " << has_cached_ << " "
       << std::bit_cast<std::uint64_t>(cached_);
    return os.str();
}

void NoiseStream::restore_state(const std::string& state) {
    std::istringstream is(state);
    std::uint64_t bits = 0;
    is >> engine_ >> has_cached_ >> bits;
    if (is.fail()) throw DataError("corrupt noise stream state");
    cached_ = std::bit_cast<double>(bits);
}

}  // namespace hedgefit
