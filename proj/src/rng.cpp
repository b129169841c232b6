#include "volalab/rng.hpp"

#include <cmath>

namespace volalab {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

Rng Rng::split(std::uint64_t child) const {
    return Rng(splitmix64(seed_ ^ (stream_ * 0xD1B54A32D192ED03ULL)), child);
}

double Rng::student_t(double nu) {
    // Z / sqrt(chi2_nu / nu), chi2 drawn as a gamma variate.
    std::gamma_distribution<double> chi(0.5 * nu, 2.0);
    const double z = normal();
    return z / std::sqrt(chi(engine_) / nu);
}

} // namespace volalab
