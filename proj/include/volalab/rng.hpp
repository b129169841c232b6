#pragma once

#include <cstdint>
#include <random>

namespace volalab {

/// SplitMix64 finalizer; also used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/**
 * @brief Seeded random stream.
 *
 * A stream is identified by (seed, stream id). Replication k of a Monte
 * Carlo run always uses stream k, so results do not depend on which thread
 * ran which replication.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Child stream derived from this stream's identity, not its state.
    [[nodiscard]] Rng split(std::uint64_t child) const;

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    double exponential() { return exponential_(engine_); }
    double student_t(double nu);
    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64& engine() noexcept { return engine_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::exponential_distribution<double> exponential_{1.0};
};

} // namespace volalab
