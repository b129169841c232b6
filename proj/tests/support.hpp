#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace volalab::testing {

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;
};

// Batch-means estimate of a mean and its standard error for a dependent sequence.
inline MeanEstimate batch_means(std::span<const double> x, std::size_t batches = 50) {
    const std::size_t len = x.size() / batches;
    std::vector<double> b(batches, 0.0);
    for (std::size_t k = 0; k < batches; ++k) {
        for (std::size_t i = 0; i < len; ++i) b[k] += x[k * len + i];
        b[k] /= static_cast<double>(len);
    }
    double m = 0.0;
    for (double v : b) m += v;
    m /= static_cast<double>(batches);
    double s2 = 0.0;
    for (double v : b) s2 += (v - m) * (v - m);
    s2 /= static_cast<double>(batches - 1);
    return {m, std::sqrt(s2 / static_cast<double>(batches))};
}

inline double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

} // namespace volalab::testing
