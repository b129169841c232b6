#pragma once

#include "volalab/params.hpp"

#include <vector>

namespace volalab {

inline constexpr double kDefaultFloor = 1e-8;

/**
 * Filtered log-volatility log s~2_t(theta), t = 1..n, of the log-GARCH
 * recursion driven by the observed returns. Each |e_t| is floored at
 * `floor` before taking logs; a return of exactly zero counts as positive.
 */
VolPath filter_log_garch(const LogGarchParams& params, const Series& eps,
                         const InitPolicy& init = InitPolicy::sample_variance(), double floor = kDefaultFloor);

/**
 * Filtered EGARCH log-volatility: eta^_t = e_t / s~_t is fed back into the
 * recursion. Runs even when the parameters fail the invertibility check
 * (the returned path carries a warning flag); throws NumericDegeneracy if
 * s~_t reaches 0 or infinity.
 */
VolPath filter_egarch(const EgarchParams& params, const Series& eps,
                      const InitPolicy& init = InitPolicy::sample_variance());

/// ARMA(r,q) form of a symmetric log-GARCH in log sigma^2, driven by v_t = log eta_t^2.
struct ArmaRepresentation {
    std::vector<double> ar;  // alpha_i + beta_i, i = 1..r
    std::vector<double> ma;  // alpha_i, i = 1..q
    double intercept = 0.0;
};
ArmaRepresentation arma_representation(const LogGarchParams& params);

/// True iff all roots of 1 - sum_j beta_j z^j lie outside |z| <= 1 + 1e-10.
bool lag_poly_roots_outside(const std::vector<double>& beta);

/**
 * EGARCH invertibility check. Always requires delta_k >= |gamma_k|. For
 * p = l = 1 it also evaluates, with X_t = (gamma e_{t-1} + delta |e_{t-1}|)/2 * exp(-omega/(2(1-beta))),
 *   sum      = sum_t log[max{beta, X_t} - beta]    (must be negative; -inf when some X_t <= beta)
 *   strict   = sum_t log max{beta, X_t - beta}     (bound on the filter's contraction)
 * `sum_condition` uses the first form; the strict form is reported and can be
 * enforced on request. For higher orders the beta polynomial root condition
 * stands in, flagged as heuristic.
 */
struct EgarchInvertibility {
    bool delta_dominates = false;
    bool sum_condition = false;
    double sum = 0.0;
    bool strict_condition = false;
    double strict_sum = 0.0;
    bool heuristic = false;
    [[nodiscard]] bool ok() const noexcept { return delta_dominates && sum_condition; }
    [[nodiscard]] bool strict_ok() const noexcept { return delta_dominates && strict_condition; }
};
EgarchInvertibility egarch_invertibility_constraint(const EgarchParams& params, const std::vector<double>& eps);

} // namespace volalab
