#pragma once

#include "volalab/params.hpp"

#include <string>
#include <vector>

namespace volalab {

struct CsvOptions {
    /// Column name (with a header) or 0-based index.
    std::string column = "value";
    bool header = true;
    /// Optional date-label column, name or index; empty for none.
    std::string date_column;
};

/// Comma-separated, "." decimals, no quoting beyond stripping surrounding double quotes.
Series load_series_csv(const std::string& path, const CsvOptions& opts = {});

/// Writes an optional `date` column then `value`, 17 significant digits.
void write_series_csv(const std::string& path, const Series& series);

/// scale * (log P_t - log P_{t-1}); length n - 1.
Series prices_to_log_returns(const Series& prices, double scale = 100.0);

struct FlooredSeries {
    Series series;
    std::size_t count_floored = 0;
};
/// Replaces |e_t| < floor by a sign-preserving floor; zero becomes +floor.
FlooredSeries floor_small_returns(const Series& eps, double floor = 1e-8);

struct DurationRecord {
    double x = 1.0;
    int y = 1;

    void validate() const;
};

/// e_t = sqrt(x_t) y_t, which follows a log-GARCH when (x, y) follows the asymmetric log-ACD.
Series acd_transform(const std::vector<DurationRecord>& records);

/// Two columns `duration,direction` (header optional).
std::vector<DurationRecord> load_durations_csv(const std::string& path, bool header = true);
void write_durations_csv(const std::string& path, const std::vector<DurationRecord>& records);

/// Shortest round-trip decimal form of a double (17 significant digits).
std::string format_double(double v);

} // namespace volalab
