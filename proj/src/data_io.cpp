#include "volalab/data_io.hpp"

#include "volalab/errors.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace volalab {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

bool is_index(const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

std::size_t resolve_column(const std::string& spec, const std::vector<std::string>& header, const std::string& path) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == spec) {
            return i;
        }
    }
    if (is_index(spec)) {
        return static_cast<std::size_t>(std::stoul(spec));
    }
    throw InvalidInput(path + ": column '" + spec + "' not found");
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line_no) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (!cell.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw InvalidInput(path + ": line " + std::to_string(line_no) + ": cannot parse '" + cell + "' as a number");
    }
    return v;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput(path + ": cannot open file");
    }
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidInput(path + ": cannot open file for writing");
    }
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Series load_series_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::size_t col = 0;
    std::optional<std::size_t> date_col;
    bool resolved = false;

    auto resolve = [&](const std::vector<std::string>& names) {
        col = resolve_column(opts.column, names, path);
        if (!opts.date_column.empty()) {
            date_col = resolve_column(opts.date_column, names, path);
        }
        resolved = true;
    };

    Series out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_line(line);
        if (!resolved) {
            if (opts.header) {
                header = cells;
                resolve(header);
                continue;
            }
            if (!is_index(opts.column) || (!opts.date_column.empty() && !is_index(opts.date_column))) {
                throw InvalidInput(path + ": without a header, columns must be given by index");
            }
            resolve({});
        }
        if (col >= cells.size()) {
            throw InvalidInput(path + ": line " + std::to_string(line_no) + ": missing column " + std::to_string(col));
        }
        out.values.push_back(parse_number(cells[col], path, line_no));
        if (date_col) {
            if (*date_col >= cells.size()) {
                throw InvalidInput(path + ": line " + std::to_string(line_no) + ": missing date column");
            }
            out.dates.push_back(cells[*date_col]);
        }
    }
    if (out.values.empty()) {
        throw InvalidInput(path + ": no data rows");
    }
    return out;
}

void write_series_csv(const std::string& path, const Series& series) {
    series.validate();
    std::ofstream out = open_output(path);
    const bool dated = !series.dates.empty();
    out << (dated ? "date,value\n" : "value\n");
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (dated) {
            out << series.dates[t] << ',';
        }
        out << format_double(series[t]) << '\n';
    }
}

Series prices_to_log_returns(const Series& prices, double scale) {
    if (prices.size() < 2) {
        throw InvalidInput("need at least two prices");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw InvalidInput("scale must be positive");
    }
    for (std::size_t t = 0; t < prices.size(); ++t) {
        if (!(prices[t] > 0.0)) {
            throw InvalidInput("nonpositive price at index " + std::to_string(t));
        }
    }
    Series out;
    out.values.reserve(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) {
        out.values.push_back(scale * (std::log(prices[t]) - std::log(prices[t - 1])));
    }
    if (!prices.dates.empty()) {
        out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    }
    return out;
}

FlooredSeries floor_small_returns(const Series& eps, double floor) {
    if (!(floor > 0.0)) {
        throw InvalidInput("floor must be positive");
    }
    FlooredSeries out{eps, 0};
    for (double& v : out.series.values) {
        if (std::abs(v) < floor) {
            v = v < 0.0 ? -floor : floor;
            ++out.count_floored;
        }
    }
    return out;
}

void DurationRecord::validate() const {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw InvalidInput("duration must be positive");
    }
    if (y != 1 && y != -1) {
        throw InvalidInput("direction must be +1 or -1");
    }
}

Series acd_transform(const std::vector<DurationRecord>& records) {
    Series out;
    out.values.reserve(records.size());
    for (const auto& r : records) {
        r.validate();
        out.values.push_back(std::sqrt(r.x) * r.y);
    }
    return out;
}

std::vector<DurationRecord> load_durations_csv(const std::string& path, bool header) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    std::size_t xc = 0, yc = 1;
    bool first = true;
    std::vector<DurationRecord> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_line(line);
        if (first && header) {
            first = false;
            xc = resolve_column("duration", cells, path);
            yc = resolve_column("direction", cells, path);
            continue;
        }
        first = false;
        if (cells.size() <= std::max(xc, yc)) {
            throw InvalidInput(path + ": line " + std::to_string(line_no) + ": expected duration and direction");
        }
        DurationRecord r{parse_number(cells[xc], path, line_no), 0};
        const double y = parse_number(cells[yc], path, line_no);
        r.y = y > 0.0 ? 1 : -1;
        if (y != 1.0 && y != -1.0) {
            throw InvalidInput(path + ": line " + std::to_string(line_no) + ": direction must be +1 or -1");
        }
        try {
            r.validate();
        } catch (const InvalidInput& e) {
            throw InvalidInput(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(r);
    }
    if (out.empty()) {
        throw InvalidInput(path + ": no data rows");
    }
    return out;
}

void write_durations_csv(const std::string& path, const std::vector<DurationRecord>& records) {
    std::ofstream out = open_output(path);
    out << "duration,direction\n";
    for (const auto& r : records) {
        out << format_double(r.x) << ',' << r.y << '\n';
    }
}

} // namespace volalab
