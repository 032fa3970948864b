#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "batopt/bench/config.hpp"
#include "batopt/core.hpp"

namespace batopt::bench {

/// Mean and sample standard deviation; sd is 0 for a single value.
struct Summary
{
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    std::size_t count = 0;

    static Summary of(const std::vector<double>& values)
    {
        Summary s;
        s.count = values.size();
        if (values.empty()) return s;
        double sum = 0.0;
        for (double v : values) sum += v;
        s.mean = sum / static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
        return s;
    }
};

/// Outcome of one optimizer run.
struct Cell
{
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    Vector coef;
    double nll = infeasible;
    std::optional<double> l2;
    double seconds = 0.0;
    bool covariance_ok = false;
    Vector se;
};

struct ResultRow
{
    std::string optimizer;
    std::size_t runs = 0;
    std::size_t failures = 0;
    Summary nll;
    std::vector<Summary> params;
    std::optional<Summary> l2;
    Summary seconds;
    double best_nll = infeasible;
    Vector best_coef;
    std::vector<Cell> cells;
};

struct ResultTable
{
    std::string objective;
    std::vector<std::string> param_names;
    bool has_l2 = false;
    std::vector<ResultRow> rows;
};

inline ResultRow summarize_cells(std::string optimizer, std::vector<Cell> cells, std::size_t num_params)
{
    ResultRow row;
    row.optimizer = std::move(optimizer);
    row.runs = cells.size();
    std::vector<double> nll, l2, secs;
    std::vector<std::vector<double>> params(num_params);
    for (const auto& c : cells) {
        if (!c.ok) {
            ++row.failures;
            continue;
        }
        nll.push_back(c.nll);
        secs.push_back(c.seconds);
        for (std::size_t j = 0; j < num_params && j < static_cast<std::size_t>(c.coef.size()); ++j) {
            params[j].push_back(c.coef[static_cast<Eigen::Index>(j)]);
        }
        if (c.l2) l2.push_back(*c.l2);
        if (c.nll < row.best_nll) {
            row.best_nll = c.nll;
            row.best_coef = c.coef;
        }
    }
    row.nll = Summary::of(nll);
    row.seconds = Summary::of(secs);
    for (auto& p : params) row.params.push_back(Summary::of(p));
    if (!l2.empty()) row.l2 = Summary::of(l2);
    row.cells = std::move(cells);
    return row;
}

namespace detail {

inline std::string fixed(double v, int precision)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    std::string s(buf);
    // avoid "-0.000"
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

inline std::string mean_sd(const Summary& s, int precision)
{
    return fixed(s.mean, precision) + " (" + fixed(s.sd, precision) + ")";
}

struct Column
{
    std::string header;
    std::vector<std::string> cells;
};

} // namespace detail

/// Renders the table. Column order: optimizer, runs, failures, nll, best_nll,
/// one column per parameter, l2 (if any), time (only with `with_timing`).
/// Timing is off by default so that emitted tables are reproducible.
inline std::string emit_table(const ResultTable& table, OutputFormat format, int precision = 4,
                              bool with_timing = false)
{
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        out << "optimizer,runs,failures,nll_mean,nll_sd,best_nll";
        for (const auto& p : table.param_names) out << ',' << p << "_mean," << p << "_sd";
        if (table.has_l2) out << ",l2_mean,l2_sd";
        if (with_timing) out << ",seconds_mean,seconds_sd";
        out << '\n';
        for (const auto& r : table.rows) {
            out << r.optimizer << ',' << r.runs << ',' << r.failures << ',' << detail::fixed(r.nll.mean, precision)
                << ',' << detail::fixed(r.nll.sd, precision) << ',' << detail::fixed(r.best_nll, precision);
            for (std::size_t j = 0; j < table.param_names.size(); ++j) {
                const Summary s = j < r.params.size() ? r.params[j] : Summary{};
                out << ',' << detail::fixed(s.mean, precision) << ',' << detail::fixed(s.sd, precision);
            }
            if (table.has_l2) {
                const Summary s = r.l2.value_or(Summary{});
                out << ',' << detail::fixed(s.mean, precision) << ',' << detail::fixed(s.sd, precision);
            }
            if (with_timing) {
                out << ',' << detail::fixed(r.seconds.mean, precision) << ','
                    << detail::fixed(r.seconds.sd, precision);
            }
            out << '\n';
        }
        return out.str();
    }

    std::vector<std::string> headers{"optimizer", "runs", "failures", "nll", "best_nll"};
    for (const auto& p : table.param_names) headers.push_back(p);
    if (table.has_l2) headers.emplace_back("l2");
    if (with_timing) headers.emplace_back("seconds");

    std::vector<std::vector<std::string>> body;
    for (const auto& r : table.rows) {
        std::vector<std::string> line{r.optimizer, std::to_string(r.runs), std::to_string(r.failures),
                                      detail::mean_sd(r.nll, precision), detail::fixed(r.best_nll, precision)};
        for (std::size_t j = 0; j < table.param_names.size(); ++j) {
            line.push_back(detail::mean_sd(j < r.params.size() ? r.params[j] : Summary{}, precision));
        }
        if (table.has_l2) line.push_back(detail::mean_sd(r.l2.value_or(Summary{}), precision));
        if (with_timing) line.push_back(detail::mean_sd(r.seconds, precision));
        body.push_back(std::move(line));
    }

    if (format == OutputFormat::markdown) {
        const auto row = [&](const std::vector<std::string>& cells) {
            out << '|';
            for (const auto& c : cells) out << ' ' << c << " |";
            out << '\n';
        };
        row(headers);
        out << '|';
        for (std::size_t i = 0; i < headers.size(); ++i) out << (i == 0 ? " :--- |" : " ---: |");
        out << '\n';
        for (const auto& line : body) row(line);
        return out.str();
    }

    std::vector<std::size_t> width(headers.size());
    for (std::size_t i = 0; i < headers.size(); ++i) {
        width[i] = headers[i].size();
        for (const auto& line : body) width[i] = std::max(width[i], line[i].size());
    }
    const auto row = [&](const std::vector<std::string>& cells) {
        std::string text;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text += "  ";
            const std::string pad(width[i] - cells[i].size(), ' ');
            text += i == 0 ? cells[i] + pad : pad + cells[i];
        }
        while (!text.empty() && text.back() == ' ') text.pop_back();
        out << text << '\n';
    };
    row(headers);
    for (const auto& line : body) row(line);
    return out.str();
}

} // namespace batopt::bench
