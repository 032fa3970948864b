#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "batopt/glm.hpp"
#include "batopt/hawkes.hpp"
#include "batopt/logbinomial.hpp"
#include "batopt/markov_renewal.hpp"

namespace batopt::bench {

enum class Schema { glm, grouped_binomial, multistate, events };

inline std::string_view to_string(Schema s)
{
    switch (s) {
    case Schema::glm: return "glm";
    case Schema::grouped_binomial: return "grouped-binomial";
    case Schema::multistate: return "multistate";
    case Schema::events: return "events";
    }
    return "unknown";
}

inline Schema schema_from(std::string_view name)
{
    if (name == "glm") return Schema::glm;
    if (name == "grouped-binomial") return Schema::grouped_binomial;
    if (name == "multistate") return Schema::multistate;
    if (name == "events") return Schema::events;
    throw parameter_error("unknown dataset schema '" + std::string(name) + "'");
}

class csv_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using DatasetValue = std::variant<GlmDataset, GroupedBinomialDataset, MultiStateDataset, EventSequence>;

struct LoadedDataset
{
    Schema schema = Schema::glm;
    DatasetValue value;
    std::vector<std::string> columns;
    std::size_t rows = 0;
    /// Coefficient names implied by the covariate columns (intercept first
    /// for glm and grouped-binomial).
    std::vector<std::string> coef_names;

    std::string report() const
    {
        std::ostringstream out;
        out << to_string(schema) << ": " << rows << " rows, " << columns.size() << " columns (";
        for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
        out << ")";
        return out.str();
    }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> comments;
};

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (cell.empty() || used != cell.size() || !std::isfinite(value)) {
        throw csv_error("malformed numeric cell '" + cell + "' at row " + std::to_string(row) + ", column " +
                        std::to_string(col));
    }
    return value;
}

/// Header row plus numeric rows; `#` lines are collected as comments.
/// Row numbers in errors count data rows from 1.
inline Table read_table(std::istream& in)
{
    Table table;
    std::string line;
    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            table.comments.push_back(t);
            continue;
        }
        if (table.header.empty()) {
            table.header = split(t);
            continue;
        }
        ++data_row;
        auto cells = split(t);
        if (cells.size() != table.header.size()) {
            throw csv_error("row " + std::to_string(data_row) + " has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(table.header.size()));
        }
        std::vector<double> values;
        values.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) values.push_back(parse_cell(cells[c], data_row, c + 1));
        table.rows.push_back(std::move(values));
    }
    if (table.header.empty()) throw csv_error("empty file: no header row");
    return table;
}

inline void expect_prefix(const Table& t, const std::vector<std::string>& prefix, std::size_t min_extra,
                          Schema schema)
{
    bool ok = t.header.size() >= prefix.size() + min_extra;
    for (std::size_t i = 0; ok && i < prefix.size(); ++i) ok = t.header[i] == prefix[i];
    if (!ok) {
        std::string want;
        for (const auto& p : prefix) want += p + ",";
        throw csv_error("header does not match schema " + std::string(to_string(schema)) + " (expected " + want +
                        "<covariates>)");
    }
    if (t.rows.empty()) throw csv_error("no data rows");
}

inline std::vector<std::string> covariate_names(const Table& t, std::size_t first, bool intercept)
{
    std::vector<std::string> names;
    if (intercept) names.emplace_back("intercept");
    for (std::size_t c = first; c < t.header.size(); ++c) names.push_back(t.header[c]);
    return names;
}

inline Matrix design_with_intercept(const Table& t, std::size_t first)
{
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    const auto k = static_cast<Eigen::Index>(t.header.size() - first) + 1;
    Matrix X(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < k; ++j) X(i, j) = t.rows[static_cast<std::size_t>(i)][first + j - 1];
    }
    return X;
}

} // namespace detail

/// Parses one of the four dataset schemas from a stream. An intercept column
/// is prepended to glm and grouped-binomial designs.
inline LoadedDataset parse_csv_dataset(std::istream& in, Schema schema)
{
    LoadedDataset out;
    out.schema = schema;
    if (schema == Schema::events) {
        std::stringstream buffer;
        buffer << in.rdbuf();
        if (buffer.str().find_first_not_of(" \t\r\n") == std::string::npos) throw csv_error("empty file");
        try {
            auto events = read_events_csv(buffer);
            out.rows = events.size();
            out.value = std::move(events);
        } catch (const parameter_error& e) {
            throw csv_error(e.what());
        }
        out.columns = {"t"};
        out.coef_names = {"nu", "alpha", "beta"};
        return out;
    }

    const auto t = detail::read_table(in);
    out.columns = t.header;
    out.rows = t.rows.size();
    try {
        switch (schema) {
        case Schema::glm: {
            detail::expect_prefix(t, {"y"}, 0, schema);
            GlmDataset data{detail::design_with_intercept(t, 1), Vector(static_cast<Eigen::Index>(t.rows.size()))};
            for (std::size_t i = 0; i < t.rows.size(); ++i) data.y[static_cast<Eigen::Index>(i)] = t.rows[i][0];
            data.validate(GlmFamily::poisson);
            out.coef_names = detail::covariate_names(t, 1, true);
            out.value = std::move(data);
            break;
        }
        case Schema::grouped_binomial: {
            detail::expect_prefix(t, {"y", "m"}, 0, schema);
            const auto n = static_cast<Eigen::Index>(t.rows.size());
            Vector y(n), m(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                y[i] = t.rows[static_cast<std::size_t>(i)][0];
                m[i] = t.rows[static_cast<std::size_t>(i)][1];
            }
            out.coef_names = detail::covariate_names(t, 2, true);
            out.value = GroupedBinomialDataset(detail::design_with_intercept(t, 2), std::move(m), std::move(y));
            break;
        }
        case Schema::multistate: {
            detail::expect_prefix(t, {"id", "from", "to", "sojourn"}, 1, schema);
            int declared = 0;
            for (const auto& c : t.comments) {
                auto pos = c.find("states=");
                if (pos != std::string::npos) declared = std::stoi(c.substr(pos + 7));
            }
            int max_state = 0;
            std::vector<SojournRecord> records;
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                const auto& r = t.rows[i];
                for (std::size_t c = 0; c < 3; ++c) {
                    if (r[c] != std::floor(r[c])) {
                        throw csv_error("non-integer id/state at row " + std::to_string(i + 1) + ", column " +
                                        std::to_string(c + 1));
                    }
                }
                SojournRecord rec{static_cast<long>(r[0]), static_cast<int>(r[1]), static_cast<int>(r[2]), r[3],
                                  Vector(static_cast<Eigen::Index>(r.size() - 4))};
                for (std::size_t c = 4; c < r.size(); ++c) rec.z[static_cast<Eigen::Index>(c - 4)] = r[c];
                max_state = std::max({max_state, rec.from, rec.to});
                records.push_back(std::move(rec));
            }
            out.coef_names = detail::covariate_names(t, 4, false);
            out.value = MultiStateDataset(declared > 0 ? declared : max_state, std::move(records));
            break;
        }
        case Schema::events: break;
        }
    } catch (const parameter_error& e) {
        throw csv_error(e.what());
    } catch (const dimension_error& e) {
        throw csv_error(e.what());
    }
    return out;
}

inline LoadedDataset load_csv_dataset(const std::string& path, Schema schema)
{
    std::ifstream in(path);
    if (!in) throw csv_error("cannot open dataset '" + path + "'");
    try {
        return parse_csv_dataset(in, schema);
    } catch (const csv_error& e) {
        throw csv_error(path + ": " + e.what());
    }
}

} // namespace batopt::bench
