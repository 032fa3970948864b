#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "batopt/rng.hpp"

namespace batopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Value returned by objectives for points they cannot evaluate.
inline constexpr double infeasible = std::numeric_limits<double>::infinity();

class dimension_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class parameter_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what)
{
    if (got != want) {
        throw dimension_error(std::string(what) + ": expected dimension " + std::to_string(want) +
                              ", got " + std::to_string(got));
    }
}

/// Axis-aligned box [lower, upper] in R^dim.
class SearchSpace
{
public:
    SearchSpace(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper))
    {
        if (lower_.size() < 1) {
            throw parameter_error("SearchSpace: dimension must be at least 1");
        }
        require_dim(upper_.size(), lower_.size(), "SearchSpace upper bound");
        for (Eigen::Index j = 0; j < lower_.size(); ++j) {
            if (!(lower_[j] < upper_[j])) {
                throw parameter_error("SearchSpace: lower[" + std::to_string(j) +
                                      "] must be strictly below upper");
            }
        }
    }

    /// Same interval [lo, hi] on every coordinate.
    static SearchSpace cube(Eigen::Index dim, double lo, double hi)
    {
        if (dim < 1) {
            throw parameter_error("SearchSpace: dimension must be at least 1");
        }
        return SearchSpace(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
    }

    Eigen::Index dim() const noexcept { return lower_.size(); }
    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }
    Vector width() const { return upper_ - lower_; }

    bool contains(const Vector& x) const
    {
        return x.size() == dim() && (x.array() >= lower_.array()).all() &&
               (x.array() <= upper_.array()).all();
    }

private:
    Vector lower_;
    Vector upper_;
};

/// Scalar objective to be minimized over a box. `evaluate` must be pure.
struct Objective
{
    SearchSpace space;
    std::function<double(const Vector&)> evaluate;
    std::string name = "objective";

    double operator()(const Vector& x) const
    {
        require_dim(x.size(), space.dim(), "Objective");
        const double value = evaluate(x);
        return std::isnan(value) ? infeasible : value;
    }
};

/// Wraps a function to be maximized as a minimization objective.
inline Objective maximize(SearchSpace space, std::function<double(const Vector&)> f,
                          std::string name = "objective")
{
    return Objective{std::move(space),
                     [f = std::move(f)](const Vector& x) { return -f(x); }, std::move(name)};
}

struct TracePoint
{
    std::size_t iteration = 0;
    double best_f = infeasible;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct RunResult
{
    Vector best_x;
    double best_f = infeasible;
    std::vector<TracePoint> trace;
    std::size_t evals = 0;
    std::uint64_t seed = 0;
};

inline Vector clamp_to_bounds(const Vector& x, const SearchSpace& space)
{
    require_dim(x.size(), space.dim(), "clamp_to_bounds");
    return x.cwiseMax(space.lower()).cwiseMin(space.upper());
}

/// n points drawn independently and uniformly in the box.
inline std::vector<Vector> init_positions(const SearchSpace& space, std::size_t n, RngStream rng)
{
    if (n < 1) {
        throw parameter_error("init_positions: n must be at least 1");
    }
    std::vector<Vector> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(space.dim());
        for (Eigen::Index j = 0; j < space.dim(); ++j) {
            x[j] = rng.uniform(space.lower()[j], space.upper()[j]);
        }
        points.push_back(clamp_to_bounds(x, space));
    }
    return points;
}

} // namespace batopt
