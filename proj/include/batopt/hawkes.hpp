#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "batopt/core.hpp"

namespace batopt {

/// Exponential-kernel Hawkes process: lambda(t) = nu + a sum exp(-b (t - t_i)).
struct HawkesParams
{
    double nu = 0.2;
    double a = 0.5;
    double b = 0.7;

    double branching_ratio() const { return a / b; }
    Vector to_vector() const { return Vector{{nu, a, b}}; }
    static HawkesParams from_vector(const Vector& x)
    {
        require_dim(x.size(), 3, "HawkesParams");
        return {x[0], x[1], x[2]};
    }
};

/// Strictly increasing event times in (0, horizon].
class EventSequence
{
public:
    EventSequence() = default;

    EventSequence(std::vector<double> times, double horizon) : times_(std::move(times)), horizon_(horizon)
    {
        if (!(horizon_ > 0.0)) throw parameter_error("EventSequence: horizon must be positive");
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!(times_[i] > 0.0) || times_[i] > horizon_) {
                throw parameter_error("EventSequence: event " + std::to_string(i) + " outside (0, T]");
            }
            if (i > 0 && !(times_[i] > times_[i - 1])) {
                throw parameter_error("EventSequence: times must be strictly increasing");
            }
        }
    }

    const std::vector<double>& times() const noexcept { return times_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

private:
    std::vector<double> times_;
    double horizon_ = 1.0;
};

/// Intensity from events strictly before t.
inline double hawkes_intensity(const HawkesParams& params, const EventSequence& events, double t)
{
    double excitation = 0.0;
    for (double ti : events.times()) {
        if (ti >= t) break;
        excitation += std::exp(-params.b * (t - ti));
    }
    return params.nu + params.a * excitation;
}

namespace detail {

inline bool hawkes_params_valid(const HawkesParams& p)
{
    return std::isfinite(p.nu) && std::isfinite(p.a) && std::isfinite(p.b) && p.nu > 0.0 && p.a >= 0.0 &&
           p.b > 0.0;
}

inline double hawkes_compensator(const HawkesParams& p, const EventSequence& events)
{
    const double T = events.horizon();
    double tail = 0.0;
    for (double ti : events.times()) tail += -std::expm1(-p.b * (T - ti));
    return p.nu * T + (p.a / p.b) * tail;
}

} // namespace detail

/// -log L in O(k) using R_i = exp(-b (t_i - t_{i-1})) (1 + R_{i-1}).
inline double hawkes_negloglik(const HawkesParams& params, const EventSequence& events)
{
    if (!detail::hawkes_params_valid(params)) return infeasible;
    const auto& t = events.times();
    double log_sum = 0.0;
    double R = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0) R = std::exp(-params.b * (t[i] - t[i - 1])) * (1.0 + R);
        log_sum += std::log(params.nu + params.a * R);
    }
    return detail::hawkes_compensator(params, events) - log_sum;
}

/// Same value as hawkes_negloglik by explicit summation over event pairs.
inline double hawkes_negloglik_direct(const HawkesParams& params, const EventSequence& events)
{
    if (!detail::hawkes_params_valid(params)) return infeasible;
    const auto& t = events.times();
    double log_sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double excitation = 0.0;
        for (std::size_t j = 0; j < i; ++j) excitation += std::exp(-params.b * (t[i] - t[j]));
        log_sum += std::log(params.nu + params.a * excitation);
    }
    return detail::hawkes_compensator(params, events) - log_sum;
}

/// Ogata thinning. Between events the intensity only decays, so its value
/// just after the current time bounds it until the next proposal.
inline EventSequence ogata_simulate(const HawkesParams& params, double horizon, RngStream rng)
{
    if (!(horizon > 0.0)) throw parameter_error("ogata_simulate: horizon must be positive");
    if (!detail::hawkes_params_valid(params)) throw parameter_error("ogata_simulate: invalid parameters");
    std::vector<double> times;
    double t = 0.0;
    double excitation = 0.0;  // sum of exp(-b (t - t_i)) at the current time
    while (true) {
        const double bound = params.nu + params.a * excitation;
        const double w = rng.exponential(bound);
        t += w;
        if (t > horizon) break;
        excitation *= std::exp(-params.b * w);
        const double lambda = params.nu + params.a * excitation;
        if (rng.uniform() * bound <= lambda) {
            times.push_back(t);
            excitation += 1.0;
        }
    }
    return EventSequence(std::move(times), horizon);
}

/// Mean squared componentwise error between estimate and truth.
inline double l2_error(const HawkesParams& est, const HawkesParams& truth)
{
    const double dn = est.nu - truth.nu;
    const double da = est.a - truth.a;
    const double db = est.b - truth.b;
    return (dn * dn + da * da + db * db) / 3.0;
}

/// Recovery search box: nu, a in [0.01, 1], b in [0.02, 2], with b <= a + 0.01
/// discouraged by a quadratic penalty.
inline SearchSpace hawkes_search_space()
{
    return SearchSpace(Vector{{0.01, 0.01, 0.02}}, Vector{{1.0, 1.0, 2.0}});
}

inline constexpr double hawkes_stationarity_margin = 0.01;

inline Objective hawkes_objective(EventSequence events, SearchSpace space = hawkes_search_space(),
                                  double penalty_weight = 1e4)
{
    require_dim(space.dim(), 3, "hawkes_objective");
    return Objective{std::move(space),
                     [events = std::move(events), penalty_weight](const Vector& x) {
                         const auto p = HawkesParams::from_vector(x);
                         const double gap = p.a + hawkes_stationarity_margin - p.b;
                         const double penalty = gap > 0.0 ? penalty_weight * gap * gap : 0.0;
                         return hawkes_negloglik(p, events) + penalty;
                     },
                     "hawkes"};
}

/// `# T=<horizon>`, a `t` header, then one time per line.
inline void write_events_csv(std::ostream& out, const EventSequence& events)
{
    out.precision(17);
    out << "# T=" << events.horizon() << "\nt\n";
    for (double t : events.times()) out << t << '\n';
}

inline EventSequence read_events_csv(std::istream& in)
{
    std::string line;
    double horizon = -1.0;
    bool header = false;
    std::vector<double> times;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("#", 0) == 0) {
            auto pos = line.find("T=");
            if (pos != std::string::npos) {
                try {
                    horizon = std::stod(line.substr(pos + 2));
                } catch (const std::exception&) {
                    throw parameter_error("events csv: bad horizon on line " + std::to_string(lineno));
                }
            }
            continue;
        }
        if (!header) {
            if (line != "t") throw parameter_error("events csv: expected header 't'");
            header = true;
            continue;
        }
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(line, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || line.find_first_not_of(" \t", used) != std::string::npos) {
            throw parameter_error("events csv: malformed time on line " + std::to_string(lineno) +
                                  ", column 1");
        }
        times.push_back(value);
    }
    if (!header) throw parameter_error("events csv: missing header");
    if (horizon <= 0.0) throw parameter_error("events csv: missing '# T=<horizon>' line");
    return EventSequence(std::move(times), horizon);
}

} // namespace batopt
