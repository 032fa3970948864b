#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "batopt/core.hpp"

namespace batopt {

/// One sojourn: entered `from`, left for `to` after `sojourn` time units.
/// `to == 0` marks a censored sojourn (still at risk, no event).
struct SojournRecord
{
    long individual = 0;
    int from = 1;
    int to = 0;
    double sojourn = 0.0;
    Vector z;
};

/// Multi-state histories with states 1..num_states. Each record carries one
/// covariate vector shared by all transitions out of that sojourn.
class MultiStateDataset
{
public:
    MultiStateDataset() = default;

    MultiStateDataset(int num_states, std::vector<SojournRecord> records)
        : num_states_(num_states), records_(std::move(records))
    {
        validate();
    }

    int num_states() const noexcept { return num_states_; }
    const std::vector<SojournRecord>& records() const noexcept { return records_; }
    Eigen::Index num_covariates() const { return records_.empty() ? 0 : records_.front().z.size(); }

private:
    void validate() const
    {
        if (num_states_ < 2) throw parameter_error("MultiStateDataset: need at least two states");
        if (records_.empty()) throw parameter_error("MultiStateDataset: no records");
        std::map<long, const SojournRecord*> last;
        for (std::size_t n = 0; n < records_.size(); ++n) {
            const auto& r = records_[n];
            const std::string where = "MultiStateDataset: record " + std::to_string(n);
            if (r.from < 1 || r.from > num_states_) throw parameter_error(where + " has unknown state id " + std::to_string(r.from));
            if (r.to < 0 || r.to > num_states_) throw parameter_error(where + " has unknown state id " + std::to_string(r.to));
            if (r.to == r.from) throw parameter_error(where + " is a self-transition");
            if (!(r.sojourn > 0.0) || !std::isfinite(r.sojourn)) throw parameter_error(where + " needs a positive sojourn");
            require_dim(r.z.size(), records_.front().z.size(), "MultiStateDataset covariates");
            auto it = last.find(r.individual);
            if (it != last.end()) {
                if (it->second->to == 0) throw parameter_error(where + " follows a censored sojourn");
                if (it->second->to != r.from) throw parameter_error(where + " does not continue from the previous state");
            }
            last[r.individual] = &r;
        }
        if (num_covariates() < 1) throw parameter_error("MultiStateDataset: need at least one covariate");
    }

    int num_states_ = 0;
    std::vector<SojournRecord> records_;
};

/// Value, gradient and observed information of the negative log partial likelihood.
struct PartialLikelihood
{
    double nll = 0.0;
    Vector gradient;
    Matrix information;
    /// Risk-set sizes of every event, in evaluation order.
    std::vector<std::size_t> risk_set_sizes;
};

/// Cox-type partial likelihood stratified by transition type (i -> j) with
/// baselines profiled out (Breslow ties): every event of type i -> j at
/// sojourn W contributes beta'z - log sum_{from == i, W' >= W} exp(beta'z').
class MarkovRenewalLikelihood
{
public:
    explicit MarkovRenewalLikelihood(MultiStateDataset data) : data_(std::move(data))
    {
        const auto& recs = data_.records();
        std::map<int, std::vector<std::size_t>> by_origin;
        for (std::size_t n = 0; n < recs.size(); ++n) by_origin[recs[n].from].push_back(n);
        for (auto& [state, idx] : by_origin) {
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::size_t a, std::size_t b) { return recs[a].sojourn > recs[b].sojourn; });
            origins_.push_back(std::move(idx));
        }
    }

    const MultiStateDataset& data() const noexcept { return data_; }
    Eigen::Index dim() const { return data_.num_covariates(); }

    double negloglik(const Vector& beta) const { return evaluate(beta, false).nll; }

    PartialLikelihood evaluate(const Vector& beta, bool derivatives = true) const
    {
        require_dim(beta.size(), dim(), "markov_renewal_neg_partial_lik");
        const auto p = dim();
        const auto& recs = data_.records();
        PartialLikelihood out;
        if (!beta.allFinite()) {
            out.nll = infeasible;
            return out;
        }
        out.gradient = Vector::Zero(p);
        out.information = Matrix::Zero(p, p);

        for (const auto& idx : origins_) {
            double shift = -std::numeric_limits<double>::infinity();
            for (auto n : idx) shift = std::max(shift, recs[n].z.dot(beta));

            // Every transition type out of this origin shares its risk set.
            double s0 = 0.0;
            Vector s1 = Vector::Zero(p);
            Matrix s2 = Matrix::Zero(p, p);
            std::size_t at_risk = 0;
            std::size_t pos = 0;
            while (pos < idx.size()) {
                std::size_t end = pos;
                const double w = recs[idx[pos]].sojourn;
                while (end < idx.size() && recs[idx[end]].sojourn == w) {
                    const auto& r = recs[idx[end]];
                    const double e = std::exp(r.z.dot(beta) - shift);
                    s0 += e;
                    if (derivatives) {
                        s1 += e * r.z;
                        s2 += e * r.z * r.z.transpose();
                    }
                    ++at_risk;
                    ++end;
                }
                if (!(s0 > 0.0)) throw std::runtime_error("markov_renewal: empty risk set");
                for (std::size_t q = pos; q < end; ++q) {
                    const auto& r = recs[idx[q]];
                    if (r.to == 0) continue;
                    out.nll -= r.z.dot(beta) - shift - std::log(s0);
                    out.risk_set_sizes.push_back(at_risk);
                    if (derivatives) {
                        const Vector mean = s1 / s0;
                        out.gradient -= r.z - mean;
                        out.information += s2 / s0 - mean * mean.transpose();
                    }
                }
                pos = end;
            }
        }
        return out;
    }

private:
    MultiStateDataset data_;
    std::vector<std::vector<std::size_t>> origins_;
};

inline double markov_renewal_neg_partial_lik(const Vector& beta, const MultiStateDataset& data)
{
    return MarkovRenewalLikelihood(data).negloglik(beta);
}

inline Objective markov_renewal_objective(MultiStateDataset data, SearchSpace space)
{
    auto lik = std::make_shared<const MarkovRenewalLikelihood>(std::move(data));
    require_dim(space.dim(), lik->dim(), "markov_renewal_objective");
    return Objective{std::move(space), [lik](const Vector& beta) { return lik->negloglik(beta); },
                     "markov-renewal"};
}

/// Two-state data: unit baseline hazard out of state 1, one Bernoulli(1/2)
/// covariate per individual, sojourn ~ Exp(exp(beta z)).
inline MultiStateDataset synthetic_two_state(std::size_t individuals, double beta_true, RngStream rng)
{
    std::vector<SojournRecord> records;
    records.reserve(individuals);
    for (std::size_t i = 0; i < individuals; ++i) {
        const double z = rng.uniform() < 0.5 ? 1.0 : 0.0;
        const double w = rng.exponential(std::exp(beta_true * z));
        records.push_back({static_cast<long>(i + 1), 1, 2, w, Vector::Constant(1, z)});
    }
    return MultiStateDataset(2, std::move(records));
}

} // namespace batopt
