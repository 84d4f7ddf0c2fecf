#include "jointsparse/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jointsparse {

namespace detail {

void validate_problem(std::span<const MeasurementOperator> ops, std::span<const Eigen::VectorXd> ys)
{
    if (ops.empty())
        throw std::invalid_argument("solver: need at least one signal");
    if (ops.size() != ys.size())
        throw std::invalid_argument("solver: operator and measurement counts differ");
    const auto n = ops.front().cols();
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].cols() != n)
            throw std::invalid_argument("solver: operators disagree on signal length");
        if (static_cast<std::size_t>(ys[i].size()) != ops[i].rows())
            throw std::invalid_argument("solver: measurement length differs from operator rows");
    }
}

void validate_config(const SolverConfig& cfg, std::size_t n)
{
    if (!(cfg.lambda > 0.0))
        throw std::invalid_argument("solver: lambda must be positive");
    if (!(cfg.alpha >= 0.0))
        throw std::invalid_argument("solver: alpha must be non-negative");
    if (cfg.maxIter < 1)
        throw std::invalid_argument("solver: maxIter must be at least 1");
    if (cfg.stopTol && !(*cfg.stopTol >= 0.0))
        throw std::invalid_argument("solver: stopTol must be non-negative");
    if (cfg.beta && !(*cfg.beta >= 0.0))
        throw std::invalid_argument("solver: beta must be non-negative");
    if (cfg.mode == SparsityMode::known && (!cfg.sparsityK || *cfg.sparsityK > n))
        throw std::invalid_argument("solver: known-sparsity mode needs 0 <= K <= n");
}

} // namespace detail

std::vector<std::size_t> top_k(std::span<const double> values, std::size_t k)
{
    k = std::min(k, values.size());
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return values[a] > values[b] || (values[a] == values[b] && a < b);
                      });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

namespace {

void magnitude_average(const std::vector<Eigen::VectorXd>& xs, Eigen::VectorXd& out)
{
    out.setZero(xs.front().size());
    const double inv = 1.0 / static_cast<double>(xs.size());
    for (const auto& x : xs)
        out += x.cwiseAbs() * inv;
}

} // namespace

SolverResult simat(std::span<const MeasurementOperator> ops, std::span<const Eigen::VectorXd> ys,
                   const SolverConfig& cfg)
{
    detail::validate_problem(ops, ys);
    const auto n = ops.front().cols();
    detail::validate_config(cfg, n);

    const auto L = static_cast<std::ptrdiff_t>(ops.size());
    std::vector<Eigen::VectorXd> x0(ops.size());
    // Parallelising across signals only pays off for big ensembles.
    const bool wide = L > 1 && static_cast<std::size_t>(L) * n >= 8192;
#pragma omp parallel for schedule(static) if (wide)
    for (std::ptrdiff_t i = 0; i < L; ++i)
        x0[i] = ops[i].pinv_apply(ys[i]);

    double x0_energy = 0.0;
    for (const auto& x : x0)
        x0_energy += x.squaredNorm();
    const double stop_tol = cfg.stopTol.value_or(1e-6 * std::sqrt(x0_energy));

    Eigen::VectorXd xsum;
    magnitude_average(x0, xsum);
    const double beta = cfg.beta.value_or(xsum.size() > 0 ? xsum.maxCoeff() : 0.0);

    SolverResult result;
    result.trace.reserve(static_cast<std::size_t>(cfg.maxIter));
    std::vector<Eigen::VectorXd> prev = x0;
    std::vector<Eigen::VectorXd> next(ops.size());

    for (int k = 1; k <= cfg.maxIter; ++k) {
        const double thr = beta * std::exp(-cfg.alpha * (k - 1));
        result.finalSupport = threshold({xsum.data(), n}, thr);
        const auto& supp = result.finalSupport.diag;

#pragma omp parallel for schedule(static) if (wide)
        for (std::ptrdiff_t i = 0; i < L; ++i) {
            thread_local Eigen::VectorXd s, projected;
            s = prev[i];
            for (std::size_t j = 0; j < n; ++j)
                if (!supp[j])
                    s[static_cast<Eigen::Index>(j)] = 0.0;
            ops[i].project(s, projected);
            next[i] = s + cfg.lambda * (x0[i] - projected);
        }

        double update = 0.0;
        for (std::ptrdiff_t i = 0; i < L; ++i) {
            if (!next[i].allFinite())
                throw DivergenceError(k, "simat: non-finite iterate at iteration " + std::to_string(k));
            update += (next[i] - prev[i]).squaredNorm();
        }
        update = std::sqrt(update);

        std::swap(prev, next);
        magnitude_average(prev, xsum);
        result.trace.push_back({thr, result.finalSupport.count(), update});
        result.iterations = k;
        if (update <= stop_tol)
            break;
    }

    if (cfg.mode == SparsityMode::known) {
        const auto idx = top_k({xsum.data(), n}, *cfg.sparsityK);
        result.finalSupport = SupportSelector::from_indices(n, idx);
#pragma omp parallel for schedule(static) if (wide)
        for (std::ptrdiff_t i = 0; i < L; ++i)
            prev[i] = restricted_least_squares(ops[i], ys[i], result.finalSupport);
    } else if (cfg.thresholdOutput) {
        for (auto& x : prev)
            for (std::size_t j = 0; j < n; ++j)
                if (!result.finalSupport.diag[j])
                    x[static_cast<Eigen::Index>(j)] = 0.0;
    }
    result.recovered = std::move(prev);
    return result;
}

SolverResult imat(const MeasurementOperator& op, const Eigen::VectorXd& y, const SolverConfig& cfg)
{
    return simat(std::span<const MeasurementOperator>(&op, 1), std::span<const Eigen::VectorXd>(&y, 1), cfg);
}

} // namespace jointsparse
