#include "jointsparse/reference.hpp"

#include <cmath>

namespace jointsparse::reference {

SolverResult simat(std::span<const MeasurementOperator> ops, std::span<const Eigen::VectorXd> ys,
                   const SolverConfig& cfg)
{
    detail::validate_problem(ops, ys);
    const auto n = ops.front().cols();
    detail::validate_config(cfg, n);
    const std::size_t L = ops.size();

    std::vector<Eigen::VectorXd> x0, x;
    double x0_energy = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        x0.push_back(ops[i].pinv_apply(ys[i]));
        x0_energy += x0.back().squaredNorm();
    }
    x = x0;
    const double stop_tol = cfg.stopTol.value_or(1e-6 * std::sqrt(x0_energy));

    auto average_magnitude = [&](const std::vector<Eigen::VectorXd>& xs) {
        Eigen::VectorXd avg = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (const auto& v : xs)
            avg += v.cwiseAbs() * (1.0 / static_cast<double>(L));
        return avg;
    };

    Eigen::VectorXd xsum = average_magnitude(x);
    const double beta = cfg.beta.value_or(xsum.maxCoeff());

    SolverResult result;
    for (int k = 1; k <= cfg.maxIter; ++k) {
        const double thr = beta * std::exp(-cfg.alpha * (k - 1));
        SupportSelector supp = threshold({xsum.data(), n}, thr);

        std::vector<Eigen::VectorXd> next(L);
        double update = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < n; ++j)
                if (supp.diag[j])
                    s[static_cast<Eigen::Index>(j)] = x[i][static_cast<Eigen::Index>(j)];
            next[i] = s + cfg.lambda * (x0[i] - ops[i].pinv_apply(ops[i].apply(s)));
            if (!next[i].allFinite())
                throw DivergenceError(k, "simat: non-finite iterate");
            update += (next[i] - x[i]).squaredNorm();
        }
        update = std::sqrt(update);
        x = std::move(next);
        xsum = average_magnitude(x);
        result.trace.push_back({thr, supp.count(), update});
        result.finalSupport = std::move(supp);
        result.iterations = k;
        if (update <= stop_tol)
            break;
    }

    if (cfg.mode == SparsityMode::known) {
        result.finalSupport = SupportSelector::from_indices(n, top_k({xsum.data(), n}, *cfg.sparsityK));
        for (std::size_t i = 0; i < L; ++i)
            x[i] = restricted_least_squares(ops[i], ys[i], result.finalSupport);
    } else if (cfg.thresholdOutput) {
        for (auto& v : x)
            v = v.cwiseProduct(Eigen::Map<const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>>(
                                   result.finalSupport.diag.data(), static_cast<Eigen::Index>(n))
                                   .cast<double>());
    }
    result.recovered = std::move(x);
    return result;
}

LemmaCheck monte_carlo_lemma_check(const CoefficientStats& stats, std::size_t L, std::size_t trials,
                                   std::uint64_t seed)
{
    detail::validate_lemma_inputs(stats, L, trials);
    const double sigma0 = std::sqrt(stats.var0);
    const FoldedNormal z_law = match_folded_normal(stats.mu1, stats.var1);
    detail::LemmaTally total;
    for (std::size_t c = 0; c * detail::kLemmaChunk < trials; ++c)
        total += detail::lemma_chunk(sigma0, z_law, stats.eps, L, trials, seed, c);
    return detail::finish_lemma_check(total, L, trials);
}

std::vector<TrialRecord> run_trials(std::span<const TrialSpec> specs, const RunnerConfig& cfg)
{
    std::vector<TrialRecord> out;
    out.reserve(specs.size());
    for (const auto& s : specs)
        out.push_back(run_trial(s, cfg));
    return out;
}

} // namespace jointsparse::reference
