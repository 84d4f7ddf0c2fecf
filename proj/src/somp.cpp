#include "jointsparse/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace jointsparse {

SolverResult somp(std::span<const MeasurementOperator> ops, std::span<const Eigen::VectorXd> ys,
                  const SompConfig& cfg)
{
    detail::validate_problem(ops, ys);
    const auto n = ops.front().cols();
    const auto L = static_cast<std::ptrdiff_t>(ops.size());

    std::size_t m_min = n;
    for (const auto& op : ops)
        m_min = std::min(m_min, op.rows());
    if (cfg.atoms && *cfg.atoms > m_min)
        throw std::invalid_argument("somp: cannot select more atoms than the smallest sample count");
    if (!(cfg.residualTol >= 0.0))
        throw std::invalid_argument("somp: residualTol must be non-negative");
    const std::size_t cap = cfg.atoms.value_or(m_min);

    std::vector<Eigen::VectorXd> residual(ys.begin(), ys.end());
    std::vector<Eigen::VectorXd> estimate(ops.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    std::vector<Eigen::MatrixXd> chosen_cols(ops.size());
    for (std::ptrdiff_t i = 0; i < L; ++i)
        chosen_cols[i].resize(static_cast<Eigen::Index>(ops[i].rows()), 0);
    std::vector<std::size_t> chosen;
    std::vector<std::uint8_t> taken(n, 0);
    std::vector<Eigen::VectorXd> correlation(ops.size());

    SolverResult result;
    const bool wide = L > 1 && static_cast<std::size_t>(L) * n >= 8192;

    auto converged = [&] {
        if (cfg.atoms)
            return false;
        return std::all_of(residual.begin(), residual.end(),
                           [&](const Eigen::VectorXd& r) { return r.norm() <= cfg.residualTol; });
    };

    while (chosen.size() < cap && !converged()) {
#pragma omp parallel for schedule(static) if (wide)
        for (std::ptrdiff_t i = 0; i < L; ++i)
            correlation[i] = ops[i].adjoint_apply(residual[i]).cwiseAbs();

        Eigen::VectorXd score = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (const auto& c : correlation)
            score += c;

        std::size_t best = n;
        double best_score = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!taken[j] && score[static_cast<Eigen::Index>(j)] > best_score) {
                best = j;
                best_score = score[static_cast<Eigen::Index>(j)];
            }
        }
        if (best == n)
            break;
        taken[best] = 1;
        chosen.push_back(best);

        std::vector<double> change(ops.size());
#pragma omp parallel for schedule(static) if (wide)
        for (std::ptrdiff_t i = 0; i < L; ++i) {
            auto& cols = chosen_cols[i];
            cols.conservativeResize(Eigen::NoChange, cols.cols() + 1);
            cols.col(cols.cols() - 1) = ops[i].column(best);
            const Eigen::VectorXd coeffs = solve_restricted(cols, ys[i]);
            Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
            for (std::size_t c = 0; c < chosen.size(); ++c)
                x[static_cast<Eigen::Index>(chosen[c])] = coeffs[static_cast<Eigen::Index>(c)];
            residual[i] = ys[i] - cols * coeffs;
            change[i] = (x - estimate[i]).squaredNorm();
            estimate[i] = std::move(x);
        }
        double update = 0.0;
        for (double c : change)
            update += c;
        result.trace.push_back({best_score, chosen.size(), std::sqrt(update)});
    }

    result.iterations = static_cast<int>(chosen.size());
    result.finalSupport = SupportSelector::from_indices(n, chosen);
    result.recovered = std::move(estimate);
    return result;
}

} // namespace jointsparse
