#pragma once

// Serial reference versions of the OpenMP kernels. Kept for testing: each
// must produce bit-identical results to its parallel counterpart.

#include "jointsparse/experiments.hpp"
#include "jointsparse/solvers.hpp"
#include "jointsparse/theory.hpp"

namespace jointsparse::reference {

SolverResult simat(std::span<const MeasurementOperator> ops, std::span<const Eigen::VectorXd> ys,
                   const SolverConfig& cfg);

LemmaCheck monte_carlo_lemma_check(const CoefficientStats& stats, std::size_t L, std::size_t trials,
                                   std::uint64_t seed);

std::vector<TrialRecord> run_trials(std::span<const TrialSpec> specs, const RunnerConfig& cfg);

} // namespace jointsparse::reference
