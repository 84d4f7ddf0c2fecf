#pragma once

#include "jointsparse/signal_model.hpp"
#include "jointsparse/solvers.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jointsparse {

enum class Algorithm { imat, simat, somp };

std::string_view to_string(Algorithm a);
std::string_view to_string(SparsityMode m);
Algorithm parse_algorithm(std::string_view s);
SparsityMode parse_mode(std::string_view s);

/// Reported when the recovery error is exactly zero.
inline constexpr double kSnrCapDb = 300.0;
/// A trial succeeds when its reconstruction SNR exceeds this.
inline constexpr double kSuccessSnrDb = 20.0;

/// 10 log10(sum_i ||x^i||^2 / sum_i ||x^i - xhat^i||^2), capped at kSnrCapDb.
double reconstruction_snr(const SparseEnsemble& truth, std::span<const Eigen::VectorXd> recovered);
/// Mean over signals of the per-signal SNR in dB.
double reconstruction_snr_per_signal(const SparseEnsemble& truth, std::span<const Eigen::VectorXd> recovered);

/// K = round(density% * n / 100), at least 1.
std::size_t sparsity_from_density(double densityPct, std::size_t n);

struct TrialSpec {
    std::size_t n = 256;
    std::size_t L = 8;
    std::size_t K = 10;
    double p = 0.25;
    std::optional<double> inputSnrDb = 20.0;
    Algorithm algorithm = Algorithm::simat;
    SparsityMode mode = SparsityMode::unknown;
    std::uint64_t seed = 0;
    MaskMode maskMode = MaskMode::fixed_count;
    ValueDistribution values = ValueDistribution::uniform;
};

/// Thresholding-solver settings used by the experiment runner when tuning is
/// off: lambda 1.9, alpha 0.05, 100 iterations, support-masked output.
SolverConfig experiment_solver_defaults();

struct RunnerConfig {
    SolverConfig solver = experiment_solver_defaults();
    /// Per-trial search over (alpha, lambda, maxIter) for imat and simat,
    /// keeping the configuration with the best reconstruction SNR.
    bool tune = true;
    std::vector<double> alphaGrid{0.01, 0.02, 0.05, 0.1};
    std::vector<double> lambdaGrid{1.0, 1.9};
    std::vector<int> maxIterGrid{100, 300};
    bool perSignalSnr = false;
};

struct TrialRecord {
    TrialSpec spec;
    double reconSnrDb = 0.0;
    bool success = false;
    double wallTimeSec = 0.0;
    int iterations = 0;
};

/// Builds the trial's data from its seed, runs the algorithm and scores it.
/// IMAT recovers each of the L signals on its own. Solver failures are
/// recorded as reconSnrDb = -inf, success = false.
TrialRecord run_trial(const TrialSpec& spec, const RunnerConfig& cfg);

/// Noise-norm estimate used as SOMP's unknown-sparsity stopping tolerance.
double somp_residual_tolerance(const Measurements& meas);

enum class SweepAxis { density, signals, sampling, input_snr };

std::string_view to_string(SweepAxis a);
SweepAxis parse_axis(std::string_view s);

struct SweepPoint {
    double axisValue = 0.0;
    double meanSnrDb = 0.0;
    double stddevSnrDb = 0.0;
    double successRate = 0.0;
    double meanWallTimeSec = 0.0;
    std::size_t trials = 0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::density;
    std::vector<SweepPoint> points;
};

/// Order-independent summary of a set of trials.
SweepPoint aggregate(double axisValue, std::span<const TrialRecord> records);

/// The spec for one grid point: base with the swept field replaced.
/// density is in percent of n, sampling a fraction in [0, 1].
TrialSpec at_axis(const TrialSpec& base, SweepAxis axis, double value);

/// Runs `trials` trials per grid point with seeds seedBase + t (t = 0..trials-1),
/// so every grid point sees the same random draws. Trials run in parallel.
SweepResult sweep(SweepAxis axis, std::span<const double> grid, const TrialSpec& base, std::size_t trials,
                  std::uint64_t seedBase, const RunnerConfig& cfg, std::vector<TrialRecord>* records = nullptr);

/// Runs the given specs (in parallel) and returns the records in input order.
std::vector<TrialRecord> run_trials(std::span<const TrialSpec> specs, const RunnerConfig& cfg);

inline constexpr double kTableSamplingRate = 0.25;
inline constexpr std::size_t kTableLength = 256;
inline constexpr std::size_t kTableSignals = 8;
inline constexpr double kTableDensities[] = {4.0, 12.0, 20.0};
inline constexpr double kTable1InputSnrs[] = {10.0, 20.0, 100.0};

struct Table1Cell {
    SparsityMode mode = SparsityMode::unknown;
    double inputSnrDb = 0.0;
    double densityPct = 0.0;
    std::size_t K = 0;
    Algorithm algorithm = Algorithm::simat;
    SweepPoint stats;
};

/// Mean reconstruction SNR for {unknown, known} x {10, 20, 100} dB x
/// {4, 12, 20}% x {imat, simat, somp} at n = 256, L = 8, 25% sampling.
/// Cell c uses trials c * trialsPerCell .. (c + 1) * trialsPerCell - 1 of `records`.
std::vector<Table1Cell> table1(std::size_t trialsPerCell, std::uint64_t seedBase, const RunnerConfig& cfg,
                               std::vector<TrialRecord>* records = nullptr);

struct Table2Cell {
    Algorithm algorithm = Algorithm::simat;
    double densityPct = 0.0;
    std::size_t K = 0;
    double medianWallTimeSec = 0.0;
    std::size_t trials = 0;
};

/// Median solver wall time for simat and somp at 100 dB, known sparsity.
/// Always times the single configuration cfg.solver (no tuning).
std::vector<Table2Cell> table2(std::size_t trialsPerCell, std::uint64_t seedBase, const RunnerConfig& cfg);

} // namespace jointsparse
