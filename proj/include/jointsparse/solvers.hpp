#pragma once

#include "jointsparse/operators.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jointsparse {

enum class SparsityMode { known, unknown };

struct SolverConfig {
    double lambda = 1.0;                 // relaxation
    double alpha = 0.2;                  // threshold decay rate
    std::optional<double> beta;          // initial threshold; nullopt = max of the initial magnitude average
    int maxIter = 100;
    std::optional<double> stopTol;       // nullopt = 1e-6 * ||X_0||_F
    SparsityMode mode = SparsityMode::unknown;
    std::optional<std::size_t> sparsityK;   // required in known mode
    /// Unknown mode: return supp_K * x_K instead of x_K, dropping the
    /// back-projected residual that x_K carries off the support.
    bool thresholdOutput = false;
};

struct IterationTrace {
    double threshold = 0.0;
    std::size_t supportSize = 0;
    double updateNorm = 0.0;
};

struct SolverResult {
    std::vector<Eigen::VectorXd> recovered;
    int iterations = 0;
    SupportSelector finalSupport;
    std::vector<IterationTrace> trace;
};

/// Thrown when an iterate stops being finite.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int iteration, const std::string& what)
        : std::runtime_error(what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

/// Simultaneous iterative method with adaptive thresholding.
///
/// Each iteration thresholds the average magnitude of the previous iterates
/// at beta * exp(-alpha (k - 1)), masks every signal with that common
/// support, and relaxes it towards consistency with its own measurements:
///
///   x_k^i = s_k^i + lambda (x_0^i - A_i^+ A_i s_k^i),   x_0^i = A_i^+ y^i.
///
/// Stops once ||X_k - X_{k-1}||_F <= stopTol or after maxIter iterations and
/// returns X_K (masked by the last support when thresholdOutput is set). In
/// known-sparsity mode the K largest entries of the final magnitude average
/// form the support and each signal is refit on it by least squares.
///
/// The per-signal update runs in parallel; all reductions are done in a fixed
/// order so the result does not depend on the thread count.
SolverResult simat(std::span<const MeasurementOperator> ops, std::span<const Eigen::VectorXd> ys,
                   const SolverConfig& cfg);

/// Single-signal special case of simat.
SolverResult imat(const MeasurementOperator& op, const Eigen::VectorXd& y, const SolverConfig& cfg);

struct SompConfig {
    std::optional<std::size_t> atoms;   // known mode: select exactly this many indices
    double residualTol = 0.0;           // unknown mode: stop once every ||r^i|| <= residualTol
};

/// Simultaneous orthogonal matching pursuit. Greedily adds the index with the
/// largest summed correlation magnitude across signals, then refits every
/// signal on the current support by least squares.
SolverResult somp(std::span<const MeasurementOperator> ops, std::span<const Eigen::VectorXd> ys,
                  const SompConfig& cfg);

/// Indices of the k largest entries (lowest index wins ties), sorted ascending.
std::vector<std::size_t> top_k(std::span<const double> values, std::size_t k);

namespace detail {
void validate_problem(std::span<const MeasurementOperator> ops, std::span<const Eigen::VectorXd> ys);
void validate_config(const SolverConfig& cfg, std::size_t n);
} // namespace detail

} // namespace jointsparse
