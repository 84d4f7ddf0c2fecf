#pragma once

#include "jointsparse/transform.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace jointsparse {

enum class ValueDistribution { uniform, gaussian };
enum class MaskMode { bernoulli, fixed_count };

/// L equal-length signals that are zero outside one shared support.
struct SparseEnsemble {
    std::size_t n = 0;
    std::vector<std::size_t> support;   // sorted, |support| = K
    std::vector<Eigen::VectorXd> signals;

    std::size_t count() const noexcept { return signals.size(); }
    std::size_t sparsity() const noexcept { return support.size(); }
};

struct SamplingMask {
    std::vector<std::uint8_t> bits;
    double p = 0.0;

    std::size_t popcount() const noexcept;
    /// Strictly increasing list of the positions with bit = 1.
    std::vector<std::size_t> retained() const;
};

/// Retained transform-domain samples, one vector per signal.
struct Measurements {
    std::vector<Eigen::VectorXd> values;
    std::vector<std::vector<std::size_t>> retained;
    std::optional<double> inputSnrDb;   // nullopt: noiseless

    std::size_t count() const noexcept { return values.size(); }
};

/// Draws one support of size K uniformly without replacement and fills each
/// of the L signals on it with i.i.d. values (uniform on [-1, 1] or N(0, 1)).
SparseEnsemble generate_ensemble(std::size_t n, std::size_t L, std::size_t K,
                                 ValueDistribution dist, std::uint64_t seed);

/// Independent per-signal masks. bernoulli: each bit ~ Bernoulli(p);
/// fixed_count: exactly round(p n) ones at uniformly random positions.
std::vector<SamplingMask> generate_masks(std::size_t n, std::size_t L, double p,
                                         MaskMode mode, std::uint64_t seed);

/// y^i = (F x^i)[retained_i] + v^i. The noise is i.i.d. Gaussian on the retained
/// entries with variance chosen so that total retained clean energy over total
/// expected noise energy equals inputSnrDb.
Measurements measure(const SparseEnsemble& ensemble, std::span<const SamplingMask> masks,
                     const OrthonormalTransform& transform, std::optional<double> inputSnrDb,
                     std::uint64_t seed);

} // namespace jointsparse
