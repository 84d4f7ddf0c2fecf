#pragma once

#include "jointsparse/transform.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace jointsparse {

/// Relative singular-value cutoff used by every pseudoinverse and
/// least-squares solve.
inline constexpr double kPinvRtol = 1e-10;

/// Binary diagonal of the thresholding operator, stored as a vector.
struct SupportSelector {
    std::vector<std::uint8_t> diag;

    std::size_t size() const noexcept { return diag.size(); }
    std::size_t count() const noexcept;
    std::vector<std::size_t> indices() const;
    bool contains(std::size_t i) const { return diag.at(i) != 0; }

    static SupportSelector from_indices(std::size_t n, std::span<const std::size_t> idx);
};

/// diag[i] = 1 iff magnitudes[i] >= thr.
SupportSelector threshold(std::span<const double> magnitudes, double thr);

/// Per-signal linear map from the n-dimensional sparsity domain to the m
/// retained measurements. Either an orthonormal transform followed by row
/// selection (fast path) or an explicit m x n matrix (dense path).
/// Immutable after construction.
class MeasurementOperator {
public:
    static MeasurementOperator from_transform(std::shared_ptr<const OrthonormalTransform> transform,
                                              std::vector<std::size_t> retained);
    static MeasurementOperator from_matrix(Eigen::MatrixXd matrix);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_orthonormal() const noexcept { return transform_ != nullptr; }
    /// Retained row indices (fast path only; empty for dense operators).
    std::span<const std::size_t> retained() const noexcept { return retained_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd adjoint_apply(const Eigen::VectorXd& u) const;
    /// Minimum-norm least-squares solution of A x = u. On the fast path the
    /// rows are orthonormal, so this equals the adjoint.
    Eigen::VectorXd pinv_apply(const Eigen::VectorXd& u) const;
    /// out = A^+ A x, the orthogonal projector onto the row space of A.
    void project(const Eigen::VectorXd& x, Eigen::VectorXd& out) const;

    Eigen::VectorXd column(std::size_t j) const;
    Eigen::MatrixXd columns(std::span<const std::size_t> idx) const;
    Eigen::MatrixXd to_dense() const;

private:
    struct DenseFactors;

    MeasurementOperator() = default;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::shared_ptr<const OrthonormalTransform> transform_;
    std::vector<std::size_t> retained_;
    std::vector<std::uint8_t> kept_;   // retained_ as a length-n indicator
    std::shared_ptr<const Eigen::MatrixXd> matrix_;
    std::shared_ptr<const DenseFactors> factors_;
};

/// argmin ||A x - u|| over x supported on supp (zero elsewhere); minimum-norm
/// solution when the restricted system is rank deficient.
Eigen::VectorXd restricted_least_squares(const MeasurementOperator& A, const Eigen::VectorXd& u,
                                         const SupportSelector& supp);

/// Same, with the restricted columns already materialized.
Eigen::VectorXd solve_restricted(const Eigen::MatrixXd& columns, const Eigen::VectorXd& u);

} // namespace jointsparse
