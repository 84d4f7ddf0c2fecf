#include "jointsparse/operators.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>

namespace jointsparse {

std::size_t SupportSelector::count() const noexcept
{
    return static_cast<std::size_t>(std::count(diag.begin(), diag.end(), std::uint8_t{1}));
}

std::vector<std::size_t> SupportSelector::indices() const
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < diag.size(); ++i)
        if (diag[i])
            idx.push_back(i);
    return idx;
}

SupportSelector SupportSelector::from_indices(std::size_t n, std::span<const std::size_t> idx)
{
    SupportSelector s;
    s.diag.assign(n, 0);
    for (auto i : idx)
        s.diag.at(i) = 1;
    return s;
}

SupportSelector threshold(std::span<const double> magnitudes, double thr)
{
    if (thr < 0.0)
        throw std::invalid_argument("threshold: thr must be non-negative");
    SupportSelector s;
    s.diag.resize(magnitudes.size());
    std::transform(magnitudes.begin(), magnitudes.end(), s.diag.begin(),
                   [thr](double v) { return v >= thr ? std::uint8_t{1} : std::uint8_t{0}; });
    return s;
}

struct MeasurementOperator::DenseFactors {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd;
};

MeasurementOperator MeasurementOperator::from_transform(std::shared_ptr<const OrthonormalTransform> transform,
                                                        std::vector<std::size_t> retained)
{
    if (!transform)
        throw std::invalid_argument("MeasurementOperator: null transform");
    const auto n = transform->size();
    for (std::size_t r = 0; r < retained.size(); ++r) {
        if (retained[r] >= n || (r > 0 && retained[r] <= retained[r - 1]))
            throw std::invalid_argument("MeasurementOperator: retained rows must be strictly increasing and < n");
    }
    MeasurementOperator op;
    op.rows_ = retained.size();
    op.cols_ = n;
    op.transform_ = std::move(transform);
    op.kept_.assign(n, 0);
    for (auto r : retained)
        op.kept_[r] = 1;
    op.retained_ = std::move(retained);
    return op;
}

MeasurementOperator MeasurementOperator::from_matrix(Eigen::MatrixXd matrix)
{
    MeasurementOperator op;
    op.rows_ = static_cast<std::size_t>(matrix.rows());
    op.cols_ = static_cast<std::size_t>(matrix.cols());
    auto factors = std::make_shared<DenseFactors>();
    if (matrix.size() > 0) {
        factors->svd.compute(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
        factors->svd.setThreshold(kPinvRtol);
    }
    op.factors_ = std::move(factors);
    op.matrix_ = std::make_shared<const Eigen::MatrixXd>(std::move(matrix));
    return op;
}

Eigen::VectorXd MeasurementOperator::apply(const Eigen::VectorXd& x) const
{
    if (static_cast<std::size_t>(x.size()) != cols_)
        throw std::invalid_argument("apply: expected a vector of length n");
    if (!transform_)
        return *matrix_ * x;

    std::vector<double> spectrum(cols_);
    transform_->forward({x.data(), cols_}, spectrum);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows_));
    for (std::size_t r = 0; r < rows_; ++r)
        y[static_cast<Eigen::Index>(r)] = spectrum[retained_[r]];
    return y;
}

Eigen::VectorXd MeasurementOperator::adjoint_apply(const Eigen::VectorXd& u) const
{
    if (static_cast<std::size_t>(u.size()) != rows_)
        throw std::invalid_argument("adjoint_apply: expected a vector of length m");
    if (!transform_)
        return matrix_->transpose() * u;

    std::vector<double> spectrum(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        spectrum[retained_[r]] = u[static_cast<Eigen::Index>(r)];
    Eigen::VectorXd x(static_cast<Eigen::Index>(cols_));
    transform_->inverse(spectrum, {x.data(), cols_});
    return x;
}

Eigen::VectorXd MeasurementOperator::pinv_apply(const Eigen::VectorXd& u) const
{
    if (transform_)
        return adjoint_apply(u);
    if (static_cast<std::size_t>(u.size()) != rows_)
        throw std::invalid_argument("pinv_apply: expected a vector of length m");
    if (matrix_->size() == 0)
        return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols_));
    return factors_->svd.solve(u);
}

void MeasurementOperator::project(const Eigen::VectorXd& x, Eigen::VectorXd& out) const
{
    if (static_cast<std::size_t>(x.size()) != cols_)
        throw std::invalid_argument("project: expected a vector of length n");
    if (!transform_) {
        out = pinv_apply(apply(x));
        return;
    }
    thread_local std::vector<double> spectrum;
    spectrum.resize(cols_);
    transform_->forward({x.data(), cols_}, spectrum);
    for (std::size_t k = 0; k < cols_; ++k)
        if (!kept_[k])
            spectrum[k] = 0.0;
    out.resize(static_cast<Eigen::Index>(cols_));
    transform_->inverse(spectrum, {out.data(), cols_});
}

Eigen::VectorXd MeasurementOperator::column(std::size_t j) const
{
    if (j >= cols_)
        throw std::out_of_range("column: index out of range");
    if (!transform_)
        return matrix_->col(static_cast<Eigen::Index>(j));
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols_));
    e[static_cast<Eigen::Index>(j)] = 1.0;
    return apply(e);
}

Eigen::MatrixXd MeasurementOperator::columns(std::span<const std::size_t> idx) const
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c)
        out.col(static_cast<Eigen::Index>(c)) = column(idx[c]);
    return out;
}

Eigen::MatrixXd MeasurementOperator::to_dense() const
{
    if (!transform_)
        return *matrix_;
    std::vector<std::size_t> all(cols_);
    for (std::size_t j = 0; j < cols_; ++j)
        all[j] = j;
    return columns(all);
}

Eigen::VectorXd solve_restricted(const Eigen::MatrixXd& columns, const Eigen::VectorXd& u)
{
    if (columns.cols() == 0 || columns.rows() == 0)
        return Eigen::VectorXd::Zero(columns.cols());
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kPinvRtol);
    cod.compute(columns);
    return cod.solve(u);
}

Eigen::VectorXd restricted_least_squares(const MeasurementOperator& A, const Eigen::VectorXd& u,
                                         const SupportSelector& supp)
{
    if (supp.size() != A.cols())
        throw std::invalid_argument("restricted_least_squares: selector length differs from n");
    if (static_cast<std::size_t>(u.size()) != A.rows())
        throw std::invalid_argument("restricted_least_squares: expected a vector of length m");

    const auto idx = supp.indices();
    const Eigen::VectorXd coeffs = solve_restricted(A.columns(idx), u);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(A.cols()));
    for (std::size_t c = 0; c < idx.size(); ++c)
        x[static_cast<Eigen::Index>(idx[c])] = coeffs[static_cast<Eigen::Index>(c)];
    return x;
}

} // namespace jointsparse
