#pragma once

#include <cstddef>
#include <memory>
#include <span>

namespace jointsparse {

/// Real orthonormal transform of fixed length. Maps the sparsity domain
/// (time) to the measurement domain (frequency). Implementations must be
/// safe to call concurrently from many threads.
class OrthonormalTransform {
public:
    virtual ~OrthonormalTransform() = default;

    virtual std::size_t size() const noexcept = 0;
    virtual void forward(std::span<const double> in, std::span<double> out) const = 0;
    /// Inverse and adjoint coincide for an orthonormal transform.
    virtual void inverse(std::span<const double> in, std::span<double> out) const = 0;
};

/// Orthonormal DCT-II (forward) / DCT-III (inverse), FFTW-backed.
///   X_k = c_k sum_j x_j cos(pi (j + 1/2) k / n),  c_0 = sqrt(1/n), c_k = sqrt(2/n).
class DctTransform final : public OrthonormalTransform {
public:
    explicit DctTransform(std::size_t n);
    ~DctTransform() override;

    DctTransform(const DctTransform&) = delete;
    DctTransform& operator=(const DctTransform&) = delete;

    std::size_t size() const noexcept override { return n_; }
    void forward(std::span<const double> in, std::span<double> out) const override;
    void inverse(std::span<const double> in, std::span<double> out) const override;

private:
    std::size_t n_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Shared DCT instance for length n; plans are created once per length.
std::shared_ptr<const OrthonormalTransform> dct(std::size_t n);

} // namespace jointsparse
