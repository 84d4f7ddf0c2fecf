#include "jointsparse/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace jointsparse {

namespace {

// The FFTW planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

void check_sizes(std::size_t n, std::span<const double> in, std::span<double> out)
{
    if (in.size() != n || out.size() != n)
        throw std::invalid_argument("DctTransform: length mismatch");
}

// FFTW may clobber its input, and callers pass const spans.
std::vector<double>& scratch_buffer(std::size_t n)
{
    thread_local std::vector<double> buf;
    if (buf.size() < n)
        buf.resize(n);
    return buf;
}

} // namespace

DctTransform::DctTransform(std::size_t n) : n_(n)
{
    if (n == 0)
        throw std::invalid_argument("DctTransform: length must be positive");
    if (n == 1)
        return;

    std::vector<double> a(n), b(n);
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_r2r_1d(len, a.data(), b.data(), FFTW_REDFT10, flags);
    inverse_plan_ = fftw_plan_r2r_1d(len, a.data(), b.data(), FFTW_REDFT01, flags);
    if (!forward_plan_ || !inverse_plan_)
        throw std::runtime_error("DctTransform: FFTW planning failed");
}

DctTransform::~DctTransform()
{
    std::lock_guard lock(planner_mutex());
    if (forward_plan_)
        fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_)
        fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void DctTransform::forward(std::span<const double> in, std::span<double> out) const
{
    check_sizes(n_, in, out);
    if (n_ == 1) {
        out[0] = in[0];
        return;
    }
    // REDFT10 computes 2 * sum_j x_j cos(...), so halve and apply c_k.
    auto& scratch = scratch_buffer(n_);
    std::copy(in.begin(), in.end(), scratch.begin());
    fftw_execute_r2r(static_cast<fftw_plan>(forward_plan_), scratch.data(), out.data());
    const double s0 = 0.5 * std::sqrt(1.0 / static_cast<double>(n_));
    const double sk = 0.5 * std::sqrt(2.0 / static_cast<double>(n_));
    out[0] *= s0;
    for (std::size_t k = 1; k < n_; ++k)
        out[k] *= sk;
}

void DctTransform::inverse(std::span<const double> in, std::span<double> out) const
{
    check_sizes(n_, in, out);
    if (n_ == 1) {
        out[0] = in[0];
        return;
    }
    // REDFT01 computes X_0 + 2 * sum_{k>=1} X_k cos(...).
    auto& scratch = scratch_buffer(n_);
    scratch[0] = in[0] * std::sqrt(1.0 / static_cast<double>(n_));
    const double sk = 0.5 * std::sqrt(2.0 / static_cast<double>(n_));
    for (std::size_t k = 1; k < n_; ++k)
        scratch[k] = in[k] * sk;
    fftw_execute_r2r(static_cast<fftw_plan>(inverse_plan_), scratch.data(), out.data());
}

std::shared_ptr<const OrthonormalTransform> dct(std::size_t n)
{
    static std::mutex cache_mutex;
    static std::map<std::size_t, std::shared_ptr<const OrthonormalTransform>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_shared<const DctTransform>(n);
    return slot;
}

} // namespace jointsparse
