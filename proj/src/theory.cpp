#include "jointsparse/theory.hpp"

#include "jointsparse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace jointsparse {

namespace {

void check_half_normal_args(double y, double sigma)
{
    if (!(y >= 0.0))
        throw std::invalid_argument("half-normal: y must be non-negative");
    if (!(sigma > 0.0))
        throw std::invalid_argument("half-normal: sigma must be positive");
}

void check_variances(const CoefficientStats& s)
{
    if (!(s.var0 > 0.0) || !(s.var1 > 0.0))
        throw std::invalid_argument("coefficient stats: variances must be positive");
}

} // namespace

double half_normal_pdf(double y, double sigma)
{
    check_half_normal_args(y, sigma);
    return std::sqrt(2.0 / (sigma * sigma * std::numbers::pi)) * std::exp(-y * y / (2.0 * sigma * sigma));
}

double half_normal_cdf(double y, double sigma)
{
    check_half_normal_args(y, sigma);
    return std::erf(y / (sigma * std::numbers::sqrt2));
}

double lemma1_min_L(const CoefficientStats& s)
{
    check_variances(s);
    if (!(s.eps > s.mu0))
        throw std::invalid_argument("lemma1_min_L: undefined unless eps > mu0");
    // erfc keeps precision where erf is close to one.
    const double tail = std::erfc(s.eps / std::sqrt(2.0 * s.var0));
    return s.var0 / ((s.eps - s.mu0) * tail);
}

double lemma2_min_L(const CoefficientStats& s)
{
    check_variances(s);
    if (!(s.mu1 > s.eps))
        throw std::invalid_argument("lemma2_min_L: undefined unless mu1 > eps");
    if (!(s.eps > 0.0))
        throw std::invalid_argument("lemma2_min_L: undefined unless eps > 0");
    return s.var1 / ((s.mu1 - s.eps) * std::erf(s.eps / std::sqrt(2.0 * s.var1)));
}

SignalCountBound signal_count_bound(const CoefficientStats& s)
{
    if (!(s.eps >= 2.0 * s.mu0))
        throw std::invalid_argument("theorem1_min_L: requires eps >= 2 mu0");
    if (!(s.mu1 > s.mu0))
        throw std::invalid_argument("theorem1_min_L: requires mu1 > mu0");
    SignalCountBound b;
    b.lemma1 = lemma1_min_L(s);
    b.lemma2 = lemma2_min_L(s);
    const double bound = std::ceil(std::max(b.lemma1, b.lemma2));
    b.minL = bound < 1.0 ? 1 : static_cast<std::size_t>(bound);
    return b;
}

std::size_t theorem1_min_L(const CoefficientStats& stats)
{
    return signal_count_bound(stats).minL;
}

double FoldedNormal::mean() const
{
    const double t = location / scale;
    return scale * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * t * t)
         + location * std::erf(t / std::numbers::sqrt2);
}

double FoldedNormal::variance() const
{
    const double m = mean();
    return location * location + scale * scale - m * m;
}

FoldedNormal match_folded_normal(double mean, double variance)
{
    if (!(mean > 0.0) || !(variance > 0.0))
        throw std::invalid_argument("match_folded_normal: mean and variance must be positive");
    const double second = mean * mean + variance;
    const double target = mean / std::sqrt(second);
    // With t = location / scale, mean / sqrt(E[z^2]) = g(t) / sqrt(1 + t^2),
    // increasing from sqrt(2/pi) at t = 0 towards 1.
    auto ratio = [](double t) {
        const double g = std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * t * t)
                       + t * std::erf(t / std::numbers::sqrt2);
        return g / std::sqrt(1.0 + t * t);
    };
    if (target < ratio(0.0))
        throw std::invalid_argument("match_folded_normal: no folded normal has this mean/variance pair");

    double lo = 0.0, hi = 1.0;
    while (ratio(hi) < target && hi < 1e6)
        hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < target ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    FoldedNormal fn;
    fn.scale = std::sqrt(second / (1.0 + t * t));
    fn.location = t * fn.scale;
    return fn;
}

bool LemmaCheck::zero_coefficient_direction(double sigmas) const
{
    return pW - pWL > sigmas * seW;
}

bool LemmaCheck::nonzero_coefficient_direction(double sigmas) const
{
    return pZL - pZ > sigmas * seZ;
}

namespace detail {

LemmaTally& LemmaTally::operator+=(const LemmaTally& o)
{
    w += o.w;
    wl += o.wl;
    z += o.z;
    zl += o.zl;
    w_only += o.w_only;
    wl_only += o.wl_only;
    z_only += o.z_only;
    zl_only += o.zl_only;
    return *this;
}

void validate_lemma_inputs(const CoefficientStats& stats, std::size_t L, std::size_t trials)
{
    check_variances(stats);
    if (L == 0)
        throw std::invalid_argument("lemma check: L must be at least 1");
    if (trials == 0)
        throw std::invalid_argument("lemma check: trials must be at least 1");
}

LemmaTally lemma_chunk(double sigma0, const FoldedNormal& z_law, double eps, std::size_t L,
                       std::size_t trials, std::uint64_t seed, std::size_t chunk)
{
    const std::size_t begin = chunk * kLemmaChunk;
    const std::size_t end = std::min(trials, begin + kLemmaChunk);
    auto rng = make_engine(seed, chunk);
    std::normal_distribution<double> zero_coeff(0.0, sigma0);
    std::normal_distribution<double> nonzero_coeff(z_law.location, z_law.scale);
    const double inv_l = 1.0 / static_cast<double>(L);

    LemmaTally t;
    for (std::size_t trial = begin; trial < end; ++trial) {
        double w = 0.0, w_sum = 0.0, z = 0.0, z_sum = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            const double wv = std::abs(zero_coeff(rng));
            const double zv = std::abs(nonzero_coeff(rng));
            if (l == 0) {
                w = wv;
                z = zv;
            }
            w_sum += wv;
            z_sum += zv;
        }
        const bool hw = w >= eps;
        const bool hwl = w_sum * inv_l >= eps;
        const bool hz = z >= eps;
        const bool hzl = z_sum * inv_l >= eps;
        t.w += hw;
        t.wl += hwl;
        t.z += hz;
        t.zl += hzl;
        t.w_only += hw && !hwl;
        t.wl_only += hwl && !hw;
        t.z_only += hz && !hzl;
        t.zl_only += hzl && !hz;
    }
    return t;
}

LemmaCheck finish_lemma_check(const LemmaTally& t, std::size_t L, std::size_t trials)
{
    const double n = static_cast<double>(trials);
    LemmaCheck r;
    r.trials = trials;
    r.L = L;
    r.pW = static_cast<double>(t.w) / n;
    r.pWL = static_cast<double>(t.wl) / n;
    r.pZ = static_cast<double>(t.z) / n;
    r.pZL = static_cast<double>(t.zl) / n;
    // Paired difference d in {-1, 0, 1}: var(d) = E[d^2] - E[d]^2.
    auto paired_se = [n](std::size_t plus, std::size_t minus) {
        const double mean = (static_cast<double>(plus) - static_cast<double>(minus)) / n;
        const double second = (static_cast<double>(plus) + static_cast<double>(minus)) / n;
        return std::sqrt(std::max(0.0, second - mean * mean) / n);
    };
    r.seW = paired_se(t.w_only, t.wl_only);
    r.seZ = paired_se(t.zl_only, t.z_only);
    return r;
}

} // namespace detail

LemmaCheck monte_carlo_lemma_check(const CoefficientStats& stats, std::size_t L, std::size_t trials,
                                   std::uint64_t seed)
{
    detail::validate_lemma_inputs(stats, L, trials);
    const double sigma0 = std::sqrt(stats.var0);
    const FoldedNormal z_law = match_folded_normal(stats.mu1, stats.var1);
    const std::size_t chunks = (trials + detail::kLemmaChunk - 1) / detail::kLemmaChunk;

    std::vector<detail::LemmaTally> tallies(chunks);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c)
        tallies[c] = detail::lemma_chunk(sigma0, z_law, stats.eps, L, trials, seed, static_cast<std::size_t>(c));

    detail::LemmaTally total;
    for (const auto& t : tallies)
        total += t;
    return detail::finish_lemma_check(total, L, trials);
}

} // namespace jointsparse
