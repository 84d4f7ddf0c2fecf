#pragma once

#include <cstddef>
#include <cstdint>

namespace jointsparse {

/// Magnitude statistics of estimated zero (w) and nonzero (z) coefficients,
/// and the detection threshold eps they are compared against.
struct CoefficientStats {
    double mu0 = 0.0;    // mean of w
    double mu1 = 0.0;    // mean of z
    double var0 = 0.0;   // sigma_0^2
    double var1 = 0.0;   // sigma_1^2
    double eps = 0.0;
};

double half_normal_pdf(double y, double sigma);
double half_normal_cdf(double y, double sigma);

/// Smallest L for which averaging L signals cannot raise the false-detection
/// probability of a zero coefficient: var0 / ((eps - mu0) (1 - erf(eps / (sigma0 sqrt 2)))).
double lemma1_min_L(const CoefficientStats& stats);

/// Smallest L for which averaging L signals cannot lower the detection
/// probability of a nonzero coefficient: var1 / ((mu1 - eps) erf(eps / (sigma1 sqrt 2))).
double lemma2_min_L(const CoefficientStats& stats);

struct SignalCountBound {
    double lemma1 = 0.0;
    double lemma2 = 0.0;
    std::size_t minL = 1;   // ceil(max(lemma1, lemma2)), at least 1
};

/// Requires 2 mu0 <= eps < mu1.
SignalCountBound signal_count_bound(const CoefficientStats& stats);
std::size_t theorem1_min_L(const CoefficientStats& stats);

/// |N(location, scale^2)|.
struct FoldedNormal {
    double location = 0.0;
    double scale = 0.0;

    double mean() const;
    double variance() const;
};

/// Folded normal with the given mean and variance. Exists only when
/// mean / sqrt(mean^2 + variance) >= sqrt(2 / pi) (the half-normal ratio).
FoldedNormal match_folded_normal(double mean, double variance);

struct LemmaCheck {
    std::size_t trials = 0;
    std::size_t L = 1;
    double pW = 0.0;    // P(w >= eps)
    double pWL = 0.0;   // P(w_L >= eps)
    double pZ = 0.0;    // P(z >= eps)
    double pZL = 0.0;   // P(z_L >= eps)
    // Standard errors of the paired differences pW - pWL and pZL - pZ.
    double seW = 0.0;
    double seZ = 0.0;

    /// pW - pWL > sigmas * seW.
    bool zero_coefficient_direction(double sigmas = 3.0) const;
    /// pZL - pZ > sigmas * seZ.
    bool nonzero_coefficient_direction(double sigmas = 3.0) const;
};

/// Monte-Carlo estimate of the four exceedance probabilities. Each trial
/// draws L copies of w ~ |N(0, var0)| and of z ~ folded normal matched to
/// (mu1, var1); w and z are the first copies, w_L and z_L the averages.
/// Trials are split into fixed-size chunks with their own counter-derived
/// seeds, so the result is independent of the number of threads.
LemmaCheck monte_carlo_lemma_check(const CoefficientStats& stats, std::size_t L, std::size_t trials,
                                   std::uint64_t seed);

namespace detail {
inline constexpr std::size_t kLemmaChunk = 1u << 16;

struct LemmaTally {
    std::size_t w = 0, wl = 0, z = 0, zl = 0;
    std::size_t w_only = 0, wl_only = 0, z_only = 0, zl_only = 0;

    LemmaTally& operator+=(const LemmaTally& o);
};

LemmaTally lemma_chunk(double sigma0, const FoldedNormal& z_law, double eps, std::size_t L,
                       std::size_t trials, std::uint64_t seed, std::size_t chunk);
LemmaCheck finish_lemma_check(const LemmaTally& tally, std::size_t L, std::size_t trials);
void validate_lemma_inputs(const CoefficientStats& stats, std::size_t L, std::size_t trials);
} // namespace detail

} // namespace jointsparse
