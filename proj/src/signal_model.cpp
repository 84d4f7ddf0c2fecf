#include "jointsparse/signal_model.hpp"

#include "jointsparse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace jointsparse {

std::size_t SamplingMask::popcount() const noexcept
{
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<std::size_t> SamplingMask::retained() const
{
    std::vector<std::size_t> idx;
    idx.reserve(popcount());
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i])
            idx.push_back(i);
    return idx;
}

namespace {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Engine& rng)
{
    // Partial Fisher-Yates; the first k slots are a uniform k-subset.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace

SparseEnsemble generate_ensemble(std::size_t n, std::size_t L, std::size_t K,
                                 ValueDistribution dist, std::uint64_t seed)
{
    if (L == 0)
        throw std::invalid_argument("generate_ensemble: L must be at least 1");
    if (K == 0 || K > n)
        throw std::invalid_argument("generate_ensemble: need 0 < K <= n");

    SparseEnsemble ens;
    ens.n = n;
    auto support_rng = make_engine(seed, streams::support);
    ens.support = sample_without_replacement(n, K, support_rng);

    ens.signals.reserve(L);
    for (std::size_t i = 0; i < L; ++i) {
        auto rng = make_engine(seed, streams::values + i);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        if (dist == ValueDistribution::uniform) {
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            for (auto j : ens.support)
                x[static_cast<Eigen::Index>(j)] = u(rng);
        } else {
            std::normal_distribution<double> g(0.0, 1.0);
            for (auto j : ens.support)
                x[static_cast<Eigen::Index>(j)] = g(rng);
        }
        ens.signals.push_back(std::move(x));
    }
    return ens;
}

std::vector<SamplingMask> generate_masks(std::size_t n, std::size_t L, double p,
                                         MaskMode mode, std::uint64_t seed)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("generate_masks: p must lie in [0, 1]");

    std::vector<SamplingMask> masks(L);
    for (std::size_t i = 0; i < L; ++i) {
        auto rng = make_engine(seed, streams::masks + i);
        auto& mask = masks[i];
        mask.p = p;
        mask.bits.assign(n, 0);
        if (mode == MaskMode::bernoulli) {
            std::bernoulli_distribution coin(p);
            for (auto& b : mask.bits)
                b = coin(rng) ? 1 : 0;
        } else {
            const auto count = std::min(n, static_cast<std::size_t>(std::llround(p * static_cast<double>(n))));
            for (auto j : sample_without_replacement(n, count, rng))
                mask.bits[j] = 1;
        }
    }
    return masks;
}

Measurements measure(const SparseEnsemble& ensemble, std::span<const SamplingMask> masks,
                     const OrthonormalTransform& transform, std::optional<double> inputSnrDb,
                     std::uint64_t seed)
{
    const std::size_t n = ensemble.n;
    if (masks.size() != ensemble.count())
        throw std::invalid_argument("measure: need one mask per signal");
    if (transform.size() != n)
        throw std::invalid_argument("measure: transform length differs from signal length");
    for (const auto& m : masks)
        if (m.bits.size() != n)
            throw std::invalid_argument("measure: mask length differs from signal length");

    Measurements meas;
    meas.inputSnrDb = inputSnrDb;
    meas.values.reserve(masks.size());
    meas.retained.reserve(masks.size());

    std::vector<double> spectrum(n);
    double clean_energy = 0.0;
    std::size_t total_retained = 0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const auto& x = ensemble.signals[i];
        transform.forward({x.data(), n}, spectrum);
        auto idx = masks[i].retained();
        Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t r = 0; r < idx.size(); ++r)
            y[static_cast<Eigen::Index>(r)] = spectrum[idx[r]];
        clean_energy += y.squaredNorm();
        total_retained += idx.size();
        meas.values.push_back(std::move(y));
        meas.retained.push_back(std::move(idx));
    }

    if (inputSnrDb && total_retained > 0 && clean_energy > 0.0) {
        const double noise_energy = clean_energy / std::pow(10.0, *inputSnrDb / 10.0);
        const double sigma = std::sqrt(noise_energy / static_cast<double>(total_retained));
        for (std::size_t i = 0; i < meas.values.size(); ++i) {
            auto rng = make_engine(seed, streams::noise + i);
            std::normal_distribution<double> g(0.0, sigma);
            for (auto& v : meas.values[i])
                v += g(rng);
        }
    }
    return meas;
}

} // namespace jointsparse
