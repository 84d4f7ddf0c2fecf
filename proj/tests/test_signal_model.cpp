#include "jointsparse/signal_model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

using namespace jointsparse;

namespace {

std::set<std::size_t> nonzeros(const Eigen::VectorXd& x)
{
    std::set<std::size_t> out;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (x[j] != 0.0)
            out.insert(static_cast<std::size_t>(j));
    return out;
}

double empirical_snr_db(const SparseEnsemble& ens, const Measurements& meas, const OrthonormalTransform& F)
{
    double clean = 0.0, noise = 0.0;
    std::vector<double> full(ens.n);
    for (std::size_t i = 0; i < ens.count(); ++i) {
        F.forward({ens.signals[i].data(), ens.n}, full);
        for (std::size_t r = 0; r < meas.retained[i].size(); ++r) {
            const double c = full[meas.retained[i][r]];
            clean += c * c;
            const double v = meas.values[i][static_cast<Eigen::Index>(r)] - c;
            noise += v * v;
        }
    }
    return 10.0 * std::log10(clean / noise);
}

} // namespace

TEST_CASE("generate_ensemble at table size keeps K values inside [-1, 1]")
{
    const auto ens = generate_ensemble(256, 8, 51, ValueDistribution::uniform, 7);
    REQUIRE(ens.n == 256);
    REQUIRE(ens.count() == 8);
    REQUIRE(ens.sparsity() == 51);
    REQUIRE(std::set<std::size_t>(ens.support.begin(), ens.support.end()).size() == 51);
    for (const auto& x : ens.signals) {
        REQUIRE(x.size() == 256);
        REQUIRE(x.cwiseAbs().maxCoeff() <= 1.0);
    }
}

TEST_CASE("generate_ensemble with K = n gives a full support")
{
    const auto ens = generate_ensemble(4, 1, 4, ValueDistribution::uniform, 3);
    REQUIRE(ens.support == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("all signals of an ensemble live on the stored support")
{
    for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
        const auto ens = generate_ensemble(8, 3, 2, ValueDistribution::gaussian, seed);
        const std::set<std::size_t> supp(ens.support.begin(), ens.support.end());
        std::set<std::size_t> uni;
        for (const auto& x : ens.signals) {
            const auto nz = nonzeros(x);
            for (auto j : nz)
                REQUIRE(supp.count(j) == 1);
            uni.insert(nz.begin(), nz.end());
        }
        REQUIRE(uni == supp);
        REQUIRE(std::is_sorted(ens.support.begin(), ens.support.end()));
    }
}

TEST_CASE("generate_ensemble rejects bad sizes")
{
    REQUIRE_THROWS_AS(generate_ensemble(4, 1, 5, ValueDistribution::uniform, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_ensemble(4, 0, 2, ValueDistribution::uniform, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_ensemble(4, 1, 0, ValueDistribution::uniform, 0), std::invalid_argument);
}

TEST_CASE("generate_ensemble is deterministic in its seed")
{
    const auto a = generate_ensemble(64, 4, 9, ValueDistribution::gaussian, 11);
    const auto b = generate_ensemble(64, 4, 9, ValueDistribution::gaussian, 11);
    const auto c = generate_ensemble(64, 4, 9, ValueDistribution::gaussian, 12);
    REQUIRE(a.support == b.support);
    for (std::size_t i = 0; i < a.count(); ++i)
        REQUIRE(a.signals[i] == b.signals[i]);
    REQUIRE(a.signals[0] != c.signals[0]);
}

TEST_CASE("fixed_count masks retain exactly round(p n) samples")
{
    const auto masks = generate_masks(256, 8, 0.25, MaskMode::fixed_count, 5);
    REQUIRE(masks.size() == 8);
    for (const auto& m : masks) {
        REQUIRE(m.popcount() == 64);
        for (auto b : m.bits)
            REQUIRE((b == 0 || b == 1));
        const auto r = m.retained();
        REQUIRE(r.size() == 64);
        REQUIRE(std::adjacent_find(r.begin(), r.end(), std::greater_equal<>()) == r.end());
    }
    REQUIRE(masks[0].bits != masks[1].bits);
}

TEST_CASE("bernoulli masks with p = 1 keep everything")
{
    for (const auto& m : generate_masks(33, 3, 1.0, MaskMode::bernoulli, 9))
        REQUIRE(m.popcount() == 33);
}

TEST_CASE("bernoulli mask density concentrates around p")
{
    const auto m = generate_masks(10000, 1, 0.25, MaskMode::bernoulli, 17).front();
    const double rate = static_cast<double>(m.popcount()) / 10000.0;
    REQUIRE(rate >= 0.23);
    REQUIRE(rate <= 0.27);
}

TEST_CASE("generate_masks rejects p outside [0, 1]")
{
    REQUIRE_THROWS_AS(generate_masks(8, 1, 1.5, MaskMode::bernoulli, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_masks(8, 1, -0.1, MaskMode::fixed_count, 0), std::invalid_argument);
}

TEST_CASE("noiseless full sampling returns the full transform")
{
    const auto F = dct(32);
    const auto ens = generate_ensemble(32, 2, 5, ValueDistribution::gaussian, 4);
    const auto masks = generate_masks(32, 2, 1.0, MaskMode::bernoulli, 4);
    const auto meas = measure(ens, masks, *F, std::nullopt, 4);
    std::vector<double> full(32);
    for (std::size_t i = 0; i < 2; ++i) {
        F->forward({ens.signals[i].data(), 32}, full);
        REQUIRE(meas.values[i].size() == 32);
        for (std::size_t k = 0; k < 32; ++k)
            REQUIRE(meas.values[i][static_cast<Eigen::Index>(k)] == full[k]);
    }
}

TEST_CASE("measurement lengths follow the masks")
{
    const auto F = dct(64);
    const auto ens = generate_ensemble(64, 3, 6, ValueDistribution::uniform, 8);
    const auto masks = generate_masks(64, 3, 0.3, MaskMode::bernoulli, 8);
    const auto meas = measure(ens, masks, *F, 20.0, 8);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(static_cast<std::size_t>(meas.values[i].size()) == masks[i].popcount());
        REQUIRE(meas.retained[i] == masks[i].retained());
    }
}

TEST_CASE("noise is calibrated to the requested input SNR")
{
    SECTION("table-sized draw within 0.5 dB")
    {
        const auto F = dct(256);
        const auto ens = generate_ensemble(256, 8, 51, ValueDistribution::uniform, 21);
        const auto masks = generate_masks(256, 8, 1.0, MaskMode::fixed_count, 21);
        const auto meas = measure(ens, masks, *F, 20.0, 21);
        REQUIRE(std::abs(empirical_snr_db(ens, meas, *F) - 20.0) < 0.5);
    }
    SECTION("long signals within 0.2 dB")
    {
        const auto F = dct(8192);
        const auto ens = generate_ensemble(8192, 1, 800, ValueDistribution::gaussian, 22);
        const auto masks = generate_masks(8192, 1, 1.0, MaskMode::fixed_count, 22);
        for (double snr : {0.0, 10.0, 30.0}) {
            const auto meas = measure(ens, masks, *F, snr, 22);
            REQUIRE(std::abs(empirical_snr_db(ens, meas, *F) - snr) < 0.2);
        }
    }
}

TEST_CASE("measure is deterministic and validates shapes")
{
    const auto F = dct(16);
    const auto ens = generate_ensemble(16, 2, 3, ValueDistribution::uniform, 1);
    const auto masks = generate_masks(16, 2, 0.5, MaskMode::fixed_count, 1);
    const auto a = measure(ens, masks, *F, 10.0, 3);
    const auto b = measure(ens, masks, *F, 10.0, 3);
    for (std::size_t i = 0; i < 2; ++i)
        REQUIRE(a.values[i] == b.values[i]);

    REQUIRE_THROWS_AS(measure(ens, std::span(masks).first(1), *F, 10.0, 3), std::invalid_argument);
    const auto short_masks = generate_masks(8, 2, 0.5, MaskMode::fixed_count, 1);
    REQUIRE_THROWS_AS(measure(ens, short_masks, *F, 10.0, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(measure(ens, masks, *dct(8), 10.0, 3), std::invalid_argument);
}
