#include "jointsparse/experiments.hpp"
#include "jointsparse/reference.hpp"
#include "jointsparse/signal_model.hpp"
#include "jointsparse/solvers.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace jointsparse;

namespace {

struct Problem {
    SparseEnsemble truth;
    std::vector<MeasurementOperator> ops;
    std::vector<Eigen::VectorXd> ys;
};

Problem make_problem(std::size_t n, std::size_t L, std::size_t K, double p, std::optional<double> snr,
                     std::uint64_t seed, ValueDistribution dist = ValueDistribution::uniform)
{
    Problem pr;
    const auto F = dct(n);
    pr.truth = generate_ensemble(n, L, K, dist, seed);
    const auto masks = generate_masks(n, L, p, MaskMode::fixed_count, seed);
    const auto meas = measure(pr.truth, masks, *F, snr, seed);
    for (std::size_t i = 0; i < L; ++i)
        pr.ops.push_back(MeasurementOperator::from_transform(F, meas.retained[i]));
    pr.ys = meas.values;
    return pr;
}

double max_rel_error(const std::vector<Eigen::VectorXd>& got, const std::vector<Eigen::VectorXd>& want)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i)
        worst = std::max(worst, (got[i] - want[i]).norm() / std::max(want[i].norm(), 1e-300));
    return worst;
}

bool bitwise_equal(const SolverResult& a, const SolverResult& b)
{
    if (a.iterations != b.iterations || a.finalSupport.diag != b.finalSupport.diag ||
        a.trace.size() != b.trace.size() || a.recovered.size() != b.recovered.size())
        return false;
    for (std::size_t i = 0; i < a.recovered.size(); ++i)
        if (a.recovered[i] != b.recovered[i])
            return false;
    for (std::size_t k = 0; k < a.trace.size(); ++k)
        if (a.trace[k].threshold != b.trace[k].threshold || a.trace[k].updateNorm != b.trace[k].updateNorm ||
            a.trace[k].supportSize != b.trace[k].supportSize)
            return false;
    return true;
}

std::vector<Eigen::MatrixXd> dense(const Problem& pr)
{
    std::vector<Eigen::MatrixXd> out;
    for (const auto& op : pr.ops)
        out.push_back(op.to_dense());
    return out;
}

} // namespace

TEST_CASE("simat with full sampling and no noise is exact after one step")
{
    for (std::size_t K : {1u, 5u, 20u}) {
        const auto pr = make_problem(32, 1, K, 1.0, std::nullopt, K);
        const auto r = simat(pr.ops, pr.ys, SolverConfig{});
        REQUIRE(max_rel_error(r.recovered, pr.truth.signals) < 1e-8);
    }
}

TEST_CASE("simat recovers a sparse table-size ensemble at high input SNR")
{
    TrialSpec spec;
    spec.K = 10;
    spec.inputSnrDb = 100.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        spec.seed = seed;
        REQUIRE(run_trial(spec, RunnerConfig{}).reconSnrDb >= 100.0);
    }
}

TEST_CASE("simat and somp match the exhaustive oracle on small problems")
{
    SECTION("one index, two signals, eight samples each")
    {
        int checked = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto pr = make_problem(16, 2, 1, 0.5, std::nullopt, seed, ValueDistribution::gaussian);
            const auto fit = oracle::exhaustive_joint_fit(dense(pr), pr.ys, 1);
            if (fit.second - fit.best <= 1e-6)
                continue;
            ++checked;
            SolverConfig cfg;
            cfg.mode = SparsityMode::known;
            cfg.sparsityK = 1;
            const auto r = simat(pr.ops, pr.ys, cfg);
            REQUIRE(r.finalSupport.indices() == fit.support);
            REQUIRE(max_rel_error(r.recovered, fit.signals) < 1e-6);
        }
        REQUIRE(checked >= 8);
    }
    SECTION("two indices for somp")
    {
        int checked = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto pr = make_problem(16, 2, 2, 0.5, std::nullopt, seed, ValueDistribution::gaussian);
            const auto fit = oracle::exhaustive_joint_fit(dense(pr), pr.ys, 2);
            if (fit.second - fit.best <= 1e-6)
                continue;
            ++checked;
            const auto r = somp(pr.ops, pr.ys, SompConfig{.atoms = 2});
            REQUIRE(r.finalSupport.indices() == fit.support);
            REQUIRE(max_rel_error(r.recovered, fit.signals) < 1e-6);
        }
        REQUIRE(checked >= 8);
    }
}

TEST_CASE("imat is simat with one signal")
{
    const auto pr = make_problem(64, 1, 4, 0.4, 30.0, 5);
    SolverConfig cfg;
    cfg.alpha = 0.1;
    const auto a = imat(pr.ops[0], pr.ys[0], cfg);
    const auto b = simat(pr.ops, pr.ys, cfg);
    REQUIRE(bitwise_equal(a, b));
}

TEST_CASE("imat fails at 20 percent density with 25 percent sampling")
{
    TrialSpec spec;
    spec.L = 1;
    spec.K = sparsity_from_density(20.0, 256);
    spec.algorithm = Algorithm::imat;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        spec.seed = seed;
        total += run_trial(spec, RunnerConfig{}).reconSnrDb;
    }
    REQUIRE(total / 10.0 < 5.0);
}

TEST_CASE("simat trace thresholds decrease strictly")
{
    const auto pr = make_problem(128, 4, 8, 0.3, 20.0, 6);
    SolverConfig cfg;
    cfg.stopTol = 0.0;
    cfg.maxIter = 40;
    const auto r = simat(pr.ops, pr.ys, cfg);
    REQUIRE(r.iterations == 40);
    REQUIRE(r.trace.size() == 40);
    for (std::size_t k = 1; k < r.trace.size(); ++k)
        REQUIRE(r.trace[k].threshold < r.trace[k - 1].threshold);
    REQUIRE(r.trace.front().supportSize >= 1);
}

TEST_CASE("support size never shrinks while the iterates stand still")
{
    // Full sampling: the relaxation step returns x_0 on the support, so iterates
    // only change when the support grows.
    const auto pr = make_problem(32, 2, 6, 1.0, std::nullopt, 7);
    SolverConfig cfg;
    cfg.stopTol = 0.0;
    cfg.maxIter = 30;
    const auto r = simat(pr.ops, pr.ys, cfg);
    for (std::size_t k = 1; k < r.trace.size(); ++k)
        if (r.trace[k - 1].updateNorm == 0.0)
            REQUIRE(r.trace[k].supportSize >= r.trace[k - 1].supportSize);
}

TEST_CASE("truth is a fixed point of the relaxation step")
{
    const auto pr = make_problem(64, 3, 5, 0.4, std::nullopt, 8);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& x = pr.truth.signals[i];
        const auto x0 = pr.ops[i].pinv_apply(pr.ys[i]);
        Eigen::VectorXd px;
        pr.ops[i].project(x, px);
        for (double lambda : {0.5, 1.0, 1.9}) {
            const Eigen::VectorXd next = x + lambda * (x0 - px);
            REQUIRE((next - x).norm() <= 1e-10 * x.norm());
        }
    }
    // The solver itself: starting from a support that covers the truth, it stays put.
    SolverConfig cfg;
    cfg.beta = 0.0;
    cfg.maxIter = 5;
    const auto full = make_problem(64, 3, 5, 1.0, std::nullopt, 8);
    const auto r = simat(full.ops, full.ys, cfg);
    REQUIRE(max_rel_error(r.recovered, full.truth.signals) < 1e-10);
}

TEST_CASE("known-sparsity output lives on K indices")
{
    const auto pr = make_problem(128, 4, 6, 0.35, 40.0, 9);
    SolverConfig cfg;
    cfg.mode = SparsityMode::known;
    cfg.sparsityK = 6;
    const auto r = simat(pr.ops, pr.ys, cfg);
    REQUIRE(r.finalSupport.count() == 6);
    for (const auto& x : r.recovered)
        for (Eigen::Index j = 0; j < x.size(); ++j)
            if (!r.finalSupport.contains(static_cast<std::size_t>(j)))
                REQUIRE(x[j] == 0.0);
}

TEST_CASE("thresholded output zeroes everything off the last support")
{
    const auto pr = make_problem(128, 4, 6, 0.35, 20.0, 10);
    SolverConfig cfg;
    const auto plain = simat(pr.ops, pr.ys, cfg);
    cfg.thresholdOutput = true;
    const auto masked = simat(pr.ops, pr.ys, cfg);
    REQUIRE(plain.finalSupport.diag == masked.finalSupport.diag);
    for (std::size_t i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 128; ++j)
            REQUIRE(masked.recovered[i][j] ==
                    (masked.finalSupport.contains(static_cast<std::size_t>(j)) ? plain.recovered[i][j] : 0.0));
}

TEST_CASE("simat is deterministic and matches the serial reference bitwise")
{
    for (std::size_t L : {1u, 8u, 40u}) {
        const auto pr = make_problem(256, L, 20, 0.25, 20.0, 11 + L);
        for (bool known : {false, true}) {
            SolverConfig cfg = experiment_solver_defaults();
            if (known) {
                cfg.mode = SparsityMode::known;
                cfg.sparsityK = 20;
            }
            const auto a = simat(pr.ops, pr.ys, cfg);
            const auto b = simat(pr.ops, pr.ys, cfg);
            const auto c = reference::simat(pr.ops, pr.ys, cfg);
            REQUIRE(bitwise_equal(a, b));
            REQUIRE(bitwise_equal(a, c));
        }
    }
}

TEST_CASE("simat reports divergence with the iteration index")
{
    auto pr = make_problem(16, 2, 2, 0.5, std::nullopt, 12);
    pr.ys[1][0] = std::numeric_limits<double>::quiet_NaN();
    try {
        simat(pr.ops, pr.ys, SolverConfig{});
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        REQUIRE(e.iteration() == 1);
    }
}

TEST_CASE("solvers validate their inputs")
{
    const auto pr = make_problem(16, 2, 2, 0.5, std::nullopt, 13);
    SolverConfig cfg;
    REQUIRE_THROWS_AS(simat(std::span(pr.ops).first(1), pr.ys, cfg), std::invalid_argument);
    REQUIRE_THROWS_AS(simat({}, {}, cfg), std::invalid_argument);
    auto ys = pr.ys;
    ys[0].conservativeResize(ys[0].size() + 1);
    REQUIRE_THROWS_AS(simat(pr.ops, ys, cfg), std::invalid_argument);
    cfg.mode = SparsityMode::known;
    REQUIRE_THROWS_AS(simat(pr.ops, pr.ys, cfg), std::invalid_argument);
    cfg.sparsityK = 17;
    REQUIRE_THROWS_AS(simat(pr.ops, pr.ys, cfg), std::invalid_argument);
    SolverConfig bad;
    bad.lambda = 0.0;
    REQUIRE_THROWS_AS(simat(pr.ops, pr.ys, bad), std::invalid_argument);
    bad = {};
    bad.maxIter = 0;
    REQUIRE_THROWS_AS(simat(pr.ops, pr.ys, bad), std::invalid_argument);
    REQUIRE_THROWS_AS(somp(pr.ops, pr.ys, SompConfig{.atoms = 9}), std::invalid_argument);
    REQUIRE_THROWS_AS(somp(pr.ops, pr.ys, SompConfig{.residualTol = -1.0}), std::invalid_argument);
}

TEST_CASE("somp recovers a single spike in one step")
{
    // With unit-norm columns the spike's own column has the largest correlation.
    const std::size_t n = 32;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x[13] = -0.7;
    std::vector<MeasurementOperator> ops;
    std::vector<Eigen::VectorXd> ys;
    for (int rows : {1, 3}) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Random(rows, n);
        M.colwise().normalize();
        ops.push_back(MeasurementOperator::from_matrix(M));
        ys.push_back(ops.back().apply(x));
    }
    const auto single = somp(std::span(ops).subspan(1), std::span(ys).subspan(1), SompConfig{.atoms = 1});
    REQUIRE(single.finalSupport.indices() == std::vector<std::size_t>{13});
    REQUIRE((single.recovered[0] - x).norm() < 1e-12);
    const auto both = somp(ops, ys, SompConfig{.atoms = 1});
    REQUIRE(both.iterations == 1);
    REQUIRE(both.finalSupport.indices() == std::vector<std::size_t>{13});
    REQUIRE((both.recovered[0] - x).norm() < 1e-12);
    REQUIRE((both.recovered[1] - x).norm() < 1e-12);
}

TEST_CASE("somp in unknown mode stops once residuals reach the tolerance")
{
    const auto pr = make_problem(128, 4, 6, 0.4, std::nullopt, 14);
    const auto r = somp(pr.ops, pr.ys, SompConfig{.residualTol = 1e-9});
    REQUIRE(r.finalSupport.count() == 6);
    REQUIRE(max_rel_error(r.recovered, pr.truth.signals) < 1e-9);
}

TEST_CASE("top_k breaks ties towards the lowest index")
{
    const std::vector<double> v{1.0, 3.0, 2.0, 3.0, 2.0};
    REQUIRE(top_k(v, 2) == std::vector<std::size_t>{1, 3});
    REQUIRE(top_k(v, 3) == std::vector<std::size_t>{1, 2, 3});
    REQUIRE(top_k(v, 9).size() == 5);
    REQUIRE(top_k(v, 0).empty());
}

TEST_CASE("joint recovery beats single-signal recovery on support detection")
{
    // 500 seeded trials at 12% density: L = 8 finds the support far more often.
    TrialSpec spec;
    spec.K = sparsity_from_density(12.0, 256);
    RunnerConfig rc;
    std::vector<TrialSpec> joint, single;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        spec.seed = seed;
        spec.algorithm = Algorithm::simat;
        spec.L = 8;
        joint.push_back(spec);
        spec.algorithm = Algorithm::imat;
        spec.L = 1;
        single.push_back(spec);
    }
    const auto a = aggregate(0.0, run_trials(joint, rc));
    const auto b = aggregate(0.0, run_trials(single, rc));
    REQUIRE(a.successRate >= b.successRate + 0.10);
}
