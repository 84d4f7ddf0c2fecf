// Command-line front end: single trials, table and figure sweeps, and the
// minimum-signal-count theory.

#include "jointsparse/csv.hpp"
#include "jointsparse/experiments.hpp"
#include "jointsparse/theory.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

using namespace jointsparse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SolverFlags {
    RunnerConfig defaults;
    double lambda = defaults.solver.lambda;
    double alpha = defaults.solver.alpha;
    double beta = 0.0;   // 0: automatic
    int maxIter = defaults.solver.maxIter;
    double stopTol = -1.0;   // negative: 1e-6 * ||X_0||
    bool noTune = false;
    std::vector<double> alphaGrid = defaults.alphaGrid;
    std::vector<double> lambdaGrid = defaults.lambdaGrid;
    std::vector<int> maxIterGrid = defaults.maxIterGrid;
    bool rawOutput = false;
    bool perSignal = false;

    void attach(CLI::App& app)
    {
        app.add_option("--lambda", lambda, "Relaxation parameter (used with --no-tune)");
        app.add_option("--alpha", alpha, "Threshold decay rate (used with --no-tune)");
        app.add_option("--beta", beta, "Initial threshold (0 = max of the initial magnitude average)");
        app.add_option("--max-iter", maxIter, "Iteration cap (used with --no-tune)");
        app.add_option("--stop-tol", stopTol, "Stopping threshold on ||X_k - X_{k-1}||_F (negative = 1e-6 ||X_0||_F)");
        app.add_flag("--no-tune", noTune, "Run the single configuration above instead of the per-trial grid search");
        app.add_option("--alpha-grid", alphaGrid, "Decay rates searched per trial")->delimiter(',');
        app.add_option("--lambda-grid", lambdaGrid, "Relaxation parameters searched per trial")->delimiter(',');
        app.add_option("--max-iter-grid", maxIterGrid, "Iteration caps searched per trial")->delimiter(',');
        app.add_flag("--raw-output", rawOutput, "Unknown sparsity: return the last iterate without masking it by the last support");
        app.add_flag("--per-signal-snr", perSignal, "Score by the mean per-signal SNR instead of the pooled SNR");
    }

    RunnerConfig runner() const
    {
        RunnerConfig rc = defaults;
        rc.solver.lambda = lambda;
        rc.solver.alpha = alpha;
        if (beta > 0.0)
            rc.solver.beta = beta;
        rc.solver.maxIter = maxIter;
        if (stopTol >= 0.0)
            rc.solver.stopTol = stopTol;
        rc.solver.thresholdOutput = !rawOutput;
        rc.tune = !noTune;
        rc.alphaGrid = alphaGrid;
        rc.lambdaGrid = lambdaGrid;
        rc.maxIterGrid = maxIterGrid;
        rc.perSignalSnr = perSignal;
        return rc;
    }
};

struct TrialFlags {
    std::size_t n = 256;
    std::size_t L = 8;
    double density = 12.0;
    std::size_t K = 0;
    double rate = 0.25;
    std::string snr = "20";
    std::string mode = "unknown";
    std::string mask = "fixed_count";
    std::string values = "uniform";

    void attach(CLI::App& app)
    {
        app.add_option("--n", n, "Signal length");
        app.add_option("--L", L, "Number of signals");
        app.add_option("--density", density, "Support size as percent of n");
        app.add_option("--K", K, "Support size as a count (overrides --density when > 0)");
        app.add_option("--rate", rate, "Sampling rate p");
        app.add_option("--snr", snr, "Input SNR in dB, or 'none' for noiseless");
        app.add_option("--mode", mode, "Sparsity mode")->check(CLI::IsMember({"known", "unknown"}));
        app.add_option("--mask", mask, "Mask mode")->check(CLI::IsMember({"fixed_count", "bernoulli"}));
        app.add_option("--values", values, "Nonzero value law")->check(CLI::IsMember({"uniform", "gaussian"}));
    }

    TrialSpec spec() const
    {
        TrialSpec s;
        s.n = n;
        s.L = L;
        if (n == 0 || L == 0)
            throw UsageError("--n and --L must be positive");
        s.K = K > 0 ? K : sparsity_from_density(density, n);
        if (s.K > n)
            throw UsageError("K must not exceed n");
        if (!(rate >= 0.0 && rate <= 1.0))
            throw UsageError("--rate must lie in [0, 1]");
        s.p = rate;
        if (snr == "none") {
            s.inputSnrDb.reset();
        } else {
            try {
                s.inputSnrDb = std::stod(snr);
            } catch (const std::exception&) {
                throw UsageError("--snr must be a number or 'none'");
            }
        }
        s.mode = parse_mode(mode);
        s.maskMode = mask == "bernoulli" ? MaskMode::bernoulli : MaskMode::fixed_count;
        s.values = values == "gaussian" ? ValueDistribution::gaussian : ValueDistribution::uniform;
        return s;
    }
};

struct StatsFlags {
    CoefficientStats stats;

    void attach(CLI::App& app)
    {
        app.add_option("--mu0", stats.mu0, "Mean of |zero-coefficient estimate|")->required();
        app.add_option("--mu1", stats.mu1, "Mean of |nonzero-coefficient estimate|")->required();
        app.add_option("--var0", stats.var0, "Variance sigma_0^2")->required();
        app.add_option("--var1", stats.var1, "Variance sigma_1^2")->required();
        app.add_option("--eps", stats.eps, "Detection threshold")->required();
    }
};

void emit(const std::string& path, const std::string& content)
{
    if (path.empty() || path == "-")
        std::cout << content;
    else
        csv::write_atomic(path, content);
}

std::vector<double> grid(double from, double to, double step)
{
    if (!(step > 0.0) || to < from)
        throw UsageError("need --step > 0 and --to >= --from");
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> g;
    for (std::size_t i = 0; i < count; ++i)
        g.push_back(from + static_cast<double>(i) * step);
    return g;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Joint sparse recovery: SIMAT, IMAT and SOMP solvers with a reproducible benchmark harness"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    int jobs = 0;
    auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads (0 = OpenMP default; falls back to $JOINTSPARSE_JOBS)")
                         ->check(CLI::NonNegativeNumber);

    // solve
    auto* solve = app.add_subcommand("solve", "Run one trial and print its CSV record");
    solve->option_defaults()->always_capture_default();
    std::string algo = "simat";
    std::uint64_t seed = 0;
    std::string out;
    bool no_header = false;
    TrialFlags trial;
    SolverFlags solver;
    solve->add_option("--algo", algo, "Algorithm")->check(CLI::IsMember({"imat", "simat", "somp"}));
    trial.attach(*solve);
    solver.attach(*solve);
    solve->add_option("--seed", seed, "Random seed");
    solve->add_option("-o,--output", out, "Output CSV path ('-' = stdout)");
    solve->add_flag("--no-header", no_header, "Omit the CSV header");

    // table1 / table2
    auto* t1 = app.add_subcommand("table1", "Mean reconstruction SNR grid (mode x input SNR x density x algorithm)");
    auto* t2 = app.add_subcommand("table2", "Median solver run time, 100 dB input, known sparsity");
    std::size_t trials = 100;
    std::string records_path;
    for (auto* sub : {t1, t2}) {
        sub->option_defaults()->always_capture_default();
        sub->add_option("--trials", trials, "Trials per cell");
        sub->add_option("--seed", seed, "Base seed");
        sub->add_option("-o,--output", out, "Output CSV path ('-' = stdout)");
    }
    solver.attach(*t1);
    t1->add_option("--records", records_path, "Also write one row per trial to this path");
    SolverFlags solver2;
    solver2.attach(*t2);

    // fig
    auto* fig = app.add_subcommand("fig", "Sweep one axis and write aggregated CSV");
    fig->option_defaults()->always_capture_default();
    std::string axis = "density";
    double from = 4, to = 24, step = 2;
    TrialFlags fig_trial;
    SolverFlags fig_solver;
    std::string fig_algo = "simat";
    fig->add_option("--axis", axis, "Swept axis (density and sampling in percent / fraction)")
        ->check(CLI::IsMember({"density", "signals", "sampling", "input_snr"}));
    fig->add_option("--from", from, "First grid value");
    fig->add_option("--to", to, "Last grid value");
    fig->add_option("--step", step, "Grid step");
    fig->add_option("--algo", fig_algo, "Algorithm")->check(CLI::IsMember({"imat", "simat", "somp"}));
    fig_trial.attach(*fig);
    fig_solver.attach(*fig);
    fig->add_option("--trials", trials, "Trials per grid point");
    fig->add_option("--seed", seed, "Base seed");
    fig->add_option("-o,--output", out, "Output CSV path ('-' = stdout)");
    fig->add_option("--records", records_path, "Also write one row per trial to this path");

    // minl
    auto* minl = app.add_subcommand("minl", "Minimum number of signals for joint thresholding to help");
    minl->option_defaults()->always_capture_default();
    StatsFlags minl_stats;
    minl_stats.attach(*minl);

    // lemma-check
    auto* lemma = app.add_subcommand("lemma-check", "Monte-Carlo check of the averaging inequalities");
    lemma->option_defaults()->always_capture_default();
    StatsFlags lemma_stats;
    std::size_t lemma_L = 2;
    std::size_t lemma_trials = 1000000;
    lemma_stats.attach(*lemma);
    lemma->add_option("--L", lemma_L, "Number of averaged signals");
    lemma->add_option("--trials", lemma_trials, "Monte-Carlo trials");
    lemma->add_option("--seed", seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (const char* env = std::getenv("JOINTSPARSE_JOBS"); env && jobs_opt->count() == 0) {
        const std::string_view text(env);
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), jobs);
        if (ec != std::errc{} || end != text.data() + text.size() || jobs < 0) {
            std::cerr << "JOINTSPARSE_JOBS must be a non-negative integer, got '" << text << "'\n";
            return kExitUsage;
        }
    }
    if (jobs > 0)
        omp_set_num_threads(jobs);

    try {
        if (*solve) {
            auto spec = trial.spec();
            spec.algorithm = parse_algorithm(algo);
            spec.seed = seed;
            if (spec.algorithm == Algorithm::imat && spec.L != 1)
                throw UsageError("imat recovers a single signal; use --L 1 (or simat for joint recovery)");
            const auto rec = run_trial(spec, solver.runner());
            std::string text = no_header ? std::string() : std::string(csv::kTrialHeader) + '\n';
            text += csv::trial_row(rec);
            emit(out, text);
        } else if (*t1) {
            std::vector<TrialRecord> recs;
            const auto cells = table1(trials, seed, solver.runner(), records_path.empty() ? nullptr : &recs);
            if (!records_path.empty())
                csv::write_atomic(records_path, csv::trials(recs));
            emit(out, csv::table1(cells));
        } else if (*t2) {
            const auto cells = table2(trials, seed, solver2.runner());
            emit(out, csv::table2(cells));
        } else if (*fig) {
            auto base = fig_trial.spec();
            base.algorithm = parse_algorithm(fig_algo);
            const auto values = grid(from, to, step);
            std::vector<TrialRecord> recs;
            const auto result = sweep(parse_axis(axis), values, base, trials, seed, fig_solver.runner(),
                                      records_path.empty() ? nullptr : &recs);
            const auto text = csv::sweep(result);
            if (!records_path.empty())
                csv::write_atomic(records_path, csv::trials(recs));
            emit(out, text);
        } else if (*minl) {
            const auto b = signal_count_bound(minl_stats.stats);
            std::cout << "lemma1_bound=" << csv::number(b.lemma1) << '\n'
                      << "lemma2_bound=" << csv::number(b.lemma2) << '\n'
                      << "min_L=" << b.minL << '\n';
        } else if (*lemma) {
            const auto r = monte_carlo_lemma_check(lemma_stats.stats, lemma_L, lemma_trials, seed);
            const bool zero_ok = r.zero_coefficient_direction();
            const bool nonzero_ok = r.nonzero_coefficient_direction();
            std::cout << "P(w>=eps)=" << csv::number(r.pW, 8) << '\n'
                      << "P(w_L>=eps)=" << csv::number(r.pWL, 8) << '\n'
                      << "P(z>=eps)=" << csv::number(r.pZ, 8) << '\n'
                      << "P(z_L>=eps)=" << csv::number(r.pZL, 8) << '\n'
                      << "zero_coefficient_direction=" << (zero_ok ? "pass" : "fail")
                      << " (diff=" << csv::number(r.pW - r.pWL, 8) << ", se=" << csv::number(r.seW, 8) << ")\n"
                      << "nonzero_coefficient_direction=" << (nonzero_ok ? "pass" : "fail")
                      << " (diff=" << csv::number(r.pZL - r.pZ, 8) << ", se=" << csv::number(r.seZ, 8) << ")\n";
            return zero_ok && nonzero_ok ? kExitOk : kExitIo;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}
