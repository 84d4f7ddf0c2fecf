#include "jointsparse/experiments.hpp"

#include "jointsparse/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace jointsparse {

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::imat: return "imat";
    case Algorithm::simat: return "simat";
    case Algorithm::somp: return "somp";
    }
    return "?";
}

std::string_view to_string(SparsityMode m)
{
    return m == SparsityMode::known ? "known" : "unknown";
}

Algorithm parse_algorithm(std::string_view s)
{
    if (s == "imat") return Algorithm::imat;
    if (s == "simat") return Algorithm::simat;
    if (s == "somp") return Algorithm::somp;
    throw std::invalid_argument("unknown algorithm: " + std::string(s));
}

SparsityMode parse_mode(std::string_view s)
{
    if (s == "known") return SparsityMode::known;
    if (s == "unknown") return SparsityMode::unknown;
    throw std::invalid_argument("unknown sparsity mode: " + std::string(s));
}

std::string_view to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::density: return "density";
    case SweepAxis::signals: return "signals";
    case SweepAxis::sampling: return "sampling";
    case SweepAxis::input_snr: return "input_snr";
    }
    return "?";
}

SweepAxis parse_axis(std::string_view s)
{
    if (s == "density") return SweepAxis::density;
    if (s == "signals") return SweepAxis::signals;
    if (s == "sampling") return SweepAxis::sampling;
    if (s == "input_snr") return SweepAxis::input_snr;
    throw std::invalid_argument("unknown sweep axis: " + std::string(s));
}

std::size_t sparsity_from_density(double densityPct, std::size_t n)
{
    if (!(densityPct > 0.0 && densityPct <= 100.0))
        throw std::invalid_argument("density must lie in (0, 100]");
    const auto k = static_cast<std::size_t>(std::llround(densityPct * static_cast<double>(n) / 100.0));
    return std::clamp<std::size_t>(k, 1, n);
}

SolverConfig experiment_solver_defaults()
{
    SolverConfig c;
    c.lambda = 1.9;
    c.alpha = 0.05;
    c.maxIter = 100;
    c.thresholdOutput = true;
    return c;
}

double somp_residual_tolerance(const Measurements& meas)
{
    double energy = 0.0;
    std::size_t total = 0, widest = 0;
    for (const auto& y : meas.values) {
        energy += y.squaredNorm();
        total += static_cast<std::size_t>(y.size());
        widest = std::max(widest, static_cast<std::size_t>(y.size()));
    }
    if (total == 0)
        return 0.0;
    if (!meas.inputSnrDb)
        return 1e-10 * std::sqrt(energy / static_cast<double>(meas.count()));
    // Measured energy = clean + noise, clean / noise = 10^(snr/10).
    const double noise_var = energy / ((1.0 + std::pow(10.0, *meas.inputSnrDb / 10.0)) * static_cast<double>(total));
    return std::sqrt(static_cast<double>(widest) * noise_var);
}

namespace {

struct Solved {
    std::vector<Eigen::VectorXd> recovered;
    int iterations = 0;
    double seconds = 0.0;
};

using Clock = std::chrono::steady_clock;

Solved solve_once(const TrialSpec& spec, const SolverConfig& solver, std::span<const MeasurementOperator> ops,
                  const Measurements& meas)
{
    Solved out;
    const auto start = Clock::now();
    switch (spec.algorithm) {
    case Algorithm::simat: {
        auto res = simat(ops, meas.values, solver);
        out.recovered = std::move(res.recovered);
        out.iterations = res.iterations;
        break;
    }
    case Algorithm::imat: {
        for (std::size_t i = 0; i < ops.size(); ++i) {
            auto res = imat(ops[i], meas.values[i], solver);
            out.recovered.push_back(std::move(res.recovered.front()));
            out.iterations = std::max(out.iterations, res.iterations);
        }
        break;
    }
    case Algorithm::somp: {
        SompConfig sc;
        if (spec.mode == SparsityMode::known)
            sc.atoms = spec.K;
        else
            sc.residualTol = somp_residual_tolerance(meas);
        auto res = somp(ops, meas.values, sc);
        out.recovered = std::move(res.recovered);
        out.iterations = res.iterations;
        break;
    }
    }
    out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

} // namespace

TrialRecord run_trial(const TrialSpec& spec, const RunnerConfig& cfg)
{
    if (spec.L == 0 || spec.K == 0 || spec.K > spec.n)
        throw std::invalid_argument("run_trial: need L >= 1 and 0 < K <= n");
    if (!(spec.p >= 0.0 && spec.p <= 1.0))
        throw std::invalid_argument("run_trial: p must lie in [0, 1]");

    const auto ensemble = generate_ensemble(spec.n, spec.L, spec.K, spec.values, spec.seed);
    const auto masks = generate_masks(spec.n, spec.L, spec.p, spec.maskMode, spec.seed);
    const auto transform = dct(spec.n);
    const auto meas = measure(ensemble, masks, *transform, spec.inputSnrDb, spec.seed);
    std::vector<MeasurementOperator> ops;
    ops.reserve(spec.L);
    for (const auto& idx : meas.retained)
        ops.push_back(MeasurementOperator::from_transform(transform, idx));

    auto score = [&](const std::vector<Eigen::VectorXd>& rec) {
        return cfg.perSignalSnr ? reconstruction_snr_per_signal(ensemble, rec)
                                : reconstruction_snr(ensemble, rec);
    };

    SolverConfig base = cfg.solver;
    base.mode = spec.mode;
    base.sparsityK = spec.K;

    TrialRecord rec;
    rec.spec = spec;
    rec.reconSnrDb = -std::numeric_limits<double>::infinity();
    const bool tuned = cfg.tune && spec.algorithm != Algorithm::somp;
    std::vector<SolverConfig> candidates;
    if (tuned) {
        for (int it : cfg.maxIterGrid)
            for (double a : cfg.alphaGrid)
                for (double l : cfg.lambdaGrid) {
                    auto c = base;
                    c.alpha = a;
                    c.lambda = l;
                    c.maxIter = it;
                    candidates.push_back(c);
                }
    } else {
        candidates.push_back(base);
    }

    if (candidates.empty())
        throw std::invalid_argument("run_trial: empty tuning grid");
    bool any = false;
    for (const auto& c : candidates) {
        try {
            auto solved = solve_once(spec, c, ops, meas);
            const double snr = score(solved.recovered);
            if (!any || snr > rec.reconSnrDb) {
                rec.reconSnrDb = snr;
                rec.iterations = solved.iterations;
                rec.wallTimeSec = solved.seconds;
                any = true;
            }
        } catch (const std::exception&) {
            // Divergence or an infeasible configuration counts as a failed attempt.
        }
    }
    rec.success = rec.reconSnrDb > kSuccessSnrDb;
    return rec;
}

std::vector<TrialRecord> run_trials(std::span<const TrialSpec> specs, const RunnerConfig& cfg)
{
    std::vector<TrialRecord> records(specs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(specs.size()); ++i)
        records[i] = run_trial(specs[i], cfg);
    return records;
}

TrialSpec at_axis(const TrialSpec& base, SweepAxis axis, double value)
{
    TrialSpec s = base;
    switch (axis) {
    case SweepAxis::density:
        s.K = sparsity_from_density(value, s.n);
        break;
    case SweepAxis::signals:
        if (!(value >= 1.0))
            throw std::invalid_argument("signals axis values must be >= 1");
        s.L = static_cast<std::size_t>(std::llround(value));
        break;
    case SweepAxis::sampling:
        if (!(value >= 0.0 && value <= 1.0))
            throw std::invalid_argument("sampling axis values must lie in [0, 1]");
        s.p = value;
        break;
    case SweepAxis::input_snr:
        s.inputSnrDb = value;
        break;
    }
    return s;
}

SweepResult sweep(SweepAxis axis, std::span<const double> grid, const TrialSpec& base, std::size_t trials,
                  std::uint64_t seedBase, const RunnerConfig& cfg, std::vector<TrialRecord>* records)
{
    SweepResult result;
    result.axis = axis;
    std::vector<TrialSpec> specs;
    specs.reserve(grid.size() * trials);
    for (double v : grid) {
        const auto point = at_axis(base, axis, v);
        for (std::size_t t = 0; t < trials; ++t) {
            auto s = point;
            s.seed = seedBase + t;
            specs.push_back(s);
        }
    }
    auto recs = run_trials(specs, cfg);
    for (std::size_t g = 0; g < grid.size(); ++g)
        result.points.push_back(aggregate(grid[g], std::span(recs).subspan(g * trials, trials)));
    if (records)
        *records = std::move(recs);
    return result;
}

std::vector<Table1Cell> table1(std::size_t trialsPerCell, std::uint64_t seedBase, const RunnerConfig& cfg,
                               std::vector<TrialRecord>* records)
{
    std::vector<Table1Cell> cells;
    std::vector<TrialSpec> specs;
    for (auto mode : {SparsityMode::unknown, SparsityMode::known})
        for (double snr : kTable1InputSnrs)
            for (double density : kTableDensities)
                for (auto algo : {Algorithm::imat, Algorithm::simat, Algorithm::somp}) {
                    Table1Cell cell;
                    cell.mode = mode;
                    cell.inputSnrDb = snr;
                    cell.densityPct = density;
                    cell.K = sparsity_from_density(density, kTableLength);
                    cell.algorithm = algo;
                    cells.push_back(cell);
                    for (std::size_t t = 0; t < trialsPerCell; ++t) {
                        TrialSpec s;
                        s.n = kTableLength;
                        s.L = kTableSignals;
                        s.K = cell.K;
                        s.p = kTableSamplingRate;
                        s.inputSnrDb = snr;
                        s.algorithm = algo;
                        s.mode = mode;
                        s.seed = seedBase + t;
                        specs.push_back(s);
                    }
                }

    auto recs = run_trials(specs, cfg);
    for (std::size_t c = 0; c < cells.size(); ++c)
        cells[c].stats = aggregate(cells[c].densityPct, std::span(recs).subspan(c * trialsPerCell, trialsPerCell));
    if (records)
        *records = std::move(recs);
    return cells;
}

std::vector<Table2Cell> table2(std::size_t trialsPerCell, std::uint64_t seedBase, const RunnerConfig& cfg)
{
    RunnerConfig timed = cfg;
    timed.tune = false;
    std::vector<Table2Cell> cells;
    for (auto algo : {Algorithm::simat, Algorithm::somp})
        for (double density : kTableDensities) {
            Table2Cell cell;
            cell.algorithm = algo;
            cell.densityPct = density;
            cell.K = sparsity_from_density(density, kTableLength);
            cell.trials = trialsPerCell;
            // Timed trials run one at a time so they do not compete for cores.
            std::vector<double> times;
            times.reserve(trialsPerCell);
            for (std::size_t t = 0; t < trialsPerCell; ++t) {
                TrialSpec s;
                s.n = kTableLength;
                s.L = kTableSignals;
                s.K = cell.K;
                s.p = kTableSamplingRate;
                s.inputSnrDb = 100.0;
                s.algorithm = algo;
                s.mode = SparsityMode::known;
                s.seed = seedBase + t;
                times.push_back(run_trial(s, timed).wallTimeSec);
            }
            if (!times.empty()) {
                std::sort(times.begin(), times.end());
                const auto mid = times.size() / 2;
                cell.medianWallTimeSec = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
            }
            cells.push_back(cell);
        }
    return cells;
}

} // namespace jointsparse
