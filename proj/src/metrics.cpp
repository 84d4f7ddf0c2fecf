#include "jointsparse/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace jointsparse {

namespace {

double energy_ratio_db(double signal, double error)
{
    if (error == 0.0)
        return kSnrCapDb;
    return std::min(kSnrCapDb, 10.0 * std::log10(signal / error));
}

void check_shapes(const SparseEnsemble& truth, std::span<const Eigen::VectorXd> recovered)
{
    if (recovered.size() != truth.count())
        throw std::invalid_argument("reconstruction_snr: signal count mismatch");
    for (std::size_t i = 0; i < recovered.size(); ++i)
        if (recovered[i].size() != truth.signals[i].size())
            throw std::invalid_argument("reconstruction_snr: signal length mismatch");
}

} // namespace

double reconstruction_snr(const SparseEnsemble& truth, std::span<const Eigen::VectorXd> recovered)
{
    check_shapes(truth, recovered);
    double signal = 0.0, error = 0.0;
    for (std::size_t i = 0; i < recovered.size(); ++i) {
        signal += truth.signals[i].squaredNorm();
        error += (truth.signals[i] - recovered[i]).squaredNorm();
    }
    if (signal == 0.0)
        throw std::invalid_argument("reconstruction_snr: ground truth is all zero");
    return energy_ratio_db(signal, error);
}

double reconstruction_snr_per_signal(const SparseEnsemble& truth, std::span<const Eigen::VectorXd> recovered)
{
    check_shapes(truth, recovered);
    double total = 0.0;
    for (std::size_t i = 0; i < recovered.size(); ++i) {
        const double signal = truth.signals[i].squaredNorm();
        if (signal == 0.0)
            throw std::invalid_argument("reconstruction_snr: ground truth signal is all zero");
        total += energy_ratio_db(signal, (truth.signals[i] - recovered[i]).squaredNorm());
    }
    return total / static_cast<double>(recovered.size());
}

SweepPoint aggregate(double axisValue, std::span<const TrialRecord> records)
{
    SweepPoint pt;
    pt.axisValue = axisValue;
    pt.trials = records.size();
    if (records.empty())
        return pt;

    // Sum in sorted order so the aggregates do not depend on record order.
    std::vector<double> snrs, times;
    snrs.reserve(records.size());
    times.reserve(records.size());
    std::size_t ok = 0;
    for (const auto& r : records) {
        snrs.push_back(r.reconSnrDb);
        times.push_back(r.wallTimeSec);
        ok += r.success ? 1 : 0;
    }
    std::sort(snrs.begin(), snrs.end());
    std::sort(times.begin(), times.end());
    const double n = static_cast<double>(records.size());
    pt.meanSnrDb = std::accumulate(snrs.begin(), snrs.end(), 0.0) / n;
    pt.meanWallTimeSec = std::accumulate(times.begin(), times.end(), 0.0) / n;
    pt.successRate = static_cast<double>(ok) / n;
    if (records.size() > 1 && std::isfinite(pt.meanSnrDb)) {
        double ss = 0.0;
        for (double v : snrs)
            ss += (v - pt.meanSnrDb) * (v - pt.meanSnrDb);
        pt.stddevSnrDb = std::sqrt(ss / (n - 1.0));
    }
    return pt;
}

} // namespace jointsparse
