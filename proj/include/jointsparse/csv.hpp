#pragma once

#include "jointsparse/experiments.hpp"

#include <span>
#include <string>
#include <string_view>

namespace jointsparse::csv {

inline constexpr std::string_view kTrialHeader =
    "n,L,K,p,input_snr_db,algorithm,mode,seed,recon_snr_db,success,iterations,wall_time_sec";
inline constexpr std::string_view kSweepHeader =
    "axis_value,mean_snr_db,stddev_snr_db,success_rate,mean_wall_time_sec,trials";
inline constexpr std::string_view kTable1Header =
    "mode,input_snr_db,density_pct,K,algorithm,mean_snr_db,stddev_snr_db,success_rate,trials";
inline constexpr std::string_view kTable2Header =
    "algorithm,density_pct,K,median_wall_time_sec,trials";

/// Formats a double with '.' as decimal separator regardless of locale.
std::string number(double v, int precision = 6);

std::string trial_row(const TrialRecord& r);
std::string trials(std::span<const TrialRecord> records);
std::string sweep(const SweepResult& result);
std::string table1(std::span<const Table1Cell> cells);
std::string table2(std::span<const Table2Cell> cells);

/// Writes to a sibling temporary file and renames it over `path`, so a
/// failure never leaves a partial file behind. Throws std::runtime_error.
void write_atomic(const std::string& path, std::string_view content);

} // namespace jointsparse::csv
