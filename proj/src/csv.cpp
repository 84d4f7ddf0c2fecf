#include "jointsparse/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace jointsparse::csv {

std::string number(double v, int precision)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    // to_chars is locale independent.
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    if (ec != std::errc{})
        throw std::runtime_error("csv: number formatting failed");
    return {buf, end};
}

namespace {

std::string general(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{})
        throw std::runtime_error("csv: number formatting failed");
    return {buf, end};
}

} // namespace

std::string trial_row(const TrialRecord& r)
{
    const auto& s = r.spec;
    std::string row;
    row += std::to_string(s.n) + ',' + std::to_string(s.L) + ',' + std::to_string(s.K) + ',';
    row += general(s.p) + ',';
    row += (s.inputSnrDb ? general(*s.inputSnrDb) : std::string("none")) + ',';
    row += std::string(to_string(s.algorithm)) + ',' + std::string(to_string(s.mode)) + ',';
    row += std::to_string(s.seed) + ',';
    row += number(r.reconSnrDb) + ',';
    row += r.success ? "1," : "0,";
    row += std::to_string(r.iterations) + ',';
    row += number(r.wallTimeSec, 9);
    row += '\n';
    return row;
}

std::string trials(std::span<const TrialRecord> records)
{
    std::string out(kTrialHeader);
    out += '\n';
    for (const auto& r : records)
        out += trial_row(r);
    return out;
}

std::string sweep(const SweepResult& result)
{
    std::string out(kSweepHeader);
    out += '\n';
    for (const auto& p : result.points) {
        out += general(p.axisValue) + ',' + number(p.meanSnrDb) + ',' + number(p.stddevSnrDb) + ','
             + number(p.successRate) + ',' + number(p.meanWallTimeSec, 9) + ',' + std::to_string(p.trials) + '\n';
    }
    return out;
}

std::string table1(std::span<const Table1Cell> cells)
{
    std::string out(kTable1Header);
    out += '\n';
    for (const auto& c : cells) {
        out += std::string(to_string(c.mode)) + ',' + general(c.inputSnrDb) + ',' + general(c.densityPct) + ','
             + std::to_string(c.K) + ',' + std::string(to_string(c.algorithm)) + ',' + number(c.stats.meanSnrDb) + ','
             + number(c.stats.stddevSnrDb) + ',' + number(c.stats.successRate) + ',' + std::to_string(c.stats.trials)
             + '\n';
    }
    return out;
}

std::string table2(std::span<const Table2Cell> cells)
{
    std::string out(kTable2Header);
    out += '\n';
    for (const auto& c : cells) {
        out += std::string(to_string(c.algorithm)) + ',' + general(c.densityPct) + ',' + std::to_string(c.K) + ','
             + number(c.medianWallTimeSec, 9) + ',' + std::to_string(c.trials) + '\n';
    }
    return out;
}

void write_atomic(const std::string& path, std::string_view content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at " + path);
    }
}

} // namespace jointsparse::csv
