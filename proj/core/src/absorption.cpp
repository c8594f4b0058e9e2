#include "thzuav/absorption.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace thzuav {

AbsorptionTable::AbsorptionTable(std::vector<AbsorptionSample> samples) : samples_(std::move(samples))
{
    if (samples_.empty())
        throw std::invalid_argument("absorption table is empty");
    for (std::size_t k = 0; k < samples_.size(); ++k)
    {
        const auto &s = samples_[k];
        if (!std::isfinite(s.frequency_hz) || !std::isfinite(s.k_per_m))
            throw std::invalid_argument("absorption table contains a non-finite value");
        if (s.k_per_m < 0.0)
            throw std::invalid_argument("absorption coefficient must be >= 0");
        if (k > 0 && !(s.frequency_hz > samples_[k - 1].frequency_hz))
            throw std::invalid_argument("absorption table frequencies must be strictly increasing");
    }
}

double absorption_at(const AbsorptionTable &table, double frequency_hz)
{
    if (table.empty())
        throw AbsorptionRangeError("absorption table is empty");
    const auto &s = table.samples();
    if (!(frequency_hz >= s.front().frequency_hz && frequency_hz <= s.back().frequency_hz))
        throw AbsorptionRangeError("frequency " + std::to_string(frequency_hz) + " Hz outside absorption table range");

    auto hi = std::lower_bound(s.begin(), s.end(), frequency_hz,
                               [](const AbsorptionSample &a, double f) { return a.frequency_hz < f; });
    if (hi->frequency_hz == frequency_hz)
        return hi->k_per_m;
    auto lo = hi - 1;
    double w = (frequency_hz - lo->frequency_hz) / (hi->frequency_hz - lo->frequency_hz);
    return lo->k_per_m + w * (hi->k_per_m - lo->k_per_m);
}

double lorentzian_profile(const std::vector<AbsorptionPeak> &peaks, double baseline_per_m, double frequency_hz)
{
    double k = baseline_per_m;
    for (const auto &p : peaks)
    {
        double df = frequency_hz - p.center_hz;
        double w2 = p.width_hz * p.width_hz;
        k += p.height_per_m * w2 / (df * df + w2);
    }
    return k;
}

AbsorptionTable synthesize_absorption(const std::vector<AbsorptionPeak> &peaks, double baseline_per_m,
                                      double range_lo_hz, double range_hi_hz, int samples)
{
    if (samples <= 0)
        throw std::invalid_argument("absorption synthesis needs at least one sample");
    if (!(range_hi_hz >= range_lo_hz) || !std::isfinite(range_lo_hz) || !std::isfinite(range_hi_hz))
        throw std::invalid_argument("absorption synthesis range is empty");
    if (samples > 1 && range_hi_hz == range_lo_hz)
        throw std::invalid_argument("absorption synthesis range is empty");
    if (samples == 1 && range_hi_hz != range_lo_hz)
        throw std::invalid_argument("a single absorption sample cannot cover a nonzero range");
    if (baseline_per_m < 0.0)
        throw std::invalid_argument("absorption baseline must be >= 0");
    for (const auto &p : peaks)
    {
        if (p.height_per_m < 0.0)
            throw std::invalid_argument("absorption peak height must be >= 0");
        if (!(p.width_hz > 0.0))
            throw std::invalid_argument("absorption peak width must be > 0");
    }

    std::vector<AbsorptionSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k)
    {
        double f = samples == 1 ? range_lo_hz
                   : k == samples - 1
                       ? range_hi_hz
                       : range_lo_hz + (range_hi_hz - range_lo_hz) * static_cast<double>(k) / (samples - 1);
        out.push_back({f, lorentzian_profile(peaks, baseline_per_m, f)});
    }
    return AbsorptionTable(std::move(out));
}

namespace {

bool parse_double(std::string_view text, double &out)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty())
        return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

} // namespace

AbsorptionTable load_absorption_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open absorption table " + path.string());

    std::vector<AbsorptionSample> samples;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
            continue;
        auto comma = line.find(',');
        double f = 0.0, k = 0.0;
        bool ok = comma != std::string::npos && parse_double(std::string_view(line).substr(0, comma), f) &&
                  parse_double(std::string_view(line).substr(comma + 1), k);
        if (!ok)
        {
            if (samples.empty() && line_no == 1)
                continue; // header
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected frequency_hz,k_per_m");
        }
        samples.push_back({f, k});
    }
    try
    {
        return AbsorptionTable(std::move(samples));
    }
    catch (const std::invalid_argument &e)
    {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

} // namespace thzuav
