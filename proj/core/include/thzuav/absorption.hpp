#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace thzuav {

class AbsorptionRangeError : public std::out_of_range
{
public:
    using std::out_of_range::out_of_range;
};

struct AbsorptionSample
{
    double frequency_hz = 0.0;
    double k_per_m = 0.0;

    friend bool operator==(const AbsorptionSample &, const AbsorptionSample &) = default;
};

/// Piecewise-linear molecular absorption profile K(f).
class AbsorptionTable
{
public:
    AbsorptionTable() = default;
    // Throws std::invalid_argument unless frequencies are strictly increasing
    // and every K is finite and nonnegative.
    explicit AbsorptionTable(std::vector<AbsorptionSample> samples);

    const std::vector<AbsorptionSample> &samples() const { return samples_; }
    bool empty() const { return samples_.empty(); }
    double min_frequency() const { return samples_.front().frequency_hz; }
    double max_frequency() const { return samples_.back().frequency_hz; }

private:
    std::vector<AbsorptionSample> samples_;
};

struct AbsorptionPeak
{
    double center_hz = 0.0;
    double height_per_m = 0.0;
    double width_hz = 0.0; // Lorentzian half-width at half-maximum

    friend bool operator==(const AbsorptionPeak &, const AbsorptionPeak &) = default;
};

// Linear interpolation; exact at knots. Throws AbsorptionRangeError outside
// [min_frequency, max_frequency].
double absorption_at(const AbsorptionTable &table, double frequency_hz);

// K(f) = baseline + sum height * width^2 / ((f - center)^2 + width^2)
double lorentzian_profile(const std::vector<AbsorptionPeak> &peaks, double baseline_per_m, double frequency_hz);

// Samples lorentzian_profile on `samples` evenly spaced frequencies covering
// [range_lo_hz, range_hi_hz]. One sample is allowed only for a degenerate range.
AbsorptionTable synthesize_absorption(const std::vector<AbsorptionPeak> &peaks, double baseline_per_m,
                                      double range_lo_hz, double range_hi_hz, int samples);

// Two-column CSV (frequency_hz,k_per_m); a non-numeric first row is a header.
AbsorptionTable load_absorption_csv(const std::filesystem::path &path);

} // namespace thzuav
