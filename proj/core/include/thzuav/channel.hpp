#pragma once

#include <span>
#include <vector>

#include "thzuav/geometry.hpp"
#include "thzuav/scenario.hpp"

namespace thzuav {

/// T x N matrix of reflection phases, row t holding slot t. Values are kept
/// in [0, 2pi) by set().
class PhaseSchedule
{
public:
    PhaseSchedule() = default;
    PhaseSchedule(int slots, int elements) : slots_(slots), elements_(elements), data_(static_cast<std::size_t>(slots) * elements, 0.0) {}

    int slots() const { return slots_; }
    int elements() const { return elements_; }

    std::span<const double> row(int t) const { return {data_.data() + static_cast<std::size_t>(t) * elements_, static_cast<std::size_t>(elements_)}; }
    double operator()(int t, int n) const { return data_[static_cast<std::size_t>(t) * elements_ + n]; }
    void set(int t, int n, double phase) { data_[static_cast<std::size_t>(t) * elements_ + n] = wrap_phase(phase); }
    void set_row(int t, std::span<const double> phases);

    friend bool operator==(const PhaseSchedule &, const PhaseSchedule &) = default;

private:
    int slots_ = 0;
    int elements_ = 0;
    std::vector<double> data_;
};

struct LinkDistances
{
    double ue_m = 0.0;        // d_u: UAV to UE
    double irs_m = 0.0;       // r: UAV to the first IRS element
    double irs_to_ue_m = 0.0; // r_u: first IRS element to UE
};

LinkDistances distances(const Vec3 &uav, const Scenario &scenario, int ue);

// Element indices ix, iz are zero-based throughout.
double incidence_phase(const Vec3 &uav, const IrsGeometry &irs, double frequency_hz, int ix, int iz);
double departure_phase(const Vec3 &ue_position, const IrsGeometry &irs, double frequency_hz, int ix, int iz);

// e_{i,r}(t): entry n = exp(-j theta_n).
std::vector<cplx> incidence_response(const Vec3 &uav, const IrsGeometry &irs, double frequency_hz);
// e_{i,u}: entry n = exp(-j vartheta_n).
std::vector<cplx> departure_response(const Vec3 &ue_position, const IrsGeometry &irs, double frequency_hz);
// v_{i,u}(t): entry n = exp(-j (theta_n + vartheta_n)).
std::vector<cplx> effective_response(const Vec3 &uav, const Vec3 &ue_position, const IrsGeometry &irs,
                                     double frequency_hz);

// LoS UAV -> UE coefficient h.
cplx direct_gain(const Scenario &scenario, const Vec3 &uav, int band, int ue);
// Cascaded path loss term g~ (without the array factor).
cplx cascaded_amplitude(const Scenario &scenario, const Vec3 &uav, int band, int ue);
// g = g~ * sum_n e_r,n exp(j phi_n) e_u,n
cplx cascaded_gain(const Scenario &scenario, const Vec3 &uav, std::span<const double> phases, int band, int ue);
// |h + g|^2
double combined_gain_power(const Scenario &scenario, const Vec3 &uav, std::span<const double> phases, int band,
                           int ue);

/// Coefficients of the two closed-form expansions of |h + g|^2: the
/// trajectory form A, B, K, C, D and the phase form G, F, Q, v.
struct GainDecomposition
{
    double ue_distance = 0.0;  // d_u
    double irs_distance = 0.0; // r
    double irs_to_ue = 0.0;    // r_u

    double A = 0.0;
    double B = 0.0;
    double K = 0.0;
    double C = 0.0; // |array sum|^2
    double D = 0.0;

    double G = 0.0;
    double F = 0.0;
    cplx Q;
    std::vector<cplx> v;

    cplx array_sum; // sum_n v_n exp(j phi_n)

    // A^2/d^2 e^{-Kd} + B^2/r^2 e^{-Kr} C + 2D/(d r) e^{-K(d+r)/2}
    double trajectory_form() const;
    // G + F |v.phi|^2 + Re{Q v.phi}
    double phase_form(std::span<const double> phases) const;
};

GainDecomposition decompose_gain(const Scenario &scenario, const Vec3 &uav, std::span<const double> phases,
                                 int band, int ue);

// |h + g|^2 with precomputed reflection coefficients exp(j phi_n).
double link_gain(const Scenario &scenario, const Vec3 &uav, std::span<const cplx> reflection, int band, int ue);

std::vector<cplx> reflection_coefficients(std::span<const double> phases);

// B log2(1 + p H / (S_N B)) in bit/s.
double link_rate(double power_w, double gain, const SubBand &band);

/// |h + g|^2 for every (slot, band, UE).
class GainTable
{
public:
    GainTable() = default;
    GainTable(int slots, int bands, int ues) : slots_(slots), bands_(bands), ues_(ues), data_(static_cast<std::size_t>(slots) * bands * ues, 0.0) {}

    int slots() const { return slots_; }
    int bands() const { return bands_; }
    int ues() const { return ues_; }
    double operator()(int t, int i, int u) const { return data_[index(t, i, u)]; }
    double &at(int t, int i, int u) { return data_[index(t, i, u)]; }

private:
    std::size_t index(int t, int i, int u) const { return (static_cast<std::size_t>(t) * bands_ + i) * ues_ + u; }

    int slots_ = 0;
    int bands_ = 0;
    int ues_ = 0;
    std::vector<double> data_;
};

GainTable gain_table(const Scenario &scenario, std::span<const Vec3> trajectory, const PhaseSchedule &phases);

} // namespace thzuav
