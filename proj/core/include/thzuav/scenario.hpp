#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "thzuav/absorption.hpp"
#include "thzuav/geometry.hpp"

namespace thzuav {

// Malformed scenario document (syntax, missing keys, wrong types).
class ParseError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Well-formed document whose values violate a model invariant.
class ValidationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct SubBand
{
    int index = 0;                   // zero-based position in the band list
    double center_hz = 0.0;
    double bandwidth_hz = 0.0;
    double absorption_per_m = 0.0;   // K(f_i)
    double noise_psd_w_per_hz = 0.0; // S_N(f_i)

    friend bool operator==(const SubBand &, const SubBand &) = default;
};

/// Uniform planar reflecting surface on the y = 0 wall. Element (nx, nz),
/// zero-based, sits at [anchor_x + nx*spacing_x, 0, anchor_z + nz*spacing_z].
struct IrsGeometry
{
    double anchor_x_m = 0.0;
    double anchor_z_m = 2.0;
    int nx = 8;
    int nz = 10;
    double spacing_x_m = 5e-3;
    double spacing_z_m = 5e-3;

    int element_count() const { return nx * nz; }
    // Flattened element index; nz varies fastest.
    int element_index(int ix, int iz) const { return iz + ix * nz; }
    Vec3 anchor() const { return {anchor_x_m, 0.0, anchor_z_m}; }
    Vec3 element_position(int ix, int iz) const
    {
        return {anchor_x_m + ix * spacing_x_m, 0.0, anchor_z_m + iz * spacing_z_m};
    }

    friend bool operator==(const IrsGeometry &, const IrsGeometry &) = default;
};

struct UavParams
{
    double altitude_m = 10.0;
    double max_speed_mps = 2.0;
    double max_power_w = 1.0;
    double horizon_s = 120.0;
    int slots = 50;
    double start_x_m = 0.0; // start and end anchor of the flight
    double start_y_m = 0.0;

    // Maximum horizontal travel between consecutive slots.
    double travel_budget_m() const { return max_speed_mps * horizon_s / slots; }
    Vec3 start() const { return {start_x_m, start_y_m, altitude_m}; }

    friend bool operator==(const UavParams &, const UavParams &) = default;
};

struct Tolerances
{
    double trajectory_m = 1e-3; // trajectory sweep convergence
    double outer_rel = 1e-4;    // outer loop, relative to the current R_th
    double phase_rad = 1e-4;    // phase inner loop

    friend bool operator==(const Tolerances &, const Tolerances &) = default;
};

struct SolverLimits
{
    int outer_max_iters = 100;
    int car_max_sweeps = 50;
    int car_max_repair_rounds = 8;
    int search_radii = 8;
    int search_angles = 16;
    int refine_rounds = 20;
    int phase_max_iters = 50;
    double initial_price = 1.0;
    int alloc_max_iters = 200;
    int alloc_patience = 25;

    friend bool operator==(const SolverLimits &, const SolverLimits &) = default;
};

struct Scenario
{
    std::vector<SubBand> bands;
    std::vector<Vec3> ues; // z = 0
    IrsGeometry irs;
    UavParams uav;
    Tolerances tol;
    SolverLimits limits;
    std::uint64_t seed = 1;

    int band_count() const { return static_cast<int>(bands.size()); }
    int ue_count() const { return static_cast<int>(ues.size()); }
    int slot_count() const { return uav.slots; }
    int element_count() const { return irs.element_count(); }

    friend bool operator==(const Scenario &, const Scenario &) = default;
};

// Throws ValidationError naming the first violated invariant.
void validate(const Scenario &scenario);

Scenario parse_scenario(const std::string &text, const std::filesystem::path &base_dir = {});
Scenario load_scenario(const std::filesystem::path &path);

// Resolved v1 document: explicit band table, UE list and start anchor.
std::string serialize_scenario(const Scenario &scenario);

// Lowercase hex SHA-256 of serialize_scenario().
std::string scenario_digest(const Scenario &scenario);

// Built-in defaults: 20 x 10 GHz bands over 200-400 GHz, 8 x 10 IRS, 4 UEs
// drawn uniformly from a 40 m square centred under the IRS.
Scenario default_scenario();

// Samples `count` UE positions uniformly in a square of half-width
// `half_width_m` centred at (center_x, center_y).
std::vector<Vec3> uniform_ue_layout(int count, double half_width_m, double center_x, double center_y,
                                    std::uint64_t seed);

// Re-evaluates every band's K_i from `table`.
void apply_absorption(Scenario &scenario, const AbsorptionTable &table);

// Radius of the initial closed orbit: 10 m, shrunk if T - 1 equal chords of
// that circle would exceed the per-slot travel budget.
double initial_orbit_radius(const UavParams &uav);

// Mean horizontal UE position.
Vec3 ue_centroid(const std::vector<Vec3> &ues);

// Thermal floor of -174 dBm/Hz in W/Hz.
double thermal_noise_psd();

// Synthetic profile used by default_scenario().
AbsorptionTable default_absorption_table();

} // namespace thzuav
