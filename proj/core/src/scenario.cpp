#include "thzuav/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "thzuav/rng.hpp"

namespace thzuav {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDefaultLayoutSeed = 7;

void require(bool ok, const std::string &message)
{
    if (!ok)
        throw ValidationError(message);
}

std::string band_tag(int i) { return " (band " + std::to_string(i) + ")"; }

const Json &member(const Json &obj, const char *key, const std::string &where)
{
    if (!obj.is_object())
        throw ParseError(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError("missing key '" + where + "." + key + "'");
    return *it;
}

double number(const Json &obj, const char *key, const std::string &where)
{
    const Json &v = member(obj, key, where);
    if (!v.is_number())
        throw ParseError("'" + where + "." + key + "' must be a number");
    return v.get<double>();
}

double number_or(const Json &obj, const char *key, const std::string &where, double fallback)
{
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer(const Json &obj, const char *key, const std::string &where)
{
    const Json &v = member(obj, key, where);
    if (!v.is_number_integer())
        throw ParseError("'" + where + "." + key + "' must be an integer");
    return v.get<int>();
}

int integer_or(const Json &obj, const char *key, const std::string &where, int fallback)
{
    return obj.contains(key) ? integer(obj, key, where) : fallback;
}

AbsorptionTable parse_absorption(const Json &spec, const std::filesystem::path &base_dir, double lo, double hi)
{
    if (spec.contains("csv"))
    {
        const Json &p = spec["csv"];
        if (!p.is_string())
            throw ParseError("'absorption.csv' must be a path string");
        std::filesystem::path path = p.get<std::string>();
        if (path.is_relative() && !base_dir.empty())
            path = base_dir / path;
        try
        {
            return load_absorption_csv(path);
        }
        catch (const std::runtime_error &e)
        {
            throw ParseError(e.what());
        }
    }
    std::vector<AbsorptionPeak> peaks;
    if (spec.contains("peaks"))
    {
        if (!spec["peaks"].is_array())
            throw ParseError("'absorption.peaks' must be an array");
        for (const Json &pk : spec["peaks"])
            peaks.push_back({number(pk, "center_hz", "absorption.peaks[]"),
                             number(pk, "height_per_m", "absorption.peaks[]"),
                             number(pk, "width_hz", "absorption.peaks[]")});
    }
    double baseline = number(spec, "baseline_per_m", "absorption");
    int samples = integer_or(spec, "samples", "absorption", 2001);
    lo = number_or(spec, "range_lo_hz", "absorption", lo);
    hi = number_or(spec, "range_hi_hz", "absorption", hi);
    try
    {
        return synthesize_absorption(peaks, baseline, lo, hi, samples);
    }
    catch (const std::invalid_argument &e)
    {
        throw ValidationError(std::string("absorption: ") + e.what());
    }
}

std::vector<SubBand> parse_bands(const Json &doc, const std::filesystem::path &base_dir)
{
    const Json &bands = member(doc, "bands", "scenario");
    std::vector<SubBand> out;
    const Json *absorption = doc.contains("absorption") ? &doc["absorption"] : nullptr;

    if (bands.is_object())
    {
        double start = number(bands, "start_hz", "bands");
        double stop = number(bands, "stop_hz", "bands");
        double width = number(bands, "bandwidth_hz", "bands");
        double psd = number_or(bands, "noise_psd_w_per_hz", "bands", thermal_noise_psd());
        if (!(width > 0.0))
            throw ValidationError("B_i must be > 0");
        if (!(stop > start))
            throw ValidationError("band grid stop_hz must exceed start_hz");
        int count = static_cast<int>(std::floor((stop - start) / width + 1e-9));
        for (int k = 0; k < count; ++k)
            out.push_back({k, start + (k + 0.5) * width, width, -1.0, psd});
    }
    else if (bands.is_array())
    {
        int k = 0;
        for (const Json &b : bands)
        {
            SubBand sb;
            sb.index = k++;
            sb.center_hz = number(b, "center_hz", "bands[]");
            sb.bandwidth_hz = number(b, "bandwidth_hz", "bands[]");
            sb.absorption_per_m = b.contains("absorption_per_m") ? number(b, "absorption_per_m", "bands[]") : -1.0;
            sb.noise_psd_w_per_hz = number_or(b, "noise_psd_w_per_hz", "bands[]", thermal_noise_psd());
            if (sb.absorption_per_m < 0.0 && b.contains("absorption_per_m"))
                throw ValidationError("K_i must be >= 0" + band_tag(sb.index));
            out.push_back(sb);
        }
    }
    else
    {
        throw ParseError("'bands' must be a grid object or an array of bands");
    }

    bool need_table = false;
    for (const auto &b : out)
        need_table = need_table || b.absorption_per_m < 0.0;
    if (need_table)
    {
        if (!absorption)
            throw ParseError("bands without absorption_per_m need an 'absorption' section");
        double lo = out.front().center_hz - out.front().bandwidth_hz / 2;
        double hi = out.back().center_hz + out.back().bandwidth_hz / 2;
        AbsorptionTable table = parse_absorption(*absorption, base_dir, lo, hi);
        for (auto &b : out)
        {
            if (b.absorption_per_m >= 0.0)
                continue;
            try
            {
                b.absorption_per_m = absorption_at(table, b.center_hz);
            }
            catch (const AbsorptionRangeError &e)
            {
                throw ValidationError(std::string("absorption table does not cover band: ") + e.what());
            }
        }
    }
    return out;
}

std::vector<Vec3> parse_ues(const Json &doc, const IrsGeometry &irs)
{
    if (doc.contains("ues"))
    {
        const Json &list = doc["ues"];
        if (!list.is_array())
            throw ParseError("'ues' must be an array of [x, y] pairs");
        std::vector<Vec3> out;
        for (const Json &p : list)
        {
            if (!p.is_array() || p.size() < 2 || p.size() > 3)
                throw ParseError("each UE must be [x_m, y_m] or [x_m, y_m, 0]");
            for (const Json &c : p)
                if (!c.is_number())
                    throw ParseError("UE coordinates must be numbers");
            out.push_back({p[0].get<double>(), p[1].get<double>(), p.size() == 3 ? p[2].get<double>() : 0.0});
        }
        return out;
    }
    if (doc.contains("ue_layout"))
    {
        const Json &lay = doc["ue_layout"];
        int count = integer(lay, "count", "ue_layout");
        double half = number(lay, "half_width_m", "ue_layout");
        auto seed = static_cast<std::uint64_t>(integer_or(lay, "seed", "ue_layout", kDefaultLayoutSeed));
        if (count < 1)
            throw ValidationError("U must be >= 1");
        double cx = irs.anchor_x_m + 0.5 * (irs.nx - 1) * irs.spacing_x_m;
        return uniform_ue_layout(count, half, cx, 0.0, seed);
    }
    throw ParseError("missing key 'scenario.ues' (or 'ue_layout')");
}

Json to_json(const Scenario &s)
{
    Json doc;
    doc["version"] = "v1";
    doc["seed"] = s.seed;
    Json bands = Json::array();
    for (const auto &b : s.bands)
        bands.push_back({{"center_hz", b.center_hz},
                         {"bandwidth_hz", b.bandwidth_hz},
                         {"absorption_per_m", b.absorption_per_m},
                         {"noise_psd_w_per_hz", b.noise_psd_w_per_hz}});
    doc["bands"] = bands;
    Json ues = Json::array();
    for (const auto &u : s.ues)
        ues.push_back(Json::array({u.x, u.y}));
    doc["ues"] = ues;
    doc["irs"] = {{"anchor_x_m", s.irs.anchor_x_m}, {"anchor_z_m", s.irs.anchor_z_m},
                  {"nx", s.irs.nx},                 {"nz", s.irs.nz},
                  {"spacing_x_m", s.irs.spacing_x_m}, {"spacing_z_m", s.irs.spacing_z_m}};
    doc["uav"] = {{"altitude_m", s.uav.altitude_m}, {"max_speed_mps", s.uav.max_speed_mps},
                  {"max_power_w", s.uav.max_power_w}, {"horizon_s", s.uav.horizon_s},
                  {"slots", s.uav.slots},           {"start_xy_m", Json::array({s.uav.start_x_m, s.uav.start_y_m})}};
    const auto &L = s.limits;
    doc["solver"] = {{"trajectory_tol_m", s.tol.trajectory_m},
                     {"outer_tol_rel", s.tol.outer_rel},
                     {"phase_tol_rad", s.tol.phase_rad},
                     {"outer_max_iters", L.outer_max_iters},
                     {"car_max_sweeps", L.car_max_sweeps},
                     {"car_max_repair_rounds", L.car_max_repair_rounds},
                     {"search_radii", L.search_radii},
                     {"search_angles", L.search_angles},
                     {"refine_rounds", L.refine_rounds},
                     {"phase_max_iters", L.phase_max_iters},
                     {"initial_price", L.initial_price},
                     {"alloc_max_iters", L.alloc_max_iters},
                     {"alloc_patience", L.alloc_patience}};
    return doc;
}

} // namespace

double thermal_noise_psd() { return std::pow(10.0, -174.0 / 10.0) * 1e-3; }

Vec3 ue_centroid(const std::vector<Vec3> &ues)
{
    Vec3 c{};
    for (const auto &u : ues)
        c = c + u;
    return ues.empty() ? c : (1.0 / static_cast<double>(ues.size())) * c;
}

double initial_orbit_radius(const UavParams &uav)
{
    constexpr double preferred = 10.0;
    if (uav.slots < 3)
        return preferred;
    double chord_per_radius = 2.0 * std::sin(kPi / (uav.slots - 1));
    double reachable = uav.travel_budget_m() / chord_per_radius * (1.0 - 1e-9);
    return std::min(preferred, reachable);
}

std::vector<Vec3> uniform_ue_layout(int count, double half_width_m, double center_x, double center_y,
                                    std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<Vec3> out;
    for (int k = 0; k < count; ++k)
    {
        double x = rng.uniform(center_x - half_width_m, center_x + half_width_m);
        double y = rng.uniform(center_y - half_width_m, center_y + half_width_m);
        out.push_back({x, y, 0.0});
    }
    return out;
}

AbsorptionTable default_absorption_table()
{
    return synthesize_absorption({{325e9, 0.05, 4e9}, {380e9, 0.12, 5e9}}, 0.005, 200e9, 400e9, 2001);
}

void apply_absorption(Scenario &scenario, const AbsorptionTable &table)
{
    for (auto &b : scenario.bands)
        b.absorption_per_m = absorption_at(table, b.center_hz);
}

Scenario default_scenario()
{
    Scenario s;
    AbsorptionTable table = default_absorption_table();
    for (int k = 0; k < 20; ++k)
    {
        double f = 205e9 + 10e9 * k;
        s.bands.push_back({k, f, 10e9, absorption_at(table, f), thermal_noise_psd()});
    }
    double cx = s.irs.anchor_x_m + 0.5 * (s.irs.nx - 1) * s.irs.spacing_x_m;
    s.ues = uniform_ue_layout(4, 20.0, cx, 0.0, kDefaultLayoutSeed);
    Vec3 c = ue_centroid(s.ues);
    s.uav.start_x_m = c.x + initial_orbit_radius(s.uav);
    s.uav.start_y_m = c.y;
    return s;
}

void validate(const Scenario &s)
{
    require(!s.bands.empty(), "I must be >= 1");
    for (std::size_t k = 0; k < s.bands.size(); ++k)
    {
        const auto &b = s.bands[k];
        int i = static_cast<int>(k);
        require(b.index == i, "band index must equal its position" + band_tag(i));
        require(std::isfinite(b.center_hz) && b.center_hz > 0.0, "f_i must be > 0" + band_tag(i));
        require(std::isfinite(b.bandwidth_hz) && b.bandwidth_hz > 0.0, "B_i must be > 0" + band_tag(i));
        require(std::isfinite(b.absorption_per_m) && b.absorption_per_m >= 0.0, "K_i must be >= 0" + band_tag(i));
        require(std::isfinite(b.noise_psd_w_per_hz) && b.noise_psd_w_per_hz > 0.0, "S_N_i must be > 0" + band_tag(i));
        if (k > 0)
            require(b.center_hz > s.bands[k - 1].center_hz,
                    "center frequencies must be strictly increasing" + band_tag(i));
    }
    require(!s.ues.empty(), "U must be >= 1");
    require(s.bands.size() >= s.ues.size(), "I must be >= U (got I=" + std::to_string(s.bands.size()) +
                                                ", U=" + std::to_string(s.ues.size()) + ")");
    for (std::size_t u = 0; u < s.ues.size(); ++u)
    {
        require(std::isfinite(s.ues[u].x) && std::isfinite(s.ues[u].y), "UE position must be finite");
        require(s.ues[u].z == 0.0, "UE z-coordinate must be 0 (UE " + std::to_string(u) + ")");
    }

    require(s.irs.nx >= 1, "N_x must be >= 1");
    require(s.irs.nz >= 1, "N_z must be >= 1");
    require(s.irs.spacing_x_m > 0.0, "delta_x must be > 0");
    require(s.irs.spacing_z_m > 0.0, "delta_z must be > 0");
    require(s.irs.anchor_z_m > 0.0, "IRS anchor height c must be > 0");
    require(std::isfinite(s.irs.anchor_x_m), "IRS anchor a must be finite");

    require(s.uav.altitude_m > 0.0, "H must be > 0");
    require(s.uav.altitude_m > s.irs.anchor_z_m, "H must exceed the IRS anchor height c");
    require(s.uav.max_speed_mps > 0.0, "V_max must be > 0");
    require(s.uav.max_power_w > 0.0, "p_max must be > 0");
    require(s.uav.horizon_s > 0.0, "T_s must be > 0");
    require(s.uav.slots >= 2, "T must be >= 2");
    require(std::isfinite(s.uav.start_x_m) && std::isfinite(s.uav.start_y_m), "start anchor must be finite");

    require(s.tol.trajectory_m >= 0.0, "trajectory tolerance must be >= 0");
    require(s.tol.outer_rel >= 0.0, "outer tolerance must be >= 0");
    require(s.tol.phase_rad >= 0.0, "phase tolerance must be >= 0");
    const auto &L = s.limits;
    require(L.outer_max_iters >= 1, "outer_max_iters must be >= 1");
    require(L.car_max_sweeps >= 1, "car_max_sweeps must be >= 1");
    require(L.car_max_repair_rounds >= 1, "car_max_repair_rounds must be >= 1");
    require(L.search_radii >= 1 && L.search_angles >= 1, "search grid must be nonempty");
    require(L.refine_rounds >= 0, "refine_rounds must be >= 0");
    require(L.phase_max_iters >= 1, "phase_max_iters must be >= 1");
    require(L.initial_price > 0.0, "initial_price must be > 0");
    require(L.alloc_max_iters >= 1, "alloc_max_iters must be >= 1");
    require(L.alloc_patience >= 1, "alloc_patience must be >= 1");
}

Scenario parse_scenario(const std::string &text, const std::filesystem::path &base_dir)
{
    Json doc;
    try
    {
        doc = Json::parse(text);
    }
    catch (const Json::parse_error &e)
    {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("scenario document must be an object");
    const Json &version = member(doc, "version", "scenario");
    if (!version.is_string() || version.get<std::string>() != "v1")
        throw ParseError("unsupported scenario version (expected \"v1\")");

    Scenario s;
    if (doc.contains("seed"))
    {
        if (!doc["seed"].is_number_unsigned())
            throw ParseError("'scenario.seed' must be a nonnegative integer");
        s.seed = doc["seed"].get<std::uint64_t>();
    }

    const Json &irs = member(doc, "irs", "scenario");
    s.irs.anchor_x_m = number(irs, "anchor_x_m", "irs");
    s.irs.anchor_z_m = number(irs, "anchor_z_m", "irs");
    s.irs.nx = integer(irs, "nx", "irs");
    s.irs.nz = integer(irs, "nz", "irs");
    s.irs.spacing_x_m = number(irs, "spacing_x_m", "irs");
    s.irs.spacing_z_m = number(irs, "spacing_z_m", "irs");

    const Json &uav = member(doc, "uav", "scenario");
    s.uav.altitude_m = number(uav, "altitude_m", "uav");
    s.uav.max_speed_mps = number(uav, "max_speed_mps", "uav");
    s.uav.max_power_w = number(uav, "max_power_w", "uav");
    s.uav.horizon_s = number(uav, "horizon_s", "uav");
    s.uav.slots = integer(uav, "slots", "uav");

    s.bands = parse_bands(doc, base_dir);
    s.ues = parse_ues(doc, s.irs);

    if (uav.contains("start_xy_m"))
    {
        const Json &st = uav["start_xy_m"];
        if (!st.is_array() || st.size() != 2 || !st[0].is_number() || !st[1].is_number())
            throw ParseError("'uav.start_xy_m' must be [x_m, y_m]");
        s.uav.start_x_m = st[0].get<double>();
        s.uav.start_y_m = st[1].get<double>();
    }
    else if (s.uav.slots >= 2 && s.uav.horizon_s > 0.0 && s.uav.max_speed_mps > 0.0)
    {
        Vec3 c = ue_centroid(s.ues);
        s.uav.start_x_m = c.x + initial_orbit_radius(s.uav);
        s.uav.start_y_m = c.y;
    }

    if (doc.contains("solver"))
    {
        const Json &sv = doc["solver"];
        if (!sv.is_object())
            throw ParseError("'solver' must be an object");
        auto &L = s.limits;
        s.tol.trajectory_m = number_or(sv, "trajectory_tol_m", "solver", s.tol.trajectory_m);
        s.tol.outer_rel = number_or(sv, "outer_tol_rel", "solver", s.tol.outer_rel);
        s.tol.phase_rad = number_or(sv, "phase_tol_rad", "solver", s.tol.phase_rad);
        L.outer_max_iters = integer_or(sv, "outer_max_iters", "solver", L.outer_max_iters);
        L.car_max_sweeps = integer_or(sv, "car_max_sweeps", "solver", L.car_max_sweeps);
        L.car_max_repair_rounds = integer_or(sv, "car_max_repair_rounds", "solver", L.car_max_repair_rounds);
        L.search_radii = integer_or(sv, "search_radii", "solver", L.search_radii);
        L.search_angles = integer_or(sv, "search_angles", "solver", L.search_angles);
        L.refine_rounds = integer_or(sv, "refine_rounds", "solver", L.refine_rounds);
        L.phase_max_iters = integer_or(sv, "phase_max_iters", "solver", L.phase_max_iters);
        L.initial_price = number_or(sv, "initial_price", "solver", L.initial_price);
        L.alloc_max_iters = integer_or(sv, "alloc_max_iters", "solver", L.alloc_max_iters);
        L.alloc_patience = integer_or(sv, "alloc_patience", "solver", L.alloc_patience);
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path());
}

std::string serialize_scenario(const Scenario &scenario) { return to_json(scenario).dump(2) + "\n"; }

std::string scenario_digest(const Scenario &scenario)
{
    std::string text = serialize_scenario(scenario);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::ostringstream hex;
    for (unsigned int k = 0; k < len; ++k)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
    return hex.str();
}

} // namespace thzuav
