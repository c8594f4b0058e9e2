#include "thzuav/artifacts.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace thzuav {

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc())
        throw std::runtime_error("cannot format number");
    return {buf.data(), ptr};
}

std::string trajectory_csv(const std::vector<Vec3> &trajectory)
{
    std::string out = "slot,x_m,y_m\n";
    for (std::size_t t = 0; t < trajectory.size(); ++t)
        out += std::to_string(t + 1) + "," + format_double(trajectory[t].x) + "," + format_double(trajectory[t].y) +
               "\n";
    return out;
}

std::string convergence_csv(const RunTrace &trace)
{
    std::string out = "iter,r_th_bps";
    std::size_t ues = trace.records.empty() ? 0 : trace.records.front().ue_rates.size();
    for (std::size_t u = 0; u < ues; ++u)
        out += ",rate_u" + std::to_string(u + 1) + "_bps";
    out += "\n";
    for (const auto &r : trace.records)
    {
        out += std::to_string(r.iteration) + "," + format_double(r.r_th);
        for (double rate : r.ue_rates)
            out += "," + format_double(rate);
        out += "\n";
    }
    return out;
}

std::string summary_json(const RunTrace &trace, const Scenario &scenario)
{
    nlohmann::ordered_json j;
    j["mode"] = to_string(trace.mode);
    j["seed"] = trace.seed;
    j["scenario_sha256"] = scenario_digest(scenario);
    j["final_r_th_bps"] = trace.final_r_th();
    j["best_r_th_bps"] = trace.best_r_th();
    j["final_ue_rates_bps"] = trace.records.back().ue_rates;
    j["iterations"] = trace.iterations();
    j["converged"] = trace.converged;
    j["wall_time_s"] = trace.wall_time_s;
    return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

} // namespace

void write_artifacts(const std::filesystem::path &dir, const RunTrace &trace, const WorldState &final_state)
{
    std::filesystem::create_directories(dir);
    write_file(dir / "trajectory.csv", trajectory_csv(final_state.trajectory));
    write_file(dir / "convergence.csv", convergence_csv(trace));
    write_file(dir / "summary.json", summary_json(trace, final_state.world()));
}

} // namespace thzuav
