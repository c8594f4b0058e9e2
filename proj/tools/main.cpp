#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "thzuav/absorption.hpp"
#include "thzuav/artifacts.hpp"
#include "thzuav/engine.hpp"
#include "thzuav/scenario.hpp"

namespace fs = std::filesystem;
using namespace thzuav;

namespace {

unsigned worker_limit(std::size_t jobs)
{
    unsigned limit = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("THZ_UAV_THREADS"))
    {
        try
        {
            int n = std::stoi(env);
            if (n >= 1)
                limit = static_cast<unsigned>(n);
        }
        catch (const std::exception &)
        {
            std::cerr << "warning: ignoring THZ_UAV_THREADS=" << env << "\n";
        }
    }
    return std::min<unsigned>(limit, static_cast<unsigned>(jobs));
}

struct Job
{
    RunMode mode;
    WorldState state;
    RunTrace trace;
};

void run_jobs(std::vector<Job> &jobs, std::uint64_t seed)
{
    unsigned workers = worker_limit(jobs.size());
    for (std::size_t begin = 0; begin < jobs.size(); begin += workers)
    {
        std::vector<std::thread> pool;
        for (std::size_t k = begin; k < std::min(jobs.size(), begin + workers); ++k)
            pool.emplace_back([&job = jobs[k], seed] { job.trace = run(job.state, job.mode, seed); });
        for (auto &th : pool)
            th.join();
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"UAV trajectory, IRS phase and THz sub-band optimizer"};
    std::string scenario_path, mode_name = "proposed", out_dir = "out", absorption_path, default_out;
    std::optional<std::uint64_t> seed;
    bool compare = false;

    app.add_option("--scenario", scenario_path, "Scenario file (JSON, schema v1)");
    app.add_option("--mode", mode_name, "proposed | pwch-fixed | theta-fixed | traject-fixed");
    app.add_option("--seed", seed, "RNG seed (defaults to the scenario's seed)");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--compare", compare, "Run all four modes from one shared initialization");
    app.add_option("--absorption", absorption_path, "CSV table frequency_hz,k_per_m overriding the scenario's K_i");
    app.add_option("--write-default-scenario", default_out, "Write the built-in scenario to a file and exit");

    try
    {
        app.parse(argc, argv);
        if (scenario_path.empty() && default_out.empty())
            throw CLI::RequiredError("--scenario");
    }
    catch (const CLI::ParseError &e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    RunMode mode;
    try
    {
        mode = parse_run_mode(mode_name);
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    if (!default_out.empty())
    {
        std::ofstream out(default_out, std::ios::binary);
        out << serialize_scenario(default_scenario());
        if (!out)
        {
            std::cerr << "error: cannot write " << default_out << "\n";
            return 1;
        }
        if (scenario_path.empty())
            return 0;
    }

    std::shared_ptr<Scenario> scenario;
    try
    {
        scenario = std::make_shared<Scenario>(load_scenario(scenario_path));
        if (!absorption_path.empty())
        {
            apply_absorption(*scenario, load_absorption_csv(absorption_path));
            validate(*scenario);
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    const std::uint64_t run_seed = seed.value_or(scenario->seed);
    try
    {
        WorldState initial = initialize(scenario, run_seed);
        std::vector<Job> jobs;
        if (compare)
            for (RunMode m : kAllModes)
                jobs.push_back({m, initial, {}});
        else
            jobs.push_back({mode, initial, {}});

        run_jobs(jobs, run_seed);

        for (const auto &job : jobs)
        {
            fs::path dir = compare ? fs::path(out_dir) / to_string(job.mode) : fs::path(out_dir);
            write_artifacts(dir, job.trace, job.state);
            std::cout << to_string(job.mode) << ": R_th = " << format_double(job.trace.final_r_th())
                      << " bit/s (best " << format_double(job.trace.best_r_th()) << ") after "
                      << job.trace.iterations() << " iterations" << (job.trace.converged ? "" : " (cap reached)")
                      << "\n";
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
