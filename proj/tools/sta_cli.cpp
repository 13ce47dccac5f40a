// Command-line front end: design, propagate, raman and compare subcommands
// over a JSON protocol file. Exit codes: 0 success, 1 invalid input,
// 2 numerical failure, 3 missing protocol section.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sta/sta.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct CommonArgs {
    std::string input;
    std::string out_dir = ".";
    bool quiet = false;
};

std::mutex print_mutex;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int thread_cap()
{
    int cap = int(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("STA_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) cap = v;
    }
    return cap;
}

// Runs fn(0..n_items-1), at most thread_cap() at a time. Rethrows the first
// exception after all workers stopped.
template <typename Fn>
void parallel_over(int n_items, Fn fn)
{
    const int workers = std::min(thread_cap(), n_items);
    if (workers <= 1) {
        for (int i = 0; i < n_items; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n_items) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::string out_path(const CommonArgs& args, const std::string& name)
{
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

std::optional<sta::AdiabaticityReport> try_adiabaticity(const sta::FrequencyProtocol& protocol)
{
    try {
        return sta::adiabaticity_diagnostic(protocol);
    } catch (const sta::NumericalFailure&) {
        return std::nullopt; // expulsive interval: diagnostic not applicable
    }
}

double max_population_deviation(const sta::TrajectoryRecord& rec)
{
    double dev = 0.0;
    for (int r = 0; r < rec.populations.rows(); ++r)
        for (int c = 0; c < rec.populations.cols(); ++c)
            dev = std::max(dev, std::abs(rec.populations(r, c) - rec.populations(0, c)));
    return dev;
}

void write_trajectory_csv(const std::string& path, const sta::TrajectoryRecord& rec)
{
    std::vector<std::string> header{"t"};
    std::vector<std::vector<double>> cols;
    cols.emplace_back(rec.times);
    for (int n = 0; n < rec.populations.cols(); ++n) {
        header.push_back("P" + std::to_string(n));
        const auto col = rec.populations.col(n);
        cols.emplace_back(col.data(), col.data() + col.size());
    }
    header.push_back("fidelity_vs_target");
    cols.emplace_back(rec.fidelity_to_target);
    header.push_back("I_expect");
    cols.emplace_back(rec.invariant_expect);
    header.push_back("H_expect");
    cols.emplace_back(rec.energy_expect);
    header.push_back("norm");
    cols.emplace_back(rec.norms);
    sta::write_csv(path, header, cols);
}

int cmd_design(const CommonArgs& args)
{
    const auto start = Clock::now();
    const sta::ProtocolFile pf = sta::read_protocol_file(args.input);
    if (pf.method != "ii")
        throw sta::InvalidInput("design requires method \"ii\" (got \"" + pf.method + "\")");
    const sta::FrequencyProtocol protocol = sta::build_protocol(pf);
    const sta::ScalingFunction& b = *protocol.scaling();

    const int samples = 1000;
    std::vector<std::vector<double>> cols(5, std::vector<double>(samples + 1));
    for (int i = 0; i <= samples; ++i) {
        const double t = pf.t_f * i / samples;
        cols[0][i] = t;
        cols[1][i] = b.value(t);
        cols[2][i] = b.first(t);
        cols[3][i] = b.second(t);
        cols[4][i] = protocol.omega_sq(t);
    }
    sta::write_csv(out_path(args, "design.csv"), {"t", "b", "b_dot", "b_ddot", "omega_sq"}, cols);

    sta::RunSummary summary;
    summary.command = "design";
    summary.method = pf.method;
    summary.omega0 = pf.omega0;
    summary.omegaf = pf.omegaf;
    summary.t_f = pf.t_f;
    summary.gamma = b.gamma();
    summary.min_omega_sq = sta::min_omega_sq(protocol);
    summary.expulsive_intervals = sta::detect_expulsive(protocol);
    summary.adiabaticity = try_adiabaticity(protocol);
    summary.wall_time_seconds = seconds_since(start);
    sta::write_text_file(out_path(args, "summary.json"), summary_to_json(summary).dump(2) + "\n");

    if (!args.quiet) {
        std::cout << "design: gamma = " << *summary.gamma << ", min omega^2 = "
                  << summary.min_omega_sq << ", expulsive intervals: "
                  << summary.expulsive_intervals.size() << "\n";
    }
    return 0;
}

void warn_if_grid_undersized(const CommonArgs& args, const sta::ProtocolFile& pf,
                             const sta::FrequencyProtocol& protocol, const sta::SpatialGrid& grid)
{
    if (args.quiet || !pf.grid || !(pf.grid->x_max > 0.0)) return;
    try {
        const double suggested =
            sta::grid_for_protocol(protocol, pf.effective_units(), pf.grid->n_points).x_max();
        if (grid.x_max() < suggested)
            std::cout << "warning: grid x_max " << grid.x_max()
                      << " is below the sizing rule's " << suggested
                      << "; states may reach the boundary\n";
    } catch (const sta::InvalidInput&) {
        // no automatic scale available (expulsive tabulated protocol)
    }
}

int cmd_propagate(const CommonArgs& args)
{
    const auto start = Clock::now();
    const sta::ProtocolFile pf = sta::read_protocol_file(args.input);
    const sta::FrequencyProtocol protocol = sta::build_protocol(pf);
    const sta::SpatialGrid grid = sta::build_grid(pf, protocol);
    warn_if_grid_undersized(args, pf, protocol, grid);
    const sta::PropagationPlan base = sta::build_plan(pf, protocol, grid);
    const std::vector<int> states = pf.effective_initial_states();
    const sta::UnitSystem units = pf.effective_units();

    std::vector<sta::StateSummary> summaries(states.size());
    std::vector<int> n_steps_used(states.size(), 0);
    std::vector<double> dt_used(states.size(), 0.0);
    std::vector<int> records_used(states.size(), 0);

    parallel_over(int(states.size()), [&](int i) {
        const int n = states[i];
        sta::PropagationPlan plan = base;
        plan.target = sta::eigenstate(n, pf.omegaf, grid, units);
        const sta::Wavefunction psi0 = sta::eigenstate(n, pf.omega0, grid, units);
        const sta::TrajectoryRecord rec = sta::propagate(psi0, plan);
        write_trajectory_csv(out_path(args, "state_" + std::to_string(n) + ".csv"), rec);
        summaries[i] = {n, rec.fidelity_to_target.back(), max_population_deviation(rec),
                        rec.max_norm_drift};
        n_steps_used[i] = rec.n_steps;
        dt_used[i] = rec.dt;
        records_used[i] = int(rec.times.size());
        if (!args.quiet) {
            std::lock_guard<std::mutex> lock(print_mutex);
            std::cout << "state " << n << ": final fidelity " << summaries[i].final_fidelity
                      << ", max population deviation " << summaries[i].max_population_deviation
                      << "\n";
        }
    });

    sta::RunSummary summary;
    summary.command = "propagate";
    summary.method = pf.method;
    summary.omega0 = pf.omega0;
    summary.omegaf = pf.omegaf;
    summary.t_f = pf.t_f;
    if (protocol.scaling()) summary.gamma = protocol.scaling()->gamma();
    summary.x_max = grid.x_max();
    summary.n_points = grid.size();
    summary.min_omega_sq = sta::min_omega_sq(protocol);
    summary.expulsive_intervals = sta::detect_expulsive(protocol);
    summary.adiabaticity = try_adiabaticity(protocol);
    summary.states = summaries;
    summary.n_steps = n_steps_used.front();
    summary.dt = dt_used.front();
    summary.n_records = records_used.front();
    summary.wall_time_seconds = seconds_since(start);
    sta::write_text_file(out_path(args, "summary.json"), summary_to_json(summary).dump(2) + "\n");
    return 0;
}

int cmd_raman(const CommonArgs& args)
{
    const sta::ProtocolFile pf = sta::read_protocol_file(args.input);
    if (!pf.raman)
        throw sta::MissingSection("raman: protocol file has no \"raman\" section");
    const sta::UnitSystem units = pf.effective_units();
    const sta::EffectiveRamanParams eff = sta::effective_params(*pf.raman, units);
    const sta::SidebandCoupling sideband = sta::second_sideband_coupling(eff);
    const sta::FrequencyProtocol protocol = sta::build_protocol(pf);

    std::optional<sta::MismatchReport> mismatch;
    try {
        mismatch = sta::tt_mismatch_report(protocol, eff);
    } catch (const sta::NumericalFailure&) {
        // expulsive protocol: required coefficient undefined
    }

    sta::ordered_json j;
    j["version"] = 1;
    j["effective"] = {{"delta", eff.delta},     {"eta", eff.eta},   {"phi", eff.phi},
                      {"Omega", eff.Omega},     {"stark", eff.stark}, {"Delta", eff.Delta},
                      {"omega_L", eff.omega_L}, {"x0", eff.x0},     {"eta1", eff.eta1},
                      {"eta2", eff.eta2}};
    j["validity_ratio"] = eff.validity_ratio;
    j["validity_warning"] = eff.validity_warning;
    j["second_sideband"] = {{"coefficient", sideband.coefficient},
                            {"resonance_ok", sideband.resonance_ok},
                            {"phase_ok", sideband.phase_ok}};
    if (const auto adia = try_adiabaticity(protocol)) {
        j["adiabaticity"] = {{"max", adia->max_value}, {"argmax_time", adia->argmax_time}};
    } else {
        j["adiabaticity"] = nullptr;
    }
    j["static_coupling_cannot_track"] =
        mismatch ? sta::ordered_json(mismatch->static_coupling_cannot_track)
                 : sta::ordered_json(nullptr);
    sta::write_text_file(out_path(args, "feasibility.json"), j.dump(2) + "\n");

    if (mismatch) {
        std::vector<std::vector<double>> cols{
            mismatch->times, mismatch->required,
            std::vector<double>(mismatch->times.size(), mismatch->available),
            mismatch->relative_mismatch};
        sta::write_csv(out_path(args, "mismatch.csv"),
                       {"t", "required", "available", "relative_mismatch"}, cols);
    } else {
        sta::write_csv(out_path(args, "mismatch.csv"),
                       {"t", "required", "available", "relative_mismatch"}, {{}, {}, {}, {}});
    }

    if (!args.quiet) {
        std::cout << "raman: Omega_eff/2 = " << 0.5 * eff.Omega << ", stark = " << eff.stark
                  << ", sideband coefficient = " << sideband.coefficient << "\n";
        if (eff.validity_warning)
            std::cout << "warning: |Delta| / max(Omega_j, omega) = " << eff.validity_ratio
                      << " is below the large-detuning threshold\n";
    }
    return 0;
}

int cmd_compare(const CommonArgs& args, const std::vector<std::string>& methods)
{
    if (methods.size() < 2)
        throw sta::InvalidInput("compare needs at least 2 methods");
    for (std::size_t a = 0; a < methods.size(); ++a)
        for (std::size_t b = a + 1; b < methods.size(); ++b)
            if (methods[a] == methods[b])
                throw sta::InvalidInput("compare: duplicate method \"" + methods[a] + "\"");

    const sta::ProtocolFile pf = sta::read_protocol_file(args.input);
    const sta::UnitSystem units = pf.effective_units();
    const std::vector<int> states = pf.effective_initial_states();

    std::vector<sta::ProtocolFile> files;
    std::vector<sta::FrequencyProtocol> protocols;
    for (const auto& m : methods) {
        sta::source_from_method(m); // reject unknown method names up front
        sta::ProtocolFile copy = pf;
        copy.method = m;
        files.push_back(copy);
        protocols.push_back(sta::build_protocol(copy));
    }

    // One grid for every method: the explicit one, or the widest auto-sizing.
    std::optional<sta::SpatialGrid> grid;
    if (pf.grid && pf.grid->x_max > 0.0) {
        grid = sta::SpatialGrid(pf.grid->x_max, pf.grid->n_points);
    } else {
        const int n_points = pf.effective_grid().n_points;
        for (const auto& p : protocols) {
            sta::SpatialGrid candidate = sta::grid_for_protocol(p, units, n_points);
            if (!grid || candidate.x_max() > grid->x_max()) grid = candidate;
        }
    }

    struct Row {
        std::string method;
        int n = 0;
        double fidelity = 0.0;
        double max_dev = 0.0;
        double min_w2 = 0.0;
        double runtime = 0.0;
    };
    std::vector<Row> rows(methods.size() * states.size());

    parallel_over(int(rows.size()), [&](int idx) {
        const std::size_t mi = idx / states.size();
        const int n = states[idx % states.size()];
        const auto t0 = Clock::now();
        sta::PropagationPlan plan = sta::build_plan(files[mi], protocols[mi], *grid);
        plan.target = sta::eigenstate(n, pf.omegaf, *grid, units);
        const sta::TrajectoryRecord rec =
            sta::propagate(sta::eigenstate(n, pf.omega0, *grid, units), plan);
        rows[idx] = {methods[mi],
                     n,
                     rec.fidelity_to_target.back(),
                     max_population_deviation(rec),
                     sta::min_omega_sq(protocols[mi]),
                     seconds_since(t0)};
    });

    // compare.csv holds only run-to-run reproducible columns; runtimes go to
    // the JSON summary.
    std::ostringstream csv;
    csv << "method,n,final_fidelity,max_population_deviation,min_omega_sq\n";
    for (const auto& r : rows)
        csv << r.method << "," << r.n << "," << sta::format_number(r.fidelity) << ","
            << sta::format_number(r.max_dev) << "," << sta::format_number(r.min_w2) << "\n";
    sta::write_text_file(out_path(args, "compare.csv"), csv.str());

    sta::ordered_json j;
    j["version"] = 1;
    j["command"] = "compare";
    j["methods"] = methods;
    j["grid"] = {{"x_max", grid->x_max()}, {"n_points", grid->size()}};
    sta::ordered_json table = sta::ordered_json::array();
    for (const auto& r : rows)
        table.push_back({{"method", r.method},
                         {"n", r.n},
                         {"final_fidelity", r.fidelity},
                         {"max_population_deviation", r.max_dev},
                         {"min_omega_sq", r.min_w2},
                         {"runtime_seconds", r.runtime}});
    j["table"] = table;
    sta::write_text_file(out_path(args, "summary.json"), j.dump(2) + "\n");

    if (!args.quiet)
        for (const auto& r : rows)
            std::cout << r.method << " n=" << r.n << ": fidelity " << r.fidelity
                      << ", max deviation " << r.max_dev << "\n";
    return 0;
}

template <typename Fn>
int guarded(Fn fn)
{
    try {
        return fn();
    } catch (const sta::MissingSection& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sta::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sta::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transitionless frequency changes of a harmonic trap: invariant-based "
                 "design, counterdiabatic driving, and a certifying propagator"};
    app.require_subcommand(1);

    CommonArgs args;
    std::vector<std::string> methods;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", args.input, "protocol JSON file")->required();
        sub->add_option("--out-dir", args.out_dir, "output directory (default: .)");
        sub->add_flag("--quiet", args.quiet, "suppress progress output");
    };

    CLI::App* design = app.add_subcommand("design", "sample b(t) and omega^2(t) for an ii file");
    add_common(design);
    CLI::App* propagate =
        app.add_subcommand("propagate", "evolve the initial states and record observables");
    add_common(propagate);
    CLI::App* raman = app.add_subcommand("raman", "effective Raman parameters and feasibility");
    add_common(raman);
    CLI::App* compare = app.add_subcommand("compare", "run several methods side by side");
    add_common(compare);
    compare->add_option("--methods", methods, "methods to compare (comma separated)")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (design->parsed()) return guarded([&] { return cmd_design(args); });
    if (propagate->parsed()) return guarded([&] { return cmd_propagate(args); });
    if (raman->parsed()) return guarded([&] { return cmd_raman(args); });
    return guarded([&] { return cmd_compare(args, methods); });
}
