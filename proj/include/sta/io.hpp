#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sta/ermakov.hpp"
#include "sta/errors.hpp"
#include "sta/propagate.hpp"
#include "sta/protocol.hpp"
#include "sta/raman.hpp"
#include "sta/scaling.hpp"
#include "sta/units.hpp"

namespace sta {

using ordered_json = nlohmann::ordered_json;

struct GridConfig {
    double x_max = 0.0; // 0 = size automatically from the protocol
    int n_points = 1024;
};

struct PropagationConfig {
    int n_steps = 0; // 0 = resolution rule
    int n_records = 200;
    int n_track = 8;
};

/// In-memory form of a protocol file (JSON, "version": 1). Optional blocks
/// keep their presence so that write(read(x)) reproduces x byte for byte on
/// canonical files.
struct ProtocolFile {
    int version = 1;
    std::string method; // "ii" | "tt" | "tt-bare" | "plain"
    double omega0 = 0.0, omegaf = 0.0, t_f = 0.0;
    std::optional<UnitSystem> units;
    std::optional<GridConfig> grid;
    std::optional<PropagationConfig> propagation;
    std::optional<RamanParams> raman;
    std::optional<std::vector<int>> initial_states;

    UnitSystem effective_units() const { return units.value_or(UnitSystem{}); }
    GridConfig effective_grid() const { return grid.value_or(GridConfig{}); }
    PropagationConfig effective_propagation() const
    {
        return propagation.value_or(PropagationConfig{});
    }
    std::vector<int> effective_initial_states() const
    {
        return initial_states.value_or(std::vector<int>{0});
    }
};

namespace detail {

inline const ordered_json& require_key(const ordered_json& obj, const char* key,
                                       const std::string& ctx)
{
    auto it = obj.find(key);
    if (it == obj.end())
        throw InvalidInput(ctx + ": missing required field \"" + key + "\"");
    return *it;
}

inline double as_number(const ordered_json& j, const std::string& where)
{
    if (!j.is_number())
        throw InvalidInput(where + " must be a number");
    return j.get<double>();
}

inline int as_int(const ordered_json& j, const std::string& where)
{
    if (!j.is_number_integer())
        throw InvalidInput(where + " must be an integer");
    return j.get<int>();
}

inline void reject_unknown_keys(const ordered_json& obj, std::initializer_list<const char*> known,
                                const std::string& ctx)
{
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) { ok = true; break; }
        if (!ok) throw InvalidInput(ctx + ": unknown field \"" + key + "\"");
    }
}

} // namespace detail

inline ProtocolFile parse_protocol(const std::string& text, const std::string& origin = "protocol")
{
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(origin + ": " + e.what());
    }
    if (!j.is_object()) throw InvalidInput(origin + ": top level must be a JSON object");
    detail::reject_unknown_keys(j,
                                {"version", "units", "method", "omega0", "omegaf", "t_f", "grid",
                                 "propagation", "raman", "initial_states"},
                                origin);

    ProtocolFile pf;
    pf.version = detail::as_int(detail::require_key(j, "version", origin), origin + ".version");
    if (pf.version != 1)
        throw InvalidInput(origin + ": unsupported version " + std::to_string(pf.version));

    const ordered_json& method = detail::require_key(j, "method", origin);
    if (!method.is_string()) throw InvalidInput(origin + ".method must be a string");
    pf.method = method.get<std::string>();
    if (pf.method != "ii" && pf.method != "tt" && pf.method != "tt-bare" && pf.method != "plain")
        throw InvalidInput(origin + ": method must be one of ii, tt, tt-bare, plain (got \"" +
                           pf.method + "\")");

    pf.omega0 = detail::as_number(detail::require_key(j, "omega0", origin), origin + ".omega0");
    pf.omegaf = detail::as_number(detail::require_key(j, "omegaf", origin), origin + ".omegaf");
    pf.t_f = detail::as_number(detail::require_key(j, "t_f", origin), origin + ".t_f");
    if (!(pf.omega0 > 0.0)) throw InvalidInput(origin + ".omega0 must be positive");
    if (!(pf.omegaf > 0.0)) throw InvalidInput(origin + ".omegaf must be positive");
    if (!(pf.t_f > 0.0)) throw InvalidInput(origin + ".t_f must be positive");

    if (auto it = j.find("units"); it != j.end()) {
        detail::reject_unknown_keys(*it, {"hbar", "mass"}, origin + ".units");
        UnitSystem u;
        if (auto f = it->find("hbar"); f != it->end())
            u.hbar = detail::as_number(*f, origin + ".units.hbar");
        if (auto f = it->find("mass"); f != it->end())
            u.mass = detail::as_number(*f, origin + ".units.mass");
        check_units(u);
        pf.units = u;
    }

    if (auto it = j.find("grid"); it != j.end()) {
        detail::reject_unknown_keys(*it, {"x_max", "n_points"}, origin + ".grid");
        GridConfig g;
        if (auto f = it->find("x_max"); f != it->end())
            g.x_max = detail::as_number(*f, origin + ".grid.x_max");
        if (auto f = it->find("n_points"); f != it->end())
            g.n_points = detail::as_int(*f, origin + ".grid.n_points");
        if (g.x_max < 0.0) throw InvalidInput(origin + ".grid.x_max must be >= 0");
        if (g.n_points < 64 || (g.n_points & (g.n_points - 1)) != 0)
            throw InvalidInput(origin + ".grid.n_points must be a power of two >= 64");
        pf.grid = g;
    }

    if (auto it = j.find("propagation"); it != j.end()) {
        detail::reject_unknown_keys(*it, {"n_steps", "n_records", "n_track"},
                                    origin + ".propagation");
        PropagationConfig p;
        if (auto f = it->find("n_steps"); f != it->end())
            p.n_steps = detail::as_int(*f, origin + ".propagation.n_steps");
        if (auto f = it->find("n_records"); f != it->end())
            p.n_records = detail::as_int(*f, origin + ".propagation.n_records");
        if (auto f = it->find("n_track"); f != it->end())
            p.n_track = detail::as_int(*f, origin + ".propagation.n_track");
        if (p.n_steps < 0) throw InvalidInput(origin + ".propagation.n_steps must be >= 0");
        if (p.n_records < 2) throw InvalidInput(origin + ".propagation.n_records must be >= 2");
        if (p.n_track < 0 || p.n_track > kMaxFockIndex)
            throw InvalidInput(origin + ".propagation.n_track out of range");
        pf.propagation = p;
    }

    if (auto it = j.find("raman"); it != j.end()) {
        detail::reject_unknown_keys(*it,
                                    {"Omega1", "Omega2", "omega1", "omega2", "phi1", "phi2", "k1",
                                     "k2", "omega_e", "trap_omega", "mass"},
                                    origin + ".raman");
        RamanParams r;
        const std::string ctx = origin + ".raman";
        r.Omega1 = detail::as_number(detail::require_key(*it, "Omega1", ctx), ctx + ".Omega1");
        r.Omega2 = detail::as_number(detail::require_key(*it, "Omega2", ctx), ctx + ".Omega2");
        r.omega1 = detail::as_number(detail::require_key(*it, "omega1", ctx), ctx + ".omega1");
        r.omega2 = detail::as_number(detail::require_key(*it, "omega2", ctx), ctx + ".omega2");
        r.omega_e = detail::as_number(detail::require_key(*it, "omega_e", ctx), ctx + ".omega_e");
        r.trap_omega =
            detail::as_number(detail::require_key(*it, "trap_omega", ctx), ctx + ".trap_omega");
        if (auto f = it->find("phi1"); f != it->end()) r.phi1 = detail::as_number(*f, ctx + ".phi1");
        if (auto f = it->find("phi2"); f != it->end()) r.phi2 = detail::as_number(*f, ctx + ".phi2");
        if (auto f = it->find("k1"); f != it->end()) r.k1 = detail::as_number(*f, ctx + ".k1");
        if (auto f = it->find("k2"); f != it->end()) r.k2 = detail::as_number(*f, ctx + ".k2");
        if (auto f = it->find("mass"); f != it->end())
            r.mass = detail::as_number(*f, ctx + ".mass");
        else
            r.mass = pf.effective_units().mass;
        pf.raman = r;
    }

    if (auto it = j.find("initial_states"); it != j.end()) {
        if (!it->is_array()) throw InvalidInput(origin + ".initial_states must be an array");
        std::vector<int> states;
        for (const auto& e : *it) states.push_back(detail::as_int(e, origin + ".initial_states[]"));
        if (states.empty()) throw InvalidInput(origin + ".initial_states must not be empty");
        for (std::size_t a = 0; a < states.size(); ++a) {
            if (states[a] < 0 || states[a] > kMaxFockIndex)
                throw InvalidInput(origin + ".initial_states entries must be in [0, " +
                                   std::to_string(kMaxFockIndex) + "]");
            for (std::size_t b = a + 1; b < states.size(); ++b)
                if (states[a] == states[b])
                    throw InvalidInput(origin + ".initial_states must not contain duplicates");
        }
        pf.initial_states = states;
    }

    return pf;
}

inline std::string serialize_protocol(const ProtocolFile& pf)
{
    ordered_json j;
    j["version"] = pf.version;
    if (pf.units) j["units"] = {{"hbar", pf.units->hbar}, {"mass", pf.units->mass}};
    j["method"] = pf.method;
    j["omega0"] = pf.omega0;
    j["omegaf"] = pf.omegaf;
    j["t_f"] = pf.t_f;
    if (pf.grid) j["grid"] = {{"x_max", pf.grid->x_max}, {"n_points", pf.grid->n_points}};
    if (pf.propagation)
        j["propagation"] = {{"n_steps", pf.propagation->n_steps},
                            {"n_records", pf.propagation->n_records},
                            {"n_track", pf.propagation->n_track}};
    if (pf.raman)
        j["raman"] = {{"Omega1", pf.raman->Omega1},   {"Omega2", pf.raman->Omega2},
                      {"omega1", pf.raman->omega1},   {"omega2", pf.raman->omega2},
                      {"phi1", pf.raman->phi1},       {"phi2", pf.raman->phi2},
                      {"k1", pf.raman->k1},           {"k2", pf.raman->k2},
                      {"omega_e", pf.raman->omega_e}, {"trap_omega", pf.raman->trap_omega},
                      {"mass", pf.raman->mass}};
    if (pf.initial_states) j["initial_states"] = *pf.initial_states;
    return j.dump(2) + "\n";
}

inline ProtocolFile read_protocol_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open protocol file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_protocol(buf.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open output file: " + path);
    out << text;
    if (!out) throw InvalidInput("failed writing output file: " + path);
}

inline void write_protocol_file(const std::string& path, const ProtocolFile& pf)
{
    write_text_file(path, serialize_protocol(pf));
}

/// Protocol object for a file: the ii method engineers omega(t) from the
/// quintic design; the others ramp omega linearly between the endpoints.
inline FrequencyProtocol build_protocol(const ProtocolFile& pf)
{
    if (pf.method == "ii")
        return FrequencyProtocol::engineered(design_quintic(pf.omega0, pf.omegaf, pf.t_f));
    if (pf.omega0 == pf.omegaf) return FrequencyProtocol::constant(pf.omega0, pf.t_f);
    return FrequencyProtocol::linear_ramp(pf.omega0, pf.omegaf, pf.t_f);
}

inline HamiltonianSource source_from_method(const std::string& method)
{
    if (method == "ii") return HamiltonianSource::InverseInvariant;
    if (method == "tt") return HamiltonianSource::Transitionless;
    if (method == "tt-bare") return HamiltonianSource::TransitionlessBare;
    if (method == "plain") return HamiltonianSource::Plain;
    throw InvalidInput("unknown method: " + method);
}

inline SpatialGrid build_grid(const ProtocolFile& pf, const FrequencyProtocol& protocol)
{
    const GridConfig g = pf.effective_grid();
    if (g.x_max > 0.0) return SpatialGrid(g.x_max, g.n_points);
    return grid_for_protocol(protocol, pf.effective_units(), g.n_points);
}

/// Plan without a target state (the CLI sets the target per initial state).
inline PropagationPlan build_plan(const ProtocolFile& pf, const FrequencyProtocol& protocol,
                                  const SpatialGrid& grid)
{
    const PropagationConfig pc = pf.effective_propagation();
    return PropagationPlan{.source = source_from_method(pf.method),
                           .protocol = protocol,
                           .grid = grid,
                           .units = pf.effective_units(),
                           .n_steps = pc.n_steps,
                           .n_records = pc.n_records,
                           .n_track = pc.n_track,
                           .target = std::nullopt};
}

// ---------------------------------------------------------------------------
// CSV output. 17 significant digits round-trip doubles exactly, and rows are
// written in a fixed order, so re-running a command reproduces files byte for
// byte.

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns)
{
    if (columns.size() != header.size())
        throw InvalidInput("write_csv: header/column count mismatch");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw InvalidInput("write_csv: ragged columns");

    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_number(columns[c][r]);
        out << "\n";
    }
    write_text_file(path, out.str());
}

/// Lowest omega^2 the protocol reaches (dense sample).
inline double min_omega_sq(const FrequencyProtocol& protocol, int n_samples = 10000)
{
    double m = protocol.omega_sq(0.0);
    for (int i = 1; i <= n_samples; ++i)
        m = std::min(m, protocol.omega_sq(protocol.t_f() * i / n_samples));
    return m;
}

// ---------------------------------------------------------------------------
// Run summaries.

struct StateSummary {
    int n = 0;
    double final_fidelity = 0.0;
    double max_population_deviation = 0.0;
    double norm_drift = 0.0;
};

struct RunSummary {
    std::string command;
    std::string method;
    double omega0 = 0.0, omegaf = 0.0, t_f = 0.0;
    std::optional<double> gamma;
    double x_max = 0.0;
    int n_points = 0;
    double min_omega_sq = 0.0;
    std::vector<TimeInterval> expulsive_intervals;
    std::optional<AdiabaticityReport> adiabaticity;
    std::vector<StateSummary> states;
    int n_steps = 0;
    double dt = 0.0;
    int n_records = 0;
    double wall_time_seconds = 0.0;
};

inline ordered_json summary_to_json(const RunSummary& s)
{
    ordered_json j;
    j["version"] = 1;
    j["command"] = s.command;
    j["method"] = s.method;
    j["omega0"] = s.omega0;
    j["omegaf"] = s.omegaf;
    j["t_f"] = s.t_f;
    if (s.gamma) j["gamma"] = *s.gamma;
    if (s.n_points > 0) j["grid"] = {{"x_max", s.x_max}, {"n_points", s.n_points}};
    j["min_omega_sq"] = s.min_omega_sq;
    ordered_json intervals = ordered_json::array();
    for (const auto& iv : s.expulsive_intervals) intervals.push_back({iv.begin, iv.end});
    j["expulsive_intervals"] = intervals;
    if (s.adiabaticity) {
        j["max_adiabaticity"] = s.adiabaticity->max_value;
        j["adiabaticity_argmax_time"] = s.adiabaticity->argmax_time;
    } else {
        j["max_adiabaticity"] = nullptr;
        j["adiabaticity_argmax_time"] = nullptr;
    }
    if (!s.states.empty()) {
        ordered_json states = ordered_json::array();
        for (const auto& st : s.states)
            states.push_back({{"n", st.n},
                              {"final_fidelity", st.final_fidelity},
                              {"max_population_deviation", st.max_population_deviation},
                              {"norm_drift", st.norm_drift}});
        j["states"] = states;
    }
    if (s.n_steps > 0)
        j["solver"] = {{"n_steps", s.n_steps}, {"dt", s.dt}, {"n_records", s.n_records}};
    j["wall_time_seconds"] = s.wall_time_seconds;
    return j;
}

} // namespace sta
