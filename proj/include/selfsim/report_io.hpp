#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "selfsim/experiments.hpp"

namespace selfsim {

/// Shortest text form that parses back to the same double (17 significant
/// digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const char* bc_name(BcKind k) {
    switch (k) {
        case BcKind::NeumannZero: return "neumann_zero";
        case BcKind::GammaDirichlet: return "gamma_dirichlet";
        case BcKind::AbsorbingZero: return "absorbing_zero";
    }
    return "unknown";
}

inline const char* solution_name(SolutionId id) {
    switch (id) {
        case SolutionId::Dirichlet: return "dirichlet";
        case SolutionId::Neumann: return "neumann";
        case SolutionId::Superposed: return "superposed";
    }
    return "unknown";
}

inline nlohmann::json config_to_json(const ScenarioConfig& c) {
    return nlohmann::json{
        {"name", c.name},
        {"n", c.n},
        {"bc", bc_name(c.bc)},
        {"gamma0", c.gamma0},
        {"phi0", c.phi0},
        {"tau_shift", c.tau_shift},
        {"length", c.length},
        {"cells", c.cells},
        {"ic",
         {{"kind", c.ic.kind == IcKind::Gaussian ? "gaussian" : "analytic_projection"},
          {"amplitude", c.ic.amplitude},
          {"center", c.ic.center},
          {"width", c.ic.width}}},
        {"comparator", solution_name(c.comparator)},
        {"comparator_exact", c.comparator_exact},
        {"snap_times", c.snap_times},
        {"series_times", c.series_times},
        {"step", {{"safety", c.step.safety},
                  {"dt_min", c.step.dt_min},
                  {"max_steps", c.step.max_steps},
                  {"dt_max", c.step.dt_max}}},
        {"mask", {{"floor_frac", c.mask.floor_frac},
                  {"front_collar_cells", c.mask.front_collar_cells}}},
        {"front_margin", c.front_margin},
    };
}

inline nlohmann::json series_to_json(const SeriesReport& s) {
    nlohmann::json j{{"tau_shifted", s.series.tau}, {"value", s.series.value}};
    if (s.fit) {
        j["fit"] = {{"exponent", s.fit->exponent},
                    {"prefactor", s.fit->prefactor},
                    {"r2", s.fit->r2}};
    } else {
        j["fit"] = nullptr;
    }
    return j;
}

/// Serializes a run report. Wall time is a timestamp-like field and is
/// only embedded on request so identical runs serialize byte-identically.
inline nlohmann::json report_to_json(const RunReport& r, bool include_timing = false) {
    nlohmann::json snaps = nlohmann::json::array();
    for (const SnapshotRecord& s : r.snapshots) {
        snaps.push_back({{"tau", s.tau},
                         {"l2_rel", s.error.l2_rel},
                         {"linf_rel", s.error.linf_rel},
                         {"l2_abs", s.error.l2_abs},
                         {"mask_fraction", s.error.mask_fraction}});
    }
    nlohmann::json probes = nlohmann::json::array();
    for (const ResidualProbe& pr : r.residual_probes) {
        probes.push_back({{"xi", pr.xi},
                          {"tau", pr.tau},
                          {"expression", pr.expression},
                          {"fd_extrapolated", pr.fd_extrapolated}});
    }
    nlohmann::json j{
        {"config", config_to_json(r.config)},
        {"snapshots", snaps},
        {"series", {{"flux", series_to_json(r.flux)}, {"corner", series_to_json(r.corner)}}},
        {"ledger",
         {{"mass_initial", r.ledger.mass_initial},
          {"mass_final", r.ledger.mass_final},
          {"left_in", r.ledger.left_in},
          {"right_out", r.ledger.right_out},
          {"clipped", r.ledger.clipped},
          {"closure_rel", r.ledger.closure_rel()}}},
        {"residual_probes", probes},
        {"steps", r.steps},
        {"max_clip", r.max_clip},
    };
    if (include_timing) j["wall_seconds"] = r.wall_seconds;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

/// Snapshot CSV: xi, numeric and analytic profiles at one time.
inline void write_snapshot_csv(const std::string& path, const Grid1D& grid,
                               const SnapshotRecord& snap) {
    std::string body = "xi,theta_numeric,theta_analytic\n";
    for (int i = 0; i < grid.nodes(); ++i) {
        body += format_double(grid.xi(i));
        body += ',';
        body += format_double(snap.numeric[i]);
        body += ',';
        body += format_double(snap.analytic[i]);
        body += '\n';
    }
    write_text_file(path, body);
}

inline void write_analytic_csv(const std::string& path, const SuperposedParams& p,
                               SolutionId id, double tau, double xi_max, int samples) {
    if (samples < 2) {
        throw std::invalid_argument("analytic CSV needs at least 2 samples");
    }
    std::string body = "xi,theta\n";
    for (int i = 0; i < samples; ++i) {
        const double xi = xi_max * i / (samples - 1);
        body += format_double(xi);
        body += ',';
        body += format_double(eval_solution(p, id, xi, tau));
        body += '\n';
    }
    write_text_file(path, body);
}

} // namespace selfsim
