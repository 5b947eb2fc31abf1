#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "selfsim/report_io.hpp"

namespace fs = std::filesystem;
using namespace selfsim;

namespace {

std::string tau_label(double tau) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", tau);
    return buf;
}

SolutionId parse_solution(const std::string& name) {
    if (name == "dirichlet") return SolutionId::Dirichlet;
    if (name == "neumann") return SolutionId::Neumann;
    if (name == "superposed") return SolutionId::Superposed;
    throw std::invalid_argument("unknown solution id: " + name);
}

/// Writes a report plus one CSV per snapshot and prints the error table.
void emit_report(const RunReport& report, const fs::path& dir, const std::string& stem,
                 bool timestamps) {
    const Grid1D grid = make_grid(report.config.length, report.config.cells);
    write_text_file((dir / (stem + "_report.json")).string(),
                    report_to_json(report, timestamps).dump(2) + "\n");
    for (const SnapshotRecord& snap : report.snapshots) {
        write_snapshot_csv((dir / (stem + "_tau" + tau_label(snap.tau) + ".csv")).string(),
                           grid, snap);
    }
    for (const SnapshotRecord& snap : report.snapshots) {
        std::printf("%s tau=%-6s l2_rel=%.6g linf_rel=%.6g\n", stem.c_str(),
                    tau_label(snap.tau).c_str(), snap.error.l2_rel, snap.error.linf_rel);
    }
}

struct ScenarioOverrides {
    double n = std::nan("");
    double gamma0 = std::nan("");
    double phi0 = std::nan("");
    double length = std::nan("");
    double tau_shift = std::nan("");
    int cells = -1;
    std::vector<double> snap_times;

    void apply(ScenarioConfig& c) const {
        if (!std::isnan(n)) c.n = n;
        if (!std::isnan(gamma0)) c.gamma0 = gamma0;
        if (!std::isnan(phi0)) c.phi0 = phi0;
        if (!std::isnan(length)) c.length = length;
        if (!std::isnan(tau_shift)) c.tau_shift = tau_shift;
        if (cells > 0) c.cells = cells;
        if (!snap_times.empty()) {
            c.snap_times = snap_times;
            const double hi = snap_times.back();
            const double lo = snap_times.front() > 0.0 ? snap_times.front() : hi / 100.0;
            c.series_times = hi > 0.0 ? shifted_log_times(c.tau_shift, lo, hi, 24)
                                      : std::vector<double>{};
        }
    }

    void attach(CLI::App* cmd, bool with_n = true) {
        if (with_n) cmd->add_option("--n", n, "nonlinearity parameter");
        cmd->add_option("--gamma0", gamma0, "corner-flux gauge constant");
        cmd->add_option("--phi0", phi0, "Fick-flux gauge constant");
        cmd->add_option("--L", length, "domain length");
        cmd->add_option("--N", cells, "cell count");
        cmd->add_option("--tau-shift", tau_shift, "time shift of the analytic comparator");
        cmd->add_option("--snap-times", snap_times, "snapshot times (comma separated)")
            ->delimiter(',');
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"selfsim: closed-form self-similar solutions of power-law nonlinear "
                 "diffusion, a conservative explicit solver, and canned comparison runs"};
    app.require_subcommand(1);

    std::string out_dir = "selfsim_out";
    app.add_option("--out", out_dir, "output directory")->envname("SELFSIM_OUT");

    // analytic: sample one closed-form solution
    auto* analytic = app.add_subcommand("analytic", "write a CSV sample of a solution");
    std::string solution = "neumann";
    double a_n = 1.0, a_gamma0 = 1.0, a_phi0 = 0.0, a_tau = 1.0, a_shift = 0.0, a_ximax = 10.0;
    int a_samples = 200;
    std::string a_output = "analytic.csv";
    analytic->add_option("--solution", solution, "dirichlet | neumann | superposed")
        ->check(CLI::IsMember({"dirichlet", "neumann", "superposed"}));
    analytic->add_option("--n", a_n, "nonlinearity parameter");
    analytic->add_option("--gamma0", a_gamma0, "corner-flux gauge constant");
    analytic->add_option("--phi0", a_phi0, "Fick-flux gauge constant");
    analytic->add_option("--tau", a_tau, "evaluation time");
    analytic->add_option("--tau-shift", a_shift, "time shift");
    analytic->add_option("--xi-max", a_ximax, "sampling range [0, xi-max]");
    analytic->add_option("--samples", a_samples, "number of sample rows")
        ->check(CLI::Range(2, 10'000'000));
    analytic->add_option("--output", a_output, "file name inside the output directory");

    // reproduce: the two comparison panels
    auto* reproduce = app.add_subcommand("reproduce", "run a comparison panel");
    std::string panel = "left";
    bool timestamps = false;
    ScenarioOverrides rep_over;
    reproduce->add_option("--panel", panel, "left (insulated) or right (corner law)")
        ->required()
        ->check(CLI::IsMember({"left", "right"}));
    rep_over.attach(reproduce);
    reproduce->add_flag("--timestamps", timestamps, "embed wall time in the report");

    // sweep: repeat the right panel across n
    auto* sweep = app.add_subcommand("sweep", "repeat the corner-law panel across n");
    std::vector<double> sweep_ns;
    ScenarioOverrides sweep_over;
    sweep->add_option("--n", sweep_ns, "n values (comma separated)")
        ->required()
        ->delimiter(',');
    sweep_over.attach(sweep, /*with_n=*/false);

    // residual: tabulate the defect instruments
    auto* residual = app.add_subcommand("residual", "tabulate the superposition defect");
    double r_n = 1.0, r_gamma0 = 0.1, r_phi0 = 1.0;
    std::vector<double> r_xis = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    std::vector<double> r_taus = {1.0, 2.0, 4.0, 8.0};
    residual->add_option("--n", r_n, "nonlinearity parameter");
    residual->add_option("--gamma0", r_gamma0, "corner-flux gauge constant");
    residual->add_option("--phi0", r_phi0, "Fick-flux gauge constant");
    residual->add_option("--xi", r_xis, "xi lattice (comma separated)")->delimiter(',');
    residual->add_option("--tau", r_taus, "tau lattice (comma separated)")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path dir(out_dir);
        fs::create_directories(dir);

        if (*analytic) {
            const auto p = make_superposed_params(make_context(a_n), a_gamma0, a_phi0, a_shift);
            write_analytic_csv((dir / a_output).string(), p, parse_solution(solution), a_tau,
                               a_ximax, a_samples);
            std::printf("wrote %s\n", (dir / a_output).string().c_str());
            return 0;
        }

        if (*reproduce) {
            ScenarioConfig c = panel == "left" ? fig1_left_config() : fig1_right_config();
            rep_over.apply(c);
            if (c.cells < 100) {
                std::fprintf(stderr,
                             "warning: %d cells is coarse; resolution suffers and the "
                             "front-margin check may fail\n",
                             c.cells);
            }
            emit_report(run_scenario(c), dir, c.name, timestamps);
            return 0;
        }

        if (*sweep) {
            ScenarioConfig base = fig1_right_config();
            sweep_over.apply(base);
            auto entries = n_sweep(sweep_ns, base);
            std::sort(entries.begin(), entries.end(),
                      [](const SweepEntry& a, const SweepEntry& b) { return a.n < b.n; });
            std::string body = "n,late_time_l2,flux_exponent,corner_exponent,status\n";
            bool all_ok = true;
            for (const SweepEntry& e : entries) {
                body += format_double(e.n);
                if (e.report) {
                    const auto& snaps = e.report->snapshots;
                    body += ',' + format_double(snaps.back().error.l2_rel);
                    body += ',' + (e.report->flux.fit
                                       ? format_double(e.report->flux.fit->exponent)
                                       : std::string("nan"));
                    body += ',' + (e.report->corner.fit
                                       ? format_double(e.report->corner.fit->exponent)
                                       : std::string("nan"));
                    body += ",ok\n";
                } else {
                    body += ",nan,nan,nan,failed\n";
                    std::fprintf(stderr, "sweep entry n=%g failed: %s\n", e.n, e.error.c_str());
                    all_ok = false;
                }
            }
            write_text_file((dir / "sweep_summary.csv").string(), body);
            std::printf("wrote %s\n", (dir / "sweep_summary.csv").string().c_str());
            return all_ok ? 0 : 1;
        }

        if (*residual) {
            const auto ctx = make_context(r_n);
            const auto p = make_superposed_params(ctx, r_gamma0, r_phi0, 0.0);
            std::string body = "xi,tau,expression,fd_residual_extrapolated\n";
            for (double tau : r_taus) {
                for (double xi : r_xis) {
                    body += format_double(xi);
                    body += ',' + format_double(tau);
                    body += ',' + format_double(residual_expression(ctx, r_gamma0, r_phi0, xi, tau));
                    double fd = std::nan("");
                    try {
                        fd = pde_residual_extrapolated(p, xi, tau, 0.02, 0.02);
                    } catch (const std::domain_error&) {
                        // stencil fell off the support; report nan for this cell
                    }
                    body += ',' + format_double(fd);
                    body += '\n';
                }
            }
            write_text_file((dir / "residual.csv").string(), body);
            std::printf("wrote %s\n", (dir / "residual.csv").string().c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
