#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfsim/grid.hpp"
#include "selfsim/kernel.hpp"

namespace selfsim {

enum class BcKind {
    NeumannZero,    ///< insulated left end, zero flux through xi = 0
    GammaDirichlet, ///< imposed left value Gamma(tau)^(1/(n+1))
    AbsorbingZero,  ///< imposed left value 0
};

/// Left boundary condition; the right boundary is always theta(L) = 0.
struct BoundaryCondition {
    BcKind kind = BcKind::NeumannZero;
    SuperposedParams gamma_law; // used by GammaDirichlet

    static BoundaryCondition neumann_zero() { return {BcKind::NeumannZero, {}}; }
    static BoundaryCondition gamma_dirichlet(const SuperposedParams& p) {
        return {BcKind::GammaDirichlet, p};
    }
    static BoundaryCondition absorbing_zero() { return {BcKind::AbsorbingZero, {}}; }
};

struct StepControl {
    double safety = 0.4;  // fraction of the explicit stability bound
    double dt_min = 1e-12;
    std::int64_t max_steps = 10'000'000;
    double dt_max = std::numeric_limits<double>::infinity();
};

inline void validate_step_control(const StepControl& c) {
    if (!(c.safety > 0.0) || c.safety > 1.0) {
        throw std::invalid_argument("step control safety must be in (0, 1]");
    }
    if (!(c.dt_min > 0.0)) {
        throw std::invalid_argument("step control dt_min must be positive");
    }
    if (c.max_steps <= 0) {
        throw std::invalid_argument("step control max_steps must be positive");
    }
}

/// Boundary exchange accounting for a run, in the scheme's own discrete
/// terms: the left entry is the inflow through xi = 0 (interface flux at
/// h/2 plus storage change of the boundary half-cell), the right entry the
/// outflow through xi = L. mass_final - mass_initial = left_in - right_out
/// + clipped holds to round-off by construction.
struct MassLedger {
    double mass_initial = 0.0;
    double mass_final = 0.0;
    double left_in = 0.0;
    double right_out = 0.0;
    double clipped = 0.0;

    double closure() const { return (mass_final - mass_initial) - (left_in - right_out + clipped); }
    double closure_rel() const {
        const double scale = std::max({std::abs(mass_initial), std::abs(mass_final), 1e-300});
        return std::abs(closure()) / scale;
    }
};

namespace detail {

inline double trapezoid_mass(const Grid1D& g, const std::vector<double>& theta) {
    double sum = 0.5 * (theta.front() + theta.back());
    for (int i = 1; i < g.cells; ++i) sum += theta[i];
    return sum * g.spacing;
}

struct StepAccounting {
    double left_in = 0.0;
    double right_out = 0.0;
    double clipped = 0.0;
    double max_clip = 0.0;
};

/// One conservative step on raw storage. u_scratch is reused across steps.
/// Interior update: theta_i += (dt/h^2)(u_{i+1} - 2 u_i + u_{i-1}) with
/// u = theta^(n+1); the left node is either the mirror half-cell update
/// (NeumannZero) or an imposed value, the right node is pinned to 0.
inline void step_inplace(const Grid1D& g, std::vector<double>& theta, std::vector<double>& u,
                         double tau, const BoundaryCondition& bc, double n, double dt,
                         StepAccounting* acct) {
    const int N = g.cells;
    const double h = g.spacing;
    const double r = dt / (h * h);

    u.resize(theta.size());
    double max_theta = 0.0;
    for (int i = 0; i <= N; ++i) {
        u[i] = std::pow(theta[i], n + 1.0);
        max_theta = std::max(max_theta, theta[i]);
    }

    const double bound = max_theta > 0.0
                             ? h * h / (2.0 * (n + 1.0) * std::pow(max_theta, n))
                             : h * h / 2.0;
    if (dt > bound * (1.0 + 1e-9)) {
        throw std::invalid_argument("dt exceeds the explicit stability bound");
    }

    const double old_theta0 = theta[0];
    const double old_thetaN = theta[N];
    const double flux_left_interface = -(u[1] - u[0]) / h;      // F_{1/2}
    const double flux_right_interface = -(u[N] - u[N - 1]) / h; // F_{N-1/2}

    double prev = u[0];
    for (int i = 1; i < N; ++i) {
        const double cur = u[i];
        theta[i] += r * (u[i + 1] - 2.0 * cur + prev);
        prev = cur;
    }

    switch (bc.kind) {
        case BcKind::NeumannZero:
            theta[0] += 2.0 * r * (u[1] - u[0]);
            break;
        case BcKind::GammaDirichlet: {
            const double g_new = gamma_of_tau(bc.gamma_law, tau + dt);
            theta[0] = std::pow(g_new, 1.0 / (bc.gamma_law.ctx.n + 1.0));
            break;
        }
        case BcKind::AbsorbingZero:
            theta[0] = 0.0;
            break;
    }
    theta[N] = 0.0;

    double clipped = 0.0;
    double max_clip = 0.0;
    for (int i = 0; i <= N; ++i) {
        if (theta[i] < 0.0) {
            max_clip = std::max(max_clip, -theta[i]);
            clipped += -theta[i] * (i == 0 || i == N ? 0.5 * h : h);
            theta[i] = 0.0;
        }
    }

    if (acct) {
        acct->left_in = bc.kind == BcKind::NeumannZero
                            ? 0.0
                            : 0.5 * h * (theta[0] - old_theta0) + dt * flux_left_interface;
        acct->right_out = dt * flux_right_interface - 0.5 * h * (theta[N] - old_thetaN);
        acct->clipped = clipped;
        acct->max_clip = max_clip;
    }
}

} // namespace detail

inline FieldState gaussian_ic(const Grid1D& grid, double amplitude, double center, double width) {
    if (!(amplitude > 0.0) || !(width > 0.0)) {
        throw std::invalid_argument("gaussian amplitude and width must be positive");
    }
    FieldState s{grid, std::vector<double>(grid.nodes()), 0.0};
    for (int i = 0; i < grid.nodes(); ++i) {
        const double d = grid.xi(i) - center;
        s.theta[i] = amplitude * std::exp(-d * d / (2.0 * width * width));
    }
    return s;
}

/// Samples the requested closed-form solution onto the grid at time tau.
inline FieldState project_analytic(const Grid1D& grid, const SuperposedParams& p, double tau,
                                   SolutionId which) {
    FieldState s{grid, std::vector<double>(grid.nodes()), tau};
    for (int i = 0; i < grid.nodes(); ++i) {
        s.theta[i] = eval_solution(p, which, grid.xi(i), tau);
    }
    return s;
}

/// Largest stable explicit step for the current state,
/// safety * h^2 / (2 (n+1) max(theta)^n), floored at dt_min.
inline double stable_dt(const FieldState& s, double n, const StepControl& c) {
    const double h = s.grid.spacing;
    const double max_theta = *std::max_element(s.theta.begin(), s.theta.end());
    const double dt = max_theta > 0.0
                          ? c.safety * h * h / (2.0 * (n + 1.0) * std::pow(max_theta, n))
                          : c.safety * h * h / 2.0;
    return std::max(dt, c.dt_min);
}

/// Single conservative step; refuses dt beyond the stability bound.
inline FieldState step_explicit(const FieldState& s, const BoundaryCondition& bc, double n,
                                double dt) {
    FieldState out = s;
    std::vector<double> u;
    detail::step_inplace(out.grid, out.theta, u, out.tau, bc, n, dt, nullptr);
    out.tau += dt;
    return out;
}

struct IntegrationResult {
    FieldState final_state;
    std::vector<FieldState> snapshots;
    MassLedger ledger;
    std::int64_t steps = 0;
    double max_clip = 0.0; ///< largest single-node clip over the run
};

/// Thrown when max_steps is exhausted; carries how far the run got.
struct IntegrationError : std::runtime_error {
    double tau_reached;
    std::int64_t steps_taken;
    IntegrationError(double tau, std::int64_t steps)
        : std::runtime_error("integration exceeded max_steps at tau = " + std::to_string(tau)),
          tau_reached(tau), steps_taken(steps) {}
};

/// Explicit integration to tau_end with exact-time snapshots: steps are
/// shortened to land on each requested time, never interpolated.
inline IntegrationResult integrate(FieldState s, const BoundaryCondition& bc, double n,
                                   double tau_end, const StepControl& c,
                                   std::span<const double> snap_times = {}) {
    validate_step_control(c);
    if (!(tau_end >= s.tau)) {
        throw std::invalid_argument("tau_end must be >= the state's tau");
    }
    for (std::size_t i = 0; i < snap_times.size(); ++i) {
        if (i > 0 && !(snap_times[i] > snap_times[i - 1])) {
            throw std::invalid_argument("snapshot times must be strictly increasing");
        }
        if (snap_times[i] < s.tau || snap_times[i] > tau_end) {
            throw std::invalid_argument("snapshot times must lie in [tau, tau_end]");
        }
    }

    IntegrationResult res;
    res.ledger.mass_initial = detail::trapezoid_mass(s.grid, s.theta);

    std::size_t next_snap = 0;
    while (next_snap < snap_times.size() && snap_times[next_snap] <= s.tau) {
        res.snapshots.push_back(s);
        ++next_snap;
    }

    std::vector<double> u_scratch;
    while (s.tau < tau_end) {
        if (res.steps >= c.max_steps) {
            throw IntegrationError(s.tau, res.steps);
        }
        const double target = next_snap < snap_times.size() ? snap_times[next_snap] : tau_end;
        double dt = std::min(stable_dt(s, n, c), c.dt_max);
        bool landed = false;
        if (s.tau + dt >= target) {
            dt = target - s.tau;
            landed = true;
        }
        detail::StepAccounting acct;
        detail::step_inplace(s.grid, s.theta, u_scratch, s.tau, bc, n, dt, &acct);
        res.ledger.left_in += acct.left_in;
        res.ledger.right_out += acct.right_out;
        res.ledger.clipped += acct.clipped;
        res.max_clip = std::max(res.max_clip, acct.max_clip);
        s.tau = landed ? target : s.tau + dt;
        ++res.steps;
        if (landed && next_snap < snap_times.size() && target == snap_times[next_snap]) {
            res.snapshots.push_back(s);
            ++next_snap;
        }
    }

    res.ledger.mass_final = detail::trapezoid_mass(s.grid, s.theta);
    res.final_state = std::move(s);
    return res;
}

} // namespace selfsim
