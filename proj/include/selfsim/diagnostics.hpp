#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "selfsim/grid.hpp"
#include "selfsim/kernel.hpp"

namespace selfsim {

/// Sampled scalar over time, tau strictly increasing.
struct TimeSeries {
    std::vector<double> tau;
    std::vector<double> value;

    void push(double t, double v) {
        if (!std::isfinite(t) || !std::isfinite(v)) {
            throw std::invalid_argument("time series entries must be finite");
        }
        if (!tau.empty() && !(t > tau.back())) {
            throw std::invalid_argument("time series tau must be strictly increasing");
        }
        tau.push_back(t);
        value.push_back(v);
    }
    std::size_t size() const { return tau.size(); }
};

struct ErrorReport {
    double l2_rel = 0.0;
    double linf_rel = 0.0;
    double l2_abs = 0.0; ///< sqrt(int (num-ana)^2 dxi) on the mask, solution units
    double mask_fraction = 0.0;
};

struct PowerFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
};

/// Support rule for rel_error: keep nodes where the analytic field exceeds
/// floor_frac * max(analytic) and that sit more than front_collar_cells
/// cells inside the analytic support edge.
struct MaskRule {
    double floor_frac = 1e-3;
    int front_collar_cells = 2;
};

/// Trapezoidal integral of theta over the grid.
inline double total_mass(const FieldState& s) {
    double sum = 0.5 * (s.theta.front() + s.theta.back());
    for (int i = 1; i < s.grid.cells; ++i) sum += s.theta[i];
    return sum * s.grid.spacing;
}

/// Trapezoidal integral of xi * theta over the grid.
inline double first_moment(const FieldState& s) {
    const int N = s.grid.cells;
    double sum = 0.5 * (0.0 + s.grid.xi(N) * s.theta[N]);
    for (int i = 1; i < N; ++i) sum += s.grid.xi(i) * s.theta[i];
    return sum * s.grid.spacing;
}

/// Fick flux -d(theta^{n+1})/dxi at xi = 0, second-order one-sided stencil
/// on u = theta^(n+1).
inline double boundary_flux(const FieldState& s, double n) {
    if (s.grid.cells < 3) {
        throw std::invalid_argument("boundary_flux needs at least 3 cells");
    }
    const double u0 = std::pow(s.theta[0], n + 1.0);
    const double u1 = std::pow(s.theta[1], n + 1.0);
    const double u2 = std::pow(s.theta[2], n + 1.0);
    return -(-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * s.grid.spacing);
}

/// Corner flux at xi = 0: theta(0)^(n+1).
inline double corner_value(const FieldState& s, double n) {
    return std::pow(s.theta[0], n + 1.0);
}

/// Relative L2/Linf error of numeric against analytic on the support mask.
/// Both states must share grid and time.
inline ErrorReport rel_error(const FieldState& numeric, const FieldState& analytic,
                             const MaskRule& mask = {}) {
    if (!(numeric.grid == analytic.grid)) {
        throw std::invalid_argument("rel_error requires a common grid");
    }
    if (std::abs(numeric.tau - analytic.tau) > 1e-9 * (1.0 + std::abs(numeric.tau))) {
        throw std::invalid_argument("rel_error requires a common time");
    }
    const int nodes = numeric.grid.nodes();

    double max_ana = 0.0;
    for (double v : analytic.theta) max_ana = std::max(max_ana, v);
    const double floor = mask.floor_frac * max_ana;

    // support edge = first zero node after the last positive one
    int first_zero = nodes; // no edge inside the grid
    for (int i = nodes - 1; i >= 0; --i) {
        if (analytic.theta[i] > 0.0) {
            first_zero = i + 1;
            break;
        }
        if (i == 0) first_zero = 0;
    }
    const double collar_start = first_zero < nodes
                                    ? analytic.grid.xi(first_zero) -
                                          mask.front_collar_cells * analytic.grid.spacing
                                    : std::numeric_limits<double>::infinity();

    double num2 = 0.0, den2 = 0.0, max_diff = 0.0, max_ref = 0.0;
    int kept = 0;
    for (int i = 0; i < nodes; ++i) {
        const double a = analytic.theta[i];
        if (!(a > floor)) continue;
        if (analytic.grid.xi(i) >= collar_start) continue;
        const double d = numeric.theta[i] - a;
        num2 += d * d;
        den2 += a * a;
        max_diff = std::max(max_diff, std::abs(d));
        max_ref = std::max(max_ref, a);
        ++kept;
    }
    if (kept == 0) {
        throw std::domain_error("rel_error mask is empty");
    }
    return ErrorReport{std::sqrt(num2 / den2), max_diff / max_ref,
                       std::sqrt(num2 * numeric.grid.spacing),
                       static_cast<double>(kept) / nodes};
}

/// Least-squares power law v = prefactor * tau^exponent via a line fit in
/// (log tau, log v). Requires >= 4 strictly positive samples.
inline PowerFit fit_powerlaw(const TimeSeries& ts) {
    if (ts.size() < 4) {
        throw std::invalid_argument("power-law fit needs at least 4 points");
    }
    const std::size_t m = ts.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(ts.tau[i] > 0.0) || !(ts.value[i] > 0.0)) {
            throw std::domain_error("power-law fit requires positive tau and values");
        }
        lx[i] = std::log(ts.tau[i]);
        ly[i] = std::log(ts.value[i]);
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ly[i] - (slope * lx[i] + intercept);
        ss_res += r * r;
    }
    const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return PowerFit{slope, std::exp(intercept), r2};
}

/// Centered-difference residual d(theta)/dtau - d^2(theta^{n+1})/dxi^2 of
/// the closed-form superposed family at (xi, tau). All five stencil samples
/// must lie strictly inside the support and the domain; otherwise the
/// stencil straddles the front kink and the caller has to retreat.
inline double pde_residual_analytic(const SuperposedParams& p, double xi, double tau,
                                    double stencil_h, double stencil_dt) {
    if (!(stencil_h > 0.0) || !(stencil_dt > 0.0)) {
        throw std::invalid_argument("stencil sizes must be positive");
    }
    if (!(xi - stencil_h > 0.0)) {
        throw std::domain_error("spatial stencil crosses xi = 0");
    }
    const double n = p.ctx.n;
    const double th_c = eval_superposed(p, xi, tau);
    const double th_l = eval_superposed(p, xi - stencil_h, tau);
    const double th_r = eval_superposed(p, xi + stencil_h, tau);
    const double th_m = eval_superposed(p, xi, tau - stencil_dt);
    const double th_p = eval_superposed(p, xi, tau + stencil_dt);
    if (th_c <= 0.0 || th_l <= 0.0 || th_r <= 0.0 || th_m <= 0.0 || th_p <= 0.0) {
        throw std::domain_error("stencil crosses the support front");
    }
    const double dtheta_dtau = (th_p - th_m) / (2.0 * stencil_dt);
    const double u_l = std::pow(th_l, n + 1.0);
    const double u_c = std::pow(th_c, n + 1.0);
    const double u_r = std::pow(th_r, n + 1.0);
    const double d2u = (u_r - 2.0 * u_c + u_l) / (stencil_h * stencil_h);
    return dtheta_dtau - d2u;
}

/// Richardson elimination of the O(stencil^2) truncation term: combines the
/// residual at (h, dt) and (h/2, dt/2) to isolate the genuine defect.
inline double pde_residual_extrapolated(const SuperposedParams& p, double xi, double tau,
                                        double stencil_h, double stencil_dt) {
    const double coarse = pde_residual_analytic(p, xi, tau, stencil_h, stencil_dt);
    const double fine = pde_residual_analytic(p, xi, tau, 0.5 * stencil_h, 0.5 * stencil_dt);
    return (4.0 * fine - coarse) / 3.0;
}

/// The three-term solvability expression with Gamma, Phi given by their
/// power laws. The logarithmic derivatives are then exactly -alpha and
/// -beta, so the first and third terms vanish identically and the value
/// reduces to k_n * xi * Gamma * Phi.
inline double residual_expression(const NonlinearityContext& ctx, double gamma0, double phi0,
                                  double xi, double tau) {
    if (!(tau > 0.0)) {
        throw std::domain_error("tau must be positive");
    }
    const double gamma = gamma0 * std::pow(tau, -ctx.beta);
    const double phi = -phi0 * std::pow(tau, -ctx.alpha);
    const double dlog_phi = -ctx.alpha; // tau * Phi'/Phi for the power law
    const double dlog_gamma = -ctx.beta;
    const double term1 = (dlog_phi + ctx.alpha) * xi * xi * phi * phi;
    const double term2 = (dlog_gamma + dlog_phi + 2.0) * xi * gamma * phi;
    const double term3 = (dlog_gamma + ctx.beta) * gamma * gamma;
    return term1 + term2 + term3;
}

} // namespace selfsim
