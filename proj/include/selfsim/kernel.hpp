#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "selfsim/nonlinearity.hpp"

namespace selfsim {

/// Parameters of the flux-parameterized solution family.
///
/// The boundary power laws are
///   Gamma(tau) =  gamma0 * (tau + tau_shift)^(-beta)
///   Phi(tau)   = -phi0   * (tau + tau_shift)^(-alpha)
/// and the gauge constants are restricted to >= 0 so that the base
/// Gamma - xi*Phi stays non-negative on xi >= 0.
struct SuperposedParams {
    NonlinearityContext ctx;
    double gamma0 = 0.0;
    double phi0 = 0.0;
    double tau_shift = 0.0;
};

inline SuperposedParams make_superposed_params(NonlinearityContext ctx, double gamma0,
                                               double phi0, double tau_shift = 0.0) {
    if (!std::isfinite(gamma0) || gamma0 < 0.0) {
        throw std::invalid_argument("gauge constant gamma0 must be finite and >= 0");
    }
    if (!std::isfinite(phi0) || phi0 < 0.0) {
        throw std::invalid_argument("gauge constant phi0 must be finite and >= 0");
    }
    if (!std::isfinite(tau_shift) || tau_shift < 0.0) {
        throw std::invalid_argument("tau_shift must be finite and >= 0");
    }
    return SuperposedParams{ctx, gamma0, phi0, tau_shift};
}

/// Steady state (Gamma - Phi*xi)^(1/(n+1)); Gamma and Phi are the two
/// integration constants of the conservation forms.
struct SteadyParams {
    double gamma = 0.0;
    double phi = 0.0;
    double n = 0.0;
};

enum class SolutionId {
    Dirichlet,  ///< absorbing boundary, theta(0,tau) = 0
    Neumann,    ///< insulating boundary, theta'(0,tau) = 0
    Superposed, ///< combined family, theta(0,tau) = Gamma(tau)^(1/(n+1))
};

namespace detail {

inline double shifted_time(const SuperposedParams& p, double tau) {
    const double t = tau + p.tau_shift;
    if (!(t > 0.0)) {
        throw std::domain_error("shifted time tau + tau_shift must be positive");
    }
    return t;
}

} // namespace detail

/// Corner-flux law Gamma(tau) = gamma0 * (tau + tau_shift)^(-beta).
inline double gamma_of_tau(const SuperposedParams& p, double tau) {
    const double t = detail::shifted_time(p, tau);
    if (p.gamma0 == 0.0) return 0.0;
    return p.gamma0 * std::pow(t, -p.ctx.beta);
}

/// Fick-flux law Phi(tau) = -phi0 * (tau + tau_shift)^(-alpha). Non-positive
/// for phi0 >= 0 (heat leaves through the left boundary).
inline double phi_of_tau(const SuperposedParams& p, double tau) {
    const double t = detail::shifted_time(p, tau);
    if (p.phi0 == 0.0) return 0.0;
    return -p.phi0 * std::pow(t, -p.ctx.alpha);
}

/// Exact solution of the linear equation (n = 0):
///   theta = [Gamma(tau) - xi Phi(tau)] exp(-xi^2 / 4 tau)
/// with Gamma = gamma0 tau^(-1/2), Phi = -phi0 tau^(-3/2) (tau meaning the
/// shifted time). Boundary value is theta(0,tau) = Gamma(tau).
inline double eval_linear_superposed(double gamma0, double phi0, double xi, double tau,
                                     double tau_shift = 0.0) {
    const double t = tau + tau_shift;
    if (!(t > 0.0)) {
        throw std::domain_error("shifted time tau + tau_shift must be positive");
    }
    const double gamma = gamma0 / std::sqrt(t);
    const double phi = -phi0 / (t * std::sqrt(t));
    return (gamma - xi * phi) * std::exp(-xi * xi / (4.0 * t));
}

/// The flux-parameterized solution family
///
///   theta = B^(1/(n+1)) * (1 - k (xi^2/tau) B^(1/(n+1)-1))^(1/n),
///   B = Gamma(tau) - xi Phi(tau),
///
/// evaluated with compact-support clamping: where the inner bracket is <= 0
/// the value is 0. The negative power of B is folded into the xi^2 factor in
/// log space so the xi -> 0 and B -> 0 limits come out exact instead of NaN.
/// Exact for gamma0 = 0 or phi0 = 0; for both nonzero it is the approximate
/// superposed state. n = 0 dispatches to the closed-form exponential family.
inline double eval_superposed(const SuperposedParams& p, double xi, double tau) {
    if (!(xi >= 0.0)) {
        throw std::domain_error("xi must be >= 0");
    }
    if (p.ctx.is_linear()) {
        return eval_linear_superposed(p.gamma0, p.phi0, xi, tau, p.tau_shift);
    }
    const double t = detail::shifted_time(p, tau);
    const double n = p.ctx.n;
    const double gamma = gamma_of_tau(p, tau);
    const double phi = phi_of_tau(p, tau);
    const double base = gamma - xi * phi;
    if (base <= 0.0) return 0.0; // support edge; never evaluate 0 to a negative power

    if (xi == 0.0) return std::pow(base, 1.0 / (n + 1.0)); // exact boundary law
    const double bracket_term = std::exp(std::log(p.ctx.k) + 2.0 * std::log(xi) -
                                         std::log(t) - (n / (n + 1.0)) * std::log(base));
    if (!(bracket_term < 1.0)) return 0.0; // beyond the front (or overflow far outside)
    return std::exp(std::log(base) / (n + 1.0) + std::log1p(-bracket_term) / n);
}

/// Solution written in terms of the Fick flux alone (gamma0 forced to 0).
/// Exact; satisfies the absorbing condition theta(0,tau) = 0.
inline double eval_dirichlet_flux_form(const SuperposedParams& p, double xi, double tau) {
    SuperposedParams q = p;
    q.gamma0 = 0.0;
    return eval_superposed(q, xi, tau);
}

/// Solution written in terms of the corner flux alone (phi0 forced to 0).
/// Exact; the profile has zero slope at xi = 0.
inline double eval_neumann_flux_form(const SuperposedParams& p, double xi, double tau) {
    SuperposedParams q = p;
    q.phi0 = 0.0;
    return eval_superposed(q, xi, tau);
}

inline double eval_solution(const SuperposedParams& p, SolutionId id, double xi, double tau) {
    switch (id) {
        case SolutionId::Dirichlet: return eval_dirichlet_flux_form(p, xi, tau);
        case SolutionId::Neumann: return eval_neumann_flux_form(p, xi, tau);
        case SolutionId::Superposed: return eval_superposed(p, xi, tau);
    }
    throw std::invalid_argument("unknown solution id");
}

/// Steady profile theta(xi) = (Gamma - Phi xi)^(1/(n+1)).
inline double eval_steady(const SteadyParams& s, double xi) {
    const double base = s.gamma - s.phi * xi;
    if (base < 0.0) {
        throw std::domain_error("steady profile base Gamma - Phi*xi is negative");
    }
    return std::pow(base, 1.0 / (s.n + 1.0));
}

/// The non-vanishing middle term of the solvability expression under the
/// boundary power laws: k_n * xi * Gamma * Phi. Zero when n = 0 (k_0 = 0)
/// and when either flux vanishes.
inline double superposition_defect(const NonlinearityContext& ctx, double gamma, double phi,
                                   double xi) {
    return ctx.k * xi * gamma * phi;
}

/// Position of the support edge xi_f(tau) where the bracket of the
/// superposed family reaches zero. Returns +inf for n = 0 (no compact
/// support) and 0 when both gauges vanish (identically zero field).
inline double front_position(const SuperposedParams& p, double tau) {
    if (p.ctx.is_linear()) return std::numeric_limits<double>::infinity();
    if (p.gamma0 == 0.0 && p.phi0 == 0.0) return 0.0;
    const double t = detail::shifted_time(p, tau);
    const double n = p.ctx.n;
    const double k = p.ctx.k;
    const double gamma = gamma_of_tau(p, tau);
    const double aphi = -phi_of_tau(p, tau); // |Phi|

    if (p.phi0 == 0.0) {
        // bracket = 1 - k (xi^2/t) Gamma^(-n/(n+1))
        return std::sqrt(t / k * std::pow(gamma, n / (n + 1.0)));
    }
    if (p.gamma0 == 0.0) {
        // bracket = 1 - (k/t) xi^((n+2)/(n+1)) |Phi|^(-n/(n+1))
        const double rhs = t * std::pow(aphi, n / (n + 1.0)) / k;
        return std::pow(rhs, (n + 1.0) / (n + 2.0));
    }

    // General case: the bracket term is strictly increasing in xi, so the
    // root is unique; bracket it and bisect.
    auto term = [&](double xi) {
        return std::exp(std::log(k) + 2.0 * std::log(xi) - std::log(t) -
                        (n / (n + 1.0)) * std::log(gamma + xi * aphi));
    };
    double hi = std::sqrt(t / k * std::pow(gamma, n / (n + 1.0)));
    while (term(hi) < 1.0) hi *= 2.0;
    double lo = hi / 2.0;
    while (lo > 0.0 && term(lo) > 1.0) lo /= 2.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (term(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Where the solution effectively ends: the support edge for n > 0, and
/// for n = 0 (no front, Gaussian tails) the point beyond the peak where
/// the profile falls below floor_frac of its maximum. Used to size
/// truncated domains.
inline double support_extent(const SuperposedParams& p, double tau, double floor_frac = 1e-3) {
    if (!p.ctx.is_linear()) return front_position(p, tau);
    if (p.gamma0 == 0.0 && p.phi0 == 0.0) return 0.0;
    const double t = detail::shifted_time(p, tau);
    auto theta = [&](double xi) {
        return eval_linear_superposed(p.gamma0, p.phi0, xi, tau, p.tau_shift);
    };
    const double scan_hi = 20.0 * std::sqrt(t) + 1.0;
    double peak = 0.0;
    for (int i = 0; i <= 2000; ++i) peak = std::max(peak, theta(scan_hi * i / 2000.0));
    const double floor = floor_frac * peak;
    double lo = 0.0, hi = scan_hi;
    while (theta(hi) > floor) hi *= 2.0;
    for (int i = 0; i <= 2000; ++i) { // last crossing from above
        const double xi = hi * i / 2000.0;
        if (theta(xi) > floor) lo = xi;
    }
    hi = lo + hi / 2000.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (theta(mid) > floor ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace selfsim
