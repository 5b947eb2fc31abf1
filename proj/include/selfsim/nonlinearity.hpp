#pragma once

#include <cmath>
#include <stdexcept>

namespace selfsim {

/// The nonlinearity parameter n of the diffusion law d(theta)/dtau =
/// d^2(theta^{n+1})/dxi^2, bundled with the constants derived from it.
///
/// k      = n / (2 (n+1) (n+2)), the coefficient in the self-similar profiles
/// alpha  = 1 + 1/(2 (n+1)),     decay exponent of the boundary Fick flux
/// beta   = 1 - 1/(n+2),         decay exponent of the corner flux
///
/// These satisfy 2 - alpha - beta = k identically.
struct NonlinearityContext {
    double n = 0.0;
    double k = 0.0;
    double alpha = 1.5;
    double beta = 0.5;

    bool is_linear() const { return n == 0.0; }
};

/// Builds the context for a given n. Rejects n < 0 (slow/fast regimes with
/// negative exponent are out of scope) and non-finite input.
inline NonlinearityContext make_context(double n) {
    if (!std::isfinite(n) || n < 0.0) {
        throw std::invalid_argument("nonlinearity parameter n must be finite and >= 0");
    }
    NonlinearityContext ctx;
    ctx.n = n;
    ctx.k = n / (2.0 * (n + 1.0) * (n + 2.0));
    ctx.alpha = 1.0 + 1.0 / (2.0 * (n + 1.0));
    ctx.beta = 1.0 - 1.0 / (n + 2.0);
    return ctx;
}

} // namespace selfsim
