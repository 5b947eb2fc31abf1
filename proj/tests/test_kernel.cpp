#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "selfsim/kernel.hpp"

using namespace selfsim;
using Catch::Approx;

namespace {

// Independent oracle: the similarity-variable form of the absorbing-end
// profile, theta = tau^(-1/(n+1)) s^(1/(n+1)) [1 - k s^((n+2)/(n+1))]^(1/n)
// with s = xi tau^(-1/(2(n+1))). Written directly, not via the flux form.
double dirichlet_similarity_form(double n, double xi, double tau) {
    const double k = n / (2.0 * (n + 1.0) * (n + 2.0));
    const double s = xi * std::pow(tau, -1.0 / (2.0 * (n + 1.0)));
    const double bracket = 1.0 - k * std::pow(s, (n + 2.0) / (n + 1.0));
    if (bracket <= 0.0 || s == 0.0) return 0.0;
    return std::pow(tau, -1.0 / (n + 1.0)) * std::pow(s, 1.0 / (n + 1.0)) *
           std::pow(bracket, 1.0 / n);
}

// Independent oracle: the insulated-end profile
// theta = tau^(-1/(n+2)) [1 - k (xi tau^(-1/(n+2)))^2]^(1/n).
double neumann_similarity_form(double n, double xi, double tau) {
    const double k = n / (2.0 * (n + 1.0) * (n + 2.0));
    const double s = xi * std::pow(tau, -1.0 / (n + 2.0));
    const double bracket = 1.0 - k * s * s;
    if (bracket <= 0.0) return 0.0;
    return std::pow(tau, -1.0 / (n + 2.0)) * std::pow(bracket, 1.0 / n);
}

SuperposedParams params(double n, double gamma0, double phi0, double shift = 0.0) {
    return make_superposed_params(make_context(n), gamma0, phi0, shift);
}

} // namespace

TEST_CASE("derived constants match their formulas", "[kernel]") {
    const auto c = make_context(7.0 / 3.0);
    CHECK(c.k == Approx(21.0 / 260.0).epsilon(1e-15));
    CHECK(c.alpha == Approx(1.15).epsilon(1e-15));
    CHECK(c.beta == Approx(10.0 / 13.0).epsilon(1e-15));

    const auto lin = make_context(0.0);
    CHECK(lin.k == 0.0);
    CHECK(lin.alpha == Approx(1.5));
    CHECK(lin.beta == Approx(0.5));

    CHECK_THROWS_AS(make_context(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_context(std::nan("")), std::invalid_argument);
}

TEST_CASE("identity 2 - alpha - beta = k holds across n", "[kernel]") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const auto c = make_context(dist(rng));
        CHECK(std::abs(2.0 - c.alpha - c.beta - c.k) < 1e-12);
    }
}

TEST_CASE("corner flux decay law", "[kernel]") {
    CHECK(gamma_of_tau(params(0.0, 1.0, 0.0), 4.0) == Approx(0.5).epsilon(1e-15));
    CHECK(gamma_of_tau(params(3.0, 0.0, 1.0), 7.0) == 0.0);
    CHECK(gamma_of_tau(params(7.0 / 3.0, 1.0, 0.0), 1.0) == Approx(1.0).epsilon(1e-15));
    CHECK(gamma_of_tau(params(7.0 / 3.0, 2.0, 0.0), 2.0) ==
          Approx(2.0 * std::pow(2.0, -10.0 / 13.0)).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_of_tau(params(1.0, 1.0, 0.0), 0.0), std::domain_error);
}

TEST_CASE("fick flux decay law", "[kernel]") {
    CHECK(phi_of_tau(params(0.0, 0.0, 1.0), 1.0) == Approx(-1.0).epsilon(1e-15));
    CHECK(phi_of_tau(params(0.0, 0.0, 1.0), 4.0) == Approx(-0.125).epsilon(1e-15));
    CHECK(phi_of_tau(params(2.0, 1.0, 0.0), 5.0) == 0.0);
    CHECK(phi_of_tau(params(7.0 / 3.0, 0.0, 1.0), 1.0) == Approx(-1.0).epsilon(1e-15));
    CHECK(phi_of_tau(params(7.0 / 3.0, 0.0, 1.0), 2.0) ==
          Approx(-std::pow(2.0, -1.15)).epsilon(1e-15));
    CHECK_THROWS_AS(phi_of_tau(params(1.0, 0.0, 1.0), -1.0), std::domain_error);
}

TEST_CASE("flux forms reproduce the similarity-variable profiles", "[kernel]") {
    for (double n : {0.5, 1.0, 7.0 / 3.0}) {
        const auto pd = params(n, 0.0, 1.0);
        const auto pn = params(n, 1.0, 0.0);
        for (double tau : {0.5, 1.0, 3.0}) {
            const double front_d = front_position(pd, tau);
            const double front_n = front_position(pn, tau);
            for (double frac : {0.0, 0.1, 0.35, 0.6, 0.85, 0.99}) {
                const double xi_d = frac * front_d;
                const double xi_n = frac * front_n;
                CHECK(eval_dirichlet_flux_form(pd, xi_d, tau) ==
                      Approx(dirichlet_similarity_form(n, xi_d, tau)).margin(1e-12));
                CHECK(eval_neumann_flux_form(pn, xi_n, tau) ==
                      Approx(neumann_similarity_form(n, xi_n, tau)).margin(1e-12));
            }
        }
    }
}

TEST_CASE("absorbing-end profile boundary and gauge cases", "[kernel]") {
    const auto p = params(7.0 / 3.0, 0.5, 1.0); // gamma0 ignored by the flux form
    CHECK(eval_dirichlet_flux_form(p, 0.0, 1.0) == 0.0);
    CHECK(eval_dirichlet_flux_form(p, 0.0, 9.0) == 0.0);
    const auto zero = params(1.0, 0.0, 0.0);
    for (double xi : {0.0, 0.5, 2.0}) {
        CHECK(eval_dirichlet_flux_form(zero, xi, 1.0) == 0.0);
        CHECK(eval_neumann_flux_form(zero, xi, 1.0) == 0.0);
    }
}

TEST_CASE("insulated-end profile: prefactor and front", "[kernel]") {
    for (double n : {0.5, 1.0, 7.0 / 3.0}) {
        const auto p = params(n, 1.0, 0.0);
        for (double tau : {1.0, 2.0, 8.0}) {
            CHECK(eval_neumann_flux_form(p, 0.0, tau) ==
                  Approx(std::pow(tau, -1.0 / (n + 2.0))).epsilon(1e-14));
            const double front = std::pow(tau, 1.0 / (n + 2.0)) / std::sqrt(p.ctx.k);
            CHECK(front_position(p, tau) == Approx(front).epsilon(1e-12));
            CHECK(eval_neumann_flux_form(p, front * (1.0 - 1e-6), tau) > 0.0);
            CHECK(eval_neumann_flux_form(p, front * (1.0 + 1e-9), tau) == 0.0);
        }
    }
}

TEST_CASE("superposed reduces exactly to the single-gauge forms", "[kernel]") {
    for (double n : {0.5, 7.0 / 3.0}) {
        const auto pd = params(n, 0.0, 1.3, 0.5);
        const auto pn = params(n, 0.7, 0.0, 0.5);
        for (double tau : {0.5, 2.0}) {
            for (double xi = 0.0; xi <= 8.0; xi += 0.37) {
                CHECK(eval_superposed(pd, xi, tau) == eval_dirichlet_flux_form(pd, xi, tau));
                CHECK(eval_superposed(pn, xi, tau) == eval_neumann_flux_form(pn, xi, tau));
            }
        }
    }
}

TEST_CASE("superposed boundary value follows the corner law exactly", "[kernel]") {
    for (double n : {0.25, 1.0, 7.0 / 3.0}) {
        const auto p = params(n, 0.1, 1.0, 1.0);
        for (double tau : {0.0, 3.0, 27.0}) {
            const double expected = std::pow(gamma_of_tau(p, tau), 1.0 / (n + 1.0));
            CHECK(eval_superposed(p, 0.0, tau) == expected);
        }
    }
    // pure corner-law gauge at xi = 0 collapses to the plain prefactor power
    for (double n : {0.5, 2.0}) {
        const auto p = params(n, 1.0, 0.0);
        for (double tau : {0.5, 1.0, 4.0}) {
            CHECK(eval_superposed(p, 0.0, tau) ==
                  Approx(std::pow(tau, -1.0 / (n + 2.0))).epsilon(1e-14));
        }
    }
}

TEST_CASE("superposed output is non-negative with compact support", "[kernel]") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> un(0.05, 4.0);
    std::uniform_real_distribution<double> ug(0.0, 2.0);
    std::uniform_real_distribution<double> ut(0.2, 20.0);
    std::uniform_real_distribution<double> ux(0.0, 40.0);
    for (int i = 0; i < 300; ++i) {
        const auto p = params(un(rng), ug(rng), ug(rng), 0.0);
        const double tau = ut(rng);
        const double value = eval_superposed(p, ux(rng), tau);
        REQUIRE(std::isfinite(value));
        REQUIRE(value >= 0.0);
        if (p.gamma0 > 0.0 || p.phi0 > 0.0) {
            const double front = front_position(p, tau);
            CHECK(eval_superposed(p, front * (1.0 + 1e-9), tau) == 0.0);
            CHECK(eval_superposed(p, front * (1.0 + 2.5), tau) == 0.0);
        }
    }
}

TEST_CASE("time-shift symmetry", "[kernel]") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ut(0.1, 5.0);
    for (double n : {0.0, 1.0, 7.0 / 3.0}) {
        for (int i = 0; i < 50; ++i) {
            const double tau = ut(rng);
            const double shift = ut(rng);
            const double xi = 0.8 * ut(rng);
            const auto shifted = params(n, 0.4, 0.9, shift);
            const auto unshifted = params(n, 0.4, 0.9, 0.0);
            CHECK(eval_superposed(shifted, xi, tau) ==
                  eval_superposed(unshifted, xi, tau + shift));
        }
    }
}

TEST_CASE("linear superposition of the exponential solutions", "[kernel]") {
    CHECK(eval_linear_superposed(1.0, 0.0, 0.0, 4.0) == Approx(0.5).epsilon(1e-15));
    CHECK(eval_linear_superposed(0.0, 1.0, 2.0, 1.0) ==
          Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(eval_linear_superposed(1.0, 1.0, 0.0, 0.0), std::domain_error);

    // sum structure: equals the two single-gauge exponential solutions added
    for (double tau : {0.5, 1.0, 3.0}) {
        for (double xi = 0.0; xi <= 6.0; xi += 0.5) {
            const double absorbing = xi * 1.3 * std::pow(tau, -1.5) * std::exp(-xi * xi / (4.0 * tau));
            const double insulated = 0.6 * std::pow(tau, -0.5) * std::exp(-xi * xi / (4.0 * tau));
            CHECK(eval_linear_superposed(0.6, 1.3, xi, tau) ==
                  Approx(absorbing + insulated).epsilon(1e-14));
        }
    }
}

TEST_CASE("small-n family converges to the exponential family", "[kernel]") {
    const double gamma0 = 0.1, phi0 = 1.0;
    double max_lin = 0.0;
    std::vector<std::pair<double, double>> sample;
    for (double tau : {1.0, 2.0, 4.0, 8.0}) {
        for (double xi = 0.0; xi <= 5.0; xi += 0.25) {
            sample.emplace_back(xi, tau);
            max_lin = std::max(max_lin, eval_linear_superposed(gamma0, phi0, xi, tau));
        }
    }
    auto max_dev = [&](double n) {
        const auto p = params(n, gamma0, phi0);
        double dev = 0.0;
        for (auto [xi, tau] : sample) {
            dev = std::max(dev, std::abs(eval_superposed(p, xi, tau) -
                                         eval_linear_superposed(gamma0, phi0, xi, tau)));
        }
        return dev;
    };
    CHECK(max_dev(1e-6) < 1e-4 * max_lin);
    CHECK(max_dev(1e-8) < 1e-6 * max_lin);
}

TEST_CASE("steady profile", "[kernel]") {
    CHECK(eval_steady({1.0, 0.0, 3.0}, 5.0) == Approx(1.0));
    CHECK(eval_steady({1.0, 0.5, 0.0}, 1.0) == Approx(0.5).epsilon(1e-15));
    CHECK(eval_steady({2.0, 1.0, 1.0}, 1.0) == Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(eval_steady({1.0, 2.0, 1.0}, 1.0), std::domain_error);
}

TEST_CASE("superposition defect term", "[kernel]") {
    CHECK(superposition_defect(make_context(0.0), 3.0, -2.0, 1.5) == 0.0);
    CHECK(superposition_defect(make_context(2.0), 0.0, 1.0, 1.0) == 0.0);
    CHECK(superposition_defect(make_context(2.0), 1.0, 0.0, 1.0) == 0.0);
    CHECK(superposition_defect(make_context(1.0), 1.0, 1.0, 1.0) ==
          Approx(1.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("flux forms solve the equation to second order in the stencil", "[kernel]") {
    // hand-rolled centered-difference residual of the evaluator itself
    auto residual = [](const SuperposedParams& p, double xi, double tau, double e) {
        const double n = p.ctx.n;
        auto u = [&](double x, double t) { return std::pow(eval_superposed(p, x, t), n + 1.0); };
        const double dt_term =
            (eval_superposed(p, xi, tau + e) - eval_superposed(p, xi, tau - e)) / (2.0 * e);
        const double dxx_term = (u(xi + e, tau) - 2.0 * u(xi, tau) + u(xi - e, tau)) / (e * e);
        return dt_term - dxx_term;
    };
    for (double n : {0.5, 1.0, 7.0 / 3.0}) {
        for (bool dirichlet : {true, false}) {
            const auto p = dirichlet ? params(n, 0.0, 1.0) : params(n, 1.0, 0.0);
            const double tau = 1.3;
            const double xi = 0.45 * front_position(p, tau);
            const double r1 = residual(p, xi, tau, 0.04);
            const double r2 = residual(p, xi, tau, 0.02);
            const double order = std::log2(std::abs(r1) / std::abs(r2));
            CHECK(order == Approx(2.0).margin(0.35));
            CHECK(std::abs((4.0 * r2 - r1) / 3.0) < 1e-7);
        }
    }
}
