#include "printers.hpp"

#include "semiclassical/closed_form.hpp"
#include "semiclassical/errors.hpp"
#include "semiclassical/jet.hpp"
#include "semiclassical/transport.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace semiclassical;
namespace f = semiclassical::formulas;

namespace {

// Composite Simpson of sqrt(2 m V) on [0, |x|] with 2n intervals.
double s0_simpson(const Kappa1DModel& md, double x, int n = 20000) {
    auto fx = [&](double s) { return std::sqrt(2 * md.mass * (0.5 * md.mass * md.omega * md.omega * s * s + md.g * std::pow(s, 2 * md.kappa))); };
    const double b = std::abs(x), h = b / (2 * n);
    double sum = fx(0) + fx(b);
    for (int i = 1; i < 2 * n; ++i) sum += (i % 2 ? 4 : 2) * fx(i * h);
    return sum * h / 3;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("s0_closed examples") {
    const Kappa1DModel md{1, 1, 0.5, 2};
    CHECK(s0_closed(md, 0.0) == 0.0);
    CHECK(rel(s0_closed(md, 1.0), (std::pow(2.0, 1.5) - 1) / 3) < 1e-14);
    CHECK(rel(s0_closed(Kappa1DModel{1, 1, 1e-12, 2}, 1.0), 0.5) < 1e-9);
    CHECK(rel(s0_closed(Kappa1DModel{1, 1, 1e-12, 4}, 1.0), 0.5) < 1e-9);
    CHECK(s0_closed(md, -1.3) == s0_closed(md, 1.3));
}

TEST_CASE("kappa > 2 quadrature against an independent Simpson rule") {
    for (int kappa = 3; kappa <= 5; ++kappa) {
        const Kappa1DModel md{1.5, 0.8, 0.7, kappa};
        for (double x : {0.01, 0.3, 1.0, 1.7, -2.5}) CHECK(rel(s0_closed(md, x), s0_simpson(md, x)) < 1e-11);
    }
    CHECK(rel(s0_closed(Kappa1DModel{1, 1, 1, 3}, 1.0), s0_simpson(Kappa1DModel{1, 1, 1, 3}, 1.0)) < 1e-12);
}

TEST_CASE("Taylor data of S0, S1, S2 match the formal engine") {
    const Kappa1DModel md{1.5, 2.0, 0.7, 2};
    const auto ground = expand_ground(kappa_model(2, Rational(3, 2), Rational(2), Rational(7, 10)), 4);
    const int order = 6;
    const Jet x = Jet::variable(0.0, order);
    const Jet s0 = f::s0_kappa2(md, x), s1 = f::s1_kappa2(md, x), s2 = f::s2_kappa2(md, x);
    for (unsigned d = 0; d <= static_cast<unsigned>(order); ++d) {
        const double e0 = ground.corrections[0].coefficient(MultiIndex{d}).to_double();
        const double e1 = ground.corrections[1].coefficient(MultiIndex{d}).to_double();
        const double e2 = ground.corrections[2].coefficient(MultiIndex{d}).to_double();
        CHECK(s0[d] == doctest::Approx(e0).epsilon(1e-9).scale(1e-9));
        CHECK(s1[d] == doctest::Approx(e1).epsilon(1e-9).scale(1e-9));
        if (d >= 2) CHECK(s2[d] == doctest::Approx(e2).epsilon(1e-9).scale(1e-9));
    }
    // S2(0) = 17 g / (6 m^2 w^3); S2''(0) / 2m equals E_(2).
    CHECK(rel(s2_closed(md, 0.0), 17 * 0.7 / (6 * 1.5 * 1.5 * 8)) < 1e-14);
    CHECK(rel(s2[2] / 1.5, ground.energies[2].to_double()) < 1e-12);
    CHECK(rel(ground.energies[2].to_double(), -21 * 0.49 / (4 * std::pow(1.5, 4) * 32)) < 1e-14);  // -21 g^2 / (4 m^4 w^5)
    CHECK(s1_closed(md, 0.0) == 0.0);
}

TEST_CASE("S2 has no cancellation problem near the origin") {
    const Kappa1DModel md{1, 1, 1, 2};
    const double s20 = s2_closed(md, 0.0);
    for (double x : {1e-8, 1e-6, 1e-4, 1e-3}) CHECK(std::abs(s2_closed(md, x) - s20) < 10 * x * x + 1e-14);
}

TEST_CASE("phi0 examples") {
    for (int kappa = 2; kappa <= 5; ++kappa) {
        const Kappa1DModel md{1, 1, 1, kappa};
        CHECK(phi0_closed(md, 3, 0.0) == 0.0);
        const Kappa1DModel tiny{1, 1, 1e-14, kappa};
        const double base = 0.7 / std::pow(2.0, 1.0 / (kappa - 1));
        CHECK(rel(phi0_closed(tiny, 3, 0.7), base * base * base) < 1e-10);
        double prev = 0.0;
        for (double x : {10.0, 100.0, 1e4, 1e6}) {
            const double v = phi0_closed(md, 2, x);
            CHECK(std::isfinite(v));
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(prev < std::pow(2 * md.mass * md.omega * md.omega / md.g, 1.0 / (kappa - 1)));
    }
}

TEST_CASE("Laurent heads of u1 and u2") {
    const Kappa1DModel md{1.3, 0.9, 0.6, 2};
    for (int n = 1; n <= 6; ++n) {
        const double x = 2e-3;
        const double h1 = -n * (n - 1) / (4 * md.mass * md.omega);
        const double h2 = (n - 3.0) * (n - 2) * (n - 1) * n / (16 * md.mass * md.mass * md.omega * md.omega);
        // Printed forms evaluated away from the switch; their heads dominate.
        CHECK(u1_closed(md, n, x) * x * x == doctest::Approx(h1).scale(1e-5).epsilon(1e-4));
        if (h2 != 0.0) CHECK(u2_closed(md, n, x) * std::pow(x, 4) == doctest::Approx(h2).epsilon(1e-4));
    }
    CHECK(std::isfinite(phi1_closed(md, 1, 0.0)));
    CHECK(std::isfinite(phi2_closed(md, 1, 0.0)));
    CHECK(phi1_closed(md, 1, 0.0) == 0.0);
}

TEST_CASE("phi1 and phi2 are continuous across the near-origin switch") {
    const Kappa1DModel md{2.0, 1.5, 0.8, 2};
    for (int n = 1; n <= 5; ++n) {
        for (double sign : {-1.0, 1.0}) {
            const double a = sign * kNearOrigin * (1 - 1e-9), b = sign * kNearOrigin * (1 + 1e-9);
            const double p1a = phi1_closed(md, n, a), p1b = phi1_closed(md, n, b);
            const double p2a = phi2_closed(md, n, a), p2b = phi2_closed(md, n, b);
            // The two points are 2e-9 apart relatively; phi_k ~ x^(n-2k) or smoother moves by a few times that.
            CHECK(std::abs(p1a - p1b) <= 2e-8 * std::abs(p1b) + 1e-30);
            CHECK(std::abs(p2a - p2b) <= 2e-8 * std::abs(p2b) + 1e-30);
        }
    }
}

TEST_CASE("u1 and u2 satisfy the excited transport equations (m != 1)") {
    const Kappa1DModel md{2.0, 1.5, 0.8, 2};
    const double m = md.mass;
    for (int n = 1; n <= 4; ++n) {
        const double gap0 = n * md.omega, gap1 = gap1_closed(md, n), gap2 = gap2_closed(md, n);
        for (double x0 = -3.0; x0 <= 3.0001; x0 += 0.25) {
            if (std::abs(x0) < 1e-9) continue;
            const Jet x = Jet::variable(x0, 3);
            const Jet phi0 = f::phi0(md, n, x);
            const Jet phi1 = f::u1_printed(md, n, x) * phi0;
            const Jet phi2 = f::u2_printed(md, n, x) * phi0;
            const Jet S0 = f::s0_kappa2(md, x), S1 = f::s1_kappa2(md, x), S2 = f::s2_kappa2(md, x);
            auto d = [](const Jet& j, int k) { return j.derivative(static_cast<std::size_t>(k)); };

            const double lhs1 = d(S0, 1) * d(phi1, 1) / m - gap0 * phi1.value();
            const double rhs1 = d(phi0, 2) / (2 * m) + gap1 * phi0.value() - d(S1, 1) * d(phi0, 1) / m;
            const double scale1 = std::abs(d(phi0, 2) / m) + std::abs(gap1 * phi0.value()) + std::abs(gap0 * phi1.value()) + 1e-300;
            CHECK(std::abs(lhs1 - rhs1) / scale1 < 1e-9);

            const double lhs2 = d(S0, 1) * d(phi2, 1) / m - gap0 * phi2.value();
            const double rhs2 = d(phi1, 2) / m + 2 * (gap1 * phi1.value() - d(S1, 1) * d(phi1, 1) / m) + gap2 * phi0.value() -
                                d(S2, 1) * d(phi0, 1) / m;
            const double scale2 = std::abs(d(phi1, 2) / m) + std::abs(gap2 * phi0.value()) + std::abs(gap0 * phi2.value()) +
                                  std::abs(2 * gap1 * phi1.value()) + 1e-300;
            CHECK(std::abs(lhs2 - rhs2) / scale2 < 1e-9);
        }
    }
}

TEST_CASE("closed-form gaps agree with the formal engine") {
    for (int n = 1; n <= 5; ++n) {
        const auto [g, ex] = expand_excited(kappa_model(2, 2, Rational(3, 2), Rational(4, 5)), MultiIndex{static_cast<unsigned>(n)}, 2);
        const Kappa1DModel md{2.0, 1.5, 0.8, 2};
        CHECK(rel(gap1_closed(md, n), ex.gaps[1].to_double()) < 1e-13);
        CHECK(rel(gap2_closed(md, n), ex.gaps[2].to_double()) < 1e-13);
    }
}

TEST_CASE("Sternberg map: round trip, flow form, domain") {
    for (int kappa = 2; kappa <= 5; ++kappa) {
        const Kappa1DModel md{1.2, 0.9, 0.4, kappa};
        CHECK(sternberg_1d(md, 0.0) == 0.0);
        for (double x = -10.0; x <= 10.0; x += 0.37) {
            // The inverse has condition number (1 + s)/2 in y; beyond kappa = 3 that exceeds 1e3 at |x| = 10.
            const double s = std::sqrt(1 + 2 * md.g * std::pow(x, 2 * (kappa - 1)) / (md.mass * md.omega * md.omega));
            const double bound = kappa <= 3 ? 1e-12 : std::max(1e-12, 2e-15 * (1 + s) / 2 * std::abs(x));
            CHECK(std::abs(sternberg_1d_inverse(md, sternberg_1d(md, x)) - x) <= bound);
            const Jet xj = Jet::variable(x, 1);
            const Jet y = f::sternberg(md, xj);
            const double lhs = s0_prime_closed(md, x) * y[1] / md.mass;
            CHECK(std::abs(lhs - md.omega * y.value()) <= 1e-10 * std::max(1.0, std::abs(md.omega * y.value())));
        }
        const double r = sternberg_domain_radius(md);
        CHECK_THROWS_AS(sternberg_1d_inverse(md, r), DomainExceeded);
        CHECK_THROWS_AS(sternberg_1d_inverse(md, -1.01 * r), DomainExceeded);
        CHECK(rel(sternberg_1d(Kappa1DModel{1, 1, 1e-14, kappa}, 0.8), 0.8) < 1e-12);
    }
}

TEST_CASE("wavefunction evaluation") {
    const Kappa1DModel harmonic{1.0, 1.0, 1e-14, 2};
    for (double x : {0.0, 0.5, 1.5}) CHECK(rel(evaluate_wavefunction(harmonic, 0.3, 0, 0, x), std::exp(-x * x / 0.6)) < 1e-10);

    const Kappa1DModel md{1.0, 1.0, 0.5, 2};
    for (double x : {0.2, 1.0, 2.0}) {
        const double u = 2 * md.g * x * x;
        const double s = std::sqrt(1 + u);
        const double expect = std::exp(-s0_closed(md, x) / 0.5) * std::pow(1 + u, -0.25) * std::pow((1 + s) / 2, -0.5);
        CHECK(rel(evaluate_wavefunction(md, 0.5, 0, 1, x), expect) < 1e-12);
    }

    // Decay faster than gaussian: log psi ~ -sqrt(2 m g) |x|^3 / (3 hbar).
    const double hbar = 0.7;
    const double slope = (log_abs_wavefunction(md, hbar, 0, 2, 100.0) - log_abs_wavefunction(md, hbar, 0, 2, 50.0)) / (1e6 - 1.25e5);
    CHECK(rel(slope, -std::sqrt(2 * md.mass * md.g) / (3 * hbar)) < 2e-3);
}

TEST_CASE("Hermite limit at tiny coupling, n = 4") {
    const Kappa1DModel md{1.0, 1.0, 1e-12, 2};
    const double hbar = 1.0;
    for (double x : {0.3, 0.8, 1.7, 2.5}) {
        const double gauss = std::exp(-x * x / (2 * hbar));
        // Leading-normalized Hermite x^4 - 3 x^2 hbar/(m w) + 3/4 (hbar/(m w))^2, times phi0's 2^-4.
        const double hermite = (std::pow(x, 4) - 3 * x * x + 0.75) / 16;
        CHECK(rel(evaluate_wavefunction(md, hbar, 4, 2, x) / gauss, hermite) < 1e-6);
    }
}

TEST_CASE("closed-form errors") {
    const Kappa1DModel sextic{1, 1, 1, 3};
    CHECK_THROWS_AS(s1_closed(sextic, 1.0), UnsupportedKappa);
    CHECK_THROWS_AS(s2_closed(sextic, 1.0), UnsupportedKappa);
    CHECK_THROWS_AS(u1_closed(sextic, 1, 1.0), UnsupportedKappa);
    CHECK_THROWS_AS(evaluate_wavefunction(sextic, 1.0, 0, 1, 1.0), UnsupportedKappa);
    CHECK_NOTHROW(evaluate_wavefunction(sextic, 1.0, 2, 0, 1.0));
    CHECK_THROWS_AS(evaluate_wavefunction(Kappa1DModel{}, 1.0, 0, 3, 1.0), UnsupportedOrder);
    CHECK_THROWS_AS(s0_closed(Kappa1DModel{1, 1, 1, 6}, 1.0), UnsupportedKappa);
}

TEST_CASE("scan CSV") {
    const std::vector<double> xs{-1.0, 0.0, 1.0};
    const auto fct = wavefunction_factors(Kappa1DModel{}, 1.0, 1, 2, xs);
    for (double v : fct.psi) CHECK(std::isfinite(v));
    std::ostringstream os;
    write_scan_csv(os, fct);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,S0,S1,S2,psi");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
}
