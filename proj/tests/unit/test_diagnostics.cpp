#include "printers.hpp"

#include "semiclassical/closed_form.hpp"
#include "semiclassical/diagnostics.hpp"
#include "semiclassical/errors.hpp"
#include "semiclassical/rs_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace semiclassical;

TEST_CASE("S2(0) matches the closed form") {
    for (const auto& [m, w, g] : {std::tuple{1, 1, 1}, std::tuple{2, 3, 5}}) {
        const auto model = kappa_model(2, Rational(m), Rational(w), Rational(g));
        const auto r = correction_diagnostics(model, 3);
        const double expected = 17.0 * g / (6.0 * m * m * w * w * w);
        CHECK(std::abs(r.orders[0].value_at_origin - expected) < 1e-12 * expected);
        const Kappa1DModel md{double(m), double(w), double(g), 2};
        CHECK(std::abs(s2_closed(md, 0.0) - expected) < 1e-12 * expected);
    }
}

TEST_CASE("S2' agrees with the closed form away from the origin") {
    const Kappa1DModel md{1, 1, 1, 2};
    const CorrectionProfiles p(kappa_model(2, 1, 1, 1), 4);
    for (double x : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0}) {
        const double h = 1e-4 * std::max(1.0, x);
        const double fd = (s2_closed(md, x + h) - s2_closed(md, x - h)) / (2 * h);
        CHECK(std::abs(p.derivatives(x)[2] - fd) < 1e-7 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("Taylor and recursion branches agree where both apply") {
    for (int kappa : {2, 3}) {
        const CorrectionProfiles p(kappa_model(kappa, 1, 1, 1), 30);
        const double r0 = p.switch_radius();
        for (double f : {0.6, 0.999}) {
            const auto a = p.derivatives(f * r0);
            const auto b = p.derivatives_by_recursion(f * r0);
            for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12 * std::abs(b[k]));
        }
        const auto d = p.derivatives(-0.5);
        const auto e = p.derivatives(0.5);
        for (std::size_t k = 0; k < d.size(); ++k) CHECK(d[k] == -e[k]);
    }
}

TEST_CASE("energies match the coupling series") {
    const CorrectionProfiles p(kappa_model(2, 1, 1, 1), 6);
    const auto c = transport_coupling_series(kappa_model(2, 1, 1, 1), 0, 6);
    Rational f(1);
    for (int k = 0; k <= 6; ++k) {
        if (k > 1) f *= Rational(k);
        CHECK(p.energies()[static_cast<std::size_t>(k)] == c[static_cast<std::size_t>(k)] * f);
    }
}

TEST_CASE("values scale as g^(l-1)") {
    // With m = w = 1 the rescaling x -> x / sqrt(g) maps g to 1 and S_(l) to g^(l-1) S_(l).
    const auto one = correction_diagnostics(kappa_model(2, 1, 1, 1), 8);
    const auto four = correction_diagnostics(kappa_model(2, 1, 1, 4), 8);
    for (std::size_t i = 0; i < one.orders.size(); ++i) {
        const int l = one.orders[i].order;
        const double expected = one.orders[i].value_at_origin * std::pow(4.0, l - 1);
        CHECK(std::abs(four.orders[i].value_at_origin - expected) < 1e-10 * std::abs(expected));
    }
}

TEST_CASE("quartic and sextic observations through order 15") {
    for (int kappa : {2, 3}) {
        const auto r = correction_diagnostics(kappa_model(kappa, 1, 1, 1), 15);
        REQUIRE(r.orders.size() == 14);
        for (const auto& d : r.orders) {
            CHECK(std::isfinite(d.value_at_origin));
            // The sextic ground energy has no odd coefficients past the first.
            CHECK(d.ratio.has_value() == (kappa == 2 || d.order % 2 == 0));
        }
        CHECK(r.samples > 64);
    }
}

TEST_CASE("unsupported models and orders") {
    CHECK_THROWS_AS(CorrectionProfiles(harmonic_model(1, {Rational(1)}), 4), InvalidModel);
    CHECK_THROWS_AS(CorrectionProfiles(kappa_model(2, 1, 1, 1), 1), IndexOutOfRange);
    CHECK_THROWS_AS(CorrectionProfiles(kappa_model(2, 1, 1, 1), 31), IndexOutOfRange);
    PolySeries a(1, 4);
    a.set(MultiIndex{4}, Rational(-1));
    CHECK_THROWS_AS(CorrectionProfiles(make_model(1, {Rational(1)}, a), 4), InvalidModel);
    const CorrectionProfiles p(kappa_model(2, 1, 1, 1), 4);
    CHECK_THROWS_AS(p.derivatives_by_recursion(0.0), DomainExceeded);
}

TEST_CASE("JSON") {
    const auto j = correction_diagnostics_to_json(correction_diagnostics(kappa_model(2, 1, 1, 1), 4));
    CHECK(j.at("orders").size() == 3);
    CHECK(j.at("orders")[0].at("order") == 2);
    CHECK(j.contains("ratios_decreasing"));
    CHECK(j.contains("values_alternate"));
}
