#include "printers.hpp"
#include "random_models.hpp"
#include "univariate.hpp"

#include "semiclassical/errors.hpp"
#include "semiclassical/hj_formal.hpp"
#include "semiclassical/transport.hpp"

#include <doctest.h>

#include <map>
#include <numeric>

using namespace semiclassical;
using namespace testing_support;

namespace {

std::vector<Rational> R(std::initializer_list<std::pair<long, long>> v) {
    std::vector<Rational> out;
    for (auto [p, q] : v) out.emplace_back(p, q);
    return out;
}

std::vector<Rational> head(std::vector<Rational> v, std::size_t n) {
    v.resize(std::min(v.size(), n));
    return v;
}

// Dense 1D coefficient vectors of a series, index = degree.
Uni dense(const PolySeries& s, std::size_t n) {
    Uni u(n, Rational(0));
    for (const auto& [k, c] : s.terms())
        if (k[0] < n) u[k[0]] = c;
    return u;
}

Uni deriv(const Uni& a) {
    Uni d(a.size() > 0 ? a.size() - 1 : 0, Rational(0));
    for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * Rational(static_cast<long>(i));
    return d;
}

// Leading-normalized Hermite polynomial in x as a polynomial in hbar:
// sum_j (-1)^j n! / (j! (n-2j)!) (hbar / (4 m w))^j x^(n-2j); entry j holds the x^(n-2j) coefficient of hbar^j.
std::vector<Rational> hermite_hbar(unsigned n, const Rational& m, const Rational& w) {
    std::vector<Rational> c;
    for (unsigned j = 0; 2 * j <= n; ++j) {
        const Rational sign = j % 2 == 0 ? Rational(1) : Rational(-1);
        c.push_back(sign * factorial(n) / (factorial(j) * factorial(n - 2 * j)) * pow(Rational(1) / (Rational(4) * m * w), static_cast<int>(j)));
    }
    return c;
}

}  // namespace

TEST_CASE("quartic ground energies") {
    const auto g = expand_ground(kappa_model(2, 1, 1, 1), 8);
    CHECK(head(energy_series(g), 4) == R({{1, 2}, {3, 4}, {-21, 8}, {333, 16}}));
    CHECK(g.energies[2] == Rational(-21, 8) * factorial(2));
    CHECK(g.energies[3] == Rational(333, 16) * factorial(3));
    for (int k = 1; k < static_cast<int>(g.corrections.size()); ++k) CHECK(g.corrections[k].coefficient(MultiIndex{0}).is_zero());
}

TEST_CASE("sectic, octic and dectic series heads") {
    const std::vector<std::vector<Rational>> expected{
        R({{1, 2}, {15, 8}, {-3495, 64}, {1239675, 256}}),
        R({{1, 2}, {105, 16}, {-67515, 32}, {401548875, 128}}),
    };
    for (int kappa = 3; kappa <= 4; ++kappa) {
        const auto model = kappa_model(kappa, 1, 1, 1);
        const auto g = expand_ground(model, 3 * (kappa - 1) + 1);
        CHECK(head(coupling_coefficients(energy_series(g), kappa, 1, 1, 1), 4) == expected[kappa - 3]);
    }
    const auto dectic = expand_ground(kappa_model(5, 1, 1, 1), 13);
    const auto c = coupling_coefficients(energy_series(dectic), 5, 1, 1, 1);
    CHECK(c.at(3) == Rational(mpq_class("78210463124745/16384")));
    CHECK(head(c, 3) == R({{1, 2}, {945, 32}, {-140057505, 1024}}));
}

TEST_CASE("sextic hbar series vanishes at non-integral powers of g through order 8") {
    const auto e = energy_series(expand_ground(kappa_model(3, 1, 1, 1), 9));
    for (int k = 1; k <= 8; k += 2) CHECK(e[k].is_zero());
    for (int k = 2; k <= 8; k += 2) CHECK(!e[k].is_zero());
}

TEST_CASE("coupling coefficients carry m, w, g scaling") {
    // E = hbar w sum c_j mu^j is independent of how m, w, g are chosen.
    const Rational m(2), w(3, 2), g(5, 7);
    const auto e = energy_series(expand_ground(kappa_model(2, m, w, g), 6));
    CHECK(head(coupling_coefficients(e, 2, m, w, g), 4) == R({{1, 2}, {3, 4}, {-21, 8}, {333, 16}}));
}

TEST_CASE("harmonic ground expansion terminates") {
    const auto model = harmonic_model(Rational(2), {Rational(1), Rational(3, 2)});
    const auto g = expand_ground(model, 4);
    CHECK(g.energies[0] == Rational(5, 4));
    for (int k = 1; k < 4; ++k) CHECK(g.energies[k].is_zero());
    for (int k = 1; k <= 4; ++k) CHECK(g.corrections[k].is_zero());
}

TEST_CASE("quartic transport residual recomputed with dense arithmetic") {
    const Rational m(3, 2);
    const auto model = kappa_model(2, m, Rational(2), Rational(1, 3));
    const int K = 3;
    const auto g = expand_ground(model, K);
    const int D = g.truncation();
    const std::size_t n = static_cast<std::size_t>(D) + 1;
    std::vector<Uni> dS;
    for (const auto& s : g.corrections) dS.push_back(deriv(dense(s, n)));
    for (int k = 1; k <= K; ++k) {
        const std::size_t keep = static_cast<std::size_t>(D - 2 * k) + 1;
        Uni lhs = uni_mul(dS[0], dS[k], keep);
        for (auto& v : lhs) v = -v / m;
        for (int j = 1; j < k; ++j) {
            const Uni p = uni_mul(dS[j], dS[k - j], keep);
            for (std::size_t i = 0; i < keep; ++i) lhs[i] -= binomial(k, j) * p[i] / (Rational(2) * m);
        }
        const Uni d2 = deriv(dS[k - 1]);
        for (std::size_t i = 0; i < keep && i < d2.size(); ++i) lhs[i] += Rational(k) * d2[i] / (Rational(2) * m);
        lhs[0] -= Rational(k) * g.energies[k - 1];
        for (const auto& v : lhs) CHECK(v.is_zero());
        CHECK(transport_residual(g, k).is_zero());
    }
}

TEST_CASE("perturbing E_(0) shows up in the constant term of the residual") {
    auto g = expand_ground(kappa_model(2, 1, 1, 1), 3);
    g.energies[0] += 1;
    const auto r = transport_residual(g, 1);
    CHECK(r.coefficient(MultiIndex{0}) == Rational(-1));
    CHECK(r.size() == 1);
    CHECK_THROWS_AS(transport_residual(g, 0), IndexOutOfRange);
    CHECK_THROWS_AS(transport_residual(g, 4), IndexOutOfRange);
}

TEST_CASE("insufficient truncation is rejected") {
    const auto model = kappa_model(2, 1, 1, 1);
    CHECK_THROWS_AS(ground_expansion(solve_hj_formal(model, required_ground_truncation(4) - 1), 4), TruncationTooSmall);
    CHECK_NOTHROW(ground_expansion(solve_hj_formal(model, required_ground_truncation(4)), 4));
    const auto g = expand_ground(model, 3);
    CHECK_THROWS_AS(excited_expansion(g, MultiIndex{2}, 3), TruncationTooSmall);
}

TEST_CASE("quartic excited gaps for n = 1..5") {
    const Rational m(2), w(3), gc(5, 3);
    for (unsigned n = 1; n <= 5; ++n) {
        const auto [ground, ex] = expand_excited(kappa_model(2, m, w, gc), MultiIndex{n}, 2);
        const Rational N(static_cast<long>(n));
        CHECK(ex.gaps[0] == N * w);
        CHECK(ex.gaps[1] == Rational(3, 2) * gc * N * (N + 1) / (m * m * w * w));
        CHECK(ex.gaps[2] == -(gc * gc / (Rational(4) * pow(m, 4) * pow(w, 5))) * (Rational(59) * N + Rational(51) * N * N + Rational(34) * N * N * N));
        CHECK(ex.corrections[0].coefficient(MultiIndex{n}) == Rational(1));
        for (int k = 1; k <= 2; ++k) CHECK(ex.corrections[k].coefficient(MultiIndex{n}).is_zero());
        for (int k = 0; k <= 2; ++k) CHECK(excited_transport_residual(ground, ex, k).is_zero());
    }
}

TEST_CASE("quartic total excited energy matches the second order polynomial") {
    for (unsigned n = 1; n <= 5; ++n) {
        const auto [ground, ex] = expand_excited(kappa_model(2, 1, 1, 1), MultiIndex{n}, 2);
        const Rational N(static_cast<long>(n));
        const auto e = excited_energy_series(ground, ex);
        CHECK(e[0] == N + Rational(1, 2));
        CHECK(e[1] == Rational(3, 2) * (N * N + N + Rational(1, 2)));
        CHECK(e[2] == -Rational(1, 8) * (Rational(34) * N * N * N + Rational(51) * N * N + Rational(59) * N + Rational(21)));
    }
}

TEST_CASE("harmonic 1D excited states reproduce Hermite polynomials") {
    for (const auto& [m, w] : {std::pair{Rational(1), Rational(1)}, std::pair{Rational(3), Rational(2, 5)}}) {
        const auto model = harmonic_model(m, {w});
        for (unsigned n = 1; n <= 4; ++n) {
            const auto [ground, ex] = expand_excited(model, MultiIndex{n}, 3);
            CHECK(ex.gaps[0] == Rational(static_cast<long>(n)) * w);
            for (int k = 1; k <= 3; ++k) CHECK(ex.gaps[k].is_zero());
            for (int k = 0; k <= 3; ++k)
                if (2 * k > static_cast<int>(n)) CHECK(ex.corrections[k].is_zero());
            const auto poly = assemble_hbar_polynomial(ex.corrections);
            const auto h = hermite_hbar(n, m, w);
            for (std::size_t j = 0; j < poly.size(); ++j) {
                if (j < h.size()) {
                    CHECK(poly[j].size() == 1);
                    CHECK(poly[j].coefficient(MultiIndex{n - 2 * static_cast<unsigned>(j)}) == h[j]);
                } else {
                    CHECK(poly[j].is_zero());
                }
            }
        }
    }
}

TEST_CASE("harmonic 2D excited states reproduce Hermite products for |m| <= 4") {
    const Rational mass(1);
    const std::vector<Rational> omega{Rational(1), Rational(7, 5)};
    const auto model = harmonic_model(mass, omega);
    for (unsigned a = 0; a <= 4; ++a) {
        for (unsigned b = 0; a + b <= 4; ++b) {
            if (a + b == 0) continue;
            const auto [ground, ex] = expand_excited(model, MultiIndex{a, b}, 2);
            CHECK(ex.gaps[0] == Rational(static_cast<long>(a)) * omega[0] + Rational(static_cast<long>(b)) * omega[1]);
            CHECK(ex.gaps[1].is_zero());
            CHECK(ex.gaps[2].is_zero());
            const auto ha = hermite_hbar(a, mass, omega[0]);
            const auto hb = hermite_hbar(b, mass, omega[1]);
            std::map<unsigned, std::map<std::vector<unsigned>, Rational>> expect;
            for (unsigned i = 0; i < ha.size(); ++i)
                for (unsigned j = 0; j < hb.size(); ++j) expect[i + j][{a - 2 * i, b - 2 * j}] += ha[i] * hb[j];
            const auto poly = assemble_hbar_polynomial(ex.corrections);
            for (unsigned l = 0; l < poly.size(); ++l) {
                std::map<std::vector<unsigned>, Rational> got;
                for (const auto& [k, c] : poly[l].terms()) got[k.exponents()] = c;
                CHECK(got == expect[l]);
            }
        }
    }
}

TEST_CASE("2D harmonic w = (1, 2), m = (1, 1): gap 3 and nothing else") {
    const auto [ground, ex] = expand_excited(harmonic_model(1, {Rational(1), Rational(2)}), MultiIndex{1, 1}, 3);
    CHECK(ex.gaps[0] == Rational(3));
    for (int k = 1; k <= 3; ++k) CHECK(ex.gaps[k].is_zero());
}

TEST_CASE("resonant excited expansion raises DegenerateEigenvalue") {
    PolySeries a(2, 3);
    a.set(MultiIndex{2, 1}, 1);
    const auto model = make_model(1, {Rational(1), Rational(2)}, a);
    CHECK_THROWS_AS(expand_excited(model, MultiIndex{0, 1}, 1), DegenerateEigenvalue);
}

TEST_CASE("property: transport residuals vanish on random models") {
    std::mt19937_64 rng(1618);
    int done = 0;
    while (done < 9) {
        const std::size_t dim = 1 + done % 3;
        const int K = dim == 3 ? 2 : 4;
        const auto model = random_model(rng, dim, 6);
        const auto ground = expand_ground(model, K);
        for (int k = 1; k <= K; ++k) CHECK(transport_residual(ground, k).is_zero());
        CHECK(ground.energies[0] == std::accumulate(model.omega.begin(), model.omega.end(), Rational(0)) / Rational(2));
        // Excited states only for frequencies free of resonances at the working degree.
        MultiIndex mq(dim);
        mq.set(done % dim, 1 + static_cast<unsigned>(done % 2));
        const int Ke = K - 1;
        if (!find_frequency_resonance(model.omega, required_excited_truncation(Ke + 1, mq) + 2)) {
            const auto [g2, ex] = expand_excited(model, mq, Ke);
            for (int k = 0; k <= Ke; ++k) CHECK(excited_transport_residual(g2, ex, k).is_zero());
        }
        ++done;
    }
}

TEST_CASE("excited transport residual on hand-picked incommensurate 2D and 3D models") {
    PolySeries a2(2, 4);
    a2.set(MultiIndex{2, 1}, Rational(1, 3));
    a2.set(MultiIndex{2, 2}, Rational(1, 4));
    a2.set(MultiIndex{0, 4}, Rational(1, 5));
    const auto m2 = make_model(Rational(3, 2), {Rational(1), Rational(13, 11)}, a2);
    const auto [g2, e2] = expand_excited(m2, MultiIndex{1, 1}, 3);
    for (int k = 0; k <= 3; ++k) CHECK(excited_transport_residual(g2, e2, k).is_zero());
    for (int k = 1; k <= g2.order; ++k) CHECK(transport_residual(g2, k).is_zero());

    PolySeries a3(3, 4);
    a3.set(MultiIndex{1, 1, 1}, 1);
    a3.set(MultiIndex{2, 0, 2}, Rational(1, 8));
    const auto m3 = make_model(1, {Rational(1), Rational(17, 13), Rational(19, 11)}, a3);
    const auto [g3, e3] = expand_excited(m3, MultiIndex{0, 1, 0}, 2);
    for (int k = 0; k <= 2; ++k) CHECK(excited_transport_residual(g3, e3, k).is_zero());
}

TEST_CASE("expansion report round trips through JSON") {
    const auto [ground, ex] = expand_excited(kappa_model(2, 1, 1, 1), MultiIndex{2}, 2);
    const auto rep = nlohmann::json::parse(expansion_report(ground, &ex).dump());
    CHECK(rep.at("convention") == "hbar^k/k!");
    CHECK(rep.at("gaps").get<std::vector<std::string>>() == std::vector<std::string>{"2", "9", "-297/2"});
    for (std::size_t k = 0; k < ex.corrections.size(); ++k) CHECK(series_from_json(rep.at("corrections")[k]) == ex.corrections[k]);
    const auto g = expand_ground(kappa_model(2, 1, 1, 1), 4);
    const auto rg = nlohmann::json::parse(expansion_report(g).dump());
    CHECK(rg.at("energies").get<std::vector<std::string>>() == std::vector<std::string>{"1/2", "3/4", "-21/8", "333/16"});
    CHECK(rg.at("raw_energies").get<std::vector<std::string>>() == std::vector<std::string>{"1/2", "3/4", "-21/4", "999/8"});
    CHECK(model_from_json(rg.at("model")).anharmonic == g.model().anharmonic);
}
