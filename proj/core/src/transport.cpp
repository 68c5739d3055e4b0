#include "semiclassical/transport.hpp"

#include "semiclassical/errors.hpp"

#include <algorithm>
#include <functional>

namespace semiclassical {

namespace {

Rational weight(const MultiIndex& k, const std::vector<Rational>& omega) {
    Rational w;
    for (std::size_t i = 0; i < k.size(); ++i)
        if (k[i] != 0) w += omega[i] * Rational(static_cast<long>(k[i]));
    return w;
}

void accumulate(PolySeries& into, const PolySeries& from, const Rational& scale) {
    for (const auto& [k, c] : from.terms()) into.add_term(k, c * scale);
}

// Terms of `s` of exact degree d.
template <typename F>
void for_degree(const PolySeries& s, int d, F&& f) {
    if (d < 0) return;
    const auto [lo, hi] = s.degree_range(static_cast<unsigned>(d));
    for (auto it = lo; it != hi; ++it) f(it->first, it->second);
}

using ZeroDivisorRule = std::function<Rational(const MultiIndex&, const Rational&)>;
using LateForcing = std::function<void(int, PolySeries&)>;

// Solves (L - shift) u = rhs degree by degree, where L = L0 + r.grad and
// L0 x^k = w(k) x^k. Monomials with w(k) = shift go to `on_zero`, which sees the
// right-hand-side coefficient there and returns the value to store.
// `late` may add degree-d forcing that only becomes known during the solve.
PolySeries solve_transport(const PolySeries& rhs, const std::vector<PolySeries>& r, const std::vector<Rational>& omega,
                           const Rational& shift, int min_degree, const ZeroDivisorRule& on_zero,
                           const LateForcing& late = {}) {
    const std::size_t n = rhs.dim();
    const int top = rhs.truncation();
    PolySeries u(n, top);
    PolySeries advected(n, top);
    for (int d = std::max(min_degree, 0); d <= top; ++d) {
        PolySeries local(n, d);
        for_degree(rhs, d, [&](const MultiIndex& k, const Rational& c) { local.add_term(k, c); });
        for_degree(advected, d, [&](const MultiIndex& k, const Rational& c) { local.add_term(k, -c); });
        if (late) late(d, local);
        PolySeries layer(n, top);
        for (const auto& [k, c] : local.terms()) {
            if (static_cast<int>(k.degree()) != d) continue;
            const Rational div = weight(k, omega) - shift;
            layer.add_term(k, div.is_zero() ? on_zero(k, c) : c / div);
        }
        if (layer.is_zero()) continue;
        accumulate(u, layer, Rational(1));
        if (d < top) accumulate(advected, dot(r, gradient(layer), top), Rational(1));
    }
    return u;
}

Rational no_resonance(const MultiIndex& k, const Rational&) {
    throw ResonantDivisor("zero divisor in transport recursion", {{"monomial", k.exponents()}});
}

}  // namespace

int required_ground_truncation(int order) { return 2 * order + 2; }

int required_excited_truncation(int order, const MultiIndex& quantum_numbers) {
    return 2 * order + static_cast<int>(quantum_numbers.degree()) + 2;
}

GroundExpansion ground_expansion(const FormalAction& action, int order) {
    if (order < 1) throw IndexOutOfRange("ground expansion order must be at least 1", {{"order", order}});
    const int D = action.truncation();
    const int need = required_ground_truncation(order);
    if (D < need)
        throw TruncationTooSmall("order " + std::to_string(order) + " needs truncation " + std::to_string(need),
                                 {{"required", need}, {"available", D}});
    const auto& model = action.model;
    const std::size_t n = model.dim();
    const Rational inv_2m = Rational(1) / (Rational(2) * model.mass);
    const auto r = nonlinear_flow_field(action);

    GroundExpansion g{action, order, {action.s0}, {}};
    std::vector<std::vector<PolySeries>> grads{gradient(action.s0)};

    for (int k = 1; k <= order; ++k) {
        const int Dk = D - 2 * k;
        PolySeries R = laplacian(g.corrections[k - 1]).retruncated(Dk).scaled(Rational(k) * inv_2m);
        for (int j = 1; 2 * j <= k; ++j) {
            const Rational coeff = binomial(k, j) * Rational(2 * j == k ? 1 : 2);
            accumulate(R, dot(grads[j], grads[k - j], Dk), -coeff * inv_2m);
        }
        const Rational e_prev = R.coefficient(MultiIndex(n)) / Rational(k);
        g.energies.push_back(e_prev);
        R.set(MultiIndex(n), Rational(0));

        // (1/m) grad S0 . grad S_k = R - k E_(k-1), solved from degree 1.
        PolySeries Sk = solve_transport(R, r, model.omega, Rational(0), 1, no_resonance);
        grads.push_back(gradient(Sk));
        g.corrections.push_back(std::move(Sk));
    }
    return g;
}

namespace {

[[noreturn]] void degenerate(const MultiIndex& k, const MultiIndex& m) {
    throw DegenerateEigenvalue("degenerate eigenvalue: resonant monomial in the excited-state recursion",
                               {{"monomial", k.exponents()}, {"quantum_numbers", m.exponents()}});
}

}  // namespace

ExcitedExpansion excited_expansion(const GroundExpansion& ground, const MultiIndex& quantum_numbers, int order) {
    const auto& model = ground.model();
    const std::size_t n = model.dim();
    if (quantum_numbers.size() != n)
        throw DimensionMismatch("quantum numbers have length " + std::to_string(quantum_numbers.size()) + ", model dimension is " +
                                std::to_string(n));
    if (quantum_numbers.degree() < 1) throw IndexOutOfRange("excited state needs |m| >= 1");
    if (order < 0) throw IndexOutOfRange("excited expansion order must be non-negative", {{"order", order}});
    if (ground.order < order)
        throw TruncationTooSmall("ground expansion order " + std::to_string(ground.order) + " is below the requested " +
                                     std::to_string(order),
                                 {{"required_ground_order", order}, {"available", ground.order}});
    const int D = ground.truncation();
    const int need = required_excited_truncation(order, quantum_numbers);
    if (D < need)
        throw TruncationTooSmall("excited order " + std::to_string(order) + " needs truncation " + std::to_string(need),
                                 {{"required", need}, {"available", D}});

    const Rational inv_m = Rational(1) / model.mass;
    const Rational shift = weight(quantum_numbers, model.omega);
    const auto r = nonlinear_flow_field(ground.action);
    std::vector<std::vector<PolySeries>> grad_s;
    for (const auto& s : ground.corrections) grad_s.push_back(gradient(s));

    ExcitedExpansion ex{model, quantum_numbers, order, {}, {shift}};

    // Seed: (L - dE0) phi_0 = 0 with the x^m coefficient pinned to 1.
    {
        const PolySeries zero(n, D - 2);
        auto seed_rule = [&](const MultiIndex& k, const Rational& c) {
            if (k == quantum_numbers) return Rational(1);
            if (!c.is_zero()) degenerate(k, quantum_numbers);
            return Rational(0);
        };
        auto pin = [&](int d, PolySeries& local) {
            // Make sure the seed monomial is visited even though the rhs vanishes there.
            if (d == static_cast<int>(quantum_numbers.degree()) && local.coefficient(quantum_numbers).is_zero())
                local.set(quantum_numbers, Rational(1));
        };
        ex.corrections.push_back(solve_transport(zero, r, model.omega, shift, 0, seed_rule, pin));
    }
    std::vector<std::vector<PolySeries>> grad_phi{gradient(ex.corrections[0])};
    const int mdeg = static_cast<int>(quantum_numbers.degree());

    for (int k = 1; k <= order; ++k) {
        const int Tk = D - 2 * k - 2;
        PolySeries F = laplacian(ex.corrections[k - 1]).retruncated(Tk).scaled(Rational(k) * inv_m / Rational(2));
        for (int j = 1; j <= k; ++j) {
            const Rational b = binomial(k, j);
            if (j < k) accumulate(F, ex.corrections[k - j].retruncated(Tk), b * ex.gaps[j]);
            accumulate(F, dot(grad_s[j], grad_phi[k - j], Tk), -b * inv_m);
        }
        // The unknown gap enters as gap * phi_0. phi_0 starts with x^m at degree
        // |m|, where the x^m equation has zero divisor and fixes the gap.
        Rational gap;
        auto gap_rule = [&](const MultiIndex& mono, const Rational& c) {
            if (mono == quantum_numbers) {
                gap = -c;
                return Rational(0);
            }
            if (!c.is_zero()) degenerate(mono, quantum_numbers);
            return Rational(0);
        };
        const PolySeries& phi0 = ex.corrections[0];
        auto gap_forcing = [&](int d, PolySeries& local) {
            if (d <= mdeg) return;
            for_degree(phi0, d, [&](const MultiIndex& mono, const Rational& c) { local.add_term(mono, c * gap); });
        };
        PolySeries phi = solve_transport(F, r, model.omega, shift, 0, gap_rule, gap_forcing);
        ex.gaps.push_back(gap);
        grad_phi.push_back(gradient(phi));
        ex.corrections.push_back(std::move(phi));
    }
    return ex;
}

GroundExpansion expand_ground(const OscillatorModel& model, int order) {
    return ground_expansion(solve_hj_formal(model, required_ground_truncation(order)), order);
}

std::pair<GroundExpansion, ExcitedExpansion> expand_excited(const OscillatorModel& model, const MultiIndex& quantum_numbers,
                                                            int order) {
    const int D = std::max(required_ground_truncation(order + 1), required_excited_truncation(order, quantum_numbers));
    GroundExpansion g = ground_expansion(solve_hj_formal(model, D), order + 1);
    ExcitedExpansion e = excited_expansion(g, quantum_numbers, order);
    return {std::move(g), std::move(e)};
}

PolySeries transport_residual(const GroundExpansion& ground, int k) {
    if (k < 1 || k > ground.order)
        throw IndexOutOfRange("transport equation index " + std::to_string(k) + " outside [1, " + std::to_string(ground.order) + "]",
                              {{"k", k}, {"order", ground.order}});
    const auto& model = ground.model();
    const int Dk = ground.truncation() - 2 * k;
    const Rational inv_m = Rational(1) / model.mass;
    const auto& S = ground.corrections;

    PolySeries res = dot(gradient(S[0]), gradient(S[k]), Dk).scaled(-inv_m);
    for (int j = 1; j < k; ++j)
        res = subtract(res, dot(gradient(S[j]), gradient(S[k - j]), Dk).scaled(binomial(k, j) * inv_m / Rational(2)));
    res = add(res, laplacian(S[k - 1]).retruncated(Dk).scaled(Rational(k) * inv_m / Rational(2)));
    return subtract(res, PolySeries::constant(model.dim(), Dk, Rational(k) * ground.energies[k - 1]));
}

PolySeries excited_transport_residual(const GroundExpansion& ground, const ExcitedExpansion& excited, int k) {
    if (k < 0 || k > excited.order)
        throw IndexOutOfRange("excited transport index " + std::to_string(k) + " outside [0, " + std::to_string(excited.order) + "]",
                              {{"k", k}, {"order", excited.order}});
    const Rational inv_m = Rational(1) / excited.model.mass;
    const int Tk = ground.truncation() - 2 * k - 2;
    const auto& phi = excited.corrections;
    const auto& S = ground.corrections;

    PolySeries lhs = subtract(dot(gradient(S[0]), gradient(phi[k]), Tk).scaled(inv_m),
                              phi[k].retruncated(Tk).scaled(excited.gaps[0]));
    if (k == 0) return lhs;
    PolySeries rhs = laplacian(phi[k - 1]).retruncated(Tk).scaled(Rational(k) * inv_m / Rational(2));
    for (int j = 1; j <= k; ++j) {
        const Rational b = binomial(k, j);
        rhs = add(rhs, phi[k - j].retruncated(Tk).scaled(b * excited.gaps[j]));
        rhs = subtract(rhs, dot(gradient(S[j]), gradient(phi[k - j]), Tk).scaled(b * inv_m));
    }
    return subtract(lhs, rhs);
}

std::vector<Rational> energy_series(const GroundExpansion& ground) {
    std::vector<Rational> e;
    for (std::size_t k = 0; k < ground.energies.size(); ++k) e.push_back(ground.energies[k] / factorial(static_cast<unsigned>(k)));
    return e;
}

std::vector<Rational> excited_energy_series(const GroundExpansion& ground, const ExcitedExpansion& excited) {
    const std::size_t n = std::min(ground.energies.size(), excited.gaps.size());
    std::vector<Rational> e;
    for (std::size_t k = 0; k < n; ++k)
        e.push_back((ground.energies[k] + excited.gaps[k]) / factorial(static_cast<unsigned>(k)));
    return e;
}

std::vector<Rational> coupling_coefficients(const std::vector<Rational>& hbar_series, int kappa, const Rational& mass,
                                            const Rational& omega, const Rational& g) {
    if (kappa < 2) throw UnsupportedKappa("kappa must be at least 2", {{"kappa", kappa}});
    // e_k hbar^k = omega c_j mu^j with k = (kappa - 1) j.
    const Rational unit = pow(mass, kappa) * pow(omega, kappa + 1) / g;
    std::vector<Rational> c;
    for (std::size_t k = 0, j = 0; k < hbar_series.size(); k += static_cast<std::size_t>(kappa - 1), ++j)
        c.push_back(hbar_series[k] * pow(unit, static_cast<int>(j)) / omega);
    return c;
}

std::vector<PolySeries> assemble_hbar_polynomial(const std::vector<PolySeries>& corrections) {
    std::vector<PolySeries> out;
    for (std::size_t l = 0; l < corrections.size(); ++l)
        out.push_back(corrections[l].scaled(Rational(1) / factorial(static_cast<unsigned>(l))));
    return out;
}

nlohmann::json expansion_report(const GroundExpansion& ground, const ExcitedExpansion* excited) {
    auto strings = [](const std::vector<Rational>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : v) a.push_back(x.str());
        return a;
    };
    nlohmann::json j;
    j["model"] = model_to_json(ground.model());
    j["truncation"] = ground.truncation();
    j["convention"] = "hbar^k/k!";
    if (excited == nullptr) {
        j["order"] = ground.order;
        j["energies"] = strings(energy_series(ground));
        j["raw_energies"] = strings(ground.energies);
        j["gaps"] = nullptr;
        nlohmann::json corr = nlohmann::json::array();
        for (const auto& s : ground.corrections) corr.push_back(series_to_json(s));
        j["corrections"] = corr;
    } else {
        j["order"] = excited->order;
        j["quantum_numbers"] = excited->quantum_numbers.exponents();
        j["energies"] = strings(excited_energy_series(ground, *excited));
        j["ground_energies"] = strings(energy_series(ground));
        j["gaps"] = strings(excited->gaps);
        nlohmann::json corr = nlohmann::json::array();
        for (const auto& s : excited->corrections) corr.push_back(series_to_json(s));
        j["corrections"] = corr;
    }
    return j;
}

}  // namespace semiclassical
