#include "semiclassical/hj_formal.hpp"

#include "semiclassical/errors.hpp"

namespace semiclassical {

namespace {

Rational weight(const MultiIndex& k, const std::vector<Rational>& omega) {
    Rational w;
    for (std::size_t i = 0; i < k.size(); ++i)
        if (k[i] != 0) w += omega[i] * Rational(static_cast<long>(k[i]));
    return w;
}

PolySeries quadratic_action(const OscillatorModel& model, int truncation) {
    PolySeries q(model.dim(), truncation);
    for (std::size_t i = 0; i < model.dim(); ++i) {
        MultiIndex k(model.dim());
        k.set(i, 2);
        q.add_term(k, model.mass * model.omega[i] / Rational(2));
    }
    return q;
}

}  // namespace

FormalAction solve_hj_formal(const OscillatorModel& model, int truncation) {
    if (truncation < 2) throw BadTruncation("truncation must be at least 2", {{"truncation", truncation}});
    model.validate();
    const std::size_t n = model.dim();
    const Rational half_inv_mass = Rational(1) / (Rational(2) * model.mass);

    // grads[d] holds grad s_d for the homogeneous pieces found so far.
    std::vector<std::vector<PolySeries>> grads(static_cast<std::size_t>(truncation) + 1);
    PolySeries s0 = quadratic_action(model, truncation);

    for (int d = 3; d <= truncation; ++d) {
        PolySeries rhs(n, d);
        const auto [lo, hi] = model.anharmonic.degree_range(static_cast<unsigned>(d));
        for (auto it = lo; it != hi; ++it) rhs.add_term(it->first, it->second);

        for (int a = 3; 2 * a <= d + 2; ++a) {
            const int b = d + 2 - a;
            if (b > d - 1) continue;
            PolySeries cross = dot(grads[a], grads[b], d);
            rhs = subtract(rhs, cross.scaled(half_inv_mass * Rational(a == b ? 1 : 2)));
        }

        PolySeries sd(n, truncation);
        for (const auto& [k, c] : rhs.terms()) {
            if (static_cast<int>(k.degree()) != d) continue;
            const Rational w = weight(k, model.omega);
            if (w.sign() <= 0)
                throw ResonantDivisor("non-positive homological divisor in the Hamilton-Jacobi recursion",
                                      {{"monomial", k.exponents()}});
            sd.add_term(k, c / w);
        }
        grads[d] = gradient(sd);
        for (const auto& [k, c] : sd.terms()) s0.add_term(k, c);
    }

    FormalAction action{model, std::move(s0), false};
    action.residual_zero = hj_residual(action).is_zero();
    return action;
}

PolySeries hj_residual(const FormalAction& action) {
    const int d = action.truncation();
    const auto g = gradient(action.s0);
    // grad S0 has no constant term, so the square is exact through degree d.
    PolySeries sq = dot(g, g, d);
    return subtract(sq.scaled(Rational(1) / (Rational(2) * action.model.mass)), action.model.potential(d));
}

std::vector<PolySeries> nonlinear_flow_field(const FormalAction& action) {
    const auto& model = action.model;
    PolySeries rest = subtract(action.s0, quadratic_action(model, action.truncation()));
    std::vector<PolySeries> r = gradient(rest);
    for (auto& ri : r) ri = ri.scaled(Rational(1) / model.mass);
    return r;
}

SternbergMap sternberg_linearize(const FormalAction& action, int truncation) {
    if (truncation < 1) throw BadTruncation("Sternberg truncation must be at least 1", {{"truncation", truncation}});
    if (action.truncation() < truncation + 1)
        throw TruncationTooSmall("Sternberg map through degree " + std::to_string(truncation) +
                                     " needs the action through degree " + std::to_string(truncation + 1),
                                 {{"required", truncation + 1}, {"available", action.truncation()}});
    const auto& model = action.model;
    const std::size_t n = model.dim();
    const auto r = nonlinear_flow_field(action);

    SternbergMap map{model, {}, truncation};
    for (std::size_t i = 0; i < n; ++i) {
        PolySeries h(n, truncation);
        for (int d = 2; d <= truncation; ++d) {
            // Degree-d part of -r_i - r . grad h, with h known below degree d.
            PolySeries rhs = homogeneous_component(r[i].retruncated(d), d).scaled(Rational(-1));
            const auto gh = gradient(h);
            PolySeries adv = dot(r, gh, d);
            const auto [lo, hi] = adv.degree_range(static_cast<unsigned>(d));
            for (auto it = lo; it != hi; ++it) rhs.add_term(it->first, -it->second);

            for (const auto& [k, c] : rhs.terms()) {
                const Rational w = weight(k, model.omega) - model.omega[i];
                if (w.is_zero())
                    throw ResonantDivisor("resonant divisor in Sternberg linearization",
                                          {{"monomial", k.exponents()}, {"axis", i}});
                h.add_term(k, c / w);
            }
        }
        h.add_term(MultiIndex::unit(n, i), Rational(1));
        map.mu.push_back(std::move(h));
    }
    return map;
}

std::vector<PolySeries> sternberg_pushforward_residual(const SternbergMap& map, const FormalAction& action) {
    const int d = map.truncation;
    const auto grad_s0 = gradient(action.s0);
    std::vector<PolySeries> out;
    for (std::size_t i = 0; i < map.mu.size(); ++i) {
        PolySeries lhs = dot(gradient(map.mu[i]), grad_s0, d).scaled(Rational(1) / action.model.mass);
        out.push_back(subtract(lhs, map.mu[i].scaled(map.model.omega[i]).retruncated(d)));
    }
    return out;
}

void require_nondegenerate(const OscillatorModel& model, int max_l1) {
    if (model.dim() < 2) return;
    if (auto l = find_frequency_resonance(model.omega, max_l1))
        throw DegenerateEigenvalue("frequencies satisfy an integer resonance", {{"resonance", *l}});
}

}  // namespace semiclassical
