#include "semiclassical/rs_oracle.hpp"

#include "semiclassical/errors.hpp"

#include <algorithm>

namespace semiclassical {

namespace {

using Coeffs = std::vector<Rational>;

// x h_k = h_{k+1} + (k/2) h_{k-1} for monic Hermite polynomials.
Coeffs times_x(const Coeffs& p) {
    Coeffs out(p.size() + 1);
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].is_zero()) continue;
        out[k + 1] += p[k];
        if (k > 0) out[k - 1] += p[k] * Rational(static_cast<long>(k), 2);
    }
    return out;
}

Coeffs times_power(Coeffs p, int power) {
    for (int i = 0; i < power; ++i) p = times_x(p);
    return p;
}

}  // namespace

RSExpansion rs_expand(int kappa, int n, int order, bool allow_beyond_limits) {
    if (kappa < 2) throw UnsupportedKappa("kappa must be at least 2", {{"kappa", kappa}});
    if (n < 0 || order < 0) throw IndexOutOfRange("level and order must be non-negative");
    if (!allow_beyond_limits && (order > kMaxRSOrder || n > kMaxRSLevel))
        throw OrderTooHigh("Rayleigh-Schroedinger oracle is limited to order " + std::to_string(kMaxRSOrder) + " and level " +
                               std::to_string(kMaxRSLevel),
                           {{"order", order}, {"n", n}});

    // (L - n) P_j = -x^{2 kappa} P_{j-1} + sum_{i=1}^{j} eps_i P_{j-i}, L h_k = k h_k,
    // with the h_n coefficient of P_j (j >= 1) fixed to zero.
    std::vector<Coeffs> P;
    P.emplace_back(static_cast<std::size_t>(n) + 1);
    P[0][static_cast<std::size_t>(n)] = Rational(1);
    RSExpansion rs{kappa, n, order, {Rational(2 * n + 1, 2)}};
    std::vector<Rational> eps{Rational(0)};

    for (int j = 1; j <= order; ++j) {
        Coeffs rhs = times_power(P[static_cast<std::size_t>(j - 1)], 2 * kappa);
        for (auto& c : rhs) c = -c;
        for (int i = 1; i < j; ++i) {
            const Coeffs& q = P[static_cast<std::size_t>(j - i)];
            if (rhs.size() < q.size()) rhs.resize(q.size());
            for (std::size_t k = 0; k < q.size(); ++k) rhs[k] += eps[static_cast<std::size_t>(i)] * q[k];
        }
        // eps_j * h_n must cancel the h_n component.
        const Rational e = -rhs[static_cast<std::size_t>(n)];
        eps.push_back(e);
        rs.coefficients.push_back(e);

        Coeffs pj(rhs.size());
        for (std::size_t k = 0; k < rhs.size(); ++k) {
            if (static_cast<int>(k) == n || rhs[k].is_zero()) continue;
            pj[k] = rhs[k] / Rational(static_cast<long>(k) - n);
        }
        P.push_back(std::move(pj));
    }
    return rs;
}

ComparisonReport compare_with_transport(const RSExpansion& rs, const std::vector<Rational>& transport_coefficients) {
    ComparisonReport report;
    report.rs = rs.coefficients;
    report.transport = transport_coefficients;
    const std::size_t n = std::min(rs.coefficients.size(), transport_coefficients.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (rs.coefficients[k] != transport_coefficients[k]) {
            report.agree = false;
            report.first_disagreement = static_cast<int>(k);
            break;
        }
        report.agreed_through = static_cast<int>(k);
    }
    if (n == 0) report.agree = false;
    return report;
}

std::optional<KappaParameters> kappa_parameters(const OscillatorModel& model) {
    if (model.dim() != 1 || model.anharmonic.size() != 1) return std::nullopt;
    const auto& [k, g] = *model.anharmonic.terms().begin();
    if (k[0] % 2 != 0 || k[0] < 4 || g.sign() <= 0) return std::nullopt;
    return KappaParameters{static_cast<int>(k[0] / 2), model.mass, model.omega[0], g};
}

std::vector<Rational> transport_coupling_series(const OscillatorModel& model, int n, int order) {
    const auto p = kappa_parameters(model);
    if (!p) throw UnsupportedKappa("model is not of the form 1/2 m w^2 x^2 + g x^(2 kappa) with g > 0");
    const int hbar_order = order * (p->kappa - 1);
    std::vector<Rational> e;
    if (n == 0) {
        e = energy_series(expand_ground(model, hbar_order + 1));
    } else {
        const auto [g, ex] = expand_excited(model, MultiIndex{static_cast<unsigned>(n)}, hbar_order);
        e = excited_energy_series(g, ex);
    }
    e.resize(static_cast<std::size_t>(hbar_order) + 1);
    return coupling_coefficients(e, p->kappa, p->mass, p->omega, p->g);
}

nlohmann::json rs_to_json(const RSExpansion& rs) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& x : rs.coefficients) c.push_back(x.str());
    return {{"kappa", rs.kappa}, {"n", rs.n}, {"order", rs.order}, {"coefficients", c}, {"variable", "mu"}};
}

nlohmann::json comparison_to_json(const ComparisonReport& report) {
    auto strings = [](const std::vector<Rational>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : v) a.push_back(x.str());
        return a;
    };
    nlohmann::json j{{"agree", report.agree},
                     {"agreed_through", report.agreed_through},
                     {"rs", strings(report.rs)},
                     {"transport", strings(report.transport)}};
    j["first_disagreement"] = report.first_disagreement ? nlohmann::json(*report.first_disagreement) : nlohmann::json(nullptr);
    return j;
}

}  // namespace semiclassical
