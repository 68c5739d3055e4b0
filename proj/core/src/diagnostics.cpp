#include "semiclassical/diagnostics.hpp"

#include "semiclassical/errors.hpp"
#include "semiclassical/hj_formal.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <map>

namespace semiclassical {

namespace {

using Real = boost::multiprecision::cpp_bin_float_100;
using Jet = std::vector<Real>;

Real to_real(const Rational& r) { return Real(r.numerator().get_str()) / Real(r.denominator().get_str()); }

Jet mul(const Jet& a, const Jet& b, std::size_t n) {
    Jet r(n, Real(0));
    for (std::size_t i = 0; i < std::min(n, a.size()); ++i)
        for (std::size_t j = 0; i + j < n && j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Jet div(const Jet& a, const Jet& b, std::size_t n) {
    Jet r(n, Real(0));
    for (std::size_t k = 0; k < n; ++k) {
        Real s = k < a.size() ? a[k] : Real(0);
        for (std::size_t j = 1; j <= k && j < b.size(); ++j) s -= b[j] * r[k - j];
        r[k] = s / b[0];
    }
    return r;
}

Jet sqrt_jet(const Jet& a) {
    Jet r(a.size(), Real(0));
    r[0] = sqrt(a[0]);
    for (std::size_t k = 1; k < a.size(); ++k) {
        Real s = a[k];
        for (std::size_t j = 1; j < k; ++j) s -= r[j] * r[k - j];
        r[k] = s / (2 * r[0]);
    }
    return r;
}

Jet derivative(const Jet& a) {
    Jet r(a.size() > 1 ? a.size() - 1 : 1, Real(0));
    for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<int>(i);
    return r;
}

void require_supported(const OscillatorModel& model) {
    model.validate();
    if (model.dim() != 1) throw InvalidModel("correction profiles need a one-dimensional model", {{"dim", model.dim()}});
    if (model.anharmonic.is_zero()) throw InvalidModel("correction profiles need an anharmonic term (all S_(l>=1) vanish otherwise)");
    for (const auto& [k, c] : model.anharmonic.terms())
        if (k[0] % 2 != 0 || c.sign() < 0)
            throw InvalidModel("correction profiles need an even potential with non-negative anharmonic coefficients",
                               {{"degree", k[0]}, {"coefficient", c.str()}});
}

}  // namespace

struct CorrectionProfiles::Impl {
    int order = 0;
    Real mass;
    std::vector<Real> potential;  // V coefficients by degree
    std::vector<Real> energies_r;
    std::vector<Rational> energies;
    GroundExpansion expansion;
    // taylor[k][d]: coefficient of x^d in S_(k)', exact degrees only.
    std::vector<std::vector<double>> taylor;
    double radius = 0.0;

    std::vector<double> by_taylor(double x) const {
        std::vector<double> out;
        for (const auto& c : taylor) {
            double s = 0.0;
            for (std::size_t d = c.size(); d-- > 0;) s = s * x + c[d];
            out.push_back(s);
        }
        return out;
    }

    std::vector<double> by_recursion(double x) const {
        const std::size_t n = static_cast<std::size_t>(order) + 2;
        // V(x + t) by Horner on jets.
        Jet v(n, Real(0)), shift(n, Real(0));
        shift[0] = Real(x);
        if (n > 1) shift[1] = Real(1);
        for (std::size_t p = potential.size(); p-- > 0;) {
            v = mul(v, shift, n);
            v[0] += potential[p];
        }
        for (auto& c : v) c *= 2 * mass;
        std::vector<Jet> P{sqrt_jet(v)};
        for (int k = 1; k <= order; ++k) {
            const std::size_t size = n - static_cast<std::size_t>(k);
            Jet num = derivative(P[static_cast<std::size_t>(k - 1)]);
            num.resize(size, Real(0));
            for (auto& c : num) c *= Real(k) / 2;
            for (int j = 1; j < k; ++j) {
                const Jet prod = mul(P[static_cast<std::size_t>(j)], P[static_cast<std::size_t>(k - j)], size);
                const Real b = to_real(binomial(static_cast<unsigned>(k), static_cast<unsigned>(j))) / 2;
                for (std::size_t i = 0; i < size; ++i) num[i] -= b * prod[i];
            }
            num[0] -= Real(k) * mass * energies_r[static_cast<std::size_t>(k - 1)];
            P.push_back(div(num, P[0], size));
        }
        std::vector<double> out;
        for (const auto& p : P) out.push_back(static_cast<double>(p[0]));
        return out;
    }
};

CorrectionProfiles::CorrectionProfiles(const OscillatorModel& model, int max_order) : impl_(std::make_unique<Impl>()) {
    require_supported(model);
    if (max_order < 2 || max_order > 30) throw IndexOutOfRange("correction profiles support orders 2..30", {{"order", max_order}});
    auto& m = *impl_;
    m.order = max_order;
    m.mass = to_real(model.mass);
    const PolySeries v = model.potential(model.anharmonic.truncation());
    for (const auto& [k, c] : v.terms()) {
        if (m.potential.size() <= k[0]) m.potential.resize(k[0] + 1, Real(0));
        m.potential[k[0]] = to_real(c);
    }

    // 80 exact degrees beyond the highest correction keep the Taylor branch at
    // |x| <= R/5 accurate well below double precision.
    const int D = required_ground_truncation(max_order + 1) + 80;
    m.expansion = ground_expansion(solve_hj_formal(model, D), max_order + 1);
    m.energies.assign(m.expansion.energies.begin(), m.expansion.energies.begin() + max_order + 1);
    for (const auto& e : m.energies) m.energies_r.push_back(to_real(e));
    for (int k = 0; k <= max_order; ++k) {
        const int exact = D - 2 * k;
        std::vector<double> c(static_cast<std::size_t>(exact), 0.0);
        for (const auto& [idx, coef] : m.expansion.corrections[static_cast<std::size_t>(k)].terms()) {
            const int d = static_cast<int>(idx[0]);
            if (d >= 1 && d <= exact) c[static_cast<std::size_t>(d - 1)] = (coef * Rational(d)).to_double();
        }
        m.taylor.push_back(std::move(c));
    }

    // Radius of convergence from the two highest exact coefficients of S_(0).
    const auto& s0 = m.expansion.corrections[0];
    std::vector<std::pair<int, Rational>> tail;
    for (const auto& [idx, coef] : s0.terms())
        if (!coef.is_zero()) tail.emplace_back(static_cast<int>(idx[0]), coef);
    const auto& [da, ca] = tail[tail.size() - 2];
    const auto& [db, cb] = tail.back();
    m.radius = std::pow(std::abs((ca / cb).to_double()), 1.0 / (db - da));
}

CorrectionProfiles::~CorrectionProfiles() = default;
CorrectionProfiles::CorrectionProfiles(CorrectionProfiles&&) noexcept = default;
CorrectionProfiles& CorrectionProfiles::operator=(CorrectionProfiles&&) noexcept = default;

int CorrectionProfiles::max_order() const { return impl_->order; }
double CorrectionProfiles::switch_radius() const { return 0.2 * impl_->radius; }
const std::vector<Rational>& CorrectionProfiles::energies() const { return impl_->energies; }
const GroundExpansion& CorrectionProfiles::expansion() const { return impl_->expansion; }

std::vector<double> CorrectionProfiles::derivatives(double x) const {
    const double ax = std::abs(x);
    auto d = ax < switch_radius() ? impl_->by_taylor(ax) : impl_->by_recursion(ax);
    // Every S_(k) is even, so every S_(k)' is odd.
    if (x < 0)
        for (auto& v : d) v = -v;
    return d;
}

std::vector<double> CorrectionProfiles::derivatives_by_recursion(double x) const {
    if (std::abs(x) < 0.25 * switch_radius())
        throw DomainExceeded("the recursion loses all precision this close to the origin", {{"x", x}});
    return impl_->by_recursion(x);
}

CorrectionDiagnosticsReport correction_diagnostics(const OscillatorModel& model, int max_order) {
    const CorrectionProfiles profiles(model, max_order);
    const double r0 = profiles.switch_radius();
    std::map<double, std::vector<double>> cache;
    auto at = [&](double x) -> const std::vector<double>& {
        auto it = cache.find(x);
        if (it == cache.end()) it = cache.emplace(x, profiles.derivatives(x)).first;
        return it->second;
    };

    CorrectionDiagnosticsReport report;
    report.switch_radius = r0;
    boost::math::quadrature::exp_sinh<double> tail;
    const auto& series = profiles.expansion().corrections;
    for (int l = 2; l <= max_order; ++l) {
        const auto li = static_cast<std::size_t>(l);
        // S(0) = -[S(r0) - S(0)] - int_{r0}^inf S'(x) dx.
        double near = 0.0;
        for (const auto& [idx, coef] : series[li].terms())
            if (idx[0] >= 1) near += coef.to_double() * std::pow(r0, static_cast<double>(idx[0]));
        const double far = tail.integrate([&](double x) { return at(x)[li]; }, r0, std::numeric_limits<double>::infinity(), 1e-13);
        CorrectionDiagnostic d;
        d.order = l;
        d.value_at_origin = -near - far;
        d.energy = profiles.energies()[li].to_double();
        if (!profiles.energies()[li].is_zero()) d.ratio = -d.value_at_origin / d.energy;
        report.orders.push_back(d);
    }

    for (int i = 1; i <= 64; ++i) at(r0 * i / 64.0);
    report.samples = static_cast<long>(cache.size());
    for (auto& d : report.orders) {
        int sign = 0;
        d.monotone = true;
        for (const auto& [x, v] : cache) {
            const double s = v[static_cast<std::size_t>(d.order)];
            if (s == 0.0 || !std::isfinite(s)) continue;
            const int sg = s > 0 ? 1 : -1;
            if (sign == 0) sign = sg;
            else if (sg != sign) d.monotone = false;
        }
    }
    report.ratios_decreasing = true;
    report.values_alternate = true;
    std::optional<double> last;
    for (const auto& d : report.orders) {
        if (!d.ratio) continue;
        if (last && !(*d.ratio < *last)) report.ratios_decreasing = false;
        last = d.ratio;
    }
    for (std::size_t i = 1; i < report.orders.size(); ++i) {
        report.values_alternate =
            report.values_alternate && (report.orders[i].value_at_origin > 0) != (report.orders[i - 1].value_at_origin > 0);
    }
    return report;
}

nlohmann::json correction_diagnostics_to_json(const CorrectionDiagnosticsReport& report) {
    nlohmann::json orders = nlohmann::json::array();
    for (const auto& d : report.orders)
        orders.push_back({{"order", d.order},
                          {"value_at_origin", d.value_at_origin},
                          {"energy", d.energy},
                          {"ratio", d.ratio ? nlohmann::json(*d.ratio) : nlohmann::json(nullptr)},
                          {"monotone", d.monotone}});
    return {{"orders", orders},
            {"ratios_decreasing", report.ratios_decreasing},
            {"values_alternate", report.values_alternate},
            {"switch_radius", report.switch_radius},
            {"samples", report.samples}};
}

}  // namespace semiclassical
