#include "semiclassical/closed_form.hpp"

#include "semiclassical/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <ostream>

namespace semiclassical {

namespace {

// The printed u-formulas cancel like eps/x^4 near the origin for small n, so
// they are evaluated with a 113-bit mantissa.
using Quad = boost::multiprecision::cpp_bin_float_quad;

void require_kappa2(const Kappa1DModel& model, const char* what) {
    if (model.kappa != 2)
        throw UnsupportedKappa(std::string(what) + " has a closed form only for kappa = 2", {{"kappa", model.kappa}});
}

void require_level(int n) {
    if (n < 1) throw IndexOutOfRange("excitation level must be at least 1", {{"n", n}});
}

// sum_j c_j x^(p_j), skipping zero coefficients so x = 0 stays finite.
double power_sum(std::initializer_list<std::pair<double, int>> terms, double x) {
    double s = 0.0;
    for (const auto& [c, p] : terms)
        if (c != 0.0) s += c * std::pow(x, p);
    return s;
}

// Laurent data of u1 and u2, multiplied by x^shift.
double u1_laurent(const Kappa1DModel& md, int n, double x, int shift) {
    const double m = md.mass, w = md.omega, g = md.g, N = n;
    return power_sum({{-N * (N - 1) / (4 * m * w), shift - 2},
                      {(25 * N + 9 * N * N) * g * g / (8 * std::pow(m, 3) * std::pow(w, 5)), shift + 2},
                      {(-45 * N - 13 * N * N) * std::pow(g, 3) / (8 * std::pow(m, 4) * std::pow(w, 7)), shift + 4}},
                     x);
}

double u2_laurent(const Kappa1DModel& md, int n, double x, int shift) {
    const double m = md.mass, w = md.omega, g = md.g, N = n;
    return power_sum(
        {{(N - 3) * (N - 2) * (N - 1) * N / (16 * m * m * w * w), shift - 4},
         {g * N * N * (N - 1) / (std::pow(m, 3) * std::pow(w, 4)), shift - 2},
         {std::pow(g, 3) * N * (-1098 - 719 * N - 140 * N * N + 13 * N * N * N) / (16 * std::pow(m, 5) * std::pow(w, 8)), shift + 2},
         {std::pow(g, 4) * N * (12083 + 7217 * N + 1460 * N * N - 4 * N * N * N) / (64 * std::pow(m, 6) * std::pow(w, 10)),
          shift + 4}},
        x);
}

}  // namespace

void Kappa1DModel::validate() const {
    if (!(mass > 0.0) || !(omega > 0.0)) throw InvalidModel("mass and frequency must be positive");
    if (!(g >= 0.0)) throw InvalidModel("coupling must be non-negative", {{"g", g}});
    if (kappa < 2 || kappa > 5) throw UnsupportedKappa("kappa must be in 2..5", {{"kappa", kappa}});
}

double s0_closed(const Kappa1DModel& model, double x) {
    model.validate();
    if (model.kappa == 2) return formulas::s0_kappa2(model, x);
    auto f = [&](double t) { return formulas::s0_prime(model, t); };
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, ax, 20, 1e-13);
}

double s0_prime_closed(const Kappa1DModel& model, double x) {
    model.validate();
    return formulas::s0_prime(model, x);
}

double s1_closed(const Kappa1DModel& model, double x) {
    model.validate();
    require_kappa2(model, "S1");
    return formulas::s1_kappa2(model, x);
}

double s2_closed(const Kappa1DModel& model, double x) {
    model.validate();
    require_kappa2(model, "S2");
    return formulas::s2_kappa2(model, x);
}

double q_closed(const Kappa1DModel& model, double x) {
    model.validate();
    return formulas::q_of(model, x);
}

double phi0_closed(const Kappa1DModel& model, int n, double x) {
    model.validate();
    require_level(n);
    return formulas::phi0(model, n, x);
}

double u1_closed(const Kappa1DModel& model, int n, double x) {
    model.validate();
    require_kappa2(model, "u1");
    require_level(n);
    if (std::abs(x) < kNearOrigin) return u1_laurent(model, n, x, 0);
    return static_cast<double>(formulas::u1_printed(model, n, Quad(x)));
}

double u2_closed(const Kappa1DModel& model, int n, double x) {
    model.validate();
    require_kappa2(model, "u2");
    require_level(n);
    if (std::abs(x) < kNearOrigin) return u2_laurent(model, n, x, 0);
    return static_cast<double>(formulas::u2_printed(model, n, Quad(x)));
}

double phi1_closed(const Kappa1DModel& model, int n, double x) {
    model.validate();
    require_kappa2(model, "phi1");
    require_level(n);
    if (std::abs(x) < kNearOrigin)
        return u1_laurent(model, n, x, n) * std::pow(1.0 + formulas::s_of(model, x), -n);
    return u1_closed(model, n, x) * formulas::phi0(model, n, x);
}

double phi2_closed(const Kappa1DModel& model, int n, double x) {
    model.validate();
    require_kappa2(model, "phi2");
    require_level(n);
    if (std::abs(x) < kNearOrigin)
        return u2_laurent(model, n, x, n) * std::pow(1.0 + formulas::s_of(model, x), -n);
    return u2_closed(model, n, x) * formulas::phi0(model, n, x);
}

double gap1_closed(const Kappa1DModel& model, int n) {
    require_kappa2(model, "dE1");
    const double m = model.mass, w = model.omega;
    return 1.5 * model.g * n * (n + 1.0) / (m * m * w * w);
}

double gap2_closed(const Kappa1DModel& model, int n) {
    require_kappa2(model, "dE2");
    const double m = model.mass, w = model.omega, N = n;
    return -model.g * model.g / (4 * std::pow(m, 4) * std::pow(w, 5)) * (59 * N + 51 * N * N + 34 * N * N * N);
}

double sternberg_1d(const Kappa1DModel& model, double x) {
    model.validate();
    return formulas::sternberg(model, x);
}

double sternberg_domain_radius(const Kappa1DModel& model) {
    model.validate();
    if (model.g == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(2.0 * model.mass * model.omega * model.omega / model.g, 1.0 / (2.0 * (model.kappa - 1)));
}

double sternberg_1d_inverse(const Kappa1DModel& model, double y) {
    const double r = sternberg_domain_radius(model);
    if (!(std::abs(y) < r)) throw DomainExceeded("Sternberg inverse is defined only for |y| < " + std::to_string(r), {{"y", y}, {"radius", r}});
    return formulas::sternberg_inverse(model, y);
}

namespace {

struct Pieces {
    double prefactor;
    double exponent;
};

Pieces wavefunction_pieces(const Kappa1DModel& model, double hbar, int n, int order, double x) {
    model.validate();
    if (order < 0 || order > 2) throw UnsupportedOrder("wavefunction order must be 0, 1 or 2", {{"order", order}});
    if (order >= 1) require_kappa2(model, "wavefunction corrections");
    if (n < 0) throw IndexOutOfRange("excitation level must be non-negative", {{"n", n}});
    if (!(hbar > 0.0)) throw DomainExceeded("hbar must be positive", {{"hbar", hbar}});

    double exponent = -s0_closed(model, x) / hbar;
    if (order >= 1) exponent -= s1_closed(model, x);
    if (order >= 2) exponent -= 0.5 * hbar * s2_closed(model, x);

    double prefactor = 1.0;
    if (n >= 1) {
        prefactor = phi0_closed(model, n, x);
        if (order >= 1) prefactor += hbar * phi1_closed(model, n, x);
        if (order >= 2) prefactor += 0.5 * hbar * hbar * phi2_closed(model, n, x);
    }
    return {prefactor, exponent};
}

}  // namespace

double evaluate_wavefunction(const Kappa1DModel& model, double hbar, int n, int order, double x) {
    const Pieces p = wavefunction_pieces(model, hbar, n, order, x);
    return p.prefactor * std::exp(p.exponent);
}

double log_abs_wavefunction(const Kappa1DModel& model, double hbar, int n, int order, double x) {
    const Pieces p = wavefunction_pieces(model, hbar, n, order, x);
    return std::log(std::abs(p.prefactor)) + p.exponent;
}

WavefunctionFactors wavefunction_factors(const Kappa1DModel& model, double hbar, int n, int order, std::span<const double> xs) {
    model.validate();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool k2 = model.kappa == 2;
    WavefunctionFactors f;
    f.hbar = hbar;
    f.n = n;
    for (double x : xs) {
        f.x.push_back(x);
        f.s0.push_back(s0_closed(model, x));
        f.s1.push_back(k2 ? s1_closed(model, x) : nan);
        f.s2.push_back(k2 ? s2_closed(model, x) : nan);
        f.q.push_back(q_closed(model, x));
        f.phi0.push_back(n >= 1 ? phi0_closed(model, n, x) : 1.0);
        f.u1.push_back(k2 && n >= 1 ? u1_closed(model, n, x) : nan);
        f.u2.push_back(k2 && n >= 1 ? u2_closed(model, n, x) : nan);
        f.psi.push_back(evaluate_wavefunction(model, hbar, n, order, x));
    }
    return f;
}

void write_scan_csv(std::ostream& os, const WavefunctionFactors& f) {
    const auto old = os.precision(17);
    os << "x,S0,S1,S2,psi\n";
    for (std::size_t i = 0; i < f.x.size(); ++i)
        os << f.x[i] << ',' << f.s0[i] << ',' << f.s1[i] << ',' << f.s2[i] << ',' << f.psi[i] << '\n';
    os.precision(old);
}

}  // namespace semiclassical
