#pragma once

#include "semiclassical/jet.hpp"

#include <cmath>
#include <iosfwd>
#include <span>
#include <vector>

namespace semiclassical {

// V(x) = 1/2 m w^2 x^2 + g x^(2 kappa), double precision.
struct Kappa1DModel {
    double mass = 1.0;
    double omega = 1.0;
    double g = 1.0;
    int kappa = 2;

    void validate() const;
};

// Printed closed forms, generic in the scalar type (double, Jet, extended
// floats). Model parameters are promoted to T before any arithmetic so
// cancellations happen at the precision of T.
namespace formulas {

template <typename T>
T ipow(const T& x, int p) {
    T r(1.0);
    for (int i = 0; i < p; ++i) r = r * x;
    return r;
}

// u = 2 g x^(2(kappa-1)) / (m w^2)
template <typename T>
T u_of(const Kappa1DModel& md, const T& x) {
    return T(2.0) * T(md.g) * ipow(x, 2 * (md.kappa - 1)) / (T(md.mass) * T(md.omega) * T(md.omega));
}

template <typename T>
T s_of(const Kappa1DModel& md, const T& x) {
    using std::sqrt;
    return sqrt(T(1.0) + u_of(md, x));
}

// dS0/dx = sqrt(2 m V(x)) sgn(x)
template <typename T>
T s0_prime(const Kappa1DModel& md, const T& x) {
    return T(md.mass) * T(md.omega) * x * s_of(md, x);
}

// (m^2 w^3 / 6g)[(1+u)^(3/2) - 1] written as (m w x^2/3)(3 + 3u + u^2)/(s^3 + 1).
template <typename T>
T s0_kappa2(const Kappa1DModel& md, const T& x) {
    const T u = u_of(md, x);
    const T s = s_of(md, x);
    return T(md.mass) * T(md.omega) * x * x / T(3.0) * (T(3.0) + T(3.0) * u + u * u) / (s * s * s + T(1.0));
}

// (1/2) ln[s (1 + s)/2] = (1/2) ln(1 + u (s + 2) / (2 (1 + s))).
template <typename T>
T s1_kappa2(const Kappa1DModel& md, const T& x) {
    using std::log1p;
    const T u = u_of(md, x);
    const T s = s_of(md, x);
    return T(0.5) * log1p(u * (s + T(2.0)) / (T(2.0) * (T(1.0) + s)));
}

// {3 m^2 w^2 [1 - s] + 20 g m x^2 + 18 g^2 x^4 / w^2} / (6 x^2 (m w)^3 s^3), with
// 1 - s = -u/(1 + s) so the x^2 cancels analytically.
template <typename T>
T s2_kappa2(const Kappa1DModel& md, const T& x) {
    const T m(md.mass), w(md.omega), g(md.g);
    const T s = s_of(md, x);
    const T num = T(-6.0) * g * m / (T(1.0) + s) + T(20.0) * g * m + T(18.0) * g * g * x * x / (w * w);
    return num / (T(6.0) * m * m * m * w * w * w * s * s * s);
}

template <typename T>
T q_of(const Kappa1DModel& md, const T& x) {
    return T(md.mass) * T(md.omega) * s_of(md, x);
}

// [x / (1 + s)^(1/(kappa-1))]^n
template <typename T>
T phi0(const Kappa1DModel& md, int n, const T& x) {
    using std::pow;
    const T base = x / pow(T(1.0) + s_of(md, x), 1.0 / (md.kappa - 1));
    return ipow(base, n);
}

template <typename T>
T u1_printed(const Kappa1DModel& md, int n, const T& x) {
    const T m(md.mass), w(md.omega), g(md.g), N(static_cast<double>(n));
    const T Q = q_of(md, x);
    const T x2 = x * x;
    const T num = T(2.0) * m * m * w * w * w * w * N + g * m * w * w * x2 * (T(9.0) * N + T(5.0) * N * N) +
                  g * g * x2 * x2 * (T(18.0) * N + T(10.0) * N * N) - (m * w * w * w + T(6.0) * g * w * x2) * Q * (N + N * N);
    const T xq = x * Q;
    return num / (T(4.0) * m * w * w * w * xq * xq);
}

// Prefactor uses m^2 (the transport equation fixes it; see README).
template <typename T>
T u2_printed(const Kappa1DModel& md, int n, const T& x) {
    const T m(md.mass), w(md.omega), g(md.g), N(static_cast<double>(n));
    const T N2 = N * N, N3 = N2 * N;
    const T Q = q_of(md, x);
    const T x2 = x * x, x4 = x2 * x2, x6 = x4 * x2, x8 = x4 * x4;
    const T m2 = m * m, m3 = m2 * m, m4 = m2 * m2;
    const T w2 = w * w, w4 = w2 * w2, w6 = w4 * w2, w8 = w4 * w4;
    const T g2 = g * g, g3 = g2 * g, g4 = g2 * g2;
    const T first = T(3.0) * m4 * w8 * (T(11.0) + T(5.0) * N + T(4.0) * N2) +
                    T(3.0) * g * m3 * w6 * x2 * (T(35.0) + T(28.0) * N + T(32.0) * N2 + T(5.0) * N3) +
                    T(2.0) * g2 * m2 * w4 * x4 * (T(-257.0) - T(42.0) * N + T(104.0) * N2 + T(75.0) * N3) +
                    T(28.0) * g3 * m * w2 * x6 * (T(-59.0) - T(24.0) * N + T(8.0) * N2 + T(15.0) * N3) +
                    T(24.0) * g4 * x8 * (T(-59.0) - T(24.0) * N + T(8.0) * N2 + T(15.0) * N3);
    const T second = T(3.0) * m4 * w8 * (T(16.0) + T(21.0) * N + T(2.0) * N2 + N3) +
                     T(6.0) * g * m3 * w6 * x2 * (T(12.0) + T(37.0) * N + T(24.0) * N2 + T(7.0) * N3) +
                     g2 * m2 * w4 * x4 * (T(-1211.0) - T(351.0) * N + T(380.0) * N2 + T(282.0) * N3) +
                     T(4.0) * g3 * m * w2 * x6 * (T(-1355.0) - T(837.0) * N + T(8.0) * N2 + T(156.0) * N3) +
                     T(4.0) * g4 * x8 * (T(-1355.0) - T(891.0) * N - T(100.0) * N2 + T(102.0) * N3);
    const T bracket = T(-2.0) * m * w * first + Q * second;
    const T Q2 = Q * Q;
    return N * bracket / (T(48.0) * m2 * w6 * x4 * Q2 * Q2 * Q);
}

// y = 2^(1/(kappa-1)) x / (1 + s)^(1/(kappa-1))
template <typename T>
T sternberg(const Kappa1DModel& md, const T& x) {
    using std::pow;
    const double e = 1.0 / (md.kappa - 1);
    return T(std::pow(2.0, e)) * x / pow(T(1.0) + s_of(md, x), e);
}

// x = y / (1 - g y^(2(kappa-1)) / (2 m w^2))^(1/(kappa-1))
template <typename T>
T sternberg_inverse(const Kappa1DModel& md, const T& y) {
    using std::pow;
    const T d = T(1.0) - T(md.g) * ipow(y, 2 * (md.kappa - 1)) / (T(2.0) * T(md.mass) * T(md.omega) * T(md.omega));
    return y / pow(d, 1.0 / (md.kappa - 1));
}

}  // namespace formulas

// Below |x| < kNearOrigin the u-functions switch to their Laurent data.
inline constexpr double kNearOrigin = 1e-4;

double s0_closed(const Kappa1DModel& model, double x);
double s0_prime_closed(const Kappa1DModel& model, double x);
double s1_closed(const Kappa1DModel& model, double x);
double s2_closed(const Kappa1DModel& model, double x);
double q_closed(const Kappa1DModel& model, double x);
double phi0_closed(const Kappa1DModel& model, int n, double x);
double u1_closed(const Kappa1DModel& model, int n, double x);
double u2_closed(const Kappa1DModel& model, int n, double x);
// u_k phi_0, finite at the origin.
double phi1_closed(const Kappa1DModel& model, int n, double x);
double phi2_closed(const Kappa1DModel& model, int n, double x);

// Closed-form excited gaps dE_(1), dE_(2) (hbar^k/k! convention) for kappa = 2.
double gap1_closed(const Kappa1DModel& model, int n);
double gap2_closed(const Kappa1DModel& model, int n);

double sternberg_1d(const Kappa1DModel& model, double x);
double sternberg_1d_inverse(const Kappa1DModel& model, double y);
double sternberg_domain_radius(const Kappa1DModel& model);

// Unnormalized psi = (phi0 + hbar phi1 + hbar^2/2 phi2) exp(-S0/hbar - S1 - hbar S2/2),
// truncated at `order` (0, 1, 2). n = 0 is the ground state.
double evaluate_wavefunction(const Kappa1DModel& model, double hbar, int n, int order, double x);
// log|psi|, usable where psi itself underflows.
double log_abs_wavefunction(const Kappa1DModel& model, double hbar, int n, int order, double x);

struct WavefunctionFactors {
    std::vector<double> x;
    std::vector<double> s0, s1, s2, q, phi0, u1, u2, psi;
    double hbar = 1.0;
    int n = 0;
};

// S1, S2, u1, u2 are filled only for kappa = 2 (NaN otherwise).
WavefunctionFactors wavefunction_factors(const Kappa1DModel& model, double hbar, int n, int order, std::span<const double> xs);

// CSV with header x,S0,S1,S2,psi.
void write_scan_csv(std::ostream& os, const WavefunctionFactors& f);

}  // namespace semiclassical
