#pragma once

#include "semiclassical/rational.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace semiclassical {

// Exact [p/q] Pade approximant P/Q with Q(0) = 1.
struct PadeApproximant {
    std::vector<Rational> numerator;
    std::vector<Rational> denominator;

    double evaluate(double t) const;
};

PadeApproximant pade(const std::vector<Rational>& series, int p, int q);

// Borel transform b_k = c_k / k!.
std::vector<Rational> borel_transform(const std::vector<Rational>& coefficients);

// Laplace integral is cut off where exp(-t) < 1e-18.
inline constexpr double kLaplaceCutoff = 41.446531673892822;  // 18 ln 10

// Integral_0^inf exp(-t) [p/q](mu t) dt of the Borel transform.
// Throws PoleOnRay for a denominator root on the positive axis inside the cutoff.
double borel_pade(const std::vector<Rational>& coefficients, double mu, int p, int q);

// Ground or excited level of H = p^2/2 + x^2/2 + mu x^(2 kappa) (hbar = m = w = 1) in
// the harmonic-oscillator basis. Throws NotConverged unless doubling the basis
// moves the level by less than `tolerance`.
double reference_energy(int kappa, int n, double mu, int basis_size, double tolerance = 1e-9);
// Single diagonalization, no convergence check.
double oscillator_basis_level(int kappa, int n, double mu, int basis_size);

struct PadeEntry {
    int p;
    int q;
    std::optional<double> value;
    std::string error;
};

struct ResummationResult {
    double mu = 0.0;
    std::vector<double> partial_sums;
    std::vector<PadeEntry> pade_table;
    double borel_pade_value = 0.0;
    std::optional<double> reference_energy;
    std::optional<double> discrepancy;
};

// Borel-Pade at [p/q] plus the near-diagonal table and partial sums. When
// kappa > 0 the spectral reference for level n is attached.
ResummationResult resum(const std::vector<Rational>& coefficients, double mu, int p, int q, int kappa = 0, int n = 0,
                        int basis_size = 200);

nlohmann::json resummation_to_json(const ResummationResult& r);

}  // namespace semiclassical
