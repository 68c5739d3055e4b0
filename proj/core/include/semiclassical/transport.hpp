#pragma once

#include "semiclassical/hj_formal.hpp"
#include "semiclassical/model.hpp"
#include "semiclassical/series.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

namespace semiclassical {

// S_(0..K) and E_(0..K-1) in the hbar^k/k! convention.
struct GroundExpansion {
    FormalAction action;
    int order = 0;
    std::vector<PolySeries> corrections;
    std::vector<Rational> energies;

    const OscillatorModel& model() const { return action.model; }
    int truncation() const { return action.truncation(); }
};

// phi_(0..K) and gap coefficients dE_(0..K), same convention.
struct ExcitedExpansion {
    OscillatorModel model;
    MultiIndex quantum_numbers;
    int order = 0;
    std::vector<PolySeries> corrections;
    std::vector<Rational> gaps;
};

// Smallest action truncation accepted by ground_expansion / excited_expansion.
// S_(k) is exact through degree D - 2k; phi_(k) through D - 2k - 2.
int required_ground_truncation(int order);
int required_excited_truncation(int order, const MultiIndex& quantum_numbers);

GroundExpansion ground_expansion(const FormalAction& action, int order);
ExcitedExpansion excited_expansion(const GroundExpansion& ground, const MultiIndex& quantum_numbers, int order);

// Convenience wrappers that pick the truncation themselves.
GroundExpansion expand_ground(const OscillatorModel& model, int order);
// Ground order is order + 1 so total energies through hbar^order are available.
std::pair<GroundExpansion, ExcitedExpansion> expand_excited(const OscillatorModel& model, const MultiIndex& quantum_numbers,
                                                            int order);

// LHS - RHS of the k-th ground transport equation.
PolySeries transport_residual(const GroundExpansion& ground, int k);
// LHS - RHS of the k-th excited transport equation (k = 0 is the seed equation).
PolySeries excited_transport_residual(const GroundExpansion& ground, const ExcitedExpansion& excited, int k);

// e_k = E_(k)/k!, i.e. E/hbar = sum_k e_k hbar^k.
std::vector<Rational> energy_series(const GroundExpansion& ground);
// (E_(k) + dE_(k))/k! for the excited state, as far as both are known.
std::vector<Rational> excited_energy_series(const GroundExpansion& ground, const ExcitedExpansion& excited);

// Regroup hbar-series coefficients of E/hbar for V = 1/2 m w^2 x^2 + g x^(2 kappa)
// into E = hbar w sum_j c_j mu^j, mu = g hbar^(kappa-1) / (m^kappa w^(kappa+1)).
std::vector<Rational> coupling_coefficients(const std::vector<Rational>& hbar_series, int kappa, const Rational& mass,
                                            const Rational& omega, const Rational& g);

// sum_k hbar^k/k! phi_(k) as a polynomial in hbar: entry l is the hbar^l coefficient.
std::vector<PolySeries> assemble_hbar_polynomial(const std::vector<PolySeries>& corrections);

nlohmann::json expansion_report(const GroundExpansion& ground, const ExcitedExpansion* excited = nullptr);

}  // namespace semiclassical
