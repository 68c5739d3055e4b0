#pragma once

#include "semiclassical/rational.hpp"
#include "semiclassical/transport.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

namespace semiclassical {

// E_n = hbar omega sum_k coefficients[k] mu^k for V = 1/2 m w^2 x^2 + g x^(2 kappa),
// mu = g hbar^(kappa-1) / (m^kappa w^(kappa+1)).
struct RSExpansion {
    int kappa = 2;
    int n = 0;
    int order = 0;
    std::vector<Rational> coefficients;
};

inline constexpr int kMaxRSOrder = 15;
inline constexpr int kMaxRSLevel = 10;

// Rayleigh-Schroedinger recursion in the monic Hermite basis (psi = e^{-x^2/2} P).
// Throws OrderTooHigh beyond kMaxRSOrder / kMaxRSLevel unless `allow_beyond_limits`.
RSExpansion rs_expand(int kappa, int n, int order, bool allow_beyond_limits = false);

struct ComparisonReport {
    // Highest order through which all coefficients agree (-1 if none).
    int agreed_through = -1;
    bool agree = true;
    std::optional<int> first_disagreement;
    std::vector<Rational> rs;
    std::vector<Rational> transport;
};

ComparisonReport compare_with_transport(const RSExpansion& rs, const std::vector<Rational>& transport_coefficients);

struct KappaParameters {
    int kappa;
    Rational mass;
    Rational omega;
    Rational g;
};
// Recognizes 1D models whose anharmonic part is a single g x^(2 kappa) term.
std::optional<KappaParameters> kappa_parameters(const OscillatorModel& model);

// Transport-side mu-coefficients c_0..c_order for level n (0 = ground).
std::vector<Rational> transport_coupling_series(const OscillatorModel& model, int n, int order);

nlohmann::json rs_to_json(const RSExpansion& rs);
nlohmann::json comparison_to_json(const ComparisonReport& report);

}  // namespace semiclassical
