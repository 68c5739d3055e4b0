#pragma once

#include "semiclassical/model.hpp"
#include "semiclassical/series.hpp"

#include <vector>

namespace semiclassical {

// Taylor solution S0 of (1/2m)|grad S0|^2 = V through degree D.
struct FormalAction {
    OscillatorModel model;
    PolySeries s0;
    bool residual_zero = false;

    int truncation() const { return s0.truncation(); }
};

// Coordinates mu(x) = x + O(|x|^2) in which grad S0 / m becomes sum_i omega_i mu_i d/dmu_i.
struct SternbergMap {
    OscillatorModel model;
    std::vector<PolySeries> mu;
    int truncation = 0;
};

FormalAction solve_hj_formal(const OscillatorModel& model, int truncation);

// (1/2m)|grad S0|^2 - V through the action's truncation degree.
PolySeries hj_residual(const FormalAction& action);

// Needs action.truncation() >= truncation + 1.
SternbergMap sternberg_linearize(const FormalAction& action, int truncation);

// Per component: sum_j (d_j mu_i)(d_j S0)/m - omega_i mu_i through the map's truncation.
std::vector<PolySeries> sternberg_pushforward_residual(const SternbergMap& map, const FormalAction& action);

// Throws DegenerateEigenvalue if a nonzero integer vector l with |l|_1 <= max_l1
// has sum_i l_i omega_i = 0.
void require_nondegenerate(const OscillatorModel& model, int max_l1);

// Gradient of S0 - 1/2 m sum omega_i x_i^2, divided by m: the nonlinear part of
// the flow field, valuation >= 2.
std::vector<PolySeries> nonlinear_flow_field(const FormalAction& action);

}  // namespace semiclassical
