#pragma once

#include "semiclassical/model.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <span>
#include <vector>

namespace semiclassical {

struct GridSpec {
    // Horizon T in time units; 0 selects 40 / omega_min.
    double horizon = 0.0;
    // Elements of the coarse grid (uniform in tau = exp(omega_min t)).
    int nodes = 800;
    // Solve on N and 2N elements and extrapolate the O(dtau^2) error away.
    bool richardson = true;
    // Stop when |grad I| <= tolerance (1 + |I|).
    double tolerance = 1e-10;
    int max_iterations = 100;
};

struct CurveGrid {
    double horizon = 0.0;
    std::vector<double> times;                 // -T .. 0
    std::vector<std::vector<double>> points;   // origin .. x
};

struct VariationalResult {
    CurveGrid curve;
    double action = 0.0;
    std::vector<double> momentum;
    double ip_energy_drift = 0.0;  // max_t |m|gamma'|^2/2 - V(gamma)|
    double max_potential = 0.0;    // max_t V(gamma)
    double hj_residual = 0.0;      // |(1/2m)|p|^2 - V(x)|
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
};

struct SampleBox {
    std::vector<double> lower;
    std::vector<double> upper;
    int points_per_axis = 41;
};

struct HypothesisReport {
    bool coercive = false;
    // max over lambda candidates of min_x [A(x) + 1/2 m sum lambda_i^2 x_i^2].
    double coercivity_margin = 0.0;
    std::vector<double> best_lambda;
    std::vector<double> coercivity_worst_point;
    bool convex = false;
    double min_hessian_eigenvalue = 0.0;
    std::vector<double> convexity_worst_point;
    long samples = 0;
};

// Sampled check of the coercivity bound A >= -1/2 m sum lambda_i^2 x_i^2
// (lambda_i < omega_i) and of Hess V >= 0. Sampling is not a proof; violations
// are reported, not thrown. Default lambda candidates: 0 and 0.9 omega.
HypothesisReport check_hypotheses(const OscillatorModel& model, const SampleBox& box,
                                  std::vector<std::vector<double>> lambda_candidates = {});

// Minimizes the inverted-potential action over curves from the origin (t = -T)
// to x (t = 0). Throws NoConvergence or HypothesisViolation.
VariationalResult minimize_action(const OscillatorModel& model, std::span<const double> x, const GridSpec& grid = {});

// Smallest eigenvalue of the discrete action Hessian at the returned curve
// (coarse grid, interior nodes).
double discrete_hessian_min_eigenvalue(const OscillatorModel& model, const VariationalResult& result, const GridSpec& grid = {});

using GradientProvider = std::function<std::vector<double>(std::span<const double>)>;
using LaplacianProvider = std::function<double(std::span<const double>)>;

// grad S0 from minimize_action momenta; thread-safe, caches by exact point.
GradientProvider variational_gradient_provider(const OscillatorModel& model, const GridSpec& grid = {});
// Delta S0 by central differences of the gradient with Richardson (h, h/2).
LaplacianProvider fd_laplacian_provider(GradientProvider gradient, double h = 1e-4);

struct FlowOptions {
    double t_span = 10.0;      // integrate over [-t_span, 0]
    double rtol = 1e-9;
    double atol = 1e-12;
    double decay_epsilon = 0.1;  // as a fraction of omega_min
    bool forward_check = true;
    double forward_growth_cap = 50.0;  // stop forward run when |x(t)| exceeds cap * |x|
    double forward_time_limit = 20.0;
};

struct FlowReport {
    std::vector<double> times;
    std::vector<std::vector<double>> points;
    // Deviation from the minimizer curve, when one was supplied (else negative).
    double max_deviation_from_minimizer = -1.0;
    bool decay_bound_holds = false;
    // max over t <= t* of |gamma(t)| / (|gamma(t*)| exp((w_min - eps)(t - t*))).
    double worst_decay_ratio = 0.0;
    bool forward_reached_cap = false;
    double forward_escape_time = 0.0;
    // Escape faster than any linear flow with the model's frequencies could manage.
    bool forward_blowup_detected = false;
    // Forward run stopped early because the gradient provider failed (e.g. the
    // minimizer left the convex region); forward_escape_time is the time reached.
    bool forward_provider_failed = false;
};

// Integrates m dx/dt = grad S0(x) backwards from x with Dormand-Prince 5(4).
// Throws GradientProviderFailure when the provider fails.
FlowReport semi_flow(const OscillatorModel& model, std::span<const double> x, const GradientProvider& gradient,
                     const FlowOptions& options = {}, const VariationalResult* minimizer = nullptr);

// Integral_{-inf}^0 [Delta S0 / 2m - sum omega / 2](gamma_x(t)) dt along the minimizer.
double numeric_s1(const OscillatorModel& model, std::span<const double> x, const LaplacianProvider& laplacian,
                  const GridSpec& grid = {});

// Independent minimizations in parallel.
std::vector<VariationalResult> scan_variational(const OscillatorModel& model, const std::vector<std::vector<double>>& points,
                                                const GridSpec& grid, unsigned threads);

// SEMICLASSICAL_THREADS, else hardware concurrency.
unsigned default_thread_count();

nlohmann::json variational_to_json(const VariationalResult& result, bool include_curve = true);
nlohmann::json hypothesis_report_to_json(const HypothesisReport& report);
nlohmann::json flow_report_to_json(const FlowReport& report);

}  // namespace semiclassical
