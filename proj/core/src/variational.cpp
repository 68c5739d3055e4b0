#include "semiclassical/variational.hpp"

#include "semiclassical/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>

namespace semiclassical {

namespace {

struct TauGrid {
    double nu;
    double horizon;
    int N;
    double dtau;
    std::vector<double> tau;
    std::vector<double> tmid;
    std::vector<double> wq;  // trapezoid weights in tau
};

TauGrid make_grid(double nu, double horizon, int N) {
    TauGrid g{nu, horizon, N, 0.0, {}, {}, {}};
    const double tau0 = std::exp(-nu * horizon);
    g.dtau = (1.0 - tau0) / N;
    for (int j = 0; j <= N; ++j) g.tau.push_back(j == N ? 1.0 : tau0 + j * g.dtau);
    for (int i = 0; i < N; ++i) g.tmid.push_back(0.5 * (g.tau[i] + g.tau[i + 1]));
    g.wq.assign(N + 1, g.dtau);
    g.wq.front() *= 0.5;
    g.wq.back() *= 0.5;
    return g;
}

// I = sum_i c_i/2 |g_{i+1} - g_i|^2 + sum_j w_j V(g_j) / (nu tau_j), c_i = m nu tau_mid / dtau.
// The curve is piecewise linear in tau, so the kinetic part is integrated exactly.
class DiscreteAction {
public:
    DiscreteAction(const NumericPotential& V, const TauGrid& grid) : V_(V), g_(grid), n_(V.dim()) {
        for (int i = 0; i < g_.N; ++i) c_.push_back(V_.mass() * g_.nu * g_.tmid[i] / g_.dtau);
    }

    double value(const std::vector<double>& gamma) const {
        double kin = 0.0, pot = 0.0;
        for (int i = 0; i < g_.N; ++i) {
            double d2 = 0.0;
            for (std::size_t a = 0; a < n_; ++a) {
                const double d = gamma[(i + 1) * n_ + a] - gamma[i * n_ + a];
                d2 += d * d;
            }
            kin += 0.5 * c_[i] * d2;
        }
        for (int j = 0; j <= g_.N; ++j) pot += g_.wq[j] * V_.value(&gamma[j * n_]) / (g_.nu * g_.tau[j]);
        return kin + pot;
    }

    // Interior gradient; end nodes are pinned and get 0.
    void gradient(const std::vector<double>& gamma, std::vector<double>& grad) const {
        grad.assign(gamma.size(), 0.0);
        std::vector<double> dv(n_);
        for (int j = 1; j < g_.N; ++j) {
            V_.gradient(&gamma[j * n_], dv.data());
            for (std::size_t a = 0; a < n_; ++a) {
                const double gj = gamma[j * n_ + a];
                grad[j * n_ + a] = c_[j - 1] * (gj - gamma[(j - 1) * n_ + a]) - c_[j] * (gamma[(j + 1) * n_ + a] - gj) +
                                   g_.wq[j] * dv[a] / (g_.nu * g_.tau[j]);
            }
        }
    }

    Eigen::MatrixXd diagonal_block(const std::vector<double>& gamma, int j) const {
        Eigen::MatrixXd h(n_, n_);
        V_.hessian(&gamma[j * n_], h.data());
        h *= g_.wq[j] / (g_.nu * g_.tau[j]);
        h.diagonal().array() += c_[j - 1] + c_[j];
        return h;
    }

    // Solves H step = rhs on the interior by block Thomas elimination.
    // Returns false if a Schur complement is not positive definite.
    bool solve(const std::vector<double>& gamma, const std::vector<double>& rhs, std::vector<double>& step) const {
        const int M = g_.N - 1;
        std::vector<Eigen::LLT<Eigen::MatrixXd>> fact(M);
        std::vector<Eigen::VectorXd> r(M);
        for (int k = 0; k < M; ++k) {
            const int j = k + 1;
            Eigen::MatrixXd d = diagonal_block(gamma, j);
            r[k] = Eigen::Map<const Eigen::VectorXd>(&rhs[j * n_], static_cast<Eigen::Index>(n_));
            if (k > 0) {
                const double c = c_[j - 1];
                d -= c * c * fact[k - 1].solve(Eigen::MatrixXd::Identity(n_, n_));
                r[k] += c * fact[k - 1].solve(r[k - 1]);
            }
            fact[k].compute(d);
            if (fact[k].info() != Eigen::Success) return false;
        }
        step.assign(gamma.size(), 0.0);
        Eigen::VectorXd next = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
        for (int k = M - 1; k >= 0; --k) {
            const int j = k + 1;
            Eigen::VectorXd s = fact[k].solve(k == M - 1 ? r[k] : Eigen::VectorXd(r[k] + c_[j] * next));
            for (std::size_t a = 0; a < n_; ++a) step[j * n_ + a] = s(static_cast<Eigen::Index>(a));
            next = s;
        }
        return true;
    }

    // Dense interior Hessian, for diagnostics.
    Eigen::MatrixXd dense_hessian(const std::vector<double>& gamma) const {
        const int M = g_.N - 1;
        const auto n = static_cast<Eigen::Index>(n_);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M * n, M * n);
        for (int k = 0; k < M; ++k) {
            H.block(k * n, k * n, n, n) = diagonal_block(gamma, k + 1);
            if (k + 1 < M) {
                H.block(k * n, (k + 1) * n, n, n) = -c_[k + 1] * Eigen::MatrixXd::Identity(n, n);
                H.block((k + 1) * n, k * n, n, n) = -c_[k + 1] * Eigen::MatrixXd::Identity(n, n);
            }
        }
        return H;
    }

private:
    const NumericPotential& V_;
    const TauGrid& g_;
    std::size_t n_;
    std::vector<double> c_;
};

struct DiscreteSolution {
    std::vector<double> gamma;
    double action = 0.0;
    int iterations = 0;
    double gradient_norm = 0.0;
};

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

[[noreturn]] void report_nonconvexity(const NumericPotential& V, const std::vector<double>& gamma, int N) {
    const std::size_t n = V.dim();
    Eigen::MatrixXd h(n, n);
    for (int j = 0; j <= N; ++j) {
        V.hessian(&gamma[j * n], h.data());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < 0.0) {
            std::vector<double> pt(gamma.begin() + j * n, gamma.begin() + (j + 1) * n);
            throw HypothesisViolation("Hessian of V is not positive semidefinite along the path",
                                      {{"node", j}, {"point", pt}, {"min_eigenvalue", es.eigenvalues()(0)}});
        }
    }
    throw NoConvergence("discrete action Hessian is not positive definite");
}

DiscreteSolution solve_discrete(const OscillatorModel& model, const NumericPotential& V, std::span<const double> x,
                                const TauGrid& grid, const GridSpec& spec) {
    const std::size_t n = V.dim();
    const int N = grid.N;
    DiscreteAction I(V, grid);

    // Linearized minimizer x_i tau^(omega_i / nu) as the starting curve.
    DiscreteSolution sol;
    sol.gamma.assign((N + 1) * n, 0.0);
    for (int j = 1; j <= N; ++j)
        for (std::size_t a = 0; a < n; ++a)
            sol.gamma[j * n + a] = j == N ? x[a] : x[a] * std::pow(grid.tau[j], V.omega()[a] / grid.nu);

    std::vector<double> grad, step, trial;
    double value = I.value(sol.gamma);
    for (int it = 0; it <= spec.max_iterations; ++it) {
        I.gradient(sol.gamma, grad);
        sol.gradient_norm = norm(grad);
        sol.iterations = it;
        if (sol.gradient_norm <= spec.tolerance * (1.0 + std::abs(value))) {
            sol.action = value;
            return sol;
        }
        if (it == spec.max_iterations) break;
        if (!I.solve(sol.gamma, grad, step)) report_nonconvexity(V, sol.gamma, N);

        double slope = 0.0;
        for (std::size_t k = 0; k < grad.size(); ++k) slope -= grad[k] * step[k];
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
            trial = sol.gamma;
            for (std::size_t k = 0; k < trial.size(); ++k) trial[k] -= alpha * step[k];
            const double tv = I.value(trial);
            // Armijo, with slack for round-off once the step is at machine level.
            if (tv <= value + 1e-4 * alpha * slope || std::abs(tv - value) <= 1e-15 * std::abs(value)) {
                sol.gamma.swap(trial);
                value = tv;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    (void)model;
    throw NoConvergence("action minimization did not reach the gradient tolerance",
                        {{"iterations", sol.iterations}, {"gradient_norm", sol.gradient_norm},
                         {"tolerance", spec.tolerance * (1.0 + std::abs(value))}});
}

// Fourth-order d/dtau on a uniform grid, component a.
double dtau4(const std::vector<double>& g, std::size_t n, std::size_t a, int j, int N, double h) {
    auto v = [&](int k) { return g[k * n + a]; };
    if (j == 0) return (-25 * v(0) + 48 * v(1) - 36 * v(2) + 16 * v(3) - 3 * v(4)) / (12 * h);
    if (j == 1) return (-3 * v(0) - 10 * v(1) + 18 * v(2) - 6 * v(3) + v(4)) / (12 * h);
    if (j == N) return (25 * v(N) - 48 * v(N - 1) + 36 * v(N - 2) - 16 * v(N - 3) + 3 * v(N - 4)) / (12 * h);
    if (j == N - 1) return (3 * v(N) + 10 * v(N - 1) - 18 * v(N - 2) + 6 * v(N - 3) - v(N - 4)) / (12 * h);
    return (-v(j + 2) + 8 * v(j + 1) - 8 * v(j - 1) + v(j - 2)) / (12 * h);
}

double resolve_horizon(const OscillatorModel& model, const GridSpec& spec) {
    return spec.horizon > 0.0 ? spec.horizon : 40.0 / model.omega_min().to_double();
}

}  // namespace

VariationalResult minimize_action(const OscillatorModel& model, std::span<const double> x, const GridSpec& spec) {
    model.validate();
    const std::size_t n = model.dim();
    if (x.size() != n) throw DimensionMismatch("target point has dimension " + std::to_string(x.size()) + ", model has " + std::to_string(n));
    if (spec.nodes < 8) throw BadTruncation("variational grid needs at least 8 elements", {{"nodes", spec.nodes}});
    const NumericPotential V(model);
    const double nu = model.omega_min().to_double();
    const double T = resolve_horizon(model, spec);
    const int N = spec.nodes;
    const TauGrid coarse = make_grid(nu, T, N);

    DiscreteSolution sc = solve_discrete(model, V, x, coarse, spec);
    std::vector<double> gamma = sc.gamma;
    double action = sc.action;
    int iterations = sc.iterations;
    double gnorm = sc.gradient_norm;
    if (spec.richardson) {
        const TauGrid fine = make_grid(nu, T, 2 * N);
        DiscreteSolution sf = solve_discrete(model, V, x, fine, spec);
        action = (4.0 * sf.action - sc.action) / 3.0;
        for (int j = 0; j <= N; ++j)
            for (std::size_t a = 0; a < n; ++a) gamma[j * n + a] = (4.0 * sf.gamma[2 * j * n + a] - sc.gamma[j * n + a]) / 3.0;
        iterations += sf.iterations;
        gnorm = std::max(gnorm, sf.gradient_norm);
    }

    VariationalResult r;
    r.action = action;
    r.iterations = iterations;
    r.gradient_norm = gnorm;
    r.converged = true;
    r.curve.horizon = T;
    for (int j = 0; j <= N; ++j) {
        r.curve.times.push_back(j == N ? 0.0 : std::log(coarse.tau[j]) / nu);
        r.curve.points.emplace_back(gamma.begin() + j * n, gamma.begin() + (j + 1) * n);
    }

    const double h = coarse.dtau;
    const double m = V.mass();
    r.momentum.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
        auto v = [&](int k) { return gamma[k * n + a]; };
        const double gt = (11 * v(N) - 18 * v(N - 1) + 9 * v(N - 2) - 2 * v(N - 3)) / (6 * h);
        r.momentum[a] = m * nu * coarse.tau[N] * gt;
    }
    for (int j = 0; j <= N; ++j) {
        double v2 = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            const double vel = nu * coarse.tau[j] * dtau4(gamma, n, a, j, N, h);
            v2 += vel * vel;
        }
        const double pot = V.value(&gamma[j * n]);
        r.max_potential = std::max(r.max_potential, pot);
        r.ip_energy_drift = std::max(r.ip_energy_drift, std::abs(0.5 * m * v2 - pot));
    }
    double p2 = 0.0;
    for (double p : r.momentum) p2 += p * p;
    r.hj_residual = std::abs(p2 / (2 * m) - V.value(x.data()));
    return r;
}

double discrete_hessian_min_eigenvalue(const OscillatorModel& model, const VariationalResult& result, const GridSpec& spec) {
    const NumericPotential V(model);
    const std::size_t n = model.dim();
    const int N = static_cast<int>(result.curve.points.size()) - 1;
    const TauGrid grid = make_grid(model.omega_min().to_double(), result.curve.horizon > 0 ? result.curve.horizon : resolve_horizon(model, spec), N);
    std::vector<double> gamma;
    for (const auto& p : result.curve.points) gamma.insert(gamma.end(), p.begin(), p.end());
    (void)n;
    DiscreteAction I(V, grid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(I.dense_hessian(gamma), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

HypothesisReport check_hypotheses(const OscillatorModel& model, const SampleBox& box, std::vector<std::vector<double>> lambdas) {
    model.validate();
    const std::size_t n = model.dim();
    if (box.lower.size() != n || box.upper.size() != n) throw DimensionMismatch("sample box dimension does not match the model");
    if (box.points_per_axis < 2) throw IndexOutOfRange("sample box needs at least 2 points per axis");
    const NumericPotential V(model);
    const double m = V.mass();
    if (lambdas.empty()) {
        lambdas.emplace_back(n, 0.0);
        std::vector<double> l(n);
        for (std::size_t i = 0; i < n; ++i) l[i] = 0.9 * V.omega()[i];
        lambdas.push_back(l);
    }
    for (const auto& l : lambdas) {
        if (l.size() != n) throw DimensionMismatch("lambda candidate has the wrong dimension");
        for (std::size_t i = 0; i < n; ++i)
            if (!(l[i] * l[i] < V.omega()[i] * V.omega()[i]))
                throw InvalidModel("coercivity candidates need lambda_i^2 < omega_i^2", {{"lambda", l}});
    }

    HypothesisReport rep;
    std::vector<double> margins(lambdas.size(), std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> worst(lambdas.size());
    rep.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    Eigen::MatrixXd h(n, n);
    double scale = 0.0;
    while (true) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * idx[i] / (box.points_per_axis - 1);
        const double a = V.anharmonic(x.data());
        scale = std::max(scale, V.value(x.data()));
        for (std::size_t c = 0; c < lambdas.size(); ++c) {
            double q = 0.0;
            for (std::size_t i = 0; i < n; ++i) q += lambdas[c][i] * lambdas[c][i] * x[i] * x[i];
            const double margin = a + 0.5 * m * q;
            if (margin < margins[c]) {
                margins[c] = margin;
                worst[c] = x;
            }
        }
        V.hessian(x.data(), h.data());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < rep.min_hessian_eigenvalue) {
            rep.min_hessian_eigenvalue = es.eigenvalues()(0);
            rep.convexity_worst_point = x;
        }
        ++rep.samples;
        std::size_t k = 0;
        while (k < n && ++idx[k] == box.points_per_axis) idx[k++] = 0;
        if (k == n) break;
    }
    const auto best = static_cast<std::size_t>(std::max_element(margins.begin(), margins.end()) - margins.begin());
    const double tol = 1e-12 * (1.0 + scale);
    rep.coercivity_margin = margins[best];
    rep.best_lambda = lambdas[best];
    rep.coercivity_worst_point = worst[best];
    rep.coercive = rep.coercivity_margin >= -tol;
    rep.convex = rep.min_hessian_eigenvalue >= -tol;
    return rep;
}

namespace {

class CachedGradient {
public:
    CachedGradient(OscillatorModel model, GridSpec spec) : model_(std::move(model)), spec_(spec) {}

    std::vector<double> operator()(std::span<const double> x) {
        std::vector<double> key(x.begin(), x.end());
        {
            std::shared_lock lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        std::vector<double> p = minimize_action(model_, x, spec_).momentum;
        std::unique_lock lock(mutex_);
        cache_.emplace(std::move(key), p);
        return p;
    }

private:
    OscillatorModel model_;
    GridSpec spec_;
    std::shared_mutex mutex_;
    std::map<std::vector<double>, std::vector<double>> cache_;
};

std::vector<double> call_provider(const GradientProvider& f, std::span<const double> x) {
    std::vector<double> g;
    try {
        g = f(x);
    } catch (const std::exception& e) {
        throw GradientProviderFailure(std::string("gradient provider failed: ") + e.what(), {{"point", std::vector<double>(x.begin(), x.end())}});
    }
    if (g.size() != x.size())
        throw GradientProviderFailure("gradient provider returned the wrong dimension", {{"expected", x.size()}, {"got", g.size()}});
    for (double v : g)
        if (!std::isfinite(v)) throw GradientProviderFailure("gradient provider returned a non-finite value", {{"point", std::vector<double>(x.begin(), x.end())}});
    return g;
}

double vnorm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> points;
    bool reached_cap = false;
    bool provider_failed = false;
};

// Dormand-Prince 5(4) for dx/ds = sign * grad S0(x) / m, s in [0, s_end].
Trajectory integrate_flow(const GradientProvider& f, std::vector<double> x, double inv_m, double sign, double s_end, double rtol,
                          double atol, double cap, bool stop_on_failure = false) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                            e7 = -1.0 / 40;
    (void)c2, (void)c3, (void)c4, (void)c5;
    const std::size_t n = x.size();
    auto rhs = [&](const std::vector<double>& y) {
        std::vector<double> g = call_provider(f, y);
        for (auto& v : g) v *= sign * inv_m;
        return g;
    };
    auto comb = [&](const std::vector<double>& y, double h, std::initializer_list<std::pair<double, const std::vector<double>*>> ks) {
        std::vector<double> out = y;
        for (const auto& [c, k] : ks)
            for (std::size_t i = 0; i < n; ++i) out[i] += h * c * (*k)[i];
        return out;
    };

    Trajectory tr;
    tr.times.push_back(0.0);
    tr.points.push_back(x);
    const double x0 = vnorm(x);
    double s = 0.0;
    double h = std::min(0.01, s_end);
    std::vector<double> k1 = rhs(x);
    int steps = 0;
    while (s < s_end && steps < 100000) {
        h = std::min(h, s_end - s);
        std::vector<double> k2, k3, k4, k5, k6, y5, k7;
        try {
            k2 = rhs(comb(x, h, {{a21, &k1}}));
            k3 = rhs(comb(x, h, {{a31, &k1}, {a32, &k2}}));
            k4 = rhs(comb(x, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            k5 = rhs(comb(x, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            k6 = rhs(comb(x, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            y5 = comb(x, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            k7 = rhs(y5);
        } catch (const GradientProviderFailure&) {
            if (!stop_on_failure) throw;
            tr.provider_failed = true;
            break;
        }
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(x[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        ++steps;
        if (err <= 1.0) {
            s += h;
            x = y5;
            k1 = k7;
            tr.times.push_back(s);
            tr.points.push_back(x);
            if (cap > 0.0 && vnorm(x) >= cap * x0) {
                tr.reached_cap = true;
                break;
            }
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= factor;
        if (h < 1e-14 * std::max(1.0, s)) break;
    }
    return tr;
}

// Cubic Lagrange interpolation of the minimizer curve at tau.
std::vector<double> curve_at(const CurveGrid& curve, double nu, double t) {
    const int N = static_cast<int>(curve.points.size()) - 1;
    const double tau0 = std::exp(-nu * curve.horizon);
    const double dtau = (1.0 - tau0) / N;
    const double tau = std::exp(nu * t);
    const double u = (tau - tau0) / dtau;
    int j0 = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, N - 3);
    const std::size_t n = curve.points[0].size();
    std::vector<double> out(n, 0.0);
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (u - (j0 + b)) / static_cast<double>(a - b);
        for (std::size_t i = 0; i < n; ++i) out[i] += w * curve.points[j0 + a][i];
    }
    return out;
}

}  // namespace

GradientProvider variational_gradient_provider(const OscillatorModel& model, const GridSpec& grid) {
    auto cache = std::make_shared<CachedGradient>(model, grid);
    return [cache](std::span<const double> x) { return (*cache)(x); };
}

LaplacianProvider fd_laplacian_provider(GradientProvider gradient, double h) {
    return [gradient = std::move(gradient), h](std::span<const double> x) {
        const std::size_t n = x.size();
        auto central = [&](double step) {
            double lap = 0.0;
            std::vector<double> y(x.begin(), x.end());
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = x[i] + step;
                const double plus = call_provider(gradient, y)[i];
                y[i] = x[i] - step;
                const double minus = call_provider(gradient, y)[i];
                y[i] = x[i];
                lap += (plus - minus) / (2 * step);
            }
            return lap;
        };
        return (4.0 * central(0.5 * h) - central(h)) / 3.0;
    };
}

FlowReport semi_flow(const OscillatorModel& model, std::span<const double> x, const GradientProvider& gradient,
                     const FlowOptions& opt, const VariationalResult* minimizer) {
    model.validate();
    if (x.size() != model.dim()) throw DimensionMismatch("flow start point has the wrong dimension");
    const double inv_m = 1.0 / model.mass.to_double();
    const double wmin = model.omega_min().to_double();
    double wmax = 0.0;
    for (const auto& w : model.omega) wmax = std::max(wmax, w.to_double());

    Trajectory back = integrate_flow(gradient, std::vector<double>(x.begin(), x.end()), inv_m, -1.0, opt.t_span, opt.rtol, opt.atol, 0.0);
    FlowReport rep;
    for (std::size_t k = back.times.size(); k-- > 0;) {
        rep.times.push_back(-back.times[k]);
        rep.points.push_back(back.points[k]);
    }

    if (minimizer != nullptr) {
        double dev = 0.0;
        for (std::size_t k = 0; k < rep.times.size(); ++k) {
            if (rep.times[k] < -minimizer->curve.horizon) continue;
            const auto g = curve_at(minimizer->curve, wmin, rep.times[k]);
            double d = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) d += (g[i] - rep.points[k][i]) * (g[i] - rep.points[k][i]);
            dev = std::max(dev, std::sqrt(d));
        }
        rep.max_deviation_from_minimizer = dev;
    }

    const double rate = wmin * (1.0 - opt.decay_epsilon);
    double worst = 0.0;
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
        const double nj = vnorm(rep.points[j]);
        if (nj == 0.0) continue;
        for (std::size_t i = 0; i <= j; ++i) {
            const double bound = nj * std::exp(rate * (rep.times[i] - rep.times[j]));
            worst = std::max(worst, vnorm(rep.points[i]) / bound);
        }
    }
    rep.worst_decay_ratio = worst;
    rep.decay_bound_holds = worst <= 1.0 + 1e-9;

    if (opt.forward_check && vnorm(std::vector<double>(x.begin(), x.end())) > 0.0) {
        const Trajectory fwd = integrate_flow(gradient, std::vector<double>(x.begin(), x.end()), inv_m, 1.0, opt.forward_time_limit,
                                              opt.rtol, opt.atol, opt.forward_growth_cap, true);
        rep.forward_reached_cap = fwd.reached_cap;
        rep.forward_escape_time = fwd.times.back();
        rep.forward_provider_failed = fwd.provider_failed;
        // A linear flow needs at least ln(cap)/w_max to grow by `cap`.
        rep.forward_blowup_detected = fwd.reached_cap && fwd.times.back() < 0.9 * std::log(opt.forward_growth_cap) / wmax;
    }
    return rep;
}

double numeric_s1(const OscillatorModel& model, std::span<const double> x, const LaplacianProvider& laplacian, const GridSpec& spec) {
    model.validate();
    const VariationalResult path = minimize_action(model, x, spec);
    const int N = static_cast<int>(path.curve.points.size()) - 1;
    const double nu = model.omega_min().to_double();
    const double m = model.mass.to_double();
    double half_sum_omega = 0.0;
    for (const auto& w : model.omega) half_sum_omega += 0.5 * w.to_double();

    int M = 0;
    for (int cand = 64; cand >= 2; cand -= 2)
        if (N % cand == 0) {
            M = cand;
            break;
        }
    if (M == 0) M = N % 2 == 0 ? N : 0;
    const double tau0 = std::exp(-nu * path.curve.horizon);
    const double dtau = (1.0 - tau0) / N;

    auto integrand = [&](int j) {
        const auto& g = path.curve.points[j];
        double r2 = 0.0;
        for (double v : g) r2 += v * v;
        // Integrand is O(|gamma|^2) near the origin.
        if (r2 < 1e-12) return 0.0;
        double lap = 0.0;
        try {
            lap = laplacian(g);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw GradientProviderFailure(std::string("Laplacian provider failed: ") + e.what());
        }
        if (!std::isfinite(lap)) throw GradientProviderFailure("Laplacian provider returned a non-finite value");
        const double tau = j == N ? 1.0 : tau0 + j * dtau;
        return (lap / (2 * m) - half_sum_omega) / (nu * tau);
    };

    double sum = 0.0;
    if (M > 0) {
        const int stride = N / M;
        const double h = stride * dtau;
        for (int k = 0; k <= M; ++k) {
            const double w = (k == 0 || k == M) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            sum += w * integrand(k * stride);
        }
        sum *= h / 3.0;
    } else {
        for (int j = 0; j <= N; ++j) sum += ((j == 0 || j == N) ? 0.5 : 1.0) * integrand(j) * dtau;
    }
    return sum;
}

std::vector<VariationalResult> scan_variational(const OscillatorModel& model, const std::vector<std::vector<double>>& points,
                                                const GridSpec& grid, unsigned threads) {
    std::vector<VariationalResult> out(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
            try {
                out[i] = minimize_action(model, points[i], grid);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("SEMICLASSICAL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

nlohmann::json variational_to_json(const VariationalResult& r, bool include_curve) {
    nlohmann::json j{{"action", r.action},
                     {"momentum", r.momentum},
                     {"ip_energy_drift", r.ip_energy_drift},
                     {"max_potential", r.max_potential},
                     {"hj_residual", r.hj_residual},
                     {"converged", r.converged},
                     {"iterations", r.iterations},
                     {"gradient_norm", r.gradient_norm},
                     {"horizon", r.curve.horizon}};
    if (include_curve) j["curve"] = {{"times", r.curve.times}, {"points", r.curve.points}};
    return j;
}

nlohmann::json hypothesis_report_to_json(const HypothesisReport& r) {
    return {{"coercive", r.coercive},
            {"coercivity_margin", r.coercivity_margin},
            {"best_lambda", r.best_lambda},
            {"coercivity_worst_point", r.coercivity_worst_point},
            {"convex", r.convex},
            {"min_hessian_eigenvalue", r.min_hessian_eigenvalue},
            {"convexity_worst_point", r.convexity_worst_point},
            {"samples", r.samples}};
}

nlohmann::json flow_report_to_json(const FlowReport& r) {
    nlohmann::json j{{"times", r.times},
                     {"points", r.points},
                     {"decay_bound_holds", r.decay_bound_holds},
                     {"worst_decay_ratio", r.worst_decay_ratio},
                     {"forward_reached_cap", r.forward_reached_cap},
                     {"forward_escape_time", r.forward_escape_time},
                     {"forward_blowup_detected", r.forward_blowup_detected},
                     {"forward_provider_failed", r.forward_provider_failed}};
    j["max_deviation_from_minimizer"] = r.max_deviation_from_minimizer >= 0 ? nlohmann::json(r.max_deviation_from_minimizer) : nlohmann::json(nullptr);
    return j;
}

}  // namespace semiclassical
