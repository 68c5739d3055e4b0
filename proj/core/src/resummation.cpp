#include "semiclassical/resummation.hpp"

#include "semiclassical/errors.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace semiclassical {

double PadeApproximant::evaluate(double t) const {
    auto horner = [t](const std::vector<Rational>& c) {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + it->to_double();
        return acc;
    };
    return horner(numerator) / horner(denominator);
}

std::vector<Rational> borel_transform(const std::vector<Rational>& coefficients) {
    std::vector<Rational> b;
    for (std::size_t k = 0; k < coefficients.size(); ++k) b.push_back(coefficients[k] / factorial(static_cast<unsigned>(k)));
    return b;
}

PadeApproximant pade(const std::vector<Rational>& series, int p, int q) {
    if (p < 0 || q < 0) throw IndexOutOfRange("Pade orders must be non-negative");
    if (static_cast<std::size_t>(p + q + 1) > series.size())
        throw InsufficientCoefficients("[" + std::to_string(p) + "/" + std::to_string(q) + "] needs " + std::to_string(p + q + 1) +
                                           " coefficients",
                                       {{"p", p}, {"q", q}, {"available", series.size()}});
    auto c = [&](int i) { return i < 0 ? Rational(0) : series[static_cast<std::size_t>(i)]; };

    // sum_{j=1}^{q} Q_j c_{i-j} = -c_i for i = p+1 .. p+q, by exact Gaussian elimination.
    std::vector<std::vector<Rational>> a(static_cast<std::size_t>(q), std::vector<Rational>(static_cast<std::size_t>(q) + 1));
    for (int r = 0; r < q; ++r) {
        const int i = p + 1 + r;
        for (int j = 1; j <= q; ++j) a[r][j - 1] = c(i - j);
        a[r][q] = -c(i);
    }
    // Reduced row echelon form; a rank-deficient but consistent system (the
    // series is itself a lower-order rational function) takes free unknowns = 0.
    std::vector<int> pivot_col(static_cast<std::size_t>(q), -1);
    int row = 0;
    for (int col = 0; col < q && row < q; ++col) {
        int piv = row;
        while (piv < q && a[piv][col].is_zero()) ++piv;
        if (piv == q) continue;
        std::swap(a[piv], a[row]);
        const Rational lead = a[row][col];
        for (int k = col; k <= q; ++k) a[row][k] /= lead;
        for (int r = 0; r < q; ++r) {
            if (r == row || a[r][col].is_zero()) continue;
            const Rational f = a[r][col];
            for (int k = col; k <= q; ++k) a[r][k] -= f * a[row][k];
        }
        pivot_col[row++] = col;
    }
    for (int r = row; r < q; ++r)
        if (!a[r][q].is_zero())
            throw DegenerateApproximant("inconsistent Pade system for [" + std::to_string(p) + "/" + std::to_string(q) + "]",
                                        {{"p", p}, {"q", q}});
    std::vector<Rational> qs(static_cast<std::size_t>(q));
    for (int r = 0; r < row; ++r) qs[pivot_col[r]] = a[r][q];
    PadeApproximant out;
    out.denominator.push_back(Rational(1));
    for (const auto& v : qs) out.denominator.push_back(v);
    for (int i = 0; i <= p; ++i) {
        Rational s;
        for (int j = 0; j <= std::min(i, q); ++j) s += out.denominator[j] * c(i - j);
        out.numerator.push_back(s);
    }
    return out;
}

namespace {

std::vector<std::complex<double>> polynomial_roots(const std::vector<Rational>& coeffs) {
    std::vector<double> c;
    for (const auto& r : coeffs) c.push_back(r.to_double());
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg < 1) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    std::vector<std::complex<double>> roots;
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()[i]);
    return roots;
}

}  // namespace

double borel_pade(const std::vector<Rational>& coefficients, double mu, int p, int q) {
    const PadeApproximant approx = pade(borel_transform(coefficients), p, q);
    if (mu == 0.0) return approx.numerator.front().to_double();
    if (mu < 0.0) throw DomainExceeded("Borel-Laplace integral needs mu >= 0", {{"mu", mu}});

    for (const auto& s : polynomial_roots(approx.denominator)) {
        const double t = s.real() / mu;
        if (s.real() > 0.0 && std::abs(s.imag()) <= 1e-6 * (1.0 + std::abs(s)) && t <= kLaplaceCutoff)
            throw PoleOnRay("Pade denominator vanishes on the integration ray",
                            {{"p", p}, {"q", q}, {"pole_s", s.real()}, {"pole_t", t}});
    }
    auto f = [&](double t) { return std::exp(-t) * approx.evaluate(mu * t); };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, kLaplaceCutoff, 15, 1e-14, &err);
}

double oscillator_basis_level(int kappa, int n, double mu, int basis_size) {
    if (kappa < 1) throw UnsupportedKappa("kappa must be positive", {{"kappa", kappa}});
    if (basis_size < 50) throw IndexOutOfRange("basis size must be at least 50", {{"basis_size", basis_size}});
    if (n < 0 || n >= basis_size) throw IndexOutOfRange("level outside the basis", {{"n", n}});
    const int N = basis_size;
    const int M = N + 2 * kappa;
    // x|k> = sqrt(k/2)|k-1> + sqrt((k+1)/2)|k+1>, applied 2 kappa times in the
    // enlarged space so the N x N block of x^(2 kappa) is exact.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd v(M), w(M);
    for (int col = 0; col < N; ++col) {
        v.setZero();
        v(col) = 1.0;
        for (int r = 0; r < 2 * kappa; ++r) {
            w.setZero();
            for (int k = 0; k < M; ++k) {
                if (v(k) == 0.0) continue;
                if (k > 0) w(k - 1) += std::sqrt(0.5 * k) * v(k);
                if (k + 1 < M) w(k + 1) += std::sqrt(0.5 * (k + 1)) * v(k);
            }
            v.swap(w);
        }
        H.col(col) = mu * v.head(N);
        H(col, col) += col + 0.5;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NotConverged("eigenvalue solver failed", {{"basis_size", basis_size}});
    return es.eigenvalues()(n);
}

double reference_energy(int kappa, int n, double mu, int basis_size, double tolerance) {
    const double e1 = oscillator_basis_level(kappa, n, mu, basis_size);
    const double e2 = oscillator_basis_level(kappa, n, mu, 2 * basis_size);
    if (!(std::abs(e2 - e1) < tolerance))
        throw NotConverged("reference level not converged under basis doubling",
                           {{"basis_size", basis_size}, {"level", e1}, {"doubled_level", e2}, {"change", std::abs(e2 - e1)}});
    return e2;
}

ResummationResult resum(const std::vector<Rational>& coefficients, double mu, int p, int q, int kappa, int n, int basis_size) {
    ResummationResult r;
    r.mu = mu;
    double sum = 0.0;
    double power = 1.0;
    for (const auto& c : coefficients) {
        sum += c.to_double() * power;
        r.partial_sums.push_back(sum);
        power *= mu;
    }
    const int total = static_cast<int>(coefficients.size());
    for (int pp = 1; 2 * pp - 1 <= total; ++pp) {
        for (int qq : {pp - 1, pp}) {
            if (qq < 1 || pp + qq + 1 > total) continue;
            PadeEntry e{pp, qq, std::nullopt, {}};
            try {
                e.value = borel_pade(coefficients, mu, pp, qq);
            } catch (const Error& err) {
                e.error = err.kind();
            }
            r.pade_table.push_back(e);
        }
    }
    r.borel_pade_value = borel_pade(coefficients, mu, p, q);
    if (kappa > 0) {
        r.reference_energy = reference_energy(kappa, n, mu, basis_size);
        r.discrepancy = std::abs(r.borel_pade_value - *r.reference_energy);
    }
    return r;
}

nlohmann::json resummation_to_json(const ResummationResult& r) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& e : r.pade_table) {
        nlohmann::json row{{"p", e.p}, {"q", e.q}};
        if (e.value) row["value"] = *e.value;
        else row["error"] = e.error;
        table.push_back(row);
    }
    nlohmann::json j{{"mu", r.mu}, {"partial_sums", r.partial_sums}, {"pade_table", table}, {"borel_pade_value", r.borel_pade_value}};
    j["reference_energy"] = r.reference_energy ? nlohmann::json(*r.reference_energy) : nlohmann::json(nullptr);
    j["discrepancy"] = r.discrepancy ? nlohmann::json(*r.discrepancy) : nlohmann::json(nullptr);
    return j;
}

}  // namespace semiclassical
