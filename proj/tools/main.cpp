// Command-line front end. Exit codes: 0 success, 1 usage error, 2 engine error
// (error JSON on stderr).

#include "semiclassical/closed_form.hpp"
#include "semiclassical/diagnostics.hpp"
#include "semiclassical/errors.hpp"
#include "semiclassical/hj_formal.hpp"
#include "semiclassical/model.hpp"
#include "semiclassical/resummation.hpp"
#include "semiclassical/rs_oracle.hpp"
#include "semiclassical/transport.hpp"
#include "semiclassical/variational.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <functional>
#include <iostream>
#include <sstream>

namespace sc = semiclassical;
using nlohmann::json;

namespace {

struct Output {
    std::string path;
    std::string format = "json";

    void write(const std::string& text) const {
        if (path.empty() || path == "-") {
            std::cout << text;
            return;
        }
        std::ofstream out(path);
        if (!out) throw sc::ParseError("cannot open output file '" + path + "'");
        out << text;
    }
    void write(const json& j) const { write(j.dump(2) + "\n"); }
};

void add_output(CLI::App* cmd, Output& out, bool csv) {
    cmd->add_option("-o,--output", out.path, "Output file (default stdout)");
    if (csv) cmd->add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

// Empty: fill with `fallback`; a single value applies to every axis.
void broadcast_corner(std::vector<double>& corner, std::size_t n, double fallback) {
    if (corner.empty()) corner.assign(n, fallback);
    else if (corner.size() == 1) corner.assign(n, corner[0]);
}

sc::MultiIndex parse_quantum_numbers(const std::vector<unsigned>& n, std::size_t dim) {
    if (n.size() != dim) throw sc::DimensionMismatch("quantum number count does not match the model", {{"dim", dim}});
    return sc::MultiIndex(n);
}

std::vector<sc::Rational> load_series(const std::string& spec, int order, int& kappa, int& level) {
    const std::string prefix = "builtin:";
    if (spec.rfind(prefix, 0) == 0) {
        const std::string name = spec.substr(prefix.size());
        const auto dash = name.find('-');
        const std::string model_name = name.substr(0, dash);
        const std::string which = dash == std::string::npos ? "ground" : name.substr(dash + 1);
        auto model = sc::builtin_model(model_name);
        if (!model) throw sc::ParseError("unknown builtin series '" + spec + "'");
        if (which == "ground") {
            level = 0;
        } else if (which.rfind("n", 0) == 0) {
            level = std::stoi(which.substr(1));
        } else {
            throw sc::ParseError("unknown builtin series '" + spec + "'");
        }
        kappa = sc::kappa_parameters(*model)->kappa;
        return sc::transport_coupling_series(*model, level, order - 1);
    }
    std::ifstream in(spec);
    if (!in) throw sc::ParseError("cannot open series file '" + spec + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw sc::ParseError("series file is not valid JSON: " + std::string(e.what()));
    }
    const json& list = j.is_object() ? j.at("coefficients") : j;
    if (j.is_object()) {
        if (j.contains("kappa")) kappa = j.at("kappa").get<int>();
        if (j.contains("n")) level = j.at("n").get<int>();
    }
    std::vector<sc::Rational> c;
    for (const auto& v : list) c.push_back(v.is_string() ? sc::Rational::parse(v.get<std::string>()) : sc::Rational(v.get<long>()));
    return c;
}

std::vector<int> parse_pade(const std::string& s) {
    std::vector<int> pq;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ',');) pq.push_back(std::stoi(part));
    if (pq.size() != 2 || pq[0] < 0 || pq[1] < 0) throw CLI::ValidationError("--pade", "expected p,q");
    return pq;
}

sc::Kappa1DModel closed_form_model(const sc::OscillatorModel& model) {
    auto k = sc::kappa_parameters(model);
    if (!k) throw sc::InvalidModel("closed forms need a 1D model with a single g x^(2 kappa) term");
    sc::Kappa1DModel md{k->mass.to_double(), k->omega.to_double(), k->g.to_double(), k->kappa};
    md.validate();
    return md;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical expansions for anharmonic oscillators"};
    app.require_subcommand(1);
    std::function<void()> run;

    // expand-ground
    std::string model_path;
    int order = 4;
    int truncation = -1;
    bool allow_degenerate = false;
    Output out;
    auto* eg = app.add_subcommand("expand-ground", "Formal ground-state expansion (exact rationals)");
    eg->add_option("--model", model_path, "Model file or builtin alias")->required();
    eg->add_option("--order", order, "Number of energy coefficients")->check(CLI::Range(1, 64));
    eg->add_option("--truncation", truncation, "Taylor truncation degree (default: smallest sufficient)");
    eg->add_flag("--allow-degenerate", allow_degenerate, "Skip the frequency non-degeneracy check");
    add_output(eg, out, false);
    eg->callback([&] {
        run = [&] {
            const auto model = sc::load_model(model_path);
            const int D = truncation >= 0 ? truncation : sc::required_ground_truncation(order);
            if (!allow_degenerate) sc::require_nondegenerate(model, D);
            const auto ground = sc::ground_expansion(sc::solve_hj_formal(model, D), order);
            out.write(sc::expansion_report(ground));
        };
    });

    // expand-excited
    std::vector<unsigned> quantum;
    auto* ee = app.add_subcommand("expand-excited", "Formal excited-state expansion");
    ee->add_option("--model", model_path, "Model file or builtin alias")->required();
    ee->add_option("--n", quantum, "Quantum numbers, comma separated")->required()->delimiter(',');
    ee->add_option("--order", order, "Highest hbar order of the gaps")->check(CLI::Range(0, 64));
    add_output(ee, out, false);
    ee->callback([&] {
        run = [&] {
            const auto model = sc::load_model(model_path);
            const auto [ground, excited] = sc::expand_excited(model, parse_quantum_numbers(quantum, model.dim()), order);
            out.write(sc::expansion_report(ground, &excited));
        };
    });

    // rs
    int kappa = 2;
    int level = 0;
    auto* rs = app.add_subcommand("rs", "Rayleigh-Schroedinger coefficients in the coupling mu");
    rs->add_option("--kappa", kappa, "Potential exponent 2 kappa")->check(CLI::Range(2, 5));
    rs->add_option("--n", level, "Oscillator level");
    rs->add_option("--order", order, "Highest mu order");
    add_output(rs, out, true);
    rs->callback([&] {
        run = [&] {
            const auto r = sc::rs_expand(kappa, level, order);
            if (out.format == "csv") {
                std::ostringstream os;
                os << "k,coefficient,value\n";
                for (std::size_t k = 0; k < r.coefficients.size(); ++k)
                    os << k << ',' << r.coefficients[k].str() << ',' << std::setprecision(17) << r.coefficients[k].to_double() << '\n';
                out.write(os.str());
            } else {
                out.write(sc::rs_to_json(r));
            }
        };
    });

    // compare
    bool compare_json = false;
    auto* cmp = app.add_subcommand("compare", "Check transport energies against Rayleigh-Schroedinger");
    cmp->add_option("--model", model_path, "1D model with a single g x^(2 kappa) term")->required();
    cmp->add_option("--order", order, "Highest mu order compared");
    cmp->add_option("--n", level, "Oscillator level");
    cmp->add_flag("--json", compare_json, "Emit the full comparison report");
    add_output(cmp, out, false);
    cmp->callback([&] {
        run = [&] {
            const auto model = sc::load_model(model_path);
            auto k = sc::kappa_parameters(model);
            if (!k) throw sc::InvalidModel("compare needs a 1D model with a single g x^(2 kappa) term");
            const auto r = sc::rs_expand(k->kappa, level, order);
            const auto report = sc::compare_with_transport(r, sc::transport_coupling_series(model, level, order));
            if (compare_json) {
                out.write(sc::comparison_to_json(report));
            } else if (report.agree) {
                out.write("AGREE through order " + std::to_string(report.agreed_through) + "\n");
            } else {
                out.write("DISAGREE at order " + std::to_string(*report.first_disagreement) + "\n");
            }
        };
    });

    // variational
    std::vector<double> point;
    sc::GridSpec grid;
    bool no_richardson = false;
    bool no_curve = false;
    auto* var = app.add_subcommand("variational", "Minimize the inverted-potential action at a point");
    var->add_option("--model", model_path, "Model file or builtin alias")->required();
    var->add_option("--point", point, "Target point x1,...,xn")->required()->delimiter(',');
    var->add_option("--horizon", grid.horizon, "Time horizon T (default 40/omega_min)");
    var->add_option("--nodes", grid.nodes, "Grid elements")->check(CLI::Range(8, 1000000));
    var->add_option("--tol", grid.tolerance, "Relative gradient tolerance");
    var->add_option("--max-iterations", grid.max_iterations, "Newton iteration cap");
    var->add_flag("--no-richardson", no_richardson, "Skip the N/2N extrapolation");
    var->add_flag("--no-curve", no_curve, "Omit the curve from the output");
    add_output(var, out, false);
    var->callback([&] {
        run = [&] {
            grid.richardson = !no_richardson;
            const auto model = sc::load_model(model_path);
            out.write(sc::variational_to_json(sc::minimize_action(model, point, grid), !no_curve));
        };
    });

    // scan
    double xmin = -2.0, xmax = 2.0, hbar = 1.0;
    int points = 41;
    bool variational_scan = false;
    std::vector<double> lower, upper;
    unsigned threads = sc::default_thread_count();
    auto* scan = app.add_subcommand("scan", "Tabulate closed forms or variational actions on a grid (CSV)");
    scan->add_option("--model", model_path, "Model file or builtin alias")->required();
    scan->add_option("--xmin", xmin, "Closed-form scan: left end");
    scan->add_option("--xmax", xmax, "Closed-form scan: right end");
    scan->add_option("--points", points, "Points (per axis for --variational)")->check(CLI::Range(2, 100000));
    scan->add_option("--hbar", hbar, "hbar for psi");
    scan->add_option("--n", level, "Oscillator level for psi");
    scan->add_option("--order", order, "hbar order of psi (0..2)");
    scan->add_flag("--variational", variational_scan, "Minimize the action at each grid point instead");
    scan->add_option("--lower", lower, "Lower end (closed form) or box corner; one value applies to all axes")->delimiter(',');
    scan->add_option("--upper", upper, "Upper end (closed form) or box corner; one value applies to all axes")->delimiter(',');
    scan->add_option("--nodes", grid.nodes, "Variational grid elements")->check(CLI::Range(8, 1000000));
    scan->add_option("--threads", threads, "Worker threads (default: SEMICLASSICAL_THREADS or hardware)");
    add_output(scan, out, false);
    scan->callback([&] {
        run = [&] {
            const auto model = sc::load_model(model_path);
            std::ostringstream os;
            os << std::setprecision(17);
            if (!variational_scan) {
                if (lower.size() > 1 || upper.size() > 1) throw sc::DimensionMismatch("closed-form scans are one-dimensional");
                if (!lower.empty()) xmin = lower[0];
                if (!upper.empty()) xmax = upper[0];
                const auto md = closed_form_model(model);
                std::vector<double> xs;
                for (int i = 0; i < points; ++i) xs.push_back(xmin + (xmax - xmin) * i / (points - 1));
                sc::write_scan_csv(os, sc::wavefunction_factors(md, hbar, level, std::min(order, 2), xs));
                out.write(os.str());
                return;
            }
            const std::size_t n = model.dim();
            broadcast_corner(lower, n, xmin);
            broadcast_corner(upper, n, xmax);
            if (lower.size() != n || upper.size() != n) throw sc::DimensionMismatch("box corners must match the model dimension");
            std::vector<std::vector<double>> grid_points;
            std::vector<int> idx(n, 0);
            while (true) {
                std::vector<double> x(n);
                for (std::size_t i = 0; i < n; ++i) x[i] = lower[i] + (upper[i] - lower[i]) * idx[i] / (points - 1);
                grid_points.push_back(x);
                std::size_t k = 0;
                while (k < n && ++idx[k] == points) idx[k++] = 0;
                if (k == n) break;
            }
            const auto results = sc::scan_variational(model, grid_points, grid, threads);
            for (std::size_t i = 0; i < n; ++i) os << 'x' << i + 1 << ',';
            os << "S0";
            for (std::size_t i = 0; i < n; ++i) os << ",p" << i + 1;
            os << ",hj_residual,ip_energy_drift\n";
            for (std::size_t r = 0; r < results.size(); ++r) {
                for (double v : grid_points[r]) os << v << ',';
                os << results[r].action;
                for (double p : results[r].momentum) os << ',' << p;
                os << ',' << results[r].hj_residual << ',' << results[r].ip_energy_drift << '\n';
            }
            out.write(os.str());
        };
    });

    // flow
    sc::FlowOptions flow_options;
    bool no_forward = false;
    auto* flow = app.add_subcommand("flow", "Integrate the gradient semi-flow of S0 backwards from a point");
    flow->add_option("--model", model_path, "Model file or builtin alias")->required();
    flow->add_option("--point", point, "Start point x1,...,xn")->required()->delimiter(',');
    flow->add_option("--t-span", flow_options.t_span, "Backward integration time");
    flow->add_option("--epsilon", flow_options.decay_epsilon, "Decay-rate slack as a fraction of omega_min");
    flow->add_option("--nodes", grid.nodes, "Variational grid elements")->check(CLI::Range(8, 1000000));
    flow->add_flag("--no-forward", no_forward, "Skip the forward escape check");
    add_output(flow, out, false);
    flow->callback([&] {
        run = [&] {
            flow_options.forward_check = !no_forward;
            const auto model = sc::load_model(model_path);
            const auto minimizer = sc::minimize_action(model, point, grid);
            const auto report = sc::semi_flow(model, point, sc::variational_gradient_provider(model, grid), flow_options, &minimizer);
            out.write(sc::flow_report_to_json(report));
        };
    });

    // resum / sweep
    std::string series_spec = "builtin:quartic-ground";
    double mu = 0.1;
    std::string pade_spec = "5,5";
    int coefficients = 12;
    int basis = 200;
    bool with_reference = true;
    auto* resum = app.add_subcommand("resum", "Borel-Pade resummation of an energy series");
    resum->add_option("--series", series_spec, "FILE or builtin:<model>-ground / builtin:<model>-n<level>");
    resum->add_option("--mu", mu, "Coupling")->check(CLI::PositiveNumber);
    resum->add_option("--pade", pade_spec, "Pade orders p,q");
    resum->add_option("--coefficients", coefficients, "Coefficients taken from a builtin series")->check(CLI::Range(1, 40));
    resum->add_option("--basis", basis, "Oscillator basis size for the spectral reference")->check(CLI::Range(50, 20000));
    resum->add_flag("!--no-reference", with_reference, "Skip the spectral reference");
    add_output(resum, out, false);

    double mu_min = 0.01, mu_max = 0.5;
    int steps = 50;
    auto* sweep = app.add_subcommand("sweep", "Borel-Pade and partial sums over a coupling range (CSV)");
    sweep->add_option("--series", series_spec, "FILE or builtin:<model>-ground / builtin:<model>-n<level>");
    sweep->add_option("--mu-min", mu_min, "Smallest coupling")->check(CLI::PositiveNumber);
    sweep->add_option("--mu-max", mu_max, "Largest coupling")->check(CLI::PositiveNumber);
    sweep->add_option("--steps", steps, "Number of couplings")->check(CLI::Range(2, 100000));
    sweep->add_option("--pade", pade_spec, "Pade orders p,q");
    sweep->add_option("--coefficients", coefficients, "Coefficients taken from a builtin series")->check(CLI::Range(1, 40));
    sweep->add_option("--basis", basis, "Oscillator basis size for the spectral reference")->check(CLI::Range(50, 20000));
    sweep->add_flag("!--no-reference", with_reference, "Skip the spectral reference");
    add_output(sweep, out, false);

    resum->callback([&] {
        const auto pq = parse_pade(pade_spec);
        run = [&, pq] {
            int k = 0, n = 0;
            const auto c = load_series(series_spec, coefficients, k, n);
            out.write(sc::resummation_to_json(sc::resum(c, mu, pq[0], pq[1], with_reference ? k : 0, n, basis)));
        };
    });
    sweep->callback([&] {
        const auto pq = parse_pade(pade_spec);
        run = [&, pq] {
            int k = 0, n = 0;
            const auto c = load_series(series_spec, coefficients, k, n);
            std::ostringstream os;
            os << std::setprecision(17) << "mu,partial_sum,borel_pade,reference\n";
            for (int i = 0; i < steps; ++i) {
                const double m = mu_min + (mu_max - mu_min) * i / (steps - 1);
                const auto r = sc::resum(c, m, pq[0], pq[1], with_reference ? k : 0, n, basis);
                os << m << ',' << r.partial_sums.back() << ',' << r.borel_pade_value << ',';
                if (r.reference_energy) os << *r.reference_energy;
                os << '\n';
            }
            out.write(os.str());
        };
    });

    // sternberg
    std::vector<double> eval_points;
    auto* st = app.add_subcommand("sternberg", "Formal linearizing coordinates of the gradient flow");
    st->add_option("--model", model_path, "Model file or builtin alias")->required();
    st->add_option("--truncation", truncation, "Truncation degree of the map (default 7)");
    st->add_option("--x", eval_points, "1D models: also evaluate the closed-form map at these points")->delimiter(',');
    add_output(st, out, false);
    st->callback([&] {
        run = [&] {
            const auto model = sc::load_model(model_path);
            const int D = truncation >= 0 ? truncation : 7;
            const auto action = sc::solve_hj_formal(model, D + 1);
            const auto map = sc::sternberg_linearize(action, D);
            const auto residual = sc::sternberg_pushforward_residual(map, action);
            json j;
            j["model"] = sc::model_to_json(model);
            j["truncation"] = D;
            j["mu"] = json::array();
            for (const auto& s : map.mu) j["mu"].push_back(sc::series_to_json(s));
            bool zero = true;
            for (const auto& r : residual) zero = zero && r.is_zero();
            j["pushforward_residual_zero"] = zero;
            if (!eval_points.empty()) {
                const auto md = closed_form_model(model);
                json values = json::array();
                for (double x : eval_points) {
                    json v{{"x", x}};
                    try {
                        v["y"] = sc::sternberg_1d(md, x);
                    } catch (const sc::DomainExceeded& e) {
                        v["y"] = nullptr;
                        v["error"] = e.to_json();
                    }
                    values.push_back(v);
                }
                j["closed_form"] = values;
                j["domain_radius"] = sc::sternberg_domain_radius(md);
            }
            out.write(j);
        };
    });

    // check-model
    int box_points = 41;
    auto* cm = app.add_subcommand("check-model", "Validate a model and sample the coercivity and convexity hypotheses");
    cm->add_option("--model", model_path, "Model file or builtin alias")->required();
    cm->add_option("--lower", lower, "Sample box lower corner (default -2)")->delimiter(',');
    cm->add_option("--upper", upper, "Sample box upper corner (default 2)")->delimiter(',');
    cm->add_option("--points", box_points, "Samples per axis")->check(CLI::Range(2, 10000));
    cm->add_option("--resonance-order", truncation, "Largest |l|_1 searched for frequency resonances (default 10)");
    add_output(cm, out, false);
    cm->callback([&] {
        run = [&] {
            const auto model = sc::load_model(model_path);
            const std::size_t n = model.dim();
            broadcast_corner(lower, n, -2.0);
            broadcast_corner(upper, n, 2.0);
            sc::SampleBox box{lower, upper, box_points};
            json j;
            j["model"] = sc::model_to_json(model);
            const int max_l1 = truncation >= 0 ? truncation : 10;
            const auto res = sc::find_frequency_resonance(model.omega, max_l1);
            j["resonance_search_order"] = max_l1;
            j["resonance"] = res ? json(*res) : json(nullptr);
            j["hypotheses"] = sc::hypothesis_report_to_json(sc::check_hypotheses(model, box));
            out.write(j);
        };
    });

    // diagnostics
    int diag_order = 10;
    auto* dg = app.add_subcommand("diagnostics", "Values S_l(0) of the ground corrections and their ratios to E_l");
    dg->add_option("--model", model_path, "Model file or builtin alias")->required();
    dg->add_option("--order", diag_order, "Highest correction l")->check(CLI::Range(2, 30));
    add_output(dg, out, false);
    dg->callback([&] {
        run = [&] {
            const auto model = sc::load_model(model_path);
            json j = sc::correction_diagnostics_to_json(sc::correction_diagnostics(model, diag_order));
            j["model"] = sc::model_to_json(model);
            out.write(j);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        run();
    } catch (const sc::Error& e) {
        std::cerr << e.to_json().dump() << '\n';
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"kind", "InternalError"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    }
    return 0;
}
