#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pvc/format.hpp"
#include "pvc/harness.hpp"
#include "pvc/stability.hpp"

namespace pvc {

namespace {

// --map/--param/--inradius, or --domain for the built-in families.
struct MapOptions {
    std::string map;
    std::vector<std::string> params;
    double inradius = -1.0;
    std::string builtin;

    void add_to(CLI::App* app) {
        app->add_option("--map", map, "Map expression in z");
        app->add_option("--param", params, "Parameter binding name=value (repeatable)");
        app->add_option("--inradius", inradius, "Inradius; estimated when omitted");
        app->add_option("--domain", builtin, "Built-in domain: disc, strip, tan:A, hexagon:DELTA, poly:SEED");
    }

    MapSpec map_spec() const {
        MapSpec m;
        m.expression = map;
        for (const auto& p : params) {
            const auto eq = p.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects name=value, got '" + p + "'");
            m.params[p.substr(0, eq)] = parse_constant(p.substr(eq + 1));
        }
        if (inradius > 0) m.inradius = inradius;
        return m;
    }

    Domain domain() const {
        if (!builtin.empty()) {
            if (!map.empty()) throw ConfigError("--map and --domain are exclusive");
            const auto colon = builtin.find(':');
            const std::string name = builtin.substr(0, colon);
            const std::string arg = colon == std::string::npos ? "" : builtin.substr(colon + 1);
            auto number = [&] {
                if (arg.empty()) throw ConfigError("--domain " + name + " needs a value, e.g. " + name + ":1");
                return parse_constant(arg).real();
            };
            if (name == "disc") return domains::disc();
            if (name == "strip") return domains::strip();
            if (name == "tan") return domains::tan_family(number());
            if (name == "hexagon") return domains::hexagon(number());
            if (name == "poly") return domains::random_polynomial(std::uint64_t(number()));
            throw ConfigError("unknown built-in domain '" + name + "'");
        }
        if (map.empty()) throw ConfigError("one of --map or --domain is required");
        return make_domain(map_spec());
    }
};

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// Writes to `path` when given, else to `out`.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& body) {
    if (path.empty() || path == "-") {
        body(out);
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    body(f);
}

}  // namespace

int run_cli(int argc, char** argv) { return run_cli(argc, argv, std::cout, std::cerr); }

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two point vortices in planar domains: stability, normal forms and exit times", "pvc"};
    app.require_subcommand(1);

    MapOptions mo;
    double a1 = 1.0, a2 = 1.0, horizon = 10.0, tol = 1e-8, sample_dt = 0.0;
    std::string z1_text, z2_text, config_path, output;
    bool reduced = false;
    int degree = 8;
    VerdictParams vp;
    std::vector<double> epsilons;

    auto* classify_cmd = app.add_subcommand("classify", "Stability class and margin of the stationary point 0");
    mo.add_to(classify_cmd);
    classify_cmd->add_option("--a1", a1);
    classify_cmd->add_option("--a2", a2);

    auto* simulate_cmd = app.add_subcommand("simulate", "Integrate one vortex pair; JSON lines");
    mo.add_to(simulate_cmd);
    simulate_cmd->add_option("--z1", z1_text, "Initial z1, e.g. 0.01+0.02*i")->required();
    simulate_cmd->add_option("--z2", z2_text, "Initial z2")->required();
    simulate_cmd->add_option("--a1", a1);
    simulate_cmd->add_option("--a2", a2);
    simulate_cmd->add_option("--horizon", horizon);
    simulate_cmd->add_option("--tol", tol);
    simulate_cmd->add_option("--sample-dt", sample_dt, "Minimum time between output samples");
    simulate_cmd->add_flag("--reduced", reduced, "Integrate the (B, xi) system");
    simulate_cmd->add_option("-o,--output", output);

    auto* exit_cmd = app.add_subcommand("exit-time", "Seeded exit-time experiment; JSON lines");
    exit_cmd->add_option("--config", config_path)->required();
    exit_cmd->add_option("-o,--output", output, "Overrides the config's output path");

    auto* sweep_cmd = app.add_subcommand("sweep", "Exit times over several epsilons; CSV summary and fit");
    sweep_cmd->add_option("--config", config_path)->required();
    sweep_cmd->add_option("--epsilons", epsilons)->required()->delimiter(',');
    sweep_cmd->add_option("-o,--output", output, "CSV destination; records go to the config's output path");

    auto* coeffs_cmd = app.add_subcommand("coeffs", "Angle-averaged normal-form coefficients C(m,n); CSV");
    mo.add_to(coeffs_cmd);
    coeffs_cmd->add_option("--a1", a1);
    coeffs_cmd->add_option("--a2", a2);
    coeffs_cmd->add_option("--degree", degree);

    auto* verdict_cmd = app.add_subcommand("verdict", "Confinement verdict for initial data; JSON");
    mo.add_to(verdict_cmd);
    verdict_cmd->add_option("--z1", z1_text)->required();
    verdict_cmd->add_option("--z2", z2_text)->required();
    verdict_cmd->add_option("--a1", a1);
    verdict_cmd->add_option("--a2", a2);
    verdict_cmd->add_option("--C", vp.C);
    verdict_cmd->add_option("--nu", vp.nu);
    verdict_cmd->add_option("--kmax", vp.kmax);
    verdict_cmd->add_option("--degree", vp.degree);

    auto* degenerate_cmd = app.add_subcommand("degenerate", "Opposite-strength mirror pair on the disc; JSON lines");
    degenerate_cmd->add_option("--config", config_path)->required();
    degenerate_cmd->add_option("-o,--output", output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (classify_cmd->parsed()) {
            out << to_json(classify(mo.domain(), {a1, a2})) << "\n";
        } else if (simulate_cmd->parsed()) {
            const Domain d = mo.domain();
            const VortexState s0{0.0, parse_constant(z1_text), parse_constant(z2_text), a1, a2};
            EventSpec ev;
            ev.sample_dt = sample_dt;
            const Trajectory tr = reduced ? integrate_reduced(d, s0, horizon, tol, ev) : integrate(d, s0, horizon, tol, ev);
            emit(output, out, [&](std::ostream& os) { write_jsonl(os, tr); });
        } else if (exit_cmd->parsed()) {
            ExperimentConfig c = load_config(config_path);
            if (!output.empty()) c.output = output;
            const auto recs = exit_time(c);
            emit(c.output, out, [&](std::ostream& os) { write_records(os, c, recs); });
        } else if (sweep_cmd->parsed()) {
            const ExperimentConfig c = load_config(config_path);
            const SweepResult r = sweep(c, epsilons);
            if (!c.output.empty()) emit(c.output, out, [&](std::ostream& os) { write_records(os, c, r.records); });
            emit(output, out, [&](std::ostream& os) { write_csv(os, r); });
        } else if (coeffs_cmd->parsed()) {
            const auto ex = hamiltonian_expansion(mo.domain(), {a1, a2}, degree);
            out << to_csv(action_coefficients(ex.poly, ex.lambda));
        } else if (verdict_cmd->parsed()) {
            const Verdict v =
                confinement_verdict(mo.domain(), {a1, a2}, parse_constant(z1_text), parse_constant(z2_text), vp);
            out << to_json(v) << "\n";
        } else if (degenerate_cmd->parsed()) {
            ExperimentConfig c = load_config(config_path);
            if (!output.empty()) c.output = output;
            const DegenerateResult r = degenerate_run(c);
            emit(c.output, out, [&](std::ostream& os) {
                write_jsonl(os, r.trajectory);
                os << "{\"invariant_drift\":" << fmt17(r.invariant_drift) << ",\"ansatz_error\":" << fmt17(r.ansatz_error)
                   << ",\"exited\":" << (r.exited ? "true" : "false") << ",\"t_exit\":" << fmt17(r.t_exit) << "}\n";
            });
        }
    } catch (const Error& e) {
        const bool config = dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
                            dynamic_cast<const UnboundParameterError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
                            dynamic_cast<const NotStationaryError*>(&e);
        err << (config ? "configuration error: " : "numerical failure: ") << e.what() << "\n";
        return config ? 1 : 2;
    }
    return 0;
}

}  // namespace pvc
