#include "pvc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "pvc/format.hpp"
#include "pvc/greens.hpp"
#include "pvc/stability.hpp"

namespace pvc {

namespace {

using nlohmann::json;

cplx json_complex(const json& v, const char* field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    if (v.is_string()) return parse_constant(v.get<std::string>());
    throw ConfigError(std::string("field '") + field + "' must be a number, [re, im] or a constant expression");
}

template <class T>
T json_get(const json& j, const char* field) {
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("field '") + field + "' is missing or has the wrong type");
    }
}

bool is_identity(const Domain& d) {
    const UniSeries& t = d.taylor0();
    if (std::abs(t[1] - 1.0) > 1e-14) return false;
    for (std::size_t k = 0; k <= t.order(); ++k)
        if (k != 1 && std::abs(t[k]) > 1e-14) return false;
    return true;
}

}  // namespace

Domain make_domain(const MapSpec& m) {
    const MapExpr expr = parse(m.expression, m.params);
    return Domain::from_expression(expr, m.inradius.value_or(-1.0), Domain::kDefaultEta, m.expression);
}

double ExperimentConfig::effective_horizon() const {
    if (horizon) return *horizon;
    if (beta >= 1.0) return 1e4;
    return std::pow(epsilon, -std::min((1.0 - beta) / 2.0, 0.25));
}

double ExperimentConfig::exit_radius() const { return beta >= 1.0 ? mu * epsilon : std::pow(epsilon, beta); }

ExperimentConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const char* const known[] = {"map",     "strengths", "epsilon", "beta",   "mu",      "horizon",
                                        "tol",     "samples",   "seed",    "output", "threads", "z1"};
    for (const auto& [key, _] : j.items())
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
            throw ConfigError("unknown config field '" + key + "'");

    ExperimentConfig c;
    const json& m = j.at("map");
    if (m.is_string()) {
        c.map.expression = m.get<std::string>();
    } else {
        c.map.expression = json_get<std::string>(m, "expression");
        if (m.contains("params"))
            for (const auto& [k, v] : m.at("params").items()) c.map.params[k] = json_complex(v, "params");
        if (m.contains("inradius")) c.map.inradius = json_get<double>(m, "inradius");
    }
    if (j.contains("strengths")) {
        const auto s = json_get<std::vector<double>>(j, "strengths");
        if (s.size() != 2) throw ConfigError("'strengths' must be [a1, a2]");
        c.strengths = {s[0], s[1]};
    }
    c.epsilon = json_get<double>(j, "epsilon");
    if (j.contains("beta")) c.beta = json_get<double>(j, "beta");
    if (j.contains("mu")) c.mu = json_get<double>(j, "mu");
    if (j.contains("horizon") && !j.at("horizon").is_null()) c.horizon = json_get<double>(j, "horizon");
    if (j.contains("tol")) c.tol = json_get<double>(j, "tol");
    if (j.contains("samples")) c.samples = json_get<int>(j, "samples");
    if (j.contains("seed")) c.seed = json_get<std::uint64_t>(j, "seed");
    if (j.contains("output")) c.output = json_get<std::string>(j, "output");
    if (j.contains("threads")) c.threads = json_get<unsigned>(j, "threads");
    if (j.contains("z1")) c.z1 = json_complex(j.at("z1"), "z1");

    if (!(c.beta > 0.0 && c.beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (c.samples < 1) throw ConfigError("samples must be >= 1");
    if (!(c.mu > 1.0)) throw ConfigError("mu must exceed 1");
    if (c.horizon && !(*c.horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(c.tol >= 1e-13 && c.tol <= 1e-6)) throw ConfigError("tol must lie in [1e-13, 1e-6]");
    return c;
}

std::string to_json(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "{\"map\":{\"expression\":" << json(c.map.expression).dump() << ",\"params\":{";
    bool first = true;
    for (const auto& [k, v] : c.map.params) {
        os << (first ? "" : ",") << json(k).dump() << ":" << fmt17(v);
        first = false;
    }
    os << "}";
    if (c.map.inradius) os << ",\"inradius\":" << fmt17(*c.map.inradius);
    os << "},\"strengths\":[" << fmt17(c.strengths.a1) << "," << fmt17(c.strengths.a2) << "],\"epsilon\":"
       << fmt17(c.epsilon) << ",\"beta\":" << fmt17(c.beta) << ",\"mu\":" << fmt17(c.mu)
       << ",\"horizon\":" << fmt17(c.effective_horizon()) << ",\"tol\":" << fmt17(c.tol) << ",\"samples\":" << c.samples
       << ",\"seed\":" << c.seed << "}";
    return os.str();
}

void validate(const ExperimentConfig& c, const Domain& d) {
    if (!(c.epsilon < d.inradius() / 10)) throw ConfigError("epsilon must be below inradius/10 = " + fmt17(d.inradius() / 10));
    if (!(c.exit_radius() < d.inradius())) throw ConfigError("exit radius lies outside the inradius");
    if (c.strengths.a1 == 0.0 || c.strengths.a2 == 0.0) throw ConfigError("strengths must be non-zero");
    if (std::abs(d.d2phi0()) > 1e-10 * std::abs(d.dphi0())) throw ConfigError("0 is not stationary for the map");
}

std::vector<std::array<cplx, 2>> draw_initial_pairs(double epsilon, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto draw = [&] { return std::polar(epsilon * std::sqrt(u01(rng)), kTwoPi * u01(rng)); };
    std::vector<std::array<cplx, 2>> out;
    out.reserve(samples);
    while (int(out.size()) < samples) {
        const cplx z1 = draw(), z2 = draw();
        if (std::abs(z1 - z2) >= 1e-3 * epsilon) out.push_back({z1, z2});
    }
    return out;
}

std::vector<ExitTimeRecord> exit_time(const ExperimentConfig& c, const Domain& d) {
    validate(c, d);
    const auto pairs = draw_initial_pairs(c.epsilon, c.samples, c.seed);
    const double horizon = c.effective_horizon();
    const bool reducible = c.strengths.a1 * c.strengths.a2 > 0.0;
    EventSpec ev;
    ev.exit_radius = c.exit_radius();
    ev.record_samples = false;

    std::vector<ExitTimeRecord> out(pairs.size());
    auto run_one = [&](std::size_t i) {
        ExitTimeRecord& r = out[i];
        r.index = i;
        r.epsilon = c.epsilon;
        r.beta = c.beta;
        r.z1 = pairs[i][0];
        r.z2 = pairs[i][1];
        const VortexState s0{0.0, r.z1, r.z2, c.strengths.a1, c.strengths.a2};
        try {
            const Trajectory tr =
                reducible ? integrate_reduced(d, s0, horizon, c.tol, ev) : integrate(d, s0, horizon, c.tol, ev);
            const Event& last = tr.events.back();
            r.reason = last.kind;
            r.t_exit = last.kind == EventKind::Horizon ? std::numeric_limits<double>::infinity() : last.t;
            r.H_drift = tr.stats.max_H_drift;
            r.max_excursion = tr.stats.max_abs_z / c.epsilon;
        } catch (const std::exception& e) {
            r.error = e.what();
            r.t_exit = std::numeric_limits<double>::quiet_NaN();
            if (const auto* u = dynamic_cast<const StepUnderflowError*>(&e))
                r.max_excursion = std::max(std::abs(u->last_state().z1), std::abs(u->last_state().z2)) / c.epsilon;
        }
    };

    // Each worker owns whole samples; results land in their index slot.
    const unsigned workers =
        std::max(1u, std::min<unsigned>(c.threads ? c.threads : std::thread::hardware_concurrency(), unsigned(out.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < out.size();) run_one(i);
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return out;
}

std::vector<ExitTimeRecord> exit_time(const ExperimentConfig& c) { return exit_time(c, make_domain(c.map)); }

std::string to_json(const ExitTimeRecord& r) {
    std::ostringstream os;
    os << "{\"index\":" << r.index << ",\"epsilon\":" << fmt17(r.epsilon) << ",\"beta\":" << fmt17(r.beta)
       << ",\"z1\":" << fmt17(r.z1) << ",\"z2\":" << fmt17(r.z2) << ",\"t_exit\":" << fmt17(r.t_exit)
       << ",\"censored\":" << (r.censored() ? "true" : "false") << ",\"reason\":\""
       << (r.error.empty() ? to_string(r.reason) : "error") << "\",\"H_drift\":" << fmt17(r.H_drift)
       << ",\"max_excursion\":" << fmt17(r.max_excursion);
    if (!r.error.empty()) os << ",\"error\":" << json(r.error).dump();
    os << "}";
    return os.str();
}

void write_records(std::ostream& os, const ExperimentConfig& c, const std::vector<ExitTimeRecord>& records) {
    os << "{\"generator\":\"" << kGeneratorName << "\",\"seed\":" << c.seed << ",\"config\":" << to_json(c) << "}\n";
    std::vector<const ExitTimeRecord*> sorted;
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
        return a->epsilon != b->epsilon ? a->epsilon > b->epsilon : a->index < b->index;
    });
    for (const auto* r : sorted) os << to_json(*r) << "\n";
}

SweepResult sweep(const ExperimentConfig& c, const std::vector<double>& epsilons) {
    if (epsilons.empty()) throw ConfigError("sweep needs at least one epsilon");
    const Domain d = make_domain(c.map);
    SweepResult res;
    std::vector<double> lx, ly;
    for (double eps : epsilons) {
        ExperimentConfig ce = c;
        ce.epsilon = eps;
        auto recs = exit_time(ce, d);
        SweepRow row;
        row.epsilon = eps;
        row.horizon = ce.effective_horizon();
        row.samples = int(recs.size());
        row.min_t_exit = std::numeric_limits<double>::infinity();
        int censored = 0;
        for (const auto& r : recs) {
            if (!r.error.empty()) {
                ++row.failures;
                continue;
            }
            row.max_excursion = std::max(row.max_excursion, r.max_excursion);
            if (r.censored()) {
                ++censored;
            } else if (r.reason == EventKind::Exit) {
                ++row.exits;
                row.min_t_exit = std::min(row.min_t_exit, r.t_exit);
            }
        }
        row.censored_fraction = double(censored) / row.samples;
        if (std::isfinite(row.min_t_exit) && row.min_t_exit > 0) {
            lx.push_back(std::log(eps));
            ly.push_back(std::log(row.min_t_exit));
        }
        res.rows.push_back(row);
        res.records.insert(res.records.end(), recs.begin(), recs.end());
    }
    if (lx.size() >= 2) {
        const double n = double(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
            syy += ly[i] * ly[i];
        }
        const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
        if (vx > 0) {
            res.fit.available = true;
            res.fit.slope = cxy / vx;
            res.fit.intercept = (sy - res.fit.slope * sx) / n;
            res.fit.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
        }
    }
    return res;
}

void write_csv(std::ostream& os, const SweepResult& r) {
    os << "epsilon,horizon,samples,exits,failures,censored_fraction,min_t_exit,max_excursion\n";
    for (const auto& row : r.rows)
        os << fmt17(row.epsilon) << "," << fmt17(row.horizon) << "," << row.samples << "," << row.exits << ","
           << row.failures << "," << fmt17(row.censored_fraction) << ","
           << (std::isfinite(row.min_t_exit) ? fmt17(row.min_t_exit) : "inf") << "," << fmt17(row.max_excursion) << "\n";
    os << "\nfit,slope,intercept,r2\n";
    if (r.fit.available)
        os << "available," << fmt17(r.fit.slope) << "," << fmt17(r.fit.intercept) << "," << fmt17(r.fit.r2) << "\n";
    else
        os << "unavailable,,,\n";
}

double degenerate_invariant(cplx z) {
    return std::abs(1.0 - z * z) / ((1.0 - std::norm(z)) * std::abs(z - std::conj(z)));
}

DegenerateResult degenerate_run(const ExperimentConfig& c) {
    const Domain d = make_domain(c.map);
    if (!is_identity(d)) throw ConfigError("the degenerate run needs the identity map");
    if (c.strengths.a1 + c.strengths.a2 != 0.0 || c.strengths.a1 == 0.0)
        throw ConfigError("the degenerate run needs a1 = -a2 != 0");
    const cplx z1 = c.z1.value_or(c.epsilon * cplx(2.0, 1.0) / std::sqrt(5.0));
    if (z1.imag() == 0.0) throw ConfigError("z1 must be off the real axis");

    ExperimentConfig ce = c;
    ce.epsilon = std::abs(z1);
    EventSpec ev;
    ev.exit_radius = std::pow(ce.epsilon, ce.beta);
    DegenerateResult res;
    res.trajectory = integrate(d, {0.0, z1, std::conj(z1), c.strengths.a1, c.strengths.a2}, c.horizon.value_or(1e3),
                               c.tol, ev);
    const double i0 = degenerate_invariant(z1);
    for (const auto& s : res.trajectory.samples) {
        res.ansatz_error = std::max(res.ansatz_error, std::abs(s.state.z1 - std::conj(s.state.z2)));
        res.invariant_drift = std::max(res.invariant_drift, std::abs(degenerate_invariant(s.state.z1) - i0) / i0);
    }
    const Event& last = res.trajectory.events.back();
    res.exited = last.kind == EventKind::Exit;
    res.t_exit = last.t;
    if (res.ansatz_error > 1e-8)
        throw NumericalError("conjugacy ansatz violated by " + fmt17(res.ansatz_error) + "; check the integrator");
    return res;
}

}  // namespace pvc
