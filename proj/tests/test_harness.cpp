#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pvc/harness.hpp"
#include "pvc/stability.hpp"

using namespace pvc;
using namespace std::complex_literals;

namespace {

ExperimentConfig degenerate_disc(double eps) {
    ExperimentConfig c;
    c.map.expression = "z";
    c.map.inradius = 1.0;
    c.strengths = {1.0, -1.0};
    c.epsilon = eps;
    c.beta = 0.8;
    c.samples = 16;
    c.seed = 7;
    return c;
}

ExperimentConfig strip_config(double eps) {
    ExperimentConfig c;
    c.map.expression = domains::kStrip;
    c.map.inradius = 1.0;
    c.epsilon = eps;
    c.beta = 0.8;
    c.samples = 8;
    c.seed = 99;
    return c;
}

int run(std::vector<std::string> args, std::string& out, std::string& err) {
    args.insert(args.begin(), "pvc");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream o, e;
    const int rc = run_cli(int(argv.size()), argv.data(), o, e);
    out = o.str();
    err = e.str();
    return rc;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse_config(R"js({"map":{"expression":"a*(tan(i*z)+tan(i*z/2))","params":{"a":1.5},"inradius":0.4},
        "strengths":[1,2],"epsilon":0.01,"beta":0.8,"mu":4,"horizon":50,"tol":1e-9,"samples":3,"seed":42,"output":"x.jsonl"})js");
    CHECK(c.map.params.at("a") == cplx(1.5));
    CHECK(*c.map.inradius == 0.4);
    CHECK(c.strengths.a2 == 2.0);
    CHECK(c.epsilon == 0.01);
    CHECK(c.beta == 0.8);
    CHECK(c.mu == 4.0);
    CHECK(c.effective_horizon() == 50.0);
    CHECK(c.samples == 3);
    CHECK(c.seed == 42u);
    CHECK(c.output == "x.jsonl");
    CHECK(c.exit_radius() == doctest::Approx(std::pow(0.01, 0.8)));
    CHECK(parse_config(to_json(c)).epsilon == c.epsilon);

    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"map":"z","epsilon":0.01,"colour":1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"map":"z","epsilon":0.01,"beta":1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"map":"z","epsilon":0.01,"samples":0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"map":"z","epsilon":"small"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"map":"z"})"), ConfigError);
}

TEST_CASE("horizon defaults and validation") {
    ExperimentConfig c;
    c.beta = 1.0;
    CHECK(c.effective_horizon() == 1e4);
    CHECK(c.exit_radius() == doctest::Approx(3 * c.epsilon));
    c = strip_config(0.04);
    CHECK(c.effective_horizon() == doctest::Approx(std::pow(0.04, -0.1)));
    c.beta = 0.2;
    CHECK(c.effective_horizon() == doctest::Approx(std::pow(0.04, -0.25)));

    const Domain disc = domains::disc();
    ExperimentConfig big = degenerate_disc(0.2);
    CHECK_THROWS_AS(validate(big, disc), ConfigError);
    ExperimentConfig off;
    off.map.expression = "z+0.1*z^2";
    off.map.inradius = 1.0;
    CHECK_THROWS_AS(exit_time(off), ConfigError);
}

TEST_CASE("initial pairs are area-uniform on the epsilon disc") {
    const double eps = 0.03;
    const auto pairs = draw_initial_pairs(eps, 100000, 2024);
    double m1 = 0, m2 = 0;
    for (const auto& p : pairs) {
        CHECK_FALSE(std::abs(p[0]) >= eps);
        CHECK_FALSE(std::abs(p[0] - p[1]) < 1e-3 * eps);
        m1 += std::norm(p[0]) / (eps * eps);
        m2 += std::norm(p[1]) / (eps * eps);
    }
    CHECK(std::abs(m1 / pairs.size() - 0.5) <= 0.01);
    CHECK(std::abs(m2 / pairs.size() - 0.5) <= 0.01);
    CHECK(draw_initial_pairs(eps, 5, 1) == draw_initial_pairs(eps, 5, 1));
    CHECK(draw_initial_pairs(eps, 5, 1) != draw_initial_pairs(eps, 5, 2));
}

TEST_CASE("opposite strengths on the disc leave the epsilon^beta disc quickly") {
    auto c = degenerate_disc(0.05);
    const auto recs = exit_time(c);
    REQUIRE(recs.size() == 16);
    for (const auto& r : recs) {
        CHECK(r.error.empty());
        CHECK(r.reason == EventKind::Exit);
        CHECK(std::isfinite(r.t_exit));
        CHECK(r.t_exit < 1.0);
        CHECK(r.t_exit < c.effective_horizon());
    }
}

TEST_CASE("exit-time output is deterministic and independent of the worker count") {
    auto c = degenerate_disc(0.04);
    c.samples = 12;
    std::ostringstream a, b, d;
    c.threads = 1;
    write_records(a, c, exit_time(c));
    c.threads = 4;
    write_records(b, c, exit_time(c));
    write_records(d, c, exit_time(c));
    CHECK(a.str() == b.str());
    CHECK(b.str() == d.str());

    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    const auto header = nlohmann::json::parse(line);
    CHECK(header["generator"] == kGeneratorName);
    CHECK(header["seed"] == 7);
    std::size_t expect = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["index"] == expect++);
        CHECK(j["reason"] == "exit");
    }
    CHECK(expect == 12);
}

TEST_CASE("critical strip: no exits before the guaranteed window") {
    auto c = strip_config(0.04);
    const auto recs = exit_time(c);
    for (const auto& r : recs) {
        CHECK(r.error.empty());
        CHECK(r.censored());
        CHECK(r.max_excursion < std::pow(0.04, 0.8) / 0.04);
        // censoring consistency
        CHECK_FALSE((r.reason == EventKind::Exit && r.t_exit == c.effective_horizon()));
    }
}

TEST_CASE("identity map with equal strengths stays confined") {
    ExperimentConfig c;
    c.map.expression = "z";
    c.map.inradius = 1.0;
    c.epsilon = 0.02;
    c.samples = 4;
    c.seed = 5;
    c.tol = 1e-6;
    c.horizon = 1e3;
    for (const auto& r : exit_time(c)) {
        CHECK(r.censored());
        CHECK(r.max_excursion < 3.0);
        CHECK(r.H_drift <= 100 * c.tol);
    }
}

TEST_CASE("disc exit statistics scale with epsilon") {
    // Near the center the slow (B) motion is linear and the fast (xi) motion
    // only sets a phase, so max|z|/eps is scale-free to leading order.
    ExperimentConfig c;
    c.map.expression = "z";
    c.map.inradius = 1.0;
    c.samples = 16;
    c.seed = 11;
    c.tol = 1e-7;
    c.horizon = 25.0;
    c.epsilon = 0.01;
    auto small = exit_time(c);
    c.epsilon = 0.02;
    auto large = exit_time(c);
    std::vector<double> qs, ql;
    for (const auto& r : small) qs.push_back(r.max_excursion);
    for (const auto& r : large) ql.push_back(r.max_excursion);
    std::sort(qs.begin(), qs.end());
    std::sort(ql.begin(), ql.end());
    for (std::size_t k : {std::size_t(4), std::size_t(8), std::size_t(12)})
        CHECK(std::abs(qs[k] - ql[k]) <= 0.05 * qs[k]);
}

TEST_CASE("sweeps") {
    SUBCASE("degenerate disc: finite exit times, monotone in epsilon") {
        auto c = degenerate_disc(0.08);
        c.samples = 8;
        const auto r = sweep(c, {0.08, 0.04, 0.02});
        REQUIRE(r.rows.size() == 3);
        for (const auto& row : r.rows) {
            CHECK(row.exits == row.samples);
            CHECK(std::isfinite(row.min_t_exit));
        }
        CHECK(r.rows[0].min_t_exit > r.rows[1].min_t_exit);
        CHECK(r.rows[1].min_t_exit > r.rows[2].min_t_exit);
        CHECK(r.fit.available);
        CHECK(r.fit.slope > 0);
        std::ostringstream os;
        write_csv(os, r);
        CHECK(os.str().find("\nfit,slope,intercept,r2\navailable,") != std::string::npos);
    }
    SUBCASE("strip: fully censored, fit unavailable") {
        auto c = strip_config(0.08);
        c.samples = 4;
        const auto r = sweep(c, {0.08, 0.04, 0.02});
        for (const auto& row : r.rows) CHECK(row.censored_fraction == 1.0);
        CHECK_FALSE(r.fit.available);
        std::ostringstream os;
        write_csv(os, r);
        CHECK(os.str().find("unavailable") != std::string::npos);
    }
}

TEST_CASE("degenerate mirror pair") {
    auto c = degenerate_disc(0.05);
    c.z1 = 0.02 + 0.01i;
    c.tol = 1e-10;
    const DegenerateResult r = degenerate_run(c);
    CHECK(r.invariant_drift <= 1e-6);
    CHECK(r.ansatz_error <= 1e-8);
    CHECK(r.exited);

    for (double eps : {0.05, 0.02}) {
        auto ce = degenerate_disc(eps);
        ce.z1 = eps * std::exp(0.4i);
        const auto re = degenerate_run(ce);
        CHECK(re.exited);
        const VortexState& f = re.trajectory.final_state;
        CHECK(std::max(std::abs(f.z1), std::abs(f.z2)) == doctest::Approx(std::pow(eps, 0.8)).epsilon(1e-5));
    }

    // Reflection reverses orientation: the conjugate trajectory belongs to the
    // conjugate data with both strengths negated.
    auto cm = c;
    cm.z1 = std::conj(*c.z1);
    cm.strengths = {-1.0, 1.0};
    const DegenerateResult m = degenerate_run(cm);
    CHECK(m.t_exit == doctest::Approx(r.t_exit).epsilon(1e-9));
    CHECK(std::abs(m.trajectory.final_state.z1 - std::conj(r.trajectory.final_state.z1)) < 1e-9);

    auto bad = c;
    bad.strengths = {1.0, 1.0};
    CHECK_THROWS_AS(degenerate_run(bad), ConfigError);
    bad = c;
    bad.map.expression = domains::kStrip;
    CHECK_THROWS_AS(degenerate_run(bad), ConfigError);
}

TEST_CASE("command line") {
    std::string out, err;
    CHECK(run({"classify", "--map", "tan(i*pi*z/4)"}, out, err) == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["class"] == "critical");
    CHECK(std::abs(j["margin"].get<double>()) <= 1e-10);

    CHECK(run({"coeffs", "--map", "a*(tan(i*z)+tan(i*z/2))", "--param", "a=1", "--a1", "1", "--a2", "1", "--degree",
               "8"},
              out, err) == 0);
    const auto rep = classify(domains::tan_family(1.0));
    const double c42 = 1.5 * 2.0 * std::pow(1.5, 4) * rep.omega_c;
    const auto at = out.find("\n4,2,");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(out.substr(at + 5)) == doctest::Approx(c42).epsilon(1e-8));

    const auto cfg = write_temp("pvc_degenerate.json",
                                R"({"map":{"expression":"z","inradius":1},"strengths":[1,-1],"epsilon":0.05,"beta":0.8,"samples":4,"seed":3})");
    CHECK(run({"exit-time", "--config", cfg.string()}, out, err) == 0);
    std::istringstream in(out);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        const auto r = nlohmann::json::parse(line);
        if (n++ == 0) continue;
        CHECK(r["reason"] == "exit");
        CHECK(r["t_exit"].is_number());
    }
    CHECK(n == 5);
    std::string again;
    run({"exit-time", "--config", cfg.string()}, again, err);
    CHECK(again == out);

    CHECK(run({"degenerate", "--config", cfg.string()}, out, err) == 0);
    CHECK(out.find("\"invariant_drift\"") != std::string::npos);

    CHECK(run({"simulate", "--domain", "disc", "--z1", "0.1", "--z2", "-0.1", "--horizon", "1"}, out, err) == 0);
    CHECK(out.find("\"event\":\"horizon\"") != std::string::npos);
    CHECK(run({"verdict", "--domain", "tan:1", "--z1", "0.013+0.004*i", "--z2", "-0.006+0.011*i"}, out, err) == 0);
    CHECK(nlohmann::json::parse(out)["conclusion"] == "confined");

    CHECK(run({"classify", "--bogus"}, out, err) == 1);
    CHECK(run({"frobnicate"}, out, err) == 1);
    CHECK(run({"exit-time", "--config", write_temp("pvc_bad.json", "{\"map\":").string()}, out, err) == 1);
    CHECK(run({"classify", "--map", "z+0.1*z^2", "--inradius", "1"}, out, err) == 1);
    CHECK(run({"classify", "--map", "a*z"}, out, err) == 1);
    // a start outside the margin is a numerical failure
    CHECK(run({"simulate", "--domain", "disc", "--z1", "0.9999999", "--z2", "0"}, out, err) == 2);
}
