#pragma once

// Experiment drivers: seeded exit-time measurements, epsilon sweeps with
// power-law fits, the opposite-strength disc counterexample, and the CLI.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvc/domain.hpp"
#include "pvc/dynamics.hpp"

namespace pvc {

struct MapSpec {
    std::string expression = "z";
    ParamMap params;
    /// Estimated from the map when absent.
    std::optional<double> inradius;
};

Domain make_domain(const MapSpec& m);

struct ExperimentConfig {
    MapSpec map;
    Strengths strengths;
    double epsilon = 0.02;
    double beta = 1.0;
    double mu = 3.0;
    /// Defaults to 1e4 for beta = 1 and eps^-alpha, alpha = min((1-beta)/2, 1/4), otherwise.
    std::optional<double> horizon;
    double tol = 1e-8;
    int samples = 1;
    std::uint64_t seed = 0;
    std::string output;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 0;
    /// Initial z1 for the degenerate run (z2 = conj z1); defaults to eps (2 + i)/sqrt 5.
    std::optional<cplx> z1;

    double effective_horizon() const;
    /// eps^beta, or mu eps when beta = 1.
    double exit_radius() const;
};

/// Parses the JSON config. Field names: map{expression, params, inradius},
/// strengths[a1, a2], epsilon, beta, mu, horizon, tol, samples, seed, output,
/// threads, z1. Complex values are [re, im] or a number. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
std::string to_json(const ExperimentConfig& c);

/// Throws ConfigError unless the config's invariants hold for `d` and 0 is
/// stationary for the map.
void validate(const ExperimentConfig& c, const Domain& d);

inline constexpr const char* kGeneratorName = "mt19937_64";

/// Independent area-uniform draws from |z| < eps, rejecting pairs closer than 1e-3 eps.
std::vector<std::array<cplx, 2>> draw_initial_pairs(double epsilon, int samples, std::uint64_t seed);

struct ExitTimeRecord {
    std::size_t index = 0;
    double epsilon = 0.0, beta = 1.0;
    cplx z1, z2;
    double t_exit = 0.0;  // +inf when censored at the horizon
    EventKind reason = EventKind::Horizon;
    double H_drift = 0.0;
    /// max_k max_t |z_k| / eps.
    double max_excursion = 0.0;
    /// Non-empty when the integration failed; the record is then not an exit.
    std::string error;

    bool censored() const { return reason == EventKind::Horizon && error.empty(); }
};

std::vector<ExitTimeRecord> exit_time(const ExperimentConfig& c, const Domain& d);
std::vector<ExitTimeRecord> exit_time(const ExperimentConfig& c);

/// Header line (generator, seed, config) then one JSON object per record.
void write_records(std::ostream& os, const ExperimentConfig& c, const std::vector<ExitTimeRecord>& records);
std::string to_json(const ExitTimeRecord& r);

struct SweepRow {
    double epsilon = 0.0, horizon = 0.0;
    int samples = 0, exits = 0, failures = 0;
    double censored_fraction = 0.0;
    double min_t_exit = 0.0;  // +inf when nothing exited
    double max_excursion = 0.0;
};

struct PowerFit {
    bool available = false;  // needs two epsilons with an uncensored exit
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

struct SweepResult {
    std::vector<ExitTimeRecord> records;
    std::vector<SweepRow> rows;
    PowerFit fit;  // log min t_exit against log eps
};

/// Runs exit_time per epsilon. The horizon default is re-evaluated per epsilon.
SweepResult sweep(const ExperimentConfig& c, const std::vector<double>& epsilons);
/// Per-epsilon table, a blank line, then the fit table.
void write_csv(std::ostream& os, const SweepResult& r);

struct DegenerateResult {
    Trajectory trajectory;
    /// max |I(t) - I(0)| / I(0) for I = |1 - z^2| / ((1 - |z|^2) |z - conj z|), z = z1.
    double invariant_drift = 0.0;
    /// max |z1 - conj z2| along the run.
    double ansatz_error = 0.0;
    bool exited = false;
    double t_exit = 0.0;
};

/// Mirror pair z2 = conj z1 with a1 = -a2 on the disc, integrated unreduced
/// with exit radius |z1(0)|^beta. Throws NumericalError if the conjugacy
/// ansatz breaks by more than 1e-8.
DegenerateResult degenerate_run(const ExperimentConfig& c);
double degenerate_invariant(cplx z);

/// Subcommands classify, simulate, exit-time, sweep, coeffs, verdict, degenerate.
/// Returns 0 on success, 1 on configuration errors, 2 on numerical failures.
int run_cli(int argc, char** argv);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pvc
