#pragma once

// Two-vortex Kirchhoff-Routh dynamics: vector fields, the (B, xi) reduction
// and an adaptive DOP853 integrator with event detection.

#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "pvc/domain.hpp"
#include "pvc/errors.hpp"
#include "pvc/state.hpp"

namespace pvc {

/// Velocities (dz1/dt, dz2/dt). Throws CoincidenceError below the collision floor.
std::pair<cplx, cplx> velocity(const Domain& d, const VortexState& s);
/// (dB/dt, dxi/dt).
std::pair<cplx, cplx> reduced_velocity(const Domain& d, const ReducedState& r, Strengths a);

/// Collision floor on |xi| (|z1 - z2| when the reduction is undefined).
inline double collision_floor(const Domain& d) { return 1e-7 * d.inradius(); }

enum class EventKind { Exit, CollisionFloor, Boundary, Horizon };
const char* to_string(EventKind k);

struct EventSpec {
    /// Terminal when max |z_k| >= exit_radius.
    double exit_radius = std::numeric_limits<double>::infinity();
    /// Terminal when max |phi(z_k)| >= 1 - eta.
    bool boundary = true;
    /// Terminal when the separation drops below collision_floor(domain).
    bool collision = true;
    /// Minimum time between stored samples; 0 stores every accepted step.
    double sample_dt = 0.0;
    /// Store samples at all (statistics are always kept).
    bool record_samples = true;
};

struct Event {
    double t;
    EventKind kind;
};

struct TrajectorySample {
    VortexState state;
    double H;
};

struct TrajectoryStats {
    double max_abs_z = 0.0;     // max over accepted steps (and dense sub-samples) of max |z_k|
    double max_H_drift = 0.0;   // max |H - H0| / |H0| over accepted steps
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<Event> events;  // the last entry is the terminating event
    TrajectoryStats stats;
    VortexState final_state;
    double H0 = 0.0;
};

/// Raised when the step size underflows; carries the last accepted state.
class StepUnderflowError : public NumericalError {
public:
    StepUnderflowError(const std::string& msg, VortexState last) : NumericalError(msg), last_(last) {}
    const VortexState& last_state() const noexcept { return last_; }

private:
    VortexState last_;
};

/// Integrates from s0.t to s0.t + horizon (> 0) in the (z1, z2) variables.
/// tol must lie in [1e-13, 1e-6]. Backward flow is the forward flow with both
/// strengths negated.
Trajectory integrate(const Domain& d, const VortexState& s0, double horizon, double tol, const EventSpec& events = {});

/// Same, integrating the reduced (B, xi) system; samples are lifted back.
Trajectory integrate_reduced(const Domain& d, const VortexState& s0, double horizon, double tol,
                             const EventSpec& events = {});

/// One JSON object per sample, then one per event.
void write_jsonl(std::ostream& os, const Trajectory& tr);

}  // namespace pvc
