#include "pvc/dynamics.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "dop853.hpp"
#include "pvc/format.hpp"
#include "pvc/greens.hpp"

namespace pvc {

namespace {

constexpr cplx kI{0.0, 1.0};

// Sub-sample fractions checked for events inside each accepted step.
constexpr double kEventFractions[] = {0.25, 0.5, 0.75, 1.0};

constexpr double kLocalFactor = 1e-2;

}  // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Exit: return "exit";
        case EventKind::CollisionFloor: return "collision-floor";
        case EventKind::Boundary: return "boundary";
        case EventKind::Horizon: return "horizon";
    }
    return "?";
}

std::pair<cplx, cplx> velocity(const Domain& d, const VortexState& s) {
    const cplx sep = s.z1 - s.z2;
    if (std::abs(sep) < collision_floor(d)) throw CoincidenceError("vortices closer than the collision floor");
    const PairGradients g = pair_gradients(d, s.z1, s.z2);
    const cplx free = sep / (kTwoPi * std::norm(sep));
    const cplx v1 = kI * (0.5 * s.a1 * g.grad_robin1 + s.a2 * (free + g.g12));
    const cplx v2 = kI * (0.5 * s.a2 * g.grad_robin2 + s.a1 * (g.g21 - free));
    return {v1, v2};
}

std::pair<cplx, cplx> reduced_velocity(const Domain& d, const ReducedState& r, Strengths a) {
    if (std::abs(r.xi) < collision_floor(d)) throw CoincidenceError("separation below the collision floor");
    const VortexState s = lift(r, a);
    const PairGradients g = pair_gradients(d, s.z1, s.z2);
    const double total = a.total(), prod = a.a1 * a.a2, root = std::sqrt(prod);
    const cplx dB = (kI / total) * (0.5 * a.a1 * a.a1 * g.grad_robin1 + 0.5 * a.a2 * a.a2 * g.grad_robin2 +
                                    prod * (g.g12 + g.g21));
    const cplx dxi = kI * prod * r.xi / (kTwoPi * total * std::norm(r.xi)) +
                     (kI * root / total) * (0.5 * a.a1 * g.grad_robin1 - 0.5 * a.a2 * g.grad_robin2 +
                                            a.a2 * g.g12 - a.a1 * g.g21);
    return {dB, dxi};
}

namespace {

using Vec = detail::CVec<2>;

struct FullSystem {
    const Domain* d;
    Strengths a;
    void operator()(const Vec& y, Vec& dy) const {
        const auto [v1, v2] = velocity(*d, VortexState{0.0, y[0], y[1], a.a1, a.a2});
        dy = {v1, v2};
    }
    VortexState state(double t, const Vec& y) const { return {t, y[0], y[1], a.a1, a.a2}; }
    double separation(const Vec& y) const { return std::abs(y[0] - y[1]); }
    template <class S>
    void configure(S&) const {}
    template <class S>
    void rewrap(S&) const {}
};

// The separation is carried as zeta = log xi: the fast rotation of xi becomes
// a slowly varying phase rate, which the stepper integrates almost exactly.
struct ReducedSystem {
    const Domain* d;
    Strengths a;
    void operator()(const Vec& y, Vec& dy) const {
        const cplx xi = std::exp(y[1]);
        const auto [dB, dxi] = reduced_velocity(*d, ReducedState{y[0], xi}, a);
        dy = {dB, dxi / xi};
    }
    VortexState state(double t, const Vec& y) const { return lift(ReducedState{y[0], std::exp(y[1])}, a, t); }
    double separation(const Vec& y) const { return std::exp(y[1].real()); }
    template <class S>
    void configure(S& st) const {
        st.set_absolute(1, true);
    }
    template <class S>
    void rewrap(S& st) const {
        const double ph = st.y()[1].imag();
        if (std::abs(ph) > kPi) st.shift(1, cplx{0.0, -kTwoPi * std::round(ph / kTwoPi)});
    }
};

enum class Fault { None, Boundary, Collision, Other };

template <class System>
Trajectory run(const Domain& d, const System& sys, const Vec& y0, const VortexState& s0, double horizon,
               double tol, const EventSpec& ev) {
    if (!(tol >= 1e-13 && tol <= 1e-6)) throw PreconditionError("tol must lie in [1e-13, 1e-6]");
    if (!(std::isfinite(horizon) && horizon > 0.0)) throw PreconditionError("horizon must be finite and positive");

    const double dir = horizon > 0 ? 1.0 : -1.0;
    const double t0 = s0.t, t_end = s0.t + horizon;
    const double floor = collision_floor(d);
    const double edge = 1.0 - d.boundary_margin();
    // Schwarz: |phi(z)| <= |z| / inradius, so boundary proximity needs |z| >= edge * inradius.
    const double safe2 = (edge * d.inradius()) * (edge * d.inradius());
    const double exit2 = ev.exit_radius * ev.exit_radius;
    const double scale = std::max({std::abs(s0.z1), std::abs(s0.z2), std::abs(s0.z1 - s0.z2)});
    // Per-step errors accumulate over ~1e5 steps of a fast-rotating pair, so the
    // local target sits two decades below the requested accuracy.
    const double local_tol = tol * kLocalFactor;
    const double atol = local_tol * std::max(scale, 1e-300);

    Trajectory tr;
    double max_norm = 0.0;
    tr.H0 = hamiltonian(d, s0);

    // Which terminal event (if any) holds at y.
    auto triggered = [&](const Vec& y, const VortexState& s) -> std::optional<EventKind> {
        if (ev.collision && sys.separation(y) < floor) return EventKind::CollisionFloor;
        const double m2 = std::max(std::norm(s.z1), std::norm(s.z2));
        if (ev.boundary && m2 >= safe2 && std::max(std::abs(d.phi(s.z1)), std::abs(d.phi(s.z2))) >= edge)
            return EventKind::Boundary;
        if (m2 >= exit2) return EventKind::Exit;
        return std::nullopt;
    };
    auto note_radius = [&](const VortexState& s) {
        max_norm = std::max({max_norm, std::norm(s.z1), std::norm(s.z2)});
    };
    double last_sample_t = t0;
    auto record = [&](const VortexState& s, bool force) {
        if (!ev.record_samples) return;
        if (!tr.samples.empty() && (s.t - last_sample_t) * dir <= 0.0) return;
        if (!force && !tr.samples.empty() && std::abs(s.t - last_sample_t) < ev.sample_dt) return;
        double H = std::numeric_limits<double>::quiet_NaN();
        try {
            H = hamiltonian(d, s);
        } catch (const Error&) {
        }
        tr.samples.push_back({s, H});
        last_sample_t = s.t;
    };
    auto finish = [&](const VortexState& s, EventKind kind) {
        record(s, true);
        tr.stats.max_abs_z = std::sqrt(max_norm);
        tr.events.push_back({s.t, kind});
        tr.final_state = s;
        return tr;
    };

    note_radius(s0);
    record(s0, true);
    if (auto k = triggered(y0, s0)) return finish(s0, *k);

    Fault fault = Fault::None;
    auto rhs = [&](const Vec& y, Vec& dy) {
        sys(y, dy);
        for (const cplx& v : dy)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("non-finite velocity");
    };
    detail::Dop853<2, decltype(rhs)> st(rhs, local_tol, atol);
    sys.configure(st);
    st.init(y0);

    double t = t0;
    double h = st.initial_step(dir, std::abs(horizon)) * dir;
    double err_old = 1e-4;
    bool last_rejected = false;
    constexpr double kSafe = 0.9, kMaxRatio = 5.0, kMinRatio = 1.0 / 3.0, kBeta = 0.04;
    const double expo = 1.0 / 8.0 - kBeta * 0.2;

    while (true) {
        if ((t_end - t) * dir <= 0.0) break;
        if (std::abs(h) >= std::abs(t_end - t)) h = t_end - t;
        if (std::abs(h) <= 1e-14 * std::max(1.0, std::abs(t)) || !std::isfinite(h)) {
            const Vec& y = st.y();
            const VortexState s = sys.state(t, y);
            if (fault == Fault::Boundary) return finish(s, EventKind::Boundary);
            if (fault == Fault::Collision) return finish(s, EventKind::CollisionFloor);
            throw StepUnderflowError("step size underflow", s);
        }

        detail::StepAttempt at{};
        try {
            at = st.attempt(h);
            fault = Fault::None;
        } catch (const BoundaryError&) {
            fault = Fault::Boundary;
        } catch (const CoincidenceError&) {
            fault = Fault::Collision;
        } catch (const DomainError&) {
            fault = Fault::Boundary;
        } catch (const NumericalError&) {
            fault = Fault::Other;
        }
        if (fault != Fault::None) {
            ++tr.stats.rejected;
            h *= 0.5;
            last_rejected = true;
            continue;
        }
        if (!at.accepted) {
            ++tr.stats.rejected;
            const double ratio = std::max(kMinRatio, kSafe * std::pow(at.err, -expo));
            h *= std::min(1.0, ratio);
            last_rejected = true;
            continue;
        }

        ++tr.stats.steps;
        const double t_prev = t;
        const double h_done = h;
        t = (h == t_end - t_prev) ? t_end : t_prev + h;

        // Event sub-samples over the step just taken.
        double s_lo = 0.0;
        for (double s_frac : kEventFractions) {
            const Vec y = st.dense(s_frac);
            const VortexState s = sys.state(s_frac >= 1.0 ? t : t_prev + s_frac * h_done, y);
            note_radius(s);
            if (triggered(y, s)) {
                double lo = s_lo, hi = s_frac;
                while (hi - lo > 1e-6) {
                    const double mid = 0.5 * (lo + hi);
                    const Vec ym = st.dense(mid);
                    if (triggered(ym, sys.state(t_prev + mid * h_done, ym)))
                        hi = mid;
                    else
                        lo = mid;
                }
                const Vec ye = st.dense(hi);
                const VortexState se = sys.state(hi >= 1.0 ? t : t_prev + hi * h_done, ye);
                tr.stats.evaluations = st.evaluations();
                return finish(se, *triggered(ye, se));
            }
            s_lo = s_frac;
        }

        sys.rewrap(st);
        const VortexState s = sys.state(t, st.y());
        const double H = hamiltonian(d, s);
        const double drift = std::abs(tr.H0) > 1e-300 ? std::abs(H - tr.H0) / std::abs(tr.H0) : std::abs(H - tr.H0);
        tr.stats.max_H_drift = std::max(tr.stats.max_H_drift, drift);
        record(s, t == t_end);

        // PI step-size control.
        const double e = std::max(at.err, 1e-10);
        double ratio = kSafe * std::pow(e, -expo) * std::pow(err_old, kBeta);
        ratio = std::clamp(ratio, kMinRatio, kMaxRatio);
        if (last_rejected) ratio = std::min(ratio, 1.0);
        err_old = std::max(at.err, 1e-4);
        last_rejected = false;
        h = h_done * ratio;
    }

    tr.stats.evaluations = st.evaluations();
    return finish(sys.state(t_end, st.y()), EventKind::Horizon);
}

}  // namespace

Trajectory integrate(const Domain& d, const VortexState& s0, double horizon, double tol, const EventSpec& events) {
    const FullSystem sys{&d, s0.strengths()};
    return run(d, sys, Vec{s0.z1, s0.z2}, s0, horizon, tol, events);
}

Trajectory integrate_reduced(const Domain& d, const VortexState& s0, double horizon, double tol,
                             const EventSpec& events) {
    const ReducedState r = reduce(s0);
    const ReducedSystem sys{&d, s0.strengths()};
    if (r.xi == 0.0) throw CoincidenceError("the two vortices coincide");
    return run(d, sys, Vec{r.B, std::log(r.xi)}, s0, horizon, tol, events);
}

void write_jsonl(std::ostream& os, const Trajectory& tr) {
    for (const auto& smp : tr.samples) {
        os << "{\"t\":" << fmt17(smp.state.t) << ",\"z1\":" << fmt17(smp.state.z1) << ",\"z2\":"
           << fmt17(smp.state.z2) << ",\"H\":" << fmt17(smp.H) << "}\n";
    }
    for (const auto& e : tr.events) os << "{\"event\":\"" << to_string(e.kind) << "\",\"t\":" << fmt17(e.t) << "}\n";
}

}  // namespace pvc
