#pragma once

// A simply connected domain given by a conformal map phi: Omega -> unit disc
// with phi(0) = 0, plus the geometric metadata the Green's function needs.

#include <cstdint>
#include <optional>
#include <string>

#include "pvc/kernels.hpp"
#include "pvc/mapexpr.hpp"
#include "pvc/series.hpp"

namespace pvc {

/// phi and its first two derivatives at a point.
struct Jet {
    cplx f, df, d2f;
};

class Domain {
public:
    static constexpr double kDefaultEta = 1e-3;
    static constexpr std::size_t kTaylorOrder = 40;

    /// `inradius` is min |x| over the boundary; pass a non-positive value to
    /// have it estimated numerically.
    static Domain from_expression(const MapExpr& map, double inradius, double eta = kDefaultEta,
                                  std::string name = {});
    /// A domain known only through the Maclaurin series of phi (valid on
    /// |z| < inradius). Evaluation outside the validated disc raises DomainError.
    static Domain from_series(const UniSeries& phi, double inradius, double eta = kDefaultEta,
                              std::string name = {});

    const std::optional<MapExpr>& map() const noexcept { return map_; }
    const UniSeries& taylor0() const noexcept { return taylor0_; }
    double inradius() const noexcept { return inradius_; }
    double boundary_margin() const noexcept { return eta_; }
    const std::string& name() const noexcept { return name_; }

    /// Radius inside which the truncated Maclaurin polynomial replaces the
    /// expression (infinite for polynomial maps).
    double fast_radius() const noexcept { return fast_radius_; }
    std::size_t fast_degree() const noexcept { return fast_coeffs_.size() - 1; }

    cplx dphi0() const { return taylor0_[1]; }
    cplx d2phi0() const { return 2.0 * taylor0_[2]; }
    cplx d3phi0() const { return 6.0 * taylor0_[3]; }

    cplx phi(cplx z) const;
    Jet jet(cplx z) const;
    /// phi, phi', phi'' at x and y plus the divided differences in PairJet.
    PairJet pair(cplx x, cplx y) const;
    /// Taylor coefficients of phi about `center`.
    UniSeries taylor_at(cplx center, std::size_t order) const;

    /// Throws BoundaryError when |phi| > 1 - eta.
    void require_interior(cplx z, cplx phi_z) const;
    void require_interior(cplx z) const { require_interior(z, phi(z)); }

private:
    Domain() = default;
    void setup_fast_path();
    bool in_fast_disc(cplx z) const { return std::norm(z) <= fast_radius_ * fast_radius_; }

    std::optional<MapExpr> map_;
    UniSeries taylor0_;
    double inradius_ = 0.0;
    double eta_ = kDefaultEta;
    std::string name_;
    double fast_radius_ = 0.0;
    std::vector<cplx> fast_coeffs_;
    std::vector<std::pair<double, std::size_t>> fast_tiers_;  // (radius^2, coefficient count), ascending
};

/// Smallest |z| with |phi(z)| = 1, by marching along rays and bisecting.
double estimate_inradius(const MapExpr& map, int rays = 720);

namespace domains {

Domain disc();
/// tan(i pi z / 4): the strip |Im z| < 1, critical at 0.
Domain strip();
/// a (tan(i z) + tan(i z / 2)): stable at 0 for a > 1/sqrt(3).
Domain tan_family(double a);
/// Biconvex hexagon with (phi^{-1})'(w) = (1 - w^2)^{2 delta - 1} / (1 + w^2 + w^4)^delta.
Domain hexagon(double delta);
/// Degree-6 polynomial with phi''(0) = 0 that is univalent on its unit-level
/// domain and satisfies 2|phi'(0)|^3 > |phi'''(0)|.
Domain random_polynomial(std::uint64_t seed);

/// Text of the tan-family and hexagon maps, for printing and the CLI.
inline constexpr const char* kTanFamily = "a*(tan(i*z)+tan(i*z/2))";
inline constexpr const char* kStrip = "tan(i*pi*z/4)";

}  // namespace domains

}  // namespace pvc
