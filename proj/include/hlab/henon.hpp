#pragma once

#include <vector>

#include "hlab/bidisk.hpp"
#include "hlab/core.hpp"

namespace hlab {

/// Scaled complex value m * exp(l) with |m| = 1 (m = 0 encodes zero).
/// Lets orbit evaluation follow doubly exponential escape without overflow.
struct ScaledC {
    cplx m{0.0};
    double l = -1e300;

    static ScaledC from(cplx v) {
        const double a = std::abs(v);
        if (a == 0.0) return ScaledC{};
        return ScaledC{v / a, std::log(a)};
    }
    bool is_zero() const { return m == cplx(0.0); }
    bool representable() const { return l < 700.0; }
    cplx value() const { return is_zero() ? cplx(0.0) : m * std::exp(l); }
    /// log|value - a|, stable for huge |value|.
    double log_abs_minus(cplx a) const {
        if (is_zero()) return std::log(std::abs(a));
        if (l > 700.0) {
            // |m e^l - a| = e^l |m - a e^{-l}|; the correction underflows to 0
            return l;
        }
        return std::log(std::abs(value() - a));
    }
};

/// Sum of scaled terms, renormalized.
ScaledC scaled_sum(const std::vector<ScaledC>& terms);

/// f(z,w) = (p(z) + twist*w, z) with explicit inverse
/// f^{-1}(z,w) = (w, (z - p(w))/twist).
class HenonLikeMap {
  public:
    /// coeffs ascending: p(z) = c0 + c1 z + ... + cd z^d, d >= 2.
    HenonLikeMap(std::vector<cplx> poly_coeffs, cplx twist, Bidisk domain);

    const std::vector<cplx>& poly_coeffs() const { return coeffs_; }
    cplx twist() const { return twist_; }
    const Bidisk& domain() const { return domain_; }
    int poly_degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    cplx poly(cplx z) const;
    cplx dpoly(cplx z) const;

    Pt2 forward(Pt2 x) const { return Pt2{poly(x.z) + twist_ * x.w, x.z}; }
    Pt2 inverse(Pt2 y) const {
        return Pt2{y.w, (y.z - poly(y.w)) / twist_};
    }

    /// Complex Jacobian of the forward map at x.
    Mat2c jacobian(Pt2 x) const { return Mat2c{dpoly(x.z), twist_, 1.0, 0.0}; }
    Mat2c jacobian_inverse(Pt2 y) const {
        return Mat2c{0.0, 1.0, 1.0 / twist_, -dpoly(y.w) / twist_};
    }

    /// Outside this radius the leading term of p dominates and escape
    /// is permanent: 2*max(radii) + sum |coeffs|.
    double escape_radius() const { return escape_radius_; }

    bool inside_domain(Pt2 x, double slack = 0.0) const {
        return std::abs(x.z) <= domain_.m_radius + slack &&
               std::abs(x.w) <= domain_.n_radius + slack;
    }

  private:
    std::vector<cplx> coeffs_;
    cplx twist_;
    Bidisk domain_;
    double escape_radius_;
};

/// Forward orbit bookkeeping. `point` is valid while the values fit in
/// doubles; `log_z` always tracks log|z_n| (the scaled path takes over
/// once magnitudes leave double range).
struct OrbitPoint {
    Pt2 point{};          // last representable orbit point
    ScaledC z_scaled{};   // z_n in scaled form
    ScaledC w_scaled{};
    bool escaped = false;
    int escape_index = -1;  // first step with max(|z|,|w|) > escape radius
    bool representable = true;
    int steps = 0;

    static OrbitPoint start(Pt2 x) {
        OrbitPoint o;
        o.point = x;
        o.z_scaled = ScaledC::from(x.z);
        o.w_scaled = ScaledC::from(x.w);
        return o;
    }
    double log_abs_z() const { return z_scaled.l; }
};

/// One forward (or backward) step of the orbit state; switches to scaled
/// arithmetic once magnitudes leave double range.
void orbit_step(const HenonLikeMap& f, OrbitPoint& o, bool backward = false);

/// n forward steps from x (n >= 0).  Backward if `backward` is set.
OrbitPoint iterate_orbit(const HenonLikeMap& f, Pt2 x, int n,
                         bool backward = false);

/// Composite map value and chain-rule Jacobian over a map sequence prefix.
/// Escape aborts Jacobian accumulation and records the first escape index.
struct ComposeResult {
    Pt2 point{};
    Mat2c jacobian{};
    bool escaped = false;
    int escape_index = -1;
};
ComposeResult compose(const std::vector<const HenonLikeMap*>& prefix, Pt2 x);

/// Orbit of (zeta, b) with d z_n / d zeta, exact doubles; used by Newton
/// polishing where orbits stay bounded.
struct OrbitDeriv {
    cplx z;       // z_n
    cplx dz;      // d z_n / d zeta
    bool escaped = false;
};
OrbitDeriv orbit_z_derivative(const HenonLikeMap& f, cplx zeta, cplx b, int n);

/// z-coordinate of f^n(zeta, b) in scaled form; safe on escaping orbits.
ScaledC orbit_z_scaled(const HenonLikeMap& f, cplx zeta, cplx b, int n);

/// Sequence of horizontal-like maps sharing one bidisk, with degrees.
struct MapSequence {
    std::vector<HenonLikeMap> maps;
    std::vector<int> degrees;
    Bidisk domain;

    double degree_product(int n) const {
        double p = 1.0;
        for (int i = 0; i < n; ++i) p *= degrees[static_cast<std::size_t>(i) % degrees.size()];
        return p;
    }
    const HenonLikeMap& map_at(int i) const {
        return maps[static_cast<std::size_t>(i) % maps.size()];
    }
};

}  // namespace hlab
