#include "hlab/henon.hpp"

#include <algorithm>

namespace hlab {

ScaledC scaled_sum(const std::vector<ScaledC>& terms) {
    double lmax = -1e300;
    for (const auto& t : terms)
        if (!t.is_zero()) lmax = std::max(lmax, t.l);
    if (lmax == -1e300) return ScaledC{};
    cplx s = 0.0;
    for (const auto& t : terms)
        if (!t.is_zero()) s += t.m * std::exp(t.l - lmax);
    const double a = std::abs(s);
    if (a == 0.0) return ScaledC{};
    return ScaledC{s / a, lmax + std::log(a)};
}

HenonLikeMap::HenonLikeMap(std::vector<cplx> poly_coeffs, cplx twist,
                           Bidisk domain)
    : coeffs_(std::move(poly_coeffs)), twist_(twist), domain_(domain) {
    if (coeffs_.size() < 3)
        throw std::invalid_argument("henon: polynomial degree must be >= 2");
    if (std::abs(coeffs_.back()) == 0.0)
        throw std::invalid_argument("henon: leading coefficient must be nonzero");
    if (std::abs(twist_) == 0.0)
        throw std::invalid_argument("henon: twist must be nonzero");
    domain_.validate();
    double csum = 0.0;
    for (const auto& c : coeffs_) csum += std::abs(c);
    escape_radius_ = 2.0 * std::max(domain_.m_radius, domain_.n_radius) + csum;
}

cplx HenonLikeMap::poly(cplx z) const {
    cplx v = coeffs_.back();
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;) v = v * z + coeffs_[i];
    return v;
}

cplx HenonLikeMap::dpoly(cplx z) const {
    const auto n = coeffs_.size();
    cplx v = static_cast<double>(n - 1) * coeffs_.back();
    for (std::size_t i = n - 1; i-- > 1;)
        v = v * z + static_cast<double>(i) * coeffs_[i];
    return v;
}

namespace {

// One forward step in scaled coordinates:
// z' = sum_j c_j z^j + t w,  w' = z.
void scaled_step(const HenonLikeMap& f, ScaledC& z, ScaledC& w) {
    const auto& c = f.poly_coeffs();
    std::vector<ScaledC> terms;
    terms.reserve(c.size() + 1);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double aj = std::abs(c[j]);
        if (aj == 0.0) continue;
        if (z.is_zero() && j > 0) continue;
        cplx ph = c[j] / aj;
        double lg = std::log(aj);
        if (j > 0) {
            ph *= std::pow(z.m, static_cast<double>(j));
            ph /= std::abs(ph);  // guard pow drift
            lg += static_cast<double>(j) * z.l;
        }
        terms.push_back(ScaledC{ph, lg});
    }
    const double at = std::abs(f.twist());
    if (!w.is_zero())
        terms.push_back(ScaledC{(f.twist() / at) * w.m, std::log(at) + w.l});
    ScaledC zn = scaled_sum(terms);
    w = z;
    z = zn;
}

}  // namespace

void orbit_step(const HenonLikeMap& f, OrbitPoint& o, bool backward) {
    const double er = f.escape_radius();
    const double big = 1e100;  // switch to scaled arithmetic past this
    const bool exact =
        o.representable &&
        std::max(std::abs(o.point.z), std::abs(o.point.w)) <= big;
    if (exact) {
        const Pt2 p = backward ? f.inverse(o.point) : f.forward(o.point);
        o.z_scaled = ScaledC::from(p.z);
        o.w_scaled = ScaledC::from(p.w);
        o.point = p;
        o.representable = true;
    } else {
        if (backward) {
            // f^{-1}(z,w) = (w, (z - p(w))/t): same recursion with roles
            // swapped; run it via the explicit formula in scaled form.
            ScaledC zn = o.w_scaled;
            // (z - p(w))/t
            const auto& c = f.poly_coeffs();
            std::vector<ScaledC> terms;
            terms.push_back(o.z_scaled);
            for (std::size_t j = 0; j < c.size(); ++j) {
                const double aj = std::abs(c[j]);
                if (aj == 0.0) continue;
                if (o.w_scaled.is_zero() && j > 0) continue;
                cplx ph = -c[j] / aj;
                double lg = std::log(aj);
                if (j > 0) {
                    ph *= std::pow(o.w_scaled.m, static_cast<double>(j));
                    ph /= std::abs(ph);
                    lg += static_cast<double>(j) * o.w_scaled.l;
                }
                terms.push_back(ScaledC{ph, lg});
            }
            ScaledC wn = scaled_sum(terms);
            const double at = std::abs(f.twist());
            if (!wn.is_zero()) {
                wn.m /= (f.twist() / at);
                wn.l -= std::log(at);
            }
            o.z_scaled = zn;
            o.w_scaled = wn;
        } else {
            scaled_step(f, o.z_scaled, o.w_scaled);
        }
        o.representable = o.z_scaled.representable() &&
                          o.w_scaled.representable();
        if (o.representable) {
            o.point = Pt2{o.z_scaled.value(), o.w_scaled.value()};
        }
    }
    ++o.steps;
    const double mz = o.z_scaled.is_zero() ? -1e300 : o.z_scaled.l;
    const double mw = o.w_scaled.is_zero() ? -1e300 : o.w_scaled.l;
    if (!o.escaped && std::max(mz, mw) > std::log(er)) {
        o.escaped = true;
        o.escape_index = o.steps;
    }
}

OrbitPoint iterate_orbit(const HenonLikeMap& f, Pt2 x, int n, bool backward) {
    OrbitPoint o = OrbitPoint::start(x);
    for (int k = 0; k < n; ++k) orbit_step(f, o, backward);
    return o;
}

ComposeResult compose(const std::vector<const HenonLikeMap*>& prefix, Pt2 x) {
    ComposeResult r;
    r.point = x;
    r.jacobian = Mat2c::identity();
    int k = 0;
    for (const auto* f : prefix) {
        if (!r.escaped) {
            r.jacobian = f->jacobian(r.point) * r.jacobian;
        }
        r.point = f->forward(r.point);
        ++k;
        if (!r.escaped &&
            std::max(std::abs(r.point.z), std::abs(r.point.w)) >
                f->escape_radius()) {
            r.escaped = true;
            r.escape_index = k;
        }
        if (r.escaped &&
            std::max(std::abs(r.point.z), std::abs(r.point.w)) > 1e100)
            break;  // Jacobian frozen; value no longer needed downstream
    }
    return r;
}

OrbitDeriv orbit_z_derivative(const HenonLikeMap& f, cplx zeta, cplx b, int n) {
    OrbitDeriv r;
    cplx z = zeta, w = b;
    cplx dz = 1.0, dw = 0.0;
    const double er = f.escape_radius();
    for (int k = 0; k < n; ++k) {
        const cplx dzn = f.dpoly(z) * dz + f.twist() * dw;
        const cplx zn = f.poly(z) + f.twist() * w;
        dw = dz;
        w = z;
        dz = dzn;
        z = zn;
        if (std::max(std::abs(z), std::abs(w)) > er) r.escaped = true;
        if (std::abs(z) > 1e100) break;  // unusable for Newton anyway
    }
    r.z = z;
    r.dz = dz;
    return r;
}

ScaledC orbit_z_scaled(const HenonLikeMap& f, cplx zeta, cplx b, int n) {
    return iterate_orbit(f, Pt2{zeta, b}, n).z_scaled;
}

}  // namespace hlab
