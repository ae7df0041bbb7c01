#include "hlab/equilibrium.hpp"

#include <algorithm>
#include <stdexcept>

#include "hlab/form.hpp"
#include "hlab/green.hpp"
#include "hlab/parallel.hpp"

namespace hlab {

namespace {

double ipow(int d, int n) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= d;
    return p;
}

// FD form of the potential (exact transported Hessians are dropped: after
// a few pullbacks they concentrate below the cell scale and point sampling
// misses them, while FD of the potential conserves integrals by grid-sum
// telescoping). Optional mollification keeps the integration band clear of
// the edge-clamped convolution cells.
CoefficientForm mollified_form(const PotentialField& G, int res,
                               double smoothing) {
    PotentialField u = G;
    u.set_hessian({});
    if (smoothing <= 0.0) return sampled_form(u, res);
    const SmoothingKernel k(smoothing);
    CoefficientForm F = sampled_form(regularize(u, k), res);
    F.set_band(std::max(F.band(), k.radius_cells(F.axes()[0].h()) + 2));
    return F;
}

}  // namespace

MuCloud mu_points(const HenonLikeMap& f, cplx a, cplx b, int n) {
    const Bidisk& D = f.domain();
    if (std::abs(a) >= D.inner_m_radius() || std::abs(b) >= D.inner_n_radius())
        throw std::invalid_argument("mu_points: (a,b) must be in the inner bidisk");
    if (n < 0 || n > 8)
        throw std::invalid_argument("mu_points: depth out of range");
    MuCloud mu;
    mu.n = n;
    mu.a = a;
    mu.b = b;
    mu.route = MuRoute::points;
    const int d = f.poly_degree();
    mu.roots_expected = static_cast<int>(ipow(d, 2 * n));
    if (n == 0) {
        mu.measure.add(Pt2{a, b}, 1.0);
        mu.roots_found = 1;
        mu.generic_ok = true;
        return mu;
    }
    const RootSolveResult r = solve_orbit_roots(f, a, b, 2 * n, D.m_radius);
    mu.newton_failures = r.stats.newton_failures;
    mu.max_residual = r.stats.max_residual;
    const double w = 1.0 / ipow(d, 2 * n);
    for (const cplx& zeta : r.roots) {
        const OrbitPoint o = iterate_orbit(f, Pt2{zeta, b}, n);
        if (!o.representable || !f.inside_domain(o.point, 1e-9)) continue;
        mu.measure.add(o.point, w);
        ++mu.roots_found;
    }
    mu.measure.sort_points();
    mu.generic_ok = mu.roots_found >= 0.95 * mu.roots_expected;
    return mu;
}

WedgeResult mu_wedge(const HenonLikeMap& f, int n, int res, double smoothing) {
    const PotentialField Gp = green_current(f, n, GreenDirection::forward, res);
    const PotentialField Gm = green_current(f, n, GreenDirection::backward, res);
    return wedge_smooth(mollified_form(Gp, res, smoothing),
                        mollified_form(Gm, res, smoothing));
}

WedgeResult mu_forms(const HenonLikeMap& f, const PotentialField& R,
                     const PotentialField& S, int m, int n, int res,
                     double smoothing) {
    if (R.orientation() != Orientation::vertical ||
        S.orientation() != Orientation::horizontal)
        throw std::invalid_argument("mu_forms: need vertical R, horizontal S");
    const int d = f.poly_degree();
    PotentialField u = R;
    for (int i = 0; i < m; ++i) u = normalize_pullback(f, u, d);
    PotentialField v = S;
    for (int i = 0; i < n; ++i) v = normalize_pullback(f, v, d);
    return wedge_smooth(mollified_form(u, res, smoothing),
                        mollified_form(v, res, smoothing));
}

MuCloud cloud_from_wedge(const WedgeResult& w, int n, MuRoute route) {
    MuCloud mu;
    mu.measure = w.atoms();
    mu.n = n;
    mu.route = route;
    mu.generic_ok = w.positivity_ok;
    return mu;
}

double invariance_test(const MuCloud& mu, const HenonLikeMap& f,
                       int moment_degree, bool backward) {
    AtomicMeasure pushed;
    pushed.points.reserve(mu.measure.size());
    pushed.weights = mu.measure.weights;
    for (const Pt2& x : mu.measure.points)
        pushed.points.push_back(backward ? f.inverse(x) : f.forward(x));
    return moment_distance(mu.measure.moments(moment_degree),
                           pushed.moments(moment_degree));
}

MixingResult mixing_correlation(const MuCloud& mu, const HenonLikeMap& f,
                                const std::function<double(Pt2)>& phi,
                                const std::function<double(Pt2)>& psi, int m) {
    MixingResult r;
    const std::size_t sz = mu.measure.size();
    if (sz == 0) return r;
    // correlation with means of the composed observables, so a constant
    // phi or psi cancels exactly rather than up to the invariance defect
    double sp = 0.0, sq = 0.0, spq = 0.0, kept = 0.0;
    for (std::size_t i = 0; i < sz; ++i) {
        const Pt2 x = mu.measure.points[i];
        const double w = mu.measure.weights[i];
        const OrbitPoint fwd = iterate_orbit(f, x, m);
        const OrbitPoint bwd = iterate_orbit(f, x, m, true);
        if (fwd.escaped || bwd.escaped || !fwd.representable ||
            !bwd.representable) {
            ++r.escaped_atoms;
            continue;
        }
        const double p = phi(fwd.point), q = psi(bwd.point);
        sp += w * p;
        sq += w * q;
        spq += w * p * q;
        kept += w;
    }
    if (kept == 0.0) return r;
    r.value = spq / kept - (sp / kept) * (sq / kept);
    return r;
}

AtomicMeasure cesaro_measure(const HenonLikeMap& f, cplx a,
                             const PotentialField& S, int n, int qres) {
    if (S.orientation() != Orientation::horizontal)
        throw std::invalid_argument("cesaro: S must be horizontal");
    if (!S.has_hessian())
        throw std::invalid_argument("cesaro: S needs an exact Hessian");
    if (n < 1) throw std::invalid_argument("cesaro: n must be >= 1");
    const Bidisk& D = f.domain();
    const int d = f.poly_degree();
    const double dn = ipow(d, n);
    const double hq = 2.0 * D.n_radius / qres;
    const double cell_area = hq * hq;

    // midpoint nodes in the w-plane where S's Hessian is not identically 0
    // (probed over a z-fan; covers z-independent and compactly supported S)
    std::vector<cplx> nodes;
    const double zp = 0.45 * D.m_radius;
    const cplx z_probe[5] = {0.0, zp, -zp, cplx(0.0, zp), cplx(0.0, -zp)};
    for (int i = 0; i < qres; ++i)
        for (int j = 0; j < qres; ++j) {
            const cplx w0(-D.n_radius + hq * (i + 0.5),
                          -D.n_radius + hq * (j + 0.5));
            if (std::abs(w0) > D.n_radius) continue;
            bool live = false;
            for (const cplx& z : z_probe) {
                double hzz = 0.0, hww = 0.0;
                cplx hzw;
                S.hessian()(z, w0, hzz, hww, hzw);
                if (std::abs(hzz) + std::abs(hww) + std::abs(hzw) > 1e-14) {
                    live = true;
                    break;
                }
            }
            if (live) nodes.push_back(w0);
        }

    // per node: roots z_r of pi_1(f^n(z, w0)) = a, coefficient of S's
    // Hessian restricted to the variety, then forward pushes 1..n
    std::vector<AtomicMeasure> parts(nodes.size());
    std::vector<const HenonLikeMap*> prefix(static_cast<std::size_t>(n), &f);
    parallel_chunks(nodes.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            const cplx w0 = nodes[k];
            std::vector<cplx> roots;
            if (n == 0) {
                roots.push_back(a);
            } else {
                roots = solve_orbit_roots(f, a, w0, n, D.m_radius).roots;
            }
            for (const cplx& zr : roots) {
                const Pt2 x0{zr, w0};
                const ComposeResult cr = compose(prefix, x0);
                const cplx gz = cr.jacobian.a, gw = cr.jacobian.b;
                if (std::abs(gz) < 1e-12) continue;  // branch point
                const cplx gp = -gw / gz;  // dz/dw along the variety
                double hzz = 0.0, hww = 0.0;
                cplx hzw;
                S.hessian()(zr, w0, hzz, hww, hzw);
                const double coeff = std::norm(gp) * hzz + hww +
                                     2.0 * std::real(hzw * gp);
                const double wt =
                    (2.0 / M_PI) * coeff * cell_area / (dn * n);
                if (wt == 0.0) continue;
                Pt2 x = x0;
                for (int s = 1; s <= n; ++s) {
                    x = f.forward(x);
                    parts[k].add(x, wt);
                }
            }
        }
    });
    AtomicMeasure out;
    for (const auto& p : parts)
        for (std::size_t i = 0; i < p.size(); ++i)
            out.add(p.points[i], p.weights[i]);
    out.sort_points();
    return out;
}

}  // namespace hlab
