#include "hlab/roots.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hlab {

namespace {

struct ArgSample {
    double arg;
    double logmod;
};

ArgSample g_sample(const HenonLikeMap& f, cplx a, cplx b, int N, cplx zeta) {
    const ScaledC z = orbit_z_scaled(f, zeta, b, N);
    // g = z - a in scaled form
    if (z.is_zero()) return {std::arg(-a), std::log(std::abs(a))};
    if (z.l > 700.0 || z.l - std::log(std::abs(a) + 1e-300) > 40.0) {
        // |z| >> |a|: arg(g) = arg(z) up to a negligible correction
        return {std::arg(z.m), z.l};
    }
    const cplx g = z.value() - a;
    return {std::arg(g), std::log(std::abs(g) + 1e-300)};
}

constexpr double kTau = 2.0 * M_PI;

double wrap_pi(double d) {
    while (d > M_PI) d -= kTau;
    while (d < -M_PI) d += kTau;
    return d;
}

// Winding of g around the axis-aligned rectangle [lo, hi] by uniform
// perimeter sampling with doubling: accepted only once every argument
// increment is small AND two successive sample densities agree, so a
// fast oscillation cannot alias away whole turns.
bool rect_winding(const HenonLikeMap& f, cplx a, cplx b, int N, cplx lo,
                  cplx hi, int& winding, double guard_log) {
    const cplx corners[5] = {lo, cplx(hi.real(), lo.imag()), hi,
                             cplx(lo.real(), hi.imag()), lo};
    int prev_w = 0;
    bool have_prev = false;
    for (int k = 8; k <= (1 << 22); k *= 2) {
        double total = 0.0;
        bool resolved = true;
        const ArgSample sfirst = g_sample(f, a, b, N, corners[0]);
        if (sfirst.logmod < guard_log) return false;
        ArgSample sp = sfirst;
        for (int e = 0; e < 4 && resolved; ++e) {
            for (int i = 1; i <= k && resolved; ++i) {
                const double t = static_cast<double>(i) / k;
                ArgSample s;
                if (e == 3 && i == k) {
                    s = sfirst;
                } else {
                    const cplx p =
                        corners[e] + t * (corners[e + 1] - corners[e]);
                    s = g_sample(f, a, b, N, p);
                    if (s.logmod < guard_log) return false;
                }
                const double d = wrap_pi(s.arg - sp.arg);
                if (std::abs(d) >= 0.8) resolved = false;
                total += d;
                sp = s;
            }
        }
        if (!resolved) {
            have_prev = false;
            continue;
        }
        const double w = total / kTau;
        const int wk = static_cast<int>(std::lround(w));
        if (std::abs(w - wk) > 0.05) {
            have_prev = false;
            continue;
        }
        if (have_prev && wk == prev_w) {
            winding = wk;
            return true;
        }
        prev_w = wk;
        have_prev = true;
    }
    return false;
}

// Newton polishing of a single root from a start point.
bool newton_polish(const HenonLikeMap& f, cplx a, cplx b, int N, cplx start,
                   double wander_limit, cplx box_center, cplx& root,
                   double& residual) {
    cplx z = start;
    for (int it = 0; it < 80; ++it) {
        const OrbitDeriv od = orbit_z_derivative(f, z, b, N);
        if (!std::isfinite(od.z.real()) || !std::isfinite(od.dz.real()))
            return false;
        const cplx g = od.z - a;
        if (std::abs(od.dz) == 0.0) return false;
        const cplx step = g / od.dz;
        z -= step;
        if (std::abs(z - box_center) > 4.0 * wander_limit) return false;
        if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) {
            const OrbitDeriv chk = orbit_z_derivative(f, z, b, N);
            residual = std::abs(chk.z - a);
            root = z;
            return true;
        }
    }
    return false;
}

struct Box {
    cplx lo, hi;
    int winding;

    cplx center() const { return 0.5 * (lo + hi); }
    double wx() const { return hi.real() - lo.real(); }
    double wy() const { return hi.imag() - lo.imag(); }
    bool inside(cplx z, double tol) const {
        return z.real() >= lo.real() - tol && z.real() <= hi.real() + tol &&
               z.imag() >= lo.imag() - tol && z.imag() <= hi.imag() + tol;
    }
};

}  // namespace

bool box_winding(const HenonLikeMap& f, cplx a, cplx b, int N, cplx center,
                 double hw, int& winding, double guard_log) {
    return rect_winding(f, a, b, N, center - cplx(hw, hw),
                        center + cplx(hw, hw), winding, guard_log);
}

RootSolveResult solve_orbit_roots(const HenonLikeMap& f, cplx a, cplx b,
                                  int N, double hw) {
    RootSolveResult res;
    // jitter sequence applied when a zero sits too close to a boundary
    const double jit[6] = {1.0, 1.0000734, 0.9998629, 1.0003117, 0.9994381,
                           1.0011681};
    // split-point fractions tried when a zero sits on a subdivision line
    const double sfr[6] = {0.5, 0.513377, 0.486219, 0.528411, 0.471207,
                           0.541593};
    Box root_box{cplx(0, 0), cplx(0, 0), 0};
    bool ok = false;
    for (double j : jit) {
        const double h = hw * j;
        root_box.lo = cplx(-h, -h);
        root_box.hi = cplx(h, h);
        if (rect_winding(f, a, b, N, root_box.lo, root_box.hi,
                         root_box.winding, -18.0)) {
            ok = true;
            break;
        }
    }
    if (!ok) return res;  // degenerate parameters; caller retries
    res.stats.total_winding = root_box.winding;

    std::vector<Box> stack{root_box};
    std::vector<std::pair<cplx, int>> found;  // root, multiplicity
    while (!stack.empty()) {
        const Box bx = stack.back();
        stack.pop_back();
        ++res.stats.boxes_processed;
        if (bx.winding <= 0) continue;
        const double ext = std::min(bx.wx(), bx.wy());
        if (bx.winding == 1 || ext < 4e-7) {
            cplx r;
            double resid = 0.0;
            if (newton_polish(f, a, b, N, bx.center(),
                              std::max(bx.wx(), bx.wy()), bx.center(), r,
                              resid) &&
                bx.inside(r, 0.5e-9 * ext + 1e-12)) {
                found.emplace_back(r, bx.winding);
                res.stats.max_residual =
                    std::max(res.stats.max_residual, resid);
                continue;
            }
            if (ext < 4e-7) {
                // multiple/stiff zero: accept the box center
                found.emplace_back(bx.center(), bx.winding);
                ++res.stats.newton_failures;
                continue;
            }
        }
        // split into four exactly tiling rectangles; jitter the split
        // point until all children carry clean windings summing to the
        // parent's (a zero near a split line defeats one choice only)
        bool split_ok = false;
        for (double fr : sfr) {
            const double sx = bx.lo.real() + fr * bx.wx();
            const double sy = bx.lo.imag() + fr * bx.wy();
            const Box cand[4] = {
                {bx.lo, cplx(sx, sy), 0},
                {cplx(sx, bx.lo.imag()), cplx(bx.hi.real(), sy), 0},
                {cplx(bx.lo.real(), sy), cplx(sx, bx.hi.imag()), 0},
                {cplx(sx, sy), bx.hi, 0}};
            Box ch[4];
            int wsum = 0;
            bool all = true;
            for (int t = 0; t < 4 && all; ++t) {
                Box c = cand[t];
                if (!rect_winding(f, a, b, N, c.lo, c.hi, c.winding, -18.0))
                    all = false;
                else {
                    wsum += c.winding;
                    ch[t] = c;
                }
            }
            if (all && wsum == bx.winding) {
                for (int t = 0; t < 4; ++t)
                    if (ch[t].winding > 0) stack.push_back(ch[t]);
                split_ok = true;
                break;
            }
        }
        if (!split_ok) {
            // unresolvable box: fall back to Newton from a probe fan
            for (int p = 0; p < 8; ++p) {
                const double ang = kTau * p / 8.0;
                const cplx start =
                    bx.center() + cplx(0.2 * bx.wx() * std::cos(ang),
                                       0.2 * bx.wy() * std::sin(ang));
                cplx r;
                double resid = 0.0;
                if (newton_polish(f, a, b, N, start,
                                  std::max(bx.wx(), bx.wy()), bx.center(), r,
                                  resid) &&
                    bx.inside(r, 1e-9)) {
                    found.emplace_back(r, 1);
                    res.stats.max_residual =
                        std::max(res.stats.max_residual, resid);
                }
            }
            ++res.stats.newton_failures;
        }
    }
    // dedupe at 1e-9 with multiplicity accounting, deterministic order
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
        return std::array<double, 2>{x.first.real(), x.first.imag()} <
               std::array<double, 2>{y.first.real(), y.first.imag()};
    });
    std::vector<std::pair<cplx, int>> uniq;
    for (const auto& [r, m] : found) {
        if (!uniq.empty() && std::abs(uniq.back().first - r) < 1e-9)
            uniq.back().second = std::max(uniq.back().second, m);
        else
            uniq.emplace_back(r, m);
    }
    for (const auto& [r, m] : uniq)
        for (int t = 0; t < m; ++t) res.roots.push_back(r);
    return res;
}

}  // namespace hlab
