#include "doctest.h"
#include "hlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>

using namespace hlab;

namespace {

Bidisk std_bidisk() { return Bidisk(3.0, 3.0, 0.8, 0.8, 0.9); }

HenonLikeMap std_map() {
    return HenonLikeMap({cplx(-2.0), cplx(0.0), cplx(1.0)}, cplx(0.1),
                        std_bidisk());
}

const cplx kA(0.37, 0.21);
const cplx kB(-0.45, 0.3);

// all roots of a monic quartic by Durand-Kerner from spread starts
std::vector<cplx> quartic_roots(cplx c3, cplx c2, cplx c1, cplx c0) {
    std::vector<cplx> r(4);
    const cplx seed(0.4, 0.9);
    cplx p = 1.0;
    for (auto& z : r) {
        p *= seed;
        z = p;
    }
    for (int it = 0; it < 500; ++it) {
        double moved = 0.0;
        for (int i = 0; i < 4; ++i) {
            const cplx z = r[i];
            const cplx val = ((z + c3) * z + c2) * z * z + c1 * z + c0;
            cplx den = 1.0;
            for (int j = 0; j < 4; ++j)
                if (j != i) den *= z - r[j];
            const cplx step = val / den;
            r[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return r;
}

double ipow2(int e) {
    double p = 1.0;
    for (int i = 0; i < e; ++i) p *= 2.0;
    return p;
}

}  // namespace

TEST_CASE("point route: depth 0 atom and depth 1 vs quartic oracle") {
    HenonLikeMap f = std_map();
    MuCloud m0 = mu_points(f, kA, kB, 0);
    REQUIRE(m0.measure.size() == 1);
    CHECK(std::abs(m0.measure.points[0].z - kA) < 1e-15);
    CHECK(std::abs(m0.measure.points[0].w - kB) < 1e-15);
    CHECK(m0.measure.weights[0] == 1.0);

    MuCloud m1 = mu_points(f, kA, kB, 1);
    REQUIRE(m1.measure.size() == 4);
    CHECK(m1.roots_found == 4);
    CHECK(m1.generic_ok);
    for (double w : m1.measure.weights) CHECK(w == 0.25);

    // pi_1(f^2(zeta, b)) - a expands to the monic quartic
    // zeta^4 + 2(tb-2) zeta^2 + t zeta + ((tb-2)^2 - 2 - a)
    const cplx t(0.1);
    const cplx u0 = t * kB - 2.0;
    std::vector<cplx> oracle =
        quartic_roots(0.0, 2.0 * u0, t, u0 * u0 - 2.0 - kA);
    // oracle roots -> atoms f(zeta, b), matched greedily
    for (cplx zeta : oracle) {
        const Pt2 atom = f.forward(Pt2{zeta, kB});
        double best = 1e300;
        for (const Pt2& p : m1.measure.points)
            best = std::min(best,
                            std::abs(p.z - atom.z) + std::abs(p.w - atom.w));
        CHECK(best < 1e-8);
    }
}

TEST_CASE("point route: full root counts, equal weights, unit mass") {
    HenonLikeMap f = std_map();
    for (int n = 2; n <= 4; ++n) {
        MuCloud mu = mu_points(f, kA, kB, n);
        CHECK(mu.roots_found == mu.roots_expected);
        CHECK(mu.generic_ok);
        CHECK(mu.max_residual < 1e-8);
        const double w = 1.0 / ipow2(2 * n);
        for (double wi : mu.measure.weights) CHECK(wi == w);
        CHECK(mu.measure.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

        // K membership proxy: atoms bounded both directions for n steps
        int bounded = 0;
        for (const Pt2& x : mu.measure.points)
            if (!iterate_orbit(f, x, n).escaped &&
                !iterate_orbit(f, x, n, true).escaped)
                ++bounded;
        CHECK(bounded >= 0.99 * static_cast<double>(mu.measure.size()));
    }
}

TEST_CASE("route agreement: points, wedge, forms at depth 4") {
    HenonLikeMap f = std_map();
    const Bidisk D = std_bidisk();
    MuCloud pts = mu_points(f, kA, kB, 4);
    const auto mp = pts.measure.moments(2);

    WedgeResult w = mu_wedge(f, 4, 32);
    CHECK(w.mass == doctest::Approx(1.0).epsilon(1e-3));
    const auto mw = w.atoms().moments(2);
    CHECK(moment_distance(mp, mw) < 0.05);

    const PotentialField R =
        smoothed_vertical_line(cplx(0.3, -0.2), 0.8, D, 32);
    const PotentialField S =
        smoothed_horizontal_line(cplx(-0.1, 0.25), 0.8, D, 32);
    WedgeResult wf = mu_forms(f, R, S, 4, 4, 32);
    CHECK(wf.mass == doctest::Approx(1.0).epsilon(1e-3));
    const auto mf = wf.atoms().moments(2);
    CHECK(moment_distance(mp, mf) < 0.05);
    CHECK(moment_distance(mw, mf) < 0.05);
}

TEST_CASE("wedge density concentrates on the two-sided non-escaping set") {
    HenonLikeMap f = std_map();
    WedgeResult w = mu_wedge(f, 4, 32);
    const auto& g = w.density;
    double tot = 0.0, in = 0.0;
    std::size_t cells = 0, cells_in = 0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        int i, j, k, l;
        g.unravel(idx, i, j, k, l);
        const double den = std::abs(g.values()[idx]);
        const Pt2 x = g.node(i, j, k, l);
        const bool ok = !iterate_orbit(f, x, 1).escaped &&
                        !iterate_orbit(f, x, 1, true).escaped;
        if (den != 0.0) {
            tot += den;
            if (ok) in += den;
        }
        ++cells;
        if (ok) ++cells_in;
    }
    const double mass_fraction = in / tot;
    const double volume_fraction =
        static_cast<double>(cells_in) / static_cast<double>(cells);
    CHECK(mass_fraction > 0.9);
    // concentration: far above the volume share of the same set
    CHECK(mass_fraction > 3.0 * volume_fraction);
}

TEST_CASE("unbalanced form route collapses onto the balanced one") {
    HenonLikeMap f = std_map();
    const Bidisk D = std_bidisk();
    const PotentialField R =
        smoothed_vertical_line(cplx(0.3, -0.2), 0.8, D, 32);
    const PotentialField S =
        smoothed_horizontal_line(cplx(-0.1, 0.25), 0.8, D, 32);
    std::vector<double> gap;
    for (int n = 1; n <= 3; ++n) {
        WedgeResult w0 = mu_forms(f, R, S, n, n, 32);
        WedgeResult w2 = mu_forms(f, R, S, n + 2, n, 32);
        CHECK(w0.mass == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(w2.mass == doctest::Approx(1.0).epsilon(2e-3));
        gap.push_back(
            moment_distance(w0.atoms().moments(2), w2.atoms().moments(2)));
    }
    CHECK(gap[1] < gap[0]);
    CHECK(gap[2] < gap[1]);
    CHECK(gap[2] < 0.01);
}

TEST_CASE("pushforward invariance of the point clouds") {
    HenonLikeMap f = std_map();
    // saddle fixed point z = w, z^2 - 2 + 0.1 z = z
    const double zf = (0.9 + std::sqrt(0.81 + 8.0)) / 2.0;
    MuCloud fixed;
    fixed.measure.add(Pt2{zf, zf}, 1.0);
    CHECK(invariance_test(fixed, f, 2) < 1e-12);
    CHECK(invariance_test(fixed, f, 2, true) < 1e-12);

    // f_* mu_n mixes truncation depths (n-1, n+1), so its discrepancy
    // tracks the coarser adjacent gap between depths n-1 and n
    MuCloud p3 = mu_points(f, kA, kB, 3);
    MuCloud p4 = mu_points(f, kA, kB, 4);
    const double gap34 =
        moment_distance(p3.measure.moments(2), p4.measure.moments(2));
    CHECK(invariance_test(p4, f, 2) <= 2.0 * gap34);
    CHECK(invariance_test(p4, f, 2, true) <= 2.0 * gap34);
}

TEST_CASE("mixing correlation of the coordinate pair collapses") {
    HenonLikeMap f = std_map();
    MuCloud p4 = mu_points(f, kA, kB, 4);
    MuCloud p5 = mu_points(f, kA, kB, 5);
    const double noise = moment_distance(p4.measure.moments(2),
                                         p5.measure.moments(2));

    const auto re_z = [](Pt2 x) { return x.z.real(); };
    const auto re_w = [](Pt2 x) { return x.w.real(); };
    const auto one = [](Pt2) { return 1.0; };

    // C(0) with phi = psi is a variance
    MixingResult c0 = mixing_correlation(p5, f, re_z, re_z, 0);
    CHECK(c0.value >= 0.0);
    CHECK(c0.escaped_atoms == 0);

    // constant observable cancels exactly
    for (int m = 0; m <= 3; ++m)
        CHECK(std::abs(mixing_correlation(p5, f, one, re_w, m).value) <
              1e-13);

    // coordinate pair: below 3x the truncation noise by m = n/2
    MixingResult c0p = mixing_correlation(p5, f, re_z, re_w, 0);
    for (int m = 1; m <= 3; ++m) {
        MixingResult cm = mixing_correlation(p5, f, re_z, re_w, m);
        CHECK(cm.escaped_atoms == 0);
        CHECK(std::abs(cm.value) < 3.0 * noise);
        CHECK(std::abs(cm.value) <= std::abs(c0p.value));
    }
}

TEST_CASE("cesaro averages approach the intersection measure like 1/n") {
    HenonLikeMap f = std_map();
    const Bidisk D = std_bidisk();
    const PotentialField S =
        smoothed_horizontal_line(cplx(-0.1, 0.25), 0.8, D, 32);

    // n = 1: single term [z=a] ^ f_* S, supported on the line z = a
    AtomicMeasure c1 = cesaro_measure(f, kA, S, 1);
    CHECK(c1.total_mass() == doctest::Approx(1.0).epsilon(2e-3));
    double off = 0.0;
    for (const Pt2& x : c1.points) off = std::max(off, std::abs(x.z - kA));
    CHECK(off < 1e-9);

    MuCloud pts = mu_points(f, kA, kB, 4);
    const auto mp = pts.measure.moments(2);
    AtomicMeasure c4 = cesaro_measure(f, kA, S, 4);
    AtomicMeasure c6 = cesaro_measure(f, kA, S, 6);
    CHECK(c4.total_mass() == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(c6.total_mass() == doctest::Approx(1.0).epsilon(2e-3));

    // boundary terms contribute a C/n moment error; check the 1/n law
    const double d4 = moment_distance(mp, c4.moments(2));
    const double d6 = moment_distance(mp, c6.moments(2));
    CHECK(6.0 * d6 == doctest::Approx(4.0 * d4).epsilon(0.05));

    // eliminating the 1/n term lands on the point-route moments
    auto m4 = c4.moments(2);
    auto m6 = c6.moments(2);
    std::vector<double> extrap(m4.size());
    for (std::size_t i = 0; i < extrap.size(); ++i)
        extrap[i] = 3.0 * m6[i] - 2.0 * m4[i];
    CHECK(moment_distance(mp, extrap) < 0.01);

    const PotentialField Rv =
        smoothed_vertical_line(cplx(0.3, -0.2), 0.8, D, 32);
    CHECK_THROWS(cesaro_measure(f, kA, Rv, 2));  // wrong orientation
}

TEST_CASE("point route is reproducible call to call") {
    HenonLikeMap f = std_map();
    MuCloud a = mu_points(f, kA, kB, 3);
    MuCloud b = mu_points(f, kA, kB, 3);
    REQUIRE(a.measure.size() == b.measure.size());
    for (std::size_t i = 0; i < a.measure.size(); ++i) {
        CHECK(a.measure.points[i].z == b.measure.points[i].z);
        CHECK(a.measure.points[i].w == b.measure.points[i].w);
    }
}
