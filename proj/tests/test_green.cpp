#include "doctest.h"
#include "hlab/green.hpp"

#include <algorithm>
#include <cmath>

#include "hlab/kernel.hpp"
#include "hlab/wedge.hpp"

using namespace hlab;

namespace {

Bidisk std_bidisk() { return Bidisk(3.0, 3.0, 0.8, 0.8, 0.9); }

HenonLikeMap std_map() {
    return HenonLikeMap({cplx(-2.0), cplx(0.0), cplx(1.0)}, cplx(0.1),
                        std_bidisk());
}

MapSequence std_sequence() {
    return MapSequence{{std_map()}, {2}, std_bidisk()};
}

// smooth psh seed with unit log growth: (1/2) log(1 + |z|^2)
PotentialField smooth_seed(const Bidisk& D, int res) {
    return PotentialField(
        [](cplx z, cplx) { return 0.5 * std::log1p(std::norm(z)); },
        Orientation::vertical, D, res, 1.0);
}

double bump3(cplx z, cplx c, double rho) {
    const double t = 1.0 - std::norm(z - c) / (rho * rho);
    return t > 0.0 ? t * t * t : 0.0;
}

// closed horizontal form g(w) dw^dwbar with unit slice mass
CoefficientForm closed_horizontal(const Bidisk& D, int res, cplx cw,
                                  double rho) {
    CoefficientForm phi(Grid4::bidisk_axes(D, res), D,
                        Orientation::horizontal, 2);
    const auto& ax = phi.hww.axes();
    for (int i = 0; i < ax[0].n; ++i)
        for (int j = 0; j < ax[1].n; ++j)
            for (int k = 0; k < ax[2].n; ++k)
                for (int l = 0; l < ax[3].n; ++l) {
                    const Pt2 x = phi.hww.node(i, j, k, l);
                    phi.hww.at(i, j, k, l) = bump3(x.w, cw, rho);
                }
    return scale_form(phi, 1.0 / form_slice_mass(phi).mean);
}

// broad closed vertical form: hzz a wide z-bump, unit slice mass
CoefficientForm broad_closed_vertical(const Bidisk& D, int res) {
    CoefficientForm beta(Grid4::bidisk_axes(D, res), D, Orientation::vertical,
                         2);
    const auto& ax = beta.hzz.axes();
    for (int i = 0; i < ax[0].n; ++i)
        for (int j = 0; j < ax[1].n; ++j)
            for (int k = 0; k < ax[2].n; ++k)
                for (int l = 0; l < ax[3].n; ++l)
                    beta.hzz.at(i, j, k, l) =
                        bump3(beta.hzz.node(i, j, k, l).z, cplx(0.0), 2.2);
    return scale_form(beta, 1.0 / form_slice_mass(beta).mean);
}

// w-cutoff: 1 on |w| <= r0, smoothly 0 past r1
double cutoff_w(cplx w, double r0, double r1) {
    const double t = (std::abs(w) - r0) / (r1 - r0);
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

CoefficientForm cutoff_form(const CoefficientForm& F, double r0, double r1) {
    CoefficientForm out = F;
    const auto& ax = out.hzz.axes();
    for (int i = 0; i < ax[0].n; ++i)
        for (int j = 0; j < ax[1].n; ++j)
            for (int k = 0; k < ax[2].n; ++k)
                for (int l = 0; l < ax[3].n; ++l) {
                    const double c =
                        cutoff_w(out.hzz.node(i, j, k, l).w, r0, r1);
                    out.hzz.at(i, j, k, l) *= c;
                    out.hww.at(i, j, k, l) *= c;
                    out.hzw_re.at(i, j, k, l) *= c;
                    out.hzw_im.at(i, j, k, l) *= c;
                }
    return out;
}

}  // namespace

TEST_CASE("a zero-stage run returns the seed unchanged") {
    const Bidisk D = std_bidisk();
    const PotentialField seed = canonical_seed(D, 10);
    const GreenRun run = green_iterate(std_sequence(), {seed}, 0, 10);
    CHECK(run.deltas.empty());
    const auto& g = run.final_potential.grid();
    const auto& ax = g.axes();
    double worst = 0.0;
    for (int i = 0; i < ax[0].n; ++i)
        for (int j = 0; j < ax[1].n; ++j)
            for (int k = 0; k < ax[2].n; ++k)
                for (int l = 0; l < ax[3].n; ++l)
                    worst = std::max(worst,
                                     std::abs(g.at(i, j, k, l) -
                                              seed.grid().at(i, j, k, l)));
    CHECK(worst < 1e-12);
}

TEST_CASE("stage deltas shrink like 1/d and slice masses stay at one") {
    const GreenRun run = green_iterate(std_sequence(),
                                       {canonical_seed(std_bidisk(), 14)}, 14,
                                       14, true);
    REQUIRE(run.deltas.size() == 14);
    CHECK(!run.unbounded_seed);
    CHECK(run.deltas_geometric(0.7, 3));
    // fitted decay rate of log(delta) vs stage is about -log 2
    CHECK(run.delta_fit.slope ==
          doctest::Approx(-std::log(2.0)).epsilon(0.2));
    CHECK(run.delta_fit.rel_residual < 0.2);
    for (double m : run.slice_masses)
        CHECK(m == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("the limit is independent of the smooth seed") {
    const Bidisk D = std_bidisk();
    const MapSequence seq = std_sequence();
    const GreenRun a = green_iterate(seq, {canonical_seed(D, 12)}, 20, 12);
    const GreenRun b = green_iterate(seq, {smooth_seed(D, 12)}, 20, 12);
    double worst = 0.0;
    const auto& ga = a.final_potential.grid();
    const auto& gb = b.final_potential.grid();
    for (std::size_t p = 0; p < ga.values().size(); ++p)
        worst = std::max(worst, std::abs(ga.values()[p] - gb.values()[p]));
    CHECK(worst < 1e-3);
}

TEST_CASE("green current slice mass and far-field log growth") {
    const HenonLikeMap f = std_map();
    const PotentialField G = green_current(f, 20, GreenDirection::forward, 20);
    const SliceMassReport m = slice_mass(G);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-3));

    // G - log|z| shrinks toward the outer radius
    double prev = 1e300;
    for (double r : {2.0, 2.5, 2.9}) {
        double worst = 0.0;
        for (int q = 0; q < 8; ++q) {
            const double t = 2.0 * M_PI * q / 8.0;
            const cplx z = r * cplx(std::cos(t), std::sin(t));
            worst = std::max(worst,
                             std::abs(G.eval(z, cplx(0.2)) - std::log(r)));
        }
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 0.15);
}

TEST_CASE("functional equation defect sits at the harmonic control floor") {
    const HenonLikeMap f = std_map();
    const PotentialField G = green_current(f, 20, GreenDirection::forward, 24);
    const InvarianceReport rep = invariance_defect(f, G, 2, 24);
    CAPTURE(rep.defect);
    CAPTURE(rep.control_floor);
    CHECK(rep.ok);
}

TEST_CASE("the dd^c mass concentrates at the escape interface") {
    const HenonLikeMap f = std_map();
    const PotentialField G = green_current(f, 20, GreenDirection::forward, 24);
    const SupportReport rep = green_support_check(f, G, 6, 4);
    CHECK(rep.total_mass > 0.0);
    CHECK(rep.boundary_fraction >= 0.99);
}

TEST_CASE("orbit-evaluated line pullbacks match the green potential") {
    const HenonLikeMap f = std_map();
    const Bidisk D = std_bidisk();
    const cplx a(0.37, -0.21), a2(-0.11, 0.29);

    const PotentialField L0 = line_pullback_green(f, a, 0, 12);
    const PotentialField V = vertical_line(a, D, 12);
    double worst = 0.0;
    for (std::size_t p = 0; p < L0.grid().values().size(); ++p)
        worst = std::max(worst, std::abs(L0.grid().values()[p] -
                                         V.grid().values()[p]));
    CHECK(worst < 1e-12);

    const int res = 20;
    const PotentialField L = line_pullback_green(f, a, 12, res);
    const PotentialField L2 = line_pullback_green(f, a2, 12, res);
    const PotentialField G =
        green_current(f, 20, GreenDirection::forward, res);
    auto quantile90 = [&](const PotentialField& u, const PotentialField& v) {
        std::vector<double> gaps;
        const auto& ax = u.grid().axes();
        for (int i = 0; i < ax[0].n; ++i)
            for (int j = 0; j < ax[1].n; ++j)
                for (int k = 0; k < ax[2].n; ++k)
                    for (int l = 0; l < ax[3].n; ++l) {
                        const Pt2 x = u.grid().node(i, j, k, l);
                        if (std::abs(x.z) > D.star_m_radius() ||
                            std::abs(x.w) > D.star_n_radius())
                            continue;
                        gaps.push_back(std::abs(u.grid().at(i, j, k, l) -
                                                v.grid().at(i, j, k, l)));
                    }
        std::sort(gaps.begin(), gaps.end());
        return gaps[static_cast<std::size_t>(0.9 * (gaps.size() - 1))];
    };
    CHECK(quantile90(L, G) < 2e-2);
    CHECK(quantile90(L, L2) < 3e-2);
}

TEST_CASE("pullback limits never beat the green pairing") {
    const HenonLikeMap f = std_map();
    const Bidisk D = std_bidisk();
    const int res = 20;
    const PotentialField G =
        green_current(f, 14, GreenDirection::forward, res);
    const GreenRun mollified = green_iterate(
        std_sequence(), {smoothed_vertical_line(cplx(0.2, 0.0), 0.5, D, res)},
        12, res);
    const std::vector<PotentialField> candidates{G,
                                                 mollified.final_potential};

    const CoefficientForm phi = lemma_base_form(D, res, 2);
    const ExtremalityReport rep = extremality_probe(f, candidates, phi, 14);
    CHECK(rep.inequality_ok);
    CHECK(!rep.phi_closed);

    const CoefficientForm phic = closed_horizontal(D, res, cplx(0.0), 1.6);
    const ExtremalityReport repc = extremality_probe(f, candidates, phic, 14);
    CHECK(repc.phi_closed);
    CHECK(repc.inequality_ok);
    CHECK(repc.equality_ok);
}

TEST_CASE("non-closed forms converge to a multiple of the green current") {
    const HenonLikeMap f = std_map();
    const Bidisk D = std_bidisk();
    const int res = 32;
    const CoefficientForm beta = broad_closed_vertical(D, res);

    // closed normalized form: both routes give c = 1
    const NonclosedLimit closed = nonclosed_limit(f, beta, 2, 12);
    CHECK(closed.c_limit == doctest::Approx(1.0).epsilon(0.02));
    CHECK(closed.c_pairing == doctest::Approx(1.0).epsilon(0.02));
    CHECK(closed.escape_fraction > 0.0);  // contamination is reported

    // cutoff forms: the limit mass equals the backward pairing
    const double radii[3][2] = {{2.3, 2.8}, {1.4, 2.2}, {0.8, 1.6}};
    for (const auto& r : radii) {
        const CoefficientForm R = cutoff_form(beta, r[0], r[1]);
        const NonclosedLimit nl = nonclosed_limit(f, R, 1, 12);
        CAPTURE(nl.c_limit);
        CAPTURE(nl.c_pairing);
        CHECK(nl.c_limit ==
              doctest::Approx(nl.c_pairing).epsilon(0.02));
    }

    // the stage pairings drift from the seed's toward c
    {
        const CoefficientForm R = cutoff_form(beta, 0.8, 1.6);
        const NonclosedLimit nl = nonclosed_limit(f, R, 1, 12);
        const std::vector<CoefficientForm> family{
            closed_horizontal(D, res, cplx(0.0), 1.2),
            closed_horizontal(D, res, cplx(0.9, 0.0), 1.5)};
        double d0 = 0.0, d1 = 0.0;
        for (const auto& phi : family) {
            d0 = std::max(d0, std::abs(wedge_smooth(R, phi).mass -
                                       nl.c_pairing));
            d1 = std::max(d1, std::abs(wedge_smooth(nl.stage, phi).mass -
                                       nl.c_pairing));
        }
        CHECK(d1 < d0);
    }

    // zero form
    const CoefficientForm Z = scale_form(beta, 0.0);
    const NonclosedLimit zero = nonclosed_limit(f, Z, 2, 10);
    CHECK(std::abs(zero.c_limit) < 1e-12);
    CHECK(std::abs(zero.c_pairing) < 1e-8);
}

TEST_CASE("constant pairings against closed forms certify closedness") {
    const HenonLikeMap f = std_map();
    const Bidisk D = std_bidisk();
    const int res = 32;
    std::vector<CoefficientForm> family;
    family.push_back(closed_horizontal(D, res, cplx(0.0), 1.2));
    family.push_back(closed_horizontal(D, res, cplx(0.9, 0.0), 1.5));
    family.push_back(closed_horizontal(D, res, cplx(-0.2, -0.8), 1.7));

    const PotentialField G =
        green_current(f, 16, GreenDirection::forward, res);
    const CoefficientForm T = sampled_form(G, res);
    const ClosedProbeReport ok = ddc_closed_probe(T, family);
    CHECK(ok.spread < 1e-3);

    // the closedness defect is read off at a grid-resolvable smoothing
    // scale and compared with an honestly non-closed control
    const CoefficientForm beta = broad_closed_vertical(D, res);
    const CoefficientForm R = cutoff_form(beta, 0.8, 1.6);
    const SmoothingKernel k(0.5);
    PotentialField Gs = regularize(G, k);
    CoefficientForm Ts = sampled_form(Gs, res);
    Ts.set_band(Ts.band() + k.radius_cells(Ts.axes()[0].h()) + 2);
    CAPTURE(ddc_mass(Ts));
    CAPTURE(ddc_mass(R));
    CHECK(ddc_mass(Ts) < 0.1 * ddc_mass(R));

    // stage forms of a non-closed seed: the closedness defect decays
    const NonclosedLimit s1 = nonclosed_limit(f, R, 1, 8);
    CHECK(ddc_mass(s1.stage) < 0.2 * ddc_mass(R));

    // negative control: the seed itself has non-constant pairings
    const ClosedProbeReport bad = ddc_closed_probe(R, family);
    CHECK(bad.spread > 0.05);
}
