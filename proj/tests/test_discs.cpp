#include "doctest.h"
#include "hlab/discs.hpp"

#include <cmath>

using namespace hlab;

namespace {
Bidisk std_bidisk() { return Bidisk(3.0, 3.0, 0.8, 0.8, 0.9); }

StructuralDiscSpec line_spec(int res = 16) {
    StructuralDiscSpec s{vertical_line(cplx(0), std_bidisk(), res)};
    s.kernel = SmoothingKernel(0.3);
    return s;
}

double bump3(double t) {
    return t < 1.0 ? (1.0 - t) * (1.0 - t) * (1.0 - t) : 0.0;
}
}  // namespace

TEST_CASE("affine disc family endpoints") {
    const cplx a(0.3, -0.1), b(0.2, 0.4);
    const Pt2 x{cplx(1.1, 0.5), cplx(-0.7, 0.2)};
    const Pt2 id = h_map(a, b, 1.0, x);
    CHECK(std::abs(id.z - x.z) == 0.0);
    CHECK(std::abs(id.w - x.w) == 0.0);
    const Pt2 proj = h_map(a, b, 0.0, x);
    CHECK(std::abs(proj.z - a) == 0.0);
    CHECK(std::abs(proj.w - (x.w - b)) == 0.0);
    const Pt2 lin = h_map(0.0, 0.0, cplx(0.5, 0.2), x);
    CHECK(std::abs(lin.z - cplx(0.5, 0.2) * x.z) == 0.0);
    CHECK(std::abs(lin.w - x.w) == 0.0);
    // round trip
    const cplx th(0.7, -0.1);
    const Pt2 rt = h_map_inverse(a, b, th, h_map(a, b, th, x));
    CHECK(std::abs(rt.z - x.z) < 1e-14);
    CHECK(std::abs(rt.w - x.w) < 1e-14);
}

TEST_CASE("disc slice endpoints: identity at 1, averaged line at 0") {
    const StructuralDiscSpec spec = line_spec();
    const PotentialField u1 = disc_slice(spec, 1.0);
    const PotentialField u0 = disc_slice(spec, 0.0);
    // theta = 1 reproduces the base pointwise
    double worst = 0.0;
    for (int i = 0; i < 9; ++i) {
        const cplx z(0.2 + 0.15 * i, -0.3 + 0.1 * i);
        const cplx w(0.1 * i, 0.2);
        worst = std::max(worst,
                         std::abs(u1.eval(z, w) - spec.base.eval(z, w)));
    }
    CHECK(worst < 1e-12);
    // theta = 0 matches an independent dense quadrature of the closed form
    const double eps = spec.kernel.epsilon;
    auto dense_u0 = [&](cplx z) {
        const int n = 201;
        double s = 0.0, tw = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double ar = -eps + 2.0 * eps * i / (n - 1);
                const double ai = -eps + 2.0 * eps * j / (n - 1);
                const double rho =
                    bump3(ar * ar / (eps * eps)) * bump3(ai * ai / (eps * eps));
                if (rho <= 0.0) continue;
                s += rho * std::log(std::abs(z - cplx(ar, ai)));
                tw += rho;
            }
        return s / tw;
    };
    for (const cplx z : {cplx(0.8, 0.1), cplx(-0.5, 0.6), cplx(1.7, 0.0)}) {
        CHECK(u0.eval(z, cplx(0.3, 0)) ==
              doctest::Approx(dense_u0(z)).epsilon(1e-4));
        // w-independent
        CHECK(u0.eval(z, cplx(0.3, 0)) ==
              doctest::Approx(u0.eval(z, cplx(-0.4, 0.2))).epsilon(1e-12));
    }
}

TEST_CASE("slice mass is one for every theta") {
    const StructuralDiscSpec spec = line_spec();
    for (const cplx th : {cplx(0.3), cplx(0.7), cplx(1.0)}) {
        const SliceMassReport m = slice_mass(disc_slice(spec, th));
        CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("pairing with a closed horizontal form is constant in theta") {
    const Bidisk D = std_bidisk();
    StructuralDiscSpec spec{smoothed_vertical_line(cplx(0), 0.5, D, 16)};
    spec.kernel = SmoothingKernel(0.3);
    // phi = beta(w) (i/pi) dw ^ dwbar is ddc-closed
    CoefficientForm phi(Grid4::bidisk_axes(D, 16), D,
                        Orientation::horizontal, 2);
    const auto& ax = phi.axes();
    for (int i = 0; i < ax[0].n; ++i)
        for (int j = 0; j < ax[1].n; ++j)
            for (int k = 0; k < ax[2].n; ++k)
                for (int l = 0; l < ax[3].n; ++l) {
                    const Pt2 x = phi.hww.node(i, j, k, l);
                    phi.hww.at(i, j, k, l) = bump3(std::norm(x.w) / 2.25);
                }
    CHECK(ddc_mass(phi) < 1e-10);
    const std::vector<cplx> centers{cplx(0.5, 0.0), cplx(0.85, 0.05)};
    const SubharmonicityReport rep =
        subharmonicity_check(spec, phi, centers, {0.1});
    CHECK(rep.centers == 2);
    CHECK(rep.max_spread < 1e-3);
    CHECK(rep.max_circle_gap < 1e-3);
    CHECK(rep.worst_violation < 1e-3);
}

TEST_CASE("pairing with a ddc-nonnegative form is subharmonic in theta") {
    const Bidisk D = std_bidisk();
    StructuralDiscSpec spec{smoothed_vertical_line(cplx(0), 0.6, D, 16)};
    spec.kernel = SmoothingKernel(0.3);
    const CoefficientForm phi = lemma_base_form(D, 16, 2);
    const SubharmonicityReport rep = subharmonicity_check(
        spec, phi, {cplx(0.6, 0.0), cplx(0.9, 0.0)}, {0.08});
    CHECK(rep.centers == 2);
    CHECK(rep.worst_violation < 1e-3);
}

TEST_CASE("disc regularity: linear near 0, vanishing modulus near 1") {
    const Bidisk D = std_bidisk();
    StructuralDiscSpec spec{smoothed_vertical_line(cplx(0.2, 0), 0.6, D, 16)};
    spec.kernel = SmoothingKernel(0.3);
    const DiscRegularityReport rep = disc_regularity_probe(spec);
    CHECK(rep.lipschitz_c > 0.0);
    CHECK(rep.lipschitz_c < 50.0);
    // distances decrease to 0 toward the identity endpoint
    REQUIRE(rep.modulus_curve.size() >= 2);
    CHECK(rep.modulus_curve.front().second < rep.modulus_curve.back().second);
    CHECK(rep.modulus_curve.front().second < 0.2);
    CHECK(rep.conforming);
}

TEST_CASE("disc regularity: the averaged-line base is fixed near 0") {
    const Bidisk D = std_bidisk();
    // base = the theta = 0 endpoint itself
    StructuralDiscSpec pre{vertical_line(cplx(0), D, 16)};
    pre.kernel = SmoothingKernel(0.3);
    PotentialField r0 = disc_slice(pre, 0.0);
    StructuralDiscSpec spec{r0};
    spec.kernel = SmoothingKernel(0.3);
    const DiscRegularityReport rep = disc_regularity_probe(spec);
    // |U_theta - U_0| stays O(theta) with a small constant
    CHECK(rep.lipschitz_c < 5.0);
}

TEST_CASE("chain bounds: degeneracy family and generic two-disc chain") {
    const Bidisk D = std_bidisk();
    const PotentialField R = smoothed_vertical_line(cplx(0), 0.4, D, 16);
    const PotentialField S = smoothed_vertical_line(cplx(0.3, 0.1), 0.5, D, 16);
    const KobayashiChainReport rep = kobayashi_chain_bound(R, S, {2, 4, 8});
    REQUIRE(rep.degeneracy_bounds.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto [A, bound] = rep.degeneracy_bounds[i];
        CHECK(bound == doctest::Approx(std::atanh(std::pow(2.0, -A)))
                           .epsilon(1e-12));
        if (i > 0) CHECK(bound < rep.degeneracy_bounds[i - 1].second);
    }
    CHECK(rep.degeneracy_bounds.back().second < 0.005);
    CHECK(rep.slice_check_error < 1e-6);
    CHECK_FALSE(rep.zero_chain);
    CHECK(rep.generic_bound == doctest::Approx(4.0 * std::atanh(0.8)));
    CHECK(rep.endpoint_gap < 1e-9);

    const KobayashiChainReport same = kobayashi_chain_bound(R, R, {2});
    CHECK(same.zero_chain);
    CHECK(same.generic_bound == 0.0);

    // unnormalized input is rejected
    CHECK_THROWS(kobayashi_chain_bound(scale_potential(R, 2.0), S, {2}));
}

TEST_CASE("double-slice reconstruction of a line and of a disc family") {
    const Bidisk D = std_bidisk();
    auto line_family = [&](cplx) { return vertical_line(cplx(0), D, 16); };
    const std::vector<ReconstructionProbe> probes{
        {cplx(0.5), cplx(0.5, 0.0), cplx(0.1, 0.2)},
        {cplx(0.5), cplx(0.13, 0.0), cplx(0.0, 0.0)},
    };
    const auto vals = reconstruct_potential_from_slices(line_family, probes);
    REQUIRE(vals.size() == 2);
    CHECK(vals[0].value == doctest::Approx(std::log(0.5)).epsilon(1e-10));
    CHECK(vals[0].converged);
    // stages decrease with the schedule
    for (const auto& v : vals)
        for (std::size_t s = 1; s < v.stages.size(); ++s)
            CHECK(v.stages[s] <= v.stages[s - 1] + 1e-3);

    StructuralDiscSpec spec{smoothed_vertical_line(cplx(0), 0.5, D, 16)};
    spec.kernel = SmoothingKernel(0.3);
    auto family = [&](cplx th) { return disc_slice(spec, th); };
    const double gap = reconstruction_ddc_gap(family, cplx(0.7), cplx(0.1), 24);
    CHECK(gap < 1e-2);
}
