#include "doctest.h"
#include "hlab/form.hpp"

#include <cmath>

using namespace hlab;

namespace {
Bidisk std_bidisk() { return Bidisk(3.0, 3.0, 0.8, 0.8, 0.9); }
HenonLikeMap std_map() {
    return HenonLikeMap({cplx(-2, 0), cplx(0, 0), cplx(1, 0)}, cplx(0.1, 0),
                        std_bidisk());
}

// radial bump (1 - |z-c|^2/rho^2)^3, compactly supported in the rho-disk
double bump(cplx z, cplx c, double rho) {
    const double v = std::norm(z - c) / (rho * rho);
    return v < 1.0 ? (1.0 - v) * (1.0 - v) * (1.0 - v) : 0.0;
}
// integral of the bump over its disk: pi rho^2 / 4
double bump_integral(double rho) { return M_PI * rho * rho / 4.0; }
}  // namespace

TEST_CASE("wedge density calibration: products of coordinate Kaehler forms") {
    const Bidisk U(1.0, 1.0, 0.8, 0.8, 0.9);
    const PotentialField uz([](cplx z, cplx) { return std::norm(z); },
                            Orientation::vertical, U, 20, 0.0);
    const PotentialField uw([](cplx, cplx w) { return std::norm(w); },
                            Orientation::horizontal, U, 20, 0.0);
    const CoefficientForm R = ddc(uz);
    const CoefficientForm S = ddc(uw);
    // density is constant; integrating it over the unit bidisk gives 4
    const double d = contraction_density(R, S, 8, 8, 8, 8);
    CHECK(d == doctest::Approx(4.0 / (M_PI * M_PI)).epsilon(1e-8));

    const PotentialField k([](cplx z, cplx w) {
        return std::norm(z) + std::norm(w);
    }, Orientation::vertical, U, 20, 0.0);
    const PotentialField kh([](cplx z, cplx w) {
        return std::norm(z) + std::norm(w);
    }, Orientation::horizontal, U, 20, 0.0);
    const CoefficientForm K = ddc(k), Kh = ddc(kh);
    // self-wedge of the full Kaehler form integrates to 8
    CHECK(contraction_density(K, Kh, 9, 7, 8, 10) ==
          doctest::Approx(8.0 / (M_PI * M_PI)).epsilon(1e-8));
}

TEST_CASE("hessian of a quartic polynomial yields a closed form") {
    const Bidisk D = std_bidisk();
    const PotentialField u([](cplx z, cplx w) {
        const double a = std::norm(z), b = std::norm(w);
        return a * a + b * b + (z * z * std::conj(w * w)).real();
    }, Orientation::vertical, D, 24, 0.0);
    const CoefficientForm F = ddc(u);
    // the stencils are exact on quartics: D(ddc u) vanishes identically
    CHECK(ddc_mass(F) < 1e-8 * F.sup_norm());
}

TEST_CASE("slice mass of the smoothed line form is one") {
    const Bidisk D = std_bidisk();
    const PotentialField R = smoothed_vertical_line(cplx(0.2, 0.3), 0.5, D, 32);
    REQUIRE(R.has_hessian());
    const CoefficientForm F = sampled_form(R, 32);
    const SliceMassReport m = form_slice_mass(F);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(F.positive(1e-9));
}

TEST_CASE("pairing a line current with a compactly supported test form") {
    const Bidisk D = std_bidisk();
    const cplx a(0.4, -0.3);
    const double rho_z = 2.0, rho_w = 1.5;
    // phi = g(z) h(w) (i/pi) dw ^ dwbar, compactly supported
    CoefficientForm phi(Grid4::bidisk_axes(D, 32), D,
                        Orientation::horizontal, 2);
    const auto& ax = phi.axes();
    for (int i = 0; i < ax[0].n; ++i)
        for (int j = 0; j < ax[1].n; ++j)
            for (int k = 0; k < ax[2].n; ++k)
                for (int l = 0; l < ax[3].n; ++l) {
                    const Pt2 x = phi.hww.node(i, j, k, l);
                    phi.hww.at(i, j, k, l) =
                        bump(x.z, cplx(0), rho_z) * bump(x.w, cplx(0), rho_w);
                }
    CHECK(phi.boundary_sup() == 0.0);

    // <[z=a], phi> = (2/pi) g(a) * integral of h over the w-plane
    const double exact =
        2.0 / M_PI * bump(a, cplx(0), rho_z) * bump_integral(rho_w);

    const PotentialField R = vertical_line(a, D, 48);
    const PairingResult p = pair_current_form(R, phi);
    CHECK(p.has_by_parts);
    CHECK(p.value == p.by_parts);
    CHECK(p.value == doctest::Approx(exact).epsilon(2e-2));

    // smoothed line: contraction of the exact hessian agrees too
    const PotentialField Rs = smoothed_vertical_line(a, 0.4, D, 48);
    const PairingResult ps = pair_current_form(Rs, phi);
    CHECK(ps.contraction == doctest::Approx(exact).epsilon(2e-2));
    CHECK(ps.by_parts == doctest::Approx(exact).epsilon(2e-2));
}

TEST_CASE("pullback of the vertical Kaehler form matches |p'|^2") {
    const Bidisk D = std_bidisk();
    HenonLikeMap f = std_map();
    const PotentialField u([](cplx z, cplx) { return std::norm(z); },
                           Orientation::vertical, D, 24, 0.0);
    const CoefficientForm F = ddc(u);
    const CoefficientForm G = pullback_form(f, F);
    const auto& ax = G.axes();
    int checked = 0;
    for (int i = 2; i < ax[0].n - 2; i += 3)
        for (int j = 2; j < ax[1].n - 2; j += 3)
            for (int k = 2; k < ax[2].n - 2; k += 3)
                for (int l = 2; l < ax[3].n - 2; l += 3) {
                    const Pt2 x = G.hzz.node(i, j, k, l);
                    const Pt2 y = f.forward(x);
                    if (std::abs(y.z) > 0.8 * D.m_radius ||
                        std::abs(y.w) > 0.8 * D.n_radius)
                        continue;
                    const cplx dp = f.dpoly(x.z);
                    CHECK(G.hzz.at(i, j, k, l) ==
                          doctest::Approx(std::norm(dp)).epsilon(1e-6));
                    CHECK(G.hww.at(i, j, k, l) ==
                          doctest::Approx(std::norm(f.twist())).epsilon(1e-6));
                    const cplx off(G.hzw_re.at(i, j, k, l),
                                   G.hzw_im.at(i, j, k, l));
                    CHECK(std::abs(off - dp * std::conj(f.twist())) < 1e-6);
                    ++checked;
                }
    CHECK(checked > 50);
}

TEST_CASE("splitting a test form as a difference of ddc-nonnegative forms") {
    const Bidisk D = std_bidisk();
    CoefficientForm psi(Grid4::bidisk_axes(D, 24), D,
                        Orientation::horizontal, 2);
    const auto& ax = psi.axes();
    for (int i = 0; i < ax[0].n; ++i)
        for (int j = 0; j < ax[1].n; ++j)
            for (int k = 0; k < ax[2].n; ++k)
                for (int l = 0; l < ax[3].n; ++l) {
                    const Pt2 x = psi.hww.node(i, j, k, l);
                    psi.hww.at(i, j, k, l) = 0.7 * bump(x.z, cplx(0.3, 0), 2.0) *
                                             bump(x.w, cplx(0, -0.2), 1.4);
                    psi.hzz.at(i, j, k, l) = -0.4 * bump(x.z, cplx(0), 1.8) *
                                             bump(x.w, cplx(0), 1.5);
                }
    const auto [p1, p2] = decompose_test_form(psi);
    // p1 - p2 reproduces psi entrywise
    for (std::size_t t = 0; t < psi.hww.size(); ++t) {
        CHECK(p1.hww.values()[t] - p2.hww.values()[t] ==
              doctest::Approx(psi.hww.values()[t]).epsilon(1e-10));
        CHECK(p1.hzz.values()[t] - p2.hzz.values()[t] ==
              doctest::Approx(psi.hzz.values()[t]).epsilon(1e-10));
    }
    // both pieces have nonnegative ddc on the grid
    const Grid4 d1 = ddc_density(p1), d2 = ddc_density(p2);
    double mn1 = 0.0, mn2 = 0.0;
    for (int i = 4; i < ax[0].n - 4; ++i)
        for (int j = 4; j < ax[1].n - 4; ++j)
            for (int k = 4; k < ax[2].n - 4; ++k)
                for (int l = 4; l < ax[3].n - 4; ++l) {
                    mn1 = std::min(mn1, d1.at(i, j, k, l));
                    mn2 = std::min(mn2, d2.at(i, j, k, l));
                }
    const double scale = std::max(1.0, p1.sup_norm());
    CHECK(mn1 > -1e-6 * scale);
    CHECK(mn2 > -1e-6 * scale);
}
