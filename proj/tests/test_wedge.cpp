#include "doctest.h"
#include "hlab/wedge.hpp"

#include <cmath>

using namespace hlab;

namespace {
Bidisk std_bidisk() { return Bidisk(3.0, 3.0, 0.8, 0.8, 0.9); }
}  // namespace

TEST_CASE("smooth wedge of the coordinate Kaehler forms over the band") {
    const Bidisk U(1.0, 1.0, 0.8, 0.8, 0.9);
    const int res = 20;
    const PotentialField k([](cplx z, cplx w) {
        return std::norm(z) + std::norm(w);
    }, Orientation::vertical, U, res, 0.0);
    const PotentialField kh([](cplx z, cplx w) {
        return std::norm(z) + std::norm(w);
    }, Orientation::horizontal, U, res, 0.0);
    const WedgeResult W = wedge_smooth(ddc(k), ddc(kh));
    // constant density 8/pi^2 integrated over the valid band exactly
    const double h = 2.0 / (res - 1);
    const double side = (res - 2 * W.band) * h;
    const double expected = 8.0 / (M_PI * M_PI) * std::pow(side, 4);
    CHECK(W.mass == doctest::Approx(expected).epsilon(1e-6));
    CHECK(W.positivity_ok);
}

TEST_CASE("wedge of two smoothed lines is a unit mass at the crossing") {
    const Bidisk D = std_bidisk();
    const cplx a(0.4, -0.3), b(-0.2, 0.5);
    const PotentialField R = smoothed_vertical_line(a, 0.5, D, 32);
    const PotentialField S = smoothed_horizontal_line(b, 0.5, D, 32);
    const WedgeResult W = wedge_smooth(sampled_form(R, 32),
                                       sampled_form(S, 32));
    CHECK(W.mass == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(W.positivity_ok);
    const Pt2 m = W.mean_point();
    CHECK(std::abs(m.z - a) < 1e-3);
    CHECK(std::abs(m.w - b) < 1e-3);
    // against the zero current
    const PotentialField zero(
        [](cplx, cplx) { return 0.0; }, Orientation::horizontal, D, 32, 0.0);
    const WedgeResult Z = wedge_smooth(sampled_form(R, 32),
                                       sampled_form(zero, 32));
    CHECK(std::abs(Z.mass) < 1e-12);
}

TEST_CASE("regularized wedge agrees with the smooth wedge stage by stage") {
    const Bidisk D = std_bidisk();
    const cplx a(0.3, 0.2), b(0.1, -0.4);
    const PotentialField R = smoothed_vertical_line(a, 0.5, D, 32);
    const PotentialField S = smoothed_horizontal_line(b, 0.5, D, 32);
    const WedgeResult Ws = wedge_smooth(sampled_form(R, 32),
                                        sampled_form(S, 32));
    const WedgeResult Wr =
        wedge_regularized(R, S, {0.2, 0.1, 0.05}, 32, WedgeRoute::reg_both);
    for (double m : Wr.stage_masses)
        CHECK(m == doctest::Approx(Ws.mass).epsilon(1e-3));
    CHECK(std::abs(Wr.mean_point().z - a) < 5e-3);
    CHECK(std::abs(Wr.mean_point().w - b) < 5e-3);
}

TEST_CASE("the three regularization routes agree in low moments") {
    const Bidisk D = std_bidisk();
    const PotentialField R = smoothed_vertical_line(cplx(0.4, 0.0), 0.5, D, 24);
    const PotentialField S =
        smoothed_horizontal_line(cplx(-0.3, 0.2), 0.5, D, 24);
    const std::vector<double> sched{0.1, 0.05, 0.025};
    const WedgeResult wl = wedge_regularized(R, S, sched, 24, WedgeRoute::reg_left);
    const WedgeResult wr = wedge_regularized(R, S, sched, 24, WedgeRoute::reg_right);
    const WedgeResult wb = wedge_regularized(R, S, sched, 24, WedgeRoute::reg_both);
    const auto ml = wl.atoms().moments(2);
    const auto mr = wr.atoms().moments(2);
    const auto mb = wb.atoms().moments(2);
    CHECK(moment_distance(ml, mr) < 2e-3);
    CHECK(moment_distance(ml, mb) < 2e-3);
    CHECK(moment_distance(mr, mb) < 2e-3);
}

TEST_CASE("regularized wedge of raw lines concentrates at the crossing") {
    const Bidisk D = std_bidisk();
    const cplx a(0.3, -0.2), b(0.25, 0.15);
    const PotentialField R = vertical_line(a, D, 32);
    const PotentialField S = horizontal_line(b, D, 32);
    const WedgeResult W =
        wedge_regularized(R, S, {0.04, 0.02, 0.01}, 32, WedgeRoute::reg_both);
    CHECK(W.mass == doctest::Approx(1.0).epsilon(1e-3));
    const Pt2 m = W.mean_point();
    CHECK(std::abs(m.z - a) < 1e-2);
    CHECK(std::abs(m.w - b) < 1e-2);
    // nearly all mass sits near the crossing
    const AtomicMeasure atoms = W.atoms();
    double near = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (std::abs(atoms.points[i].z - a) < 0.8 &&
            std::abs(atoms.points[i].w - b) < 0.8)
            near += atoms.weights[i];
    CHECK(near / W.mass > 0.99);
}

TEST_CASE("bilinearity of the smooth wedge") {
    const Bidisk D = std_bidisk();
    const PotentialField R1 = smoothed_vertical_line(cplx(0.3, 0), 0.4, D, 24);
    const PotentialField R2 = smoothed_vertical_line(cplx(-0.4, 0.2), 0.5, D, 24);
    const PotentialField S = smoothed_horizontal_line(cplx(0.1, 0.1), 0.5, D, 24);
    const CoefficientForm FS = sampled_form(S, 24);
    const CoefficientForm F1 = sampled_form(R1, 24);
    const CoefficientForm F2 = sampled_form(R2, 24);
    const WedgeResult w1 = wedge_smooth(F1, FS);
    const WedgeResult w2 = wedge_smooth(F2, FS);
    const WedgeResult wc = wedge_smooth(add_forms(F1, 0.25, F2, 0.75), FS);
    auto m1 = w1.atoms().moments(2);
    auto m2 = w2.atoms().moments(2);
    auto mc = wc.atoms().moments(2);
    // combine (mass-weighted, both unit mass so plain convex combination)
    std::vector<double> comb(m1.size());
    for (std::size_t i = 0; i < m1.size(); ++i)
        comb[i] = 0.25 * m1[i] + 0.75 * m2[i];
    CHECK(wc.mass == doctest::Approx(0.25 * w1.mass + 0.75 * w2.mass)
                         .epsilon(1e-9));
    CHECK(moment_distance(comb, mc) < 1e-3);
}

TEST_CASE("upper semicontinuity of the pairing under mollification") {
    const Bidisk D = std_bidisk();
    const PotentialField R = smoothed_vertical_line(cplx(0.2, 0.1), 0.5, D, 24);
    const PotentialField S =
        smoothed_horizontal_line(cplx(-0.1, 0.3), 0.5, D, 24);
    auto one = [](cplx, cplx) { return 1.0; };
    const UscProbeReport mass_rep =
        pairing_upper_semicontinuity_probe(R, S, one, {0.5, 0.4}, 24);
    CHECK(mass_rep.base_value == doctest::Approx(1.0).epsilon(2e-3));
    for (double v : mass_rep.perturbed_values)
        CHECK(v == doctest::Approx(mass_rep.base_value).epsilon(2e-3));
    CHECK(mass_rep.limsup_ok);

    auto norm2 = [](cplx z, cplx w) { return std::norm(z) + std::norm(w); };
    const UscProbeReport rep =
        pairing_upper_semicontinuity_probe(R, S, norm2, {0.5, 0.4}, 24);
    CHECK(rep.limsup_ok);
    CHECK(rep.max_excess > -1e300);  // populated
    REQUIRE(rep.perturbed_values.size() == 2);
}
