#pragma once

#include <functional>
#include <vector>

#include "hlab/form.hpp"
#include "hlab/measure.hpp"
#include "hlab/potential.hpp"

namespace hlab {

enum class WedgeRoute : std::uint8_t {
    smooth = 0,       // direct contraction of two smooth forms
    reg_left = 1,     // R^(eps) ^ S
    reg_right = 2,    // R ^ S^(eps)
    reg_both = 3,     // R^(eps) ^ S^(eps)
};

/// Intersection measure of a vertical and a horizontal current, stored as
/// a signed density over the grid band (positive up to discretization).
struct WedgeResult {
    Grid4 density;
    int band = 2;
    Bidisk domain;
    WedgeRoute route = WedgeRoute::smooth;
    std::vector<double> epsilon_schedule;
    double mass = 0.0;
    double min_density = 0.0;
    bool positivity_ok = true;       // no cell below -1e-6 * density scale
    bool upper_envelope_only = false;  // stage gaps failed to decrease
    std::vector<double> stage_masses;
    std::vector<double> stage_gaps;  // moment distance between stages

    /// Cell atoms (grid nodes weighted by density * cell volume).
    AtomicMeasure atoms() const;
    /// Integral of a continuous test function against the measure.
    double pair(const std::function<double(cplx, cplx)>& phi) const;
    /// First moment (mass-weighted mean point).
    Pt2 mean_point() const;
};

/// Mixed contraction of two smooth opposite-orientation forms; the mass
/// contract is |R|_v * |S|_h.
WedgeResult wedge_smooth(const CoefficientForm& R, const CoefficientForm& S);

/// eps-regularized wedge: averages the structural disc of each factor over
/// the circle quadrature of the disc of center 1 and radius eps, wedges the
/// smoothed stages, and reports Cauchy diagnostics along the schedule.
WedgeResult wedge_regularized(const PotentialField& R, const PotentialField& S,
                              std::vector<double> schedule = {0.2, 0.1, 0.05,
                                                              0.025},
                              int res = kFormRes,
                              WedgeRoute route = WedgeRoute::reg_both,
                              double disc_kernel_eps = 0.3);

struct UscProbeReport {
    double base_value = 0.0;
    std::vector<double> perturbed_values;
    double limsup_estimate = 0.0;  // eps^2 extrapolation of the sequence
    double max_excess = 0.0;       // limsup estimate minus base
    bool limsup_ok = true;
};
/// Pairs mollified perturbations of (R, S) with a psh test function and
/// checks the upper-semicontinuity inequality against the base pairing.
/// Mollification inflates psh pairings by the kernel variance, so the
/// limit is read off by eps^2 extrapolation over a decreasing schedule.
UscProbeReport pairing_upper_semicontinuity_probe(
    const PotentialField& R, const PotentialField& S,
    const std::function<double(cplx, cplx)>& phi,
    const std::vector<double>& perturbations, int res = kFormRes,
    double tol = 1e-3);

}  // namespace hlab
