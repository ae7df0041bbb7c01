#pragma once

#include <functional>
#include <vector>

#include "hlab/form.hpp"
#include "hlab/kernel.hpp"
#include "hlab/potential.hpp"

namespace hlab {

/// Affine disc family h_{a,b,theta}(z,w) = (theta z + (1-theta) a,
/// w + (theta-1) b): identity at theta = 1, projection onto {z = a}
/// (shifted by -b in w) at theta = 0.
Pt2 h_map(cplx a, cplx b, cplx theta, Pt2 x);
/// Inverse of h_map; undefined at theta = 0.
Pt2 h_map_inverse(cplx a, cplx b, cplx theta, Pt2 x);

/// Disc of currents through a base vertical current: the theta-slice is
/// the (a,b)-average of the pushforwards of the base by h_{a,b,theta},
/// against a compactly supported product mollifier near kernel_center.
struct StructuralDiscSpec {
    PotentialField base;
    cplx center_a = 0.0, center_b = 0.0;
    SmoothingKernel kernel{0.3};
    int quadrature_nodes = 12;  // Gauss-Legendre nodes per real axis
    // rectangle neighborhood of [0,1] in the theta plane
    double theta_re_lo = -0.25, theta_re_hi = 1.25, theta_im_hw = 0.5;

    bool theta_in_domain(cplx th) const {
        return th.real() >= theta_re_lo && th.real() <= theta_re_hi &&
               std::abs(th.imag()) <= theta_im_hw;
    }
    /// Kernel support must sit strictly inside the inner sub-bidisk.
    void validate() const;
};

/// Potential of the theta-slice: U_theta(x) = avg over (a,b) of
/// u(h^{-1}_{a,b,theta}(x)). theta = 0 uses the averaged-line closed form.
/// Slice mass equals the base mass for every theta.
PotentialField disc_slice(const StructuralDiscSpec& spec, cplx theta);

/// Average of the disc slices over the uniform law on the disc of center 1
/// and radius eps (center node + 16-point circle at radius eps/2): the
/// current regularization R^(eps). Sampled on a res-per-axis grid with the
/// exact quadrature evaluator kept for collar integrals.
PotentialField disc_circle_average(const StructuralDiscSpec& spec, double eps,
                                   int res);

struct SubharmonicityReport {
    double worst_violation = -1e300;  // positive = sub-mean failure
    double max_spread = 0.0;          // sup-inf of all sampled pairings
    double max_circle_gap = 0.0;      // worst |center - circle average|
    int centers = 0;
    std::vector<std::pair<cplx, double>> values;  // (theta, pairing)
};
/// Samples theta -> <disc_slice(theta), phi> and tests the sub-mean
/// inequality on circles around each sampled center. For closed phi the
/// pairing is constant; for ddc-nonnegative phi it is subharmonic.
SubharmonicityReport subharmonicity_check(const StructuralDiscSpec& spec,
                                          const CoefficientForm& phi,
                                          const std::vector<cplx>& theta_samples,
                                          const std::vector<double>& circle_radii,
                                          int circle_points = 8);

struct DiscRegularityReport {
    double lipschitz_c = 0.0;  // sup |U_theta - U_0| / |theta| near 0
    std::vector<std::pair<double, double>> modulus_curve;  // (|1-theta|, dist)
    double fit_a = 1.0;   // dilation inside the modulus bound
    double fit_c = 0.0;   // constant of the modulus bound
    double fit_residual = 0.0;
    bool conforming = true;
};
/// Distance of the theta-slice from the endpoints along real rays:
/// linear in |theta| near 0, controlled by the base's modulus of
/// continuity near 1.
DiscRegularityReport disc_regularity_probe(const StructuralDiscSpec& spec);

struct KobayashiChainReport {
    bool zero_chain = false;          // R == S, empty chain
    std::vector<std::pair<int, double>> degeneracy_bounds;  // (A, bound)
    double slice_check_error = 0.0;   // A-family slice vs circle measure
    double generic_bound = 0.0;       // two discs through the common endpoint
    double endpoint_gap = 0.0;        // sup distance of the two endpoints
};
/// Upper bounds on the disc-chain pseudo-distance between two normalized
/// vertical currents. The one-disc family max(log|z|, log|theta|/A)
/// connects the line through 0 to the circle-average current at radius
/// 1/2 with cost artanh(2^-A) -> 0, so the pseudo-distance degenerates.
KobayashiChainReport kobayashi_chain_bound(const PotentialField& R,
                                           const PotentialField& S,
                                           const std::vector<int>& A_values);

struct ReconstructionProbe {
    cplx theta0;
    cplx z0;
    cplx w0;
};
struct ReconstructionValue {
    double value = 0.0;
    std::vector<double> stages;  // one per (eps, delta) stage, decreasing
    bool converged = false;
};
/// Double-slice potential U(theta0, z0, w0): the w0-slice of the theta0
/// member paired with log|z - z0|, computed through a decreasing
/// (eps, delta) schedule of circle means (eps in w, delta in z).
std::vector<ReconstructionValue> reconstruct_potential_from_slices(
    const std::function<PotentialField(cplx)>& family,
    const std::vector<ReconstructionProbe>& probes);

/// L1 gap between the z-plane mass densities of the reconstruction and of
/// the family member itself at (theta0, w0); small means the two differ
/// by a harmonic function only.
double reconstruction_ddc_gap(const std::function<PotentialField(cplx)>& family,
                              cplx theta0, cplx w0, int res);

}  // namespace hlab
