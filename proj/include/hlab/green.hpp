#pragma once

#include <vector>

#include "hlab/form.hpp"
#include "hlab/henon.hpp"
#include "hlab/potential.hpp"

namespace hlab {

enum class GreenDirection : std::uint8_t { forward = 0, backward = 1 };

/// Iteration stops once the stage sup-delta drops below this, or at the
/// stage cap (d^{-n} reaches grid noise near n = 14 for d = 2).
constexpr double kGreenStopDelta = 1e-4;
constexpr int kGreenMaxStages = 25;

/// Record of one normalized-pullback iteration u_n -> (Pi d_i)^{-1}
/// (u_n o f_n o ... o f_1), evaluated pointwise along orbits.
struct GreenRun {
    GreenDirection direction = GreenDirection::forward;
    int stages = 0;
    std::vector<double> deltas;        // sup |stage_k - stage_{k-1}|, k >= 1
    std::vector<double> slice_masses;  // per kept stage (final always last)
    PotentialField final_potential;
    std::vector<PotentialField> iterates;  // stages 0..n when kept
    LineFit delta_fit;                 // log delta_k vs k after burn-in
    bool unbounded_seed = false;

    bool deltas_geometric(double ratio = 0.7, int burn_in = 3) const;
};

/// Runs n stages of the normalized pullback chain over the map sequence.
/// Seeds are used cyclically per stage; escaping cells are evaluated by
/// the scaled orbit arithmetic and the radial log continuation.
GreenRun green_iterate(const MapSequence& seq,
                       const std::vector<PotentialField>& seeds, int n,
                       int res = kDefaultRes, bool keep_iterates = false,
                       GreenDirection direction = GreenDirection::forward);

/// Green potential of f (forward: G+ with vertical dd^c; backward: G- via
/// inverse orbits). Constant sequence, canonical seed, stop rule applied
/// from a coarse pre-run. The result carries an exact orbit evaluator.
PotentialField green_current(const HenonLikeMap& f, int n,
                             GreenDirection direction = GreenDirection::forward,
                             int res = kDefaultRes);

/// d^{-n} log |pi_1(f^n(x)) - a|, orbit-evaluated pointwise so no grid
/// composition error accumulates; n = 0 is the vertical line at a.
PotentialField line_pullback_green(const HenonLikeMap& f, cplx a, int n,
                                   int res = kDefaultRes);

struct InvarianceReport {
    double defect = 0.0;         // max test pairing of ddc(G o f - d G)
    double control_floor = 0.0;  // same probe on a pluriharmonic control
    bool ok = false;             // defect <= 5 * control_floor
};
/// Functional-equation defect of a Green potential, measured weakly by
/// integration by parts against compactly supported test forms and
/// compared with the quadrature floor of a known pluriharmonic function.
InvarianceReport invariance_defect(const HenonLikeMap& f,
                                   const PotentialField& G, int degree,
                                   int res = kFormRes);

struct SupportReport {
    double boundary_fraction = 0.0;  // dd^c mass near the escape interface
    double total_mass = 0.0;
    int orbit_steps = 0;
};
/// Fraction of the dd^c mass of G carried by cells within `dilation`
/// cells of a change in the bounded-for-n-steps orbit flag (a proxy for
/// the boundary of the non-escaping set).
SupportReport green_support_check(const HenonLikeMap& f,
                                  const PotentialField& G,
                                  int orbit_steps = 6, int dilation = 4,
                                  GreenDirection direction =
                                      GreenDirection::forward);

struct ExtremalityReport {
    std::vector<double> pairings;  // candidate pairings with phi
    double t_pairing = 0.0;        // pairing of the Green current with phi
    bool phi_closed = false;
    bool inequality_ok = false;  // all pairings <= t_pairing + tol
    bool equality_ok = false;    // |pairing - t_pairing| <= tol for all
};
/// Pairs normalized-pullback limit candidates with a dd^c-nonnegative
/// horizontal form and checks domination by the Green current's pairing
/// (equality when the form is closed).
ExtremalityReport extremality_probe(const HenonLikeMap& f,
                                    const std::vector<PotentialField>& candidates,
                                    const CoefficientForm& phi, int n = 14,
                                    double tol = 1e-3);

struct NonclosedLimit {
    CoefficientForm stage;             // d^{-n} (f^n)^* R
    double c_limit = 0.0;              // slice mass of the stage form
    double c_pairing = 0.0;            // <R, backward Green current>
    std::vector<double> stage_masses;  // slice mass per stage
    double escape_fraction = 0.0;      // band cells leaving D within n steps
    bool contaminated = false;         // escape_fraction > 5%
};
/// Normalized pullback iteration of a continuous (possibly non-closed)
/// vertical form; the limit mass equals the pairing with the backward
/// Green current.
NonclosedLimit nonclosed_limit(const HenonLikeMap& f, const CoefficientForm& R,
                               int n, int green_n = 12);

struct ClosedProbeReport {
    std::vector<double> pairings;  // against the closed family
    double spread = 0.0;           // max - min of the pairings
    double ddc_mass_value = 0.0;   // closedness defect of T
};
/// Pairs T with a family of closed normalized horizontal forms; constant
/// pairings go with a small dd^c mass.
ClosedProbeReport ddc_closed_probe(const CoefficientForm& T,
                                   const std::vector<CoefficientForm>& family);

}  // namespace hlab
