#pragma once

#include <functional>

#include "hlab/measure.hpp"
#include "hlab/roots.hpp"
#include "hlab/wedge.hpp"

namespace hlab {

enum class MuRoute : std::uint8_t { points = 0, wedge = 1, forms = 2 };

/// Discrete approximation of the intersection measure, with the solver
/// bookkeeping needed to detect degenerate parameter choices.
struct MuCloud {
    AtomicMeasure measure;
    int n = 0;
    cplx a{};
    cplx b{};
    MuRoute route = MuRoute::points;
    int roots_found = 0;
    int roots_expected = 0;
    int newton_failures = 0;
    double max_residual = 0.0;
    bool generic_ok = false;  // found/expected >= 0.95
};

/// Intersection of the n-fold forward image of {w=b} with the n-fold
/// preimage of {z=a}: atoms f^n(zeta, b) over the roots zeta of
/// pi_1(f^{2n}(zeta, b)) = a, each of weight d^{-2n}.
MuCloud mu_points(const HenonLikeMap& f, cplx a, cplx b, int n);

/// Wedge of the two Green currents at depth n. The optional mollification
/// scale is off by default: the raw FD forms conserve the wedge mass to
/// 1e-4 by grid-sum telescoping, while smoothing biases it past 1e-3.
WedgeResult mu_wedge(const HenonLikeMap& f, int n, int res = kFormRes,
                     double smoothing = 0.0);

/// Wedge of the m-fold normalized pullback of a smooth vertical potential
/// with the n-fold normalized pushforward of a smooth horizontal one;
/// supports the unbalanced (m != n) route.
WedgeResult mu_forms(const HenonLikeMap& f, const PotentialField& R,
                     const PotentialField& S, int m, int n,
                     int res = kFormRes, double smoothing = 0.0);

/// Wraps the cell atoms of a wedge density as a cloud (for the shared
/// moment/invariance/mixing probes).
MuCloud cloud_from_wedge(const WedgeResult& w, int n, MuRoute route);

/// Max absolute discrepancy of all mixed moments up to moment_degree
/// between the cloud and its pushforward by f (or f^{-1}).
double invariance_test(const MuCloud& mu, const HenonLikeMap& f,
                       int moment_degree, bool backward = false);

struct MixingResult {
    double value = 0.0;      // C(m) = <phi o f^m . psi o f^-m> - <phi><psi>
    int escaped_atoms = 0;   // atoms leaving the domain within m steps
};
MixingResult mixing_correlation(const MuCloud& mu, const HenonLikeMap& f,
                                const std::function<double(Pt2)>& phi,
                                const std::function<double(Pt2)>& psi, int m);

/// Cesaro average (1/n) sum_j d^{-n} (f^j)^*[z=a] ^ (f^{n-j})_* S.
/// Each term is realized exactly on the variety {pi_1(f^n x) = a}: per
/// w-quadrature node the roots in z carry the restriction coefficient of
/// S's Hessian along the variety, pushed forward n-j steps.
AtomicMeasure cesaro_measure(const HenonLikeMap& f, cplx a,
                             const PotentialField& S, int n, int qres = 32);

}  // namespace hlab
