#pragma once

#include <vector>

#include "hlab/henon.hpp"

namespace hlab {

/// Zero finder for g(zeta) = pi_1(f^N(zeta, b)) - a on a square box,
/// by winding counts on subdivided boxes plus Newton polishing.
struct RootSolveStats {
    int total_winding = 0;     // zeros inside the initial box (with mult.)
    int newton_failures = 0;
    double max_residual = 0.0; // |g| at the accepted roots
    int boxes_processed = 0;
};

struct RootSolveResult {
    std::vector<cplx> roots;   // deduped; multiplicities expanded
    RootSolveStats stats;
};

/// Winding number of g around 0 along the boundary of the square
/// [cx-hw, cx+hw] x [cy-hw, cy+hw], by adaptive argument tracking in
/// scaled (overflow-free) arithmetic. Returns false when a boundary
/// sample gets within `guard` of a zero (caller perturbs the box).
bool box_winding(const HenonLikeMap& f, cplx a, cplx b, int N, cplx center,
                 double hw, int& winding, double guard_log = -18.0);

/// All zeros of g in the centered square of half-width `hw`.
RootSolveResult solve_orbit_roots(const HenonLikeMap& f, cplx a, cplx b,
                                  int N, double hw);

}  // namespace hlab
