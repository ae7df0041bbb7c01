#pragma once

#include <string>

#include "hlab/henon.hpp"

namespace hlab {

struct HorizontalLikeReport {
    bool pass = false;
    int samples = 0;
    /// min over offending-shell samples of max(|f(x).z|/m, |f(x).w|/n) - 1;
    /// positive means every shell point maps strictly out of the bidisk.
    double forward_margin = 0.0;
    double backward_margin = 0.0;
    Pt2 offending_point{};  // set when pass is false
    std::string detail;
};

/// Samples the outer shells M\M' x N (forward) and M x N\N'' (backward)
/// plus the exact vertical/horizontal boundary circles and verifies that
/// their images leave the bidisk, which is the graph-avoidance condition.
HorizontalLikeReport check_horizontal_like(const HenonLikeMap& f,
                                           const Bidisk& D,
                                           int boundary_samples,
                                           std::uint64_t seed = 17);

struct DegreeReport {
    int degree = 0;        // modal root count
    double modal_fraction = 0.0;
    int trials = 0;
    bool ambiguous = false;
};

/// Number of solutions of pi_1(f^N(zeta, b)) = a in M for generic (a, b),
/// by winding counts; N = 1 gives the degree d with ||f_* S||_h = d ||S||_h.
int degree_count(const HenonLikeMap& f, cplx a, cplx b, int N = 1);

/// Modal degree_count over seeded random generic (a, b) in M' x N''.
DegreeReport dynamical_degree(const HenonLikeMap& f, const Bidisk& D,
                              int trials, std::uint64_t seed = 1234);

}  // namespace hlab
