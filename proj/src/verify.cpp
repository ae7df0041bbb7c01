#include "hlab/verify.hpp"

#include <algorithm>
#include <map>

#include "hlab/roots.hpp"

namespace hlab {

HorizontalLikeReport check_horizontal_like(const HenonLikeMap& f,
                                           const Bidisk& D,
                                           int boundary_samples,
                                           std::uint64_t seed) {
    if (boundary_samples < 100)
        throw std::invalid_argument(
            "check_horizontal_like: need at least 100 boundary samples");
    HorizontalLikeReport rep;
    rep.samples = boundary_samples;
    rep.forward_margin = 1e300;
    rep.backward_margin = 1e300;
    Rng rng(seed);
    auto out_margin = [&](Pt2 y) {
        return std::max(std::abs(y.z) / D.m_radius,
                        std::abs(y.w) / D.n_radius) - 1.0;
    };
    for (int s = 0; s < boundary_samples; ++s) {
        // forward: x in the shell (M \ M') x N must leave D under f
        {
            const double r =
                (s % 4 == 0)
                    ? D.m_radius  // exact vertical boundary
                    : rng.uniform(D.inner_m_radius(), D.m_radius);
            const double phi = rng.uniform(0.0, 2.0 * M_PI);
            const Pt2 x{r * cplx(std::cos(phi), std::sin(phi)),
                        rng.disk(D.n_radius)};
            const double m = out_margin(f.forward(x));
            if (m <= 0.0 && std::abs(x.z) > D.inner_m_radius()) {
                rep.offending_point = x;
                rep.detail = "forward image of an outer-shell point stays in D";
                rep.forward_margin = std::min(rep.forward_margin, m);
            }
            rep.forward_margin = std::min(rep.forward_margin, m);
        }
        // backward: x in M x (N \ N'') must leave D under f^{-1}
        {
            const double r =
                (s % 4 == 0)
                    ? D.n_radius
                    : rng.uniform(D.inner_n_radius(), D.n_radius);
            const double phi = rng.uniform(0.0, 2.0 * M_PI);
            const Pt2 x{rng.disk(D.m_radius),
                        r * cplx(std::cos(phi), std::sin(phi))};
            const double m = out_margin(f.inverse(x));
            if (m <= 0.0) {
                rep.offending_point = x;
                rep.detail =
                    "backward image of an outer-shell point stays in D";
            }
            rep.backward_margin = std::min(rep.backward_margin, m);
        }
    }
    rep.pass = rep.forward_margin > 0.0 && rep.backward_margin > 0.0;
    return rep;
}

int degree_count(const HenonLikeMap& f, cplx a, cplx b, int N) {
    RootSolveResult r =
        solve_orbit_roots(f, a, b, N, f.domain().m_radius);
    return r.stats.total_winding;
}

DegreeReport dynamical_degree(const HenonLikeMap& f, const Bidisk& D,
                              int trials, std::uint64_t seed) {
    Rng rng(seed);
    std::map<int, int> counts;
    int retries = 0;
    for (int t = 0; t < trials; ++t) {
        const cplx a = rng.disk(D.inner_m_radius());
        const cplx b = rng.disk(D.inner_n_radius());
        int w = 0;
        if (!box_winding(f, a, b, 1, cplx(0, 0), D.m_radius, w)) {
            if (++retries < 10 * trials) --t;  // degenerate draw; replace it
            continue;
        }
        ++counts[w];
    }
    DegreeReport rep;
    rep.trials = trials;
    int best = 0;
    for (const auto& [deg, c] : counts)
        if (c > best) { best = c; rep.degree = deg; }
    rep.modal_fraction = trials > 0 ? static_cast<double>(best) / trials : 0.0;
    rep.ambiguous = rep.modal_fraction < 0.95;
    return rep;
}

}  // namespace hlab
