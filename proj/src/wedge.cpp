#include "hlab/wedge.hpp"

#include <cmath>
#include <stdexcept>

#include "hlab/discs.hpp"
#include "hlab/parallel.hpp"

namespace hlab {

AtomicMeasure WedgeResult::atoms() const {
    AtomicMeasure m;
    const auto& ax = density.axes();
    const double vol = density.cell_volume();
    for (int i = band; i < ax[0].n - band; ++i)
        for (int j = band; j < ax[1].n - band; ++j)
            for (int k = band; k < ax[2].n - band; ++k)
                for (int l = band; l < ax[3].n - band; ++l) {
                    const double d = density.at(i, j, k, l);
                    if (d == 0.0) continue;
                    m.add(density.node(i, j, k, l), d * vol);
                }
    return m;
}

double WedgeResult::pair(const std::function<double(cplx, cplx)>& phi) const {
    const auto& ax = density.axes();
    const double vol = density.cell_volume();
    std::vector<double> terms;
    for (int i = band; i < ax[0].n - band; ++i)
        for (int j = band; j < ax[1].n - band; ++j)
            for (int k = band; k < ax[2].n - band; ++k)
                for (int l = band; l < ax[3].n - band; ++l) {
                    const double d = density.at(i, j, k, l);
                    if (d == 0.0) continue;
                    const Pt2 x = density.node(i, j, k, l);
                    terms.push_back(d * vol * phi(x.z, x.w));
                }
    return pairwise_sum(terms);
}

Pt2 WedgeResult::mean_point() const {
    const auto& ax = density.axes();
    double m = 0.0;
    cplx z = 0.0, w = 0.0;
    for (int i = band; i < ax[0].n - band; ++i)
        for (int j = band; j < ax[1].n - band; ++j)
            for (int k = band; k < ax[2].n - band; ++k)
                for (int l = band; l < ax[3].n - band; ++l) {
                    const double d = density.at(i, j, k, l);
                    if (d == 0.0) continue;
                    const Pt2 x = density.node(i, j, k, l);
                    m += d;
                    z += d * x.z;
                    w += d * x.w;
                }
    if (m == 0.0) return Pt2{0.0, 0.0};
    return Pt2{z / m, w / m};
}

WedgeResult wedge_smooth(const CoefficientForm& R, const CoefficientForm& S) {
    if (R.orientation() == S.orientation())
        throw std::invalid_argument(
            "wedge_smooth: orientations must be opposite");
    const auto& ax = R.axes();
    if (ax[0].n != S.axes()[0].n)
        throw std::invalid_argument("wedge_smooth: resolution mismatch");
    WedgeResult out;
    out.domain = R.domain();
    out.band = std::max(R.band(), S.band());
    out.density = Grid4(ax);
    const int b = out.band;
    const std::size_t n0 = static_cast<std::size_t>(ax[0].n);
    parallel_chunks(n0, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            if (i < b || i >= ax[0].n - b) continue;
            for (int j = b; j < ax[1].n - b; ++j)
                for (int k = b; k < ax[2].n - b; ++k)
                    for (int l = b; l < ax[3].n - b; ++l)
                        out.density.at(i, j, k, l) =
                            contraction_density(R, S, i, j, k, l);
        }
    });
    const double vol = out.density.cell_volume();
    std::vector<double> terms;
    double mn = 0.0, sup = 0.0;
    for (int i = b; i < ax[0].n - b; ++i)
        for (int j = b; j < ax[1].n - b; ++j)
            for (int k = b; k < ax[2].n - b; ++k)
                for (int l = b; l < ax[3].n - b; ++l) {
                    const double d = out.density.at(i, j, k, l);
                    terms.push_back(d);
                    mn = std::min(mn, d);
                    sup = std::max(sup, std::abs(d));
                }
    out.mass = pairwise_sum(terms) * vol;
    out.min_density = mn;
    out.positivity_ok = mn >= -1e-6 * std::max(sup, 1.0);
    return out;
}

namespace {

PotentialField drop_to_grid(const PotentialField& u, int res) {
    // same-axis resample: node values are exact, FD then acts on the grid
    if (u.grid().axis(0).n == res && !u.has_analytic()) return u;
    PotentialField v(
        [&u](cplx z, cplx w) { return u.eval(z, w); }, u.orientation(),
        u.domain(), res, u.far_coeff());
    v.drop_analytic();
    return v;
}

PotentialField regularize_by_disc(const PotentialField& u, double eps,
                                  double kernel_eps, int res) {
    if (u.orientation() == Orientation::vertical) {
        StructuralDiscSpec spec{u};
        spec.kernel = SmoothingKernel(kernel_eps);
        return disc_circle_average(spec, eps, res);
    }
    StructuralDiscSpec spec{transpose_potential(u)};
    spec.kernel = SmoothingKernel(kernel_eps);
    return transpose_potential(disc_circle_average(spec, eps, res));
}

}  // namespace

WedgeResult wedge_regularized(const PotentialField& R, const PotentialField& S,
                              std::vector<double> schedule, int res,
                              WedgeRoute route, double disc_kernel_eps) {
    if (R.orientation() != Orientation::vertical ||
        S.orientation() != Orientation::horizontal)
        throw std::invalid_argument(
            "wedge_regularized: expects (vertical, horizontal)");
    if (schedule.empty() || route == WedgeRoute::smooth)
        throw std::invalid_argument("wedge_regularized: bad schedule/route");
    WedgeResult out;
    std::vector<double> prev_moments;
    for (double eps : schedule) {
        const PotentialField Re =
            (route == WedgeRoute::reg_right)
                ? drop_to_grid(R, res)
                : regularize_by_disc(R, eps, disc_kernel_eps, res);
        const PotentialField Se =
            (route == WedgeRoute::reg_left)
                ? drop_to_grid(S, res)
                : regularize_by_disc(S, eps, disc_kernel_eps, res);
        WedgeResult stage = wedge_smooth(sampled_form(Re, res),
                                         sampled_form(Se, res));
        out.stage_masses.push_back(stage.mass);
        const std::vector<double> mom = stage.atoms().moments(2);
        if (!prev_moments.empty())
            out.stage_gaps.push_back(moment_distance(prev_moments, mom));
        prev_moments = mom;
        out.density = std::move(stage.density);
        out.band = stage.band;
        out.mass = stage.mass;
        out.min_density = stage.min_density;
        out.positivity_ok = stage.positivity_ok;
    }
    out.domain = R.domain();
    out.route = route;
    out.epsilon_schedule = std::move(schedule);
    for (std::size_t s = 1; s < out.stage_gaps.size(); ++s)
        if (out.stage_gaps[s] > out.stage_gaps[s - 1])
            out.upper_envelope_only = true;
    return out;
}

UscProbeReport pairing_upper_semicontinuity_probe(
    const PotentialField& R, const PotentialField& S,
    const std::function<double(cplx, cplx)>& phi,
    const std::vector<double>& perturbations, int res, double tol) {
    UscProbeReport rep;
    const WedgeResult base =
        wedge_regularized(R, S, {0.1, 0.05, 0.025}, res);
    rep.base_value = base.pair(phi);
    for (double eps : perturbations) {
        const SmoothingKernel k(eps);
        const PotentialField Rn = drop_to_grid(regularize(R, k), res);
        const PotentialField Sn = drop_to_grid(regularize(S, k), res);
        CoefficientForm FR = sampled_form(Rn, res);
        CoefficientForm FS = sampled_form(Sn, res);
        // keep the integration band clear of edge-clamped convolution cells
        const int guard = k.radius_cells(FR.axes()[0].h()) + 2;
        FR.set_band(std::max(FR.band(), guard));
        FS.set_band(std::max(FS.band(), guard));
        const WedgeResult w = wedge_smooth(FR, FS);
        rep.perturbed_values.push_back(w.pair(phi));
    }
    const std::size_t n = rep.perturbed_values.size();
    if (n >= 2 && perturbations[n - 2] > perturbations[n - 1]) {
        const double e1 = perturbations[n - 2], e2 = perturbations[n - 1];
        const double v1 = rep.perturbed_values[n - 2],
                     v2 = rep.perturbed_values[n - 1];
        rep.limsup_estimate =
            v2 + (v2 - v1) * e2 * e2 / (e1 * e1 - e2 * e2);
    } else if (n >= 1) {
        rep.limsup_estimate = rep.perturbed_values.back();
    }
    rep.max_excess = rep.limsup_estimate - rep.base_value;
    rep.limsup_ok = rep.max_excess <= tol;
    return rep;
}

}  // namespace hlab
