#include "hlab/green.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "hlab/parallel.hpp"
#include "hlab/verify.hpp"
#include "hlab/wedge.hpp"

namespace hlab {

namespace {

constexpr double kSeedBound = 100.0;  // uniform bound on seed families

// Seed value at an orbit point, safe for magnitudes outside double range:
// the far coordinate is folded back to the domain circle and the log
// continuation is added in scaled arithmetic.
double eval_seed_at(const PotentialField& u, const OrbitPoint& o) {
    if (o.representable) return u.eval(o.point);
    const Bidisk& D = u.domain();
    const bool vert = u.orientation() == Orientation::vertical;
    const ScaledC& a = vert ? o.z_scaled : o.w_scaled;  // far coordinate
    const ScaledC& b = vert ? o.w_scaled : o.z_scaled;  // transverse
    const double ra = vert ? D.m_radius : D.n_radius;
    const double rb = vert ? D.n_radius : D.m_radius;
    cplx bv = b.representable() ? b.value() : rb * b.m;
    const double ab = std::abs(bv);
    if (ab > rb) bv *= rb / ab;
    if (a.representable() && std::abs(a.value()) <= ra) {
        const cplx av = a.value();
        return vert ? u.eval(av, bv) : u.eval(bv, av);
    }
    const cplx ac = a.is_zero() ? cplx(ra) : ra * a.m;
    const double la = a.is_zero() ? std::log(ra) : a.l;
    const double base = vert ? u.eval(ac, bv) : u.eval(bv, ac);
    return base + u.far_coeff() * (la - std::log(ra));
}

double grid_sup(const PotentialField& u) {
    double s = 0.0;
    for (double v : u.grid().values()) s = std::max(s, std::abs(v));
    return s;
}

PotentialField::Eval stage_evaluator(std::shared_ptr<const MapSequence> seq,
                                     std::shared_ptr<const PotentialField> u,
                                     int n, bool backward, double floor) {
    const double dn = seq->degree_product(n);
    return [seq, u, n, backward, floor, dn](cplx z, cplx w) {
        OrbitPoint o = OrbitPoint::start(Pt2{z, w});
        for (int k = 0; k < n; ++k) orbit_step(seq->map_at(k), o, backward);
        return std::max(eval_seed_at(*u, o) / dn, floor);
    };
}

// compactly supported radial bump (1 - r^2/rho^2)^3
double bump3(cplx z, cplx c, double rho) {
    const double t = 1.0 - std::norm(z - c) / (rho * rho);
    return t > 0.0 ? t * t * t : 0.0;
}

}  // namespace

bool GreenRun::deltas_geometric(double ratio, int burn_in) const {
    if (deltas.size() <= static_cast<std::size_t>(burn_in)) return false;
    // envelope test: single anomalously small stages (orbit values crossing
    // the log+ kink) may bounce back, but never above the decaying envelope
    double env = deltas[static_cast<std::size_t>(burn_in) - 1];
    for (std::size_t k = static_cast<std::size_t>(burn_in); k < deltas.size();
         ++k) {
        if (deltas[k] > ratio * env + 1e-14) return false;
        env = std::max(deltas[k], ratio * env);
    }
    return true;
}

GreenRun green_iterate(const MapSequence& seq,
                       const std::vector<PotentialField>& seeds, int n,
                       int res, bool keep_iterates, GreenDirection direction) {
    if (seeds.empty()) throw std::invalid_argument("green_iterate: no seeds");
    if (n < 0) throw std::invalid_argument("green_iterate: n < 0");
    const bool backward = direction == GreenDirection::backward;
    const Orientation want =
        backward ? Orientation::horizontal : Orientation::vertical;
    for (const auto& s : seeds)
        if (s.orientation() != want)
            throw std::invalid_argument(
                "green_iterate: seed orientation does not match direction");

    GreenRun run;
    run.direction = direction;
    run.stages = n;
    for (const auto& s : seeds)
        if (grid_sup(s) > kSeedBound) run.unbounded_seed = true;

    const Bidisk& D = seq.domain;
    const double floor = seeds[0].floor_value();
    auto seq_ptr = std::make_shared<const MapSequence>(seq);
    auto seed_at = [&](int k) -> const PotentialField& {
        return seeds[static_cast<std::size_t>(k) % seeds.size()];
    };

    std::vector<Grid4> grids;
    if (keep_iterates) {
        grids.assign(static_cast<std::size_t>(n) + 1,
                     Grid4(Grid4::bidisk_axes(D, res)));
    } else {
        grids.assign(1, Grid4(Grid4::bidisk_axes(D, res)));
    }
    Grid4& final_grid = grids.back();
    const auto& ax = final_grid.axes();

    run.deltas.assign(static_cast<std::size_t>(n), 0.0);
    std::mutex merge_mx;
    parallel_chunks(static_cast<std::size_t>(ax[0].n), [&](std::size_t lo,
                                                           std::size_t hi) {
        std::vector<double> local(static_cast<std::size_t>(n), 0.0);
        std::vector<double> vals(static_cast<std::size_t>(n) + 1);
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < ax[1].n; ++j)
                for (int k = 0; k < ax[2].n; ++k)
                    for (int l = 0; l < ax[3].n; ++l) {
                        const Pt2 x = final_grid.node(i, j, k, l);
                        OrbitPoint o = OrbitPoint::start(x);
                        vals[0] = std::max(seed_at(0).eval(x), floor);
                        for (int s = 1; s <= n; ++s) {
                            orbit_step(seq.map_at(s - 1), o, backward);
                            vals[static_cast<std::size_t>(s)] = std::max(
                                eval_seed_at(seed_at(s), o) /
                                    seq.degree_product(s),
                                floor);
                        }
                        for (int s = 1; s <= n; ++s)
                            local[static_cast<std::size_t>(s - 1)] = std::max(
                                local[static_cast<std::size_t>(s - 1)],
                                std::abs(vals[static_cast<std::size_t>(s)] -
                                         vals[static_cast<std::size_t>(s - 1)]));
                        if (keep_iterates) {
                            for (int s = 0; s <= n; ++s)
                                grids[static_cast<std::size_t>(s)].at(
                                    i, j, k, l) =
                                    vals[static_cast<std::size_t>(s)];
                        } else {
                            final_grid.at(i, j, k, l) =
                                vals[static_cast<std::size_t>(n)];
                        }
                    }
        }
        std::lock_guard<std::mutex> lock(merge_mx);
        for (std::size_t s = 0; s < local.size(); ++s)
            run.deltas[s] = std::max(run.deltas[s], local[s]);
    });

    auto make_stage = [&](int s, Grid4 g) {
        PotentialField p(std::move(g), want, D, floor);
        p.set_far_coeff(seed_at(s).far_coeff());
        p.set_analytic(stage_evaluator(
            seq_ptr, std::make_shared<const PotentialField>(seed_at(s)), s,
            backward, floor));
        return p;
    };
    if (keep_iterates) {
        for (int s = 0; s <= n; ++s) {
            run.iterates.push_back(
                make_stage(s, std::move(grids[static_cast<std::size_t>(s)])));
            run.slice_masses.push_back(slice_mass(run.iterates.back()).mean);
        }
        run.final_potential = run.iterates.back();
    } else {
        run.final_potential = make_stage(n, std::move(final_grid));
        run.slice_masses.push_back(slice_mass(run.final_potential).mean);
    }

    const int burn_in = 3;
    if (n > burn_in + 1) {
        // fit the geometric range only: stop at the flicker floor where
        // single stages dip orders of magnitude below the envelope
        const double cutoff =
            1e-4 * run.deltas[static_cast<std::size_t>(burn_in)];
        std::vector<double> xs, ys;
        for (int s = burn_in; s < n; ++s) {
            const double dv = run.deltas[static_cast<std::size_t>(s)];
            if (dv < cutoff) break;
            xs.push_back(static_cast<double>(s + 1));
            ys.push_back(std::log(dv));
        }
        if (xs.size() >= 2) run.delta_fit = fit_line(xs, ys);
    }
    return run;
}

PotentialField green_current(const HenonLikeMap& f, int n,
                             GreenDirection direction, int res) {
    const HorizontalLikeReport hl =
        check_horizontal_like(f, f.domain(), 120);
    if (!hl.pass)
        throw std::invalid_argument("green_current: map is not horizontal-like");
    const MapSequence seq{{f}, {f.poly_degree()}, f.domain()};
    const bool backward = direction == GreenDirection::backward;
    auto seed = [&](int r) {
        PotentialField s = canonical_seed(f.domain(), r);
        return backward ? transpose_potential(s) : s;
    };
    const int cap = std::min(n, kGreenMaxStages);
    // coarse pre-run decides where the stop rule fires
    const GreenRun coarse =
        green_iterate(seq, {seed(12)}, cap, 12, false, direction);
    int stop = cap;
    for (std::size_t k = 0; k < coarse.deltas.size(); ++k)
        if (coarse.deltas[k] < kGreenStopDelta) {
            stop = static_cast<int>(k) + 1;
            break;
        }
    const GreenRun run =
        green_iterate(seq, {seed(res)}, stop, res, false, direction);
    return run.final_potential;
}

PotentialField line_pullback_green(const HenonLikeMap& f, cplx a, int n,
                                   int res) {
    if (std::abs(a) >= f.domain().inner_m_radius())
        throw std::invalid_argument(
            "line_pullback_green: center must lie in the inner disk");
    if (n < 0) throw std::invalid_argument("line_pullback_green: n < 0");
    const double dn = std::pow(static_cast<double>(f.poly_degree()), n);
    auto ev = [f, a, n, dn](cplx z, cplx w) {
        const OrbitPoint o = iterate_orbit(f, Pt2{z, w}, n);
        return std::max(o.z_scaled.log_abs_minus(a) / dn, kFloor);
    };
    return PotentialField(ev, Orientation::vertical, f.domain(), res, 1.0);
}

InvarianceReport invariance_defect(const HenonLikeMap& f,
                                   const PotentialField& G, int degree,
                                   int res) {
    const Bidisk& D = G.domain();
    const bool vert = G.orientation() == Orientation::vertical;
    const double d = static_cast<double>(degree);
    auto diff = [&](cplx z, cplx w) {
        const Pt2 x{z, w};
        const Pt2 y = vert ? f.forward(x) : f.inverse(x);
        return G.eval(y) - d * G.eval(x);
    };
    // pluriharmonic control with a non-polynomial finite-difference error
    auto control = [&](cplx z, cplx w) {
        return std::log(std::abs(z - cplx(1.4 * D.m_radius, 0.0))) +
               std::log(std::abs(w + cplx(0.0, 1.4 * D.n_radius)));
    };

    struct Probe {
        cplx cz, cw;
        double rz, rw;
    };
    const std::vector<Probe> probes = {
        {cplx(0.0), cplx(0.0), 0.65 * D.m_radius, 0.45 * D.n_radius},
        {cplx(0.2, 0.0), cplx(0.0, -0.1), 0.5 * D.m_radius, 0.4 * D.n_radius},
        {cplx(-0.15, 0.2), cplx(0.15, 0.1), 0.55 * D.m_radius,
         0.35 * D.n_radius}};

    InvarianceReport rep;
    for (const auto& pr : probes) {
        CoefficientForm psi(Grid4::bidisk_axes(D, res), D,
                            vert ? Orientation::horizontal
                                 : Orientation::vertical,
                            2);
        Grid4& coef = vert ? psi.hww : psi.hzz;
        const auto& ax = coef.axes();
        for (int i = 0; i < ax[0].n; ++i)
            for (int j = 0; j < ax[1].n; ++j)
                for (int k = 0; k < ax[2].n; ++k)
                    for (int l = 0; l < ax[3].n; ++l) {
                        const Pt2 x = coef.node(i, j, k, l);
                        coef.at(i, j, k, l) =
                            bump3(x.z, pr.cz, pr.rz) * bump3(x.w, pr.cw, pr.rw);
                    }
        const Grid4 dens = ddc_density(psi);
        rep.defect = std::max(
            rep.defect, std::abs(pair_eval_with_density(diff, dens, psi.band())));
        rep.control_floor =
            std::max(rep.control_floor,
                     std::abs(pair_eval_with_density(control, dens, psi.band())));
    }
    rep.ok = rep.defect <= 5.0 * rep.control_floor;
    return rep;
}

SupportReport green_support_check(const HenonLikeMap& f,
                                  const PotentialField& G, int orbit_steps,
                                  int dilation, GreenDirection direction) {
    const CoefficientForm F = ddc(G);
    const auto& ax = F.axes();
    const bool backward = direction == GreenDirection::backward;
    const int n0 = ax[0].n, n1 = ax[1].n, n2 = ax[2].n, n3 = ax[3].n;

    std::vector<std::uint8_t> bounded(
        static_cast<std::size_t>(n0) * n1 * n2 * n3);
    parallel_chunks(static_cast<std::size_t>(n0), [&](std::size_t lo,
                                                      std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2; ++k)
                    for (int l = 0; l < n3; ++l)
                        bounded[F.hzz.index(i, j, k, l)] =
                            iterate_orbit(f, F.hzz.node(i, j, k, l),
                                          orbit_steps, backward)
                                    .escaped
                                ? 0
                                : 1;
        }
    });

    // nodes at a flag change, then a Chebyshev dilation (separable passes)
    std::vector<std::uint8_t> mask(bounded.size(), 0);
    const int dims[4] = {n0, n1, n2, n3};
    auto idx = [&](int i, int j, int k, int l) {
        return F.hzz.index(i, j, k, l);
    };
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < n2; ++k)
                for (int l = 0; l < n3; ++l) {
                    const std::uint8_t b = bounded[idx(i, j, k, l)];
                    bool edge = false;
                    if (i + 1 < n0 && bounded[idx(i + 1, j, k, l)] != b)
                        edge = true;
                    if (j + 1 < n1 && bounded[idx(i, j + 1, k, l)] != b)
                        edge = true;
                    if (k + 1 < n2 && bounded[idx(i, j, k + 1, l)] != b)
                        edge = true;
                    if (l + 1 < n3 && bounded[idx(i, j, k, l + 1)] != b)
                        edge = true;
                    if (edge) {
                        mask[idx(i, j, k, l)] = 1;
                        if (i + 1 < n0) mask[idx(i + 1, j, k, l)] = 1;
                        if (j + 1 < n1) mask[idx(i, j + 1, k, l)] = 1;
                        if (k + 1 < n2) mask[idx(i, j, k + 1, l)] = 1;
                        if (l + 1 < n3) mask[idx(i, j, k, l + 1)] = 1;
                    }
                }
    const int strides[4] = {n1 * n2 * n3, n2 * n3, n3, 1};
    for (int pass = 0; pass < dilation; ++pass) {
        for (int a = 0; a < 4; ++a) {
            std::vector<std::uint8_t> next = mask;
            const std::size_t stride = static_cast<std::size_t>(strides[a]);
            for (std::size_t p = 0; p < mask.size(); ++p) {
                if (!mask[p]) continue;
                int c[4];
                F.hzz.unravel(p, c[0], c[1], c[2], c[3]);
                if (c[a] + 1 < dims[a]) next[p + stride] = 1;
                if (c[a] - 1 >= 0) next[p - stride] = 1;
            }
            mask.swap(next);
        }
    }

    SupportReport rep;
    rep.orbit_steps = orbit_steps;
    double near = 0.0, total = 0.0;
    const int b = F.band();
    for (int i = b; i < n0 - b; ++i)
        for (int j = b; j < n1 - b; ++j)
            for (int k = b; k < n2 - b; ++k)
                for (int l = b; l < n3 - b; ++l) {
                    const double m = std::abs(F.hzz.at(i, j, k, l)) +
                                     std::abs(F.hww.at(i, j, k, l));
                    total += m;
                    if (mask[idx(i, j, k, l)]) near += m;
                }
    rep.total_mass = total;
    rep.boundary_fraction = total > 0.0 ? near / total : 0.0;
    return rep;
}

ExtremalityReport extremality_probe(const HenonLikeMap& f,
                                    const std::vector<PotentialField>& candidates,
                                    const CoefficientForm& phi, int n,
                                    double tol) {
    ExtremalityReport rep;
    rep.phi_closed =
        ddc_mass(phi) <= 1e-6 * std::max(1.0, phi.sup_norm());
    const PotentialField G =
        green_current(f, n, GreenDirection::forward, phi.axes()[0].n);
    rep.t_pairing = pair_current_form(G, phi).value;
    rep.inequality_ok = true;
    rep.equality_ok = true;
    for (const auto& c : candidates) {
        const double p = pair_current_form(c, phi).value;
        rep.pairings.push_back(p);
        if (p > rep.t_pairing + tol) rep.inequality_ok = false;
        if (std::abs(p - rep.t_pairing) > tol) rep.equality_ok = false;
    }
    return rep;
}

NonclosedLimit nonclosed_limit(const HenonLikeMap& f, const CoefficientForm& R,
                               int n, int green_n) {
    if (R.orientation() != Orientation::vertical)
        throw std::invalid_argument("nonclosed_limit: form must be vertical");
    NonclosedLimit out;
    const double d = static_cast<double>(f.poly_degree());
    CoefficientForm F = R;
    out.stage_masses.push_back(form_slice_mass(F).mean);
    for (int k = 1; k <= n; ++k) {
        F = scale_form(pullback_form(f, F), 1.0 / d);
        out.stage_masses.push_back(form_slice_mass(F).mean);
    }
    out.c_limit = out.stage_masses.back();

    // cells whose forward orbit leaves the bidisk within n steps
    const auto& ax = R.axes();
    const int b = R.band();
    std::size_t escaped = 0, cells = 0;
    for (int i = b; i < ax[0].n - b; ++i)
        for (int j = b; j < ax[1].n - b; ++j)
            for (int k = b; k < ax[2].n - b; ++k)
                for (int l = b; l < ax[3].n - b; ++l) {
                    ++cells;
                    Pt2 p = R.hzz.node(i, j, k, l);
                    for (int s = 0; s < n; ++s) {
                        p = f.forward(p);
                        if (!f.inside_domain(p)) {
                            ++escaped;
                            break;
                        }
                        if (std::max(std::abs(p.z), std::abs(p.w)) > 1e50)
                            break;
                    }
                }
    out.escape_fraction =
        cells > 0 ? static_cast<double>(escaped) / static_cast<double>(cells)
                  : 0.0;
    out.contaminated = out.escape_fraction > 0.05;

    const PotentialField Gm =
        green_current(f, green_n, GreenDirection::backward, ax[0].n);
    const CoefficientForm Tm = sampled_form(Gm, ax[0].n);
    out.c_pairing = wedge_smooth(R, Tm).mass;
    out.stage = std::move(F);
    return out;
}

ClosedProbeReport ddc_closed_probe(const CoefficientForm& T,
                                   const std::vector<CoefficientForm>& family) {
    ClosedProbeReport rep;
    for (const auto& phi : family)
        rep.pairings.push_back(wedge_smooth(T, phi).mass);
    if (!rep.pairings.empty()) {
        const auto [mn, mx] =
            std::minmax_element(rep.pairings.begin(), rep.pairings.end());
        rep.spread = *mx - *mn;
    }
    rep.ddc_mass_value = ddc_mass(T);
    return rep;
}

}  // namespace hlab
