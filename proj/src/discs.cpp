#include "hlab/discs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "hlab/parallel.hpp"

namespace hlab {

Pt2 h_map(cplx a, cplx b, cplx theta, Pt2 x) {
    return Pt2{theta * x.z + (1.0 - theta) * a, x.w + (theta - 1.0) * b};
}

Pt2 h_map_inverse(cplx a, cplx b, cplx theta, Pt2 x) {
    return Pt2{(x.z - (1.0 - theta) * a) / theta, x.w + (1.0 - theta) * b};
}

void StructuralDiscSpec::validate() const {
    const Bidisk& D = base.domain();
    if (base.orientation() != Orientation::vertical)
        throw std::invalid_argument("disc spec: base must be vertical");
    if (std::abs(center_a) + kernel.epsilon * std::sqrt(2.0) >=
        D.star_m_radius())
        throw std::invalid_argument(
            "disc spec: kernel support leaves the inner z-disc");
    if (std::abs(center_b) + kernel.epsilon * std::sqrt(2.0) >=
        D.star_n_radius())
        throw std::invalid_argument(
            "disc spec: kernel support leaves the inner w-disc");
    if (quadrature_nodes < 2)
        throw std::invalid_argument("disc spec: need at least 2 nodes");
}

namespace {

struct QuadNode {
    cplx a, b;
    double weight;
};

bool base_w_independent(const PotentialField& u) {
    const double r = 0.4 * u.domain().star_m_radius();
    const cplx zs[3] = {cplx(r, 0.1), cplx(-0.3, r), cplx(0.2, -0.2)};
    const cplx ws[3] = {cplx(0, 0), cplx(0.4, 0.1), cplx(-0.2, 0.3)};
    for (const cplx& z : zs) {
        const double u0 = u.eval(z, ws[0]);
        for (int q = 1; q < 3; ++q)
            if (std::abs(u.eval(z, ws[q]) - u0) >
                1e-12 * (1.0 + std::abs(u0)))
                return false;
    }
    return true;
}

/// Quadrature of the kernel over (a, b); weights normalized to unit sum.
/// When the base does not depend on w the b-axes integrate out and only
/// the 2-d a-quadrature is kept.
std::vector<QuadNode> kernel_nodes(const StructuralDiscSpec& spec,
                                   bool w_indep) {
    const QuadratureRule gl = gauss_legendre(spec.quadrature_nodes);
    const double eps = spec.kernel.epsilon;
    std::vector<QuadNode> out;
    double total = 0.0;
    const int n = spec.quadrature_nodes;
    auto push = [&](double ar, double ai, double br, double bi, double w) {
        const double rho = spec.kernel.profile1d(ar) *
                           spec.kernel.profile1d(ai) *
                           (w_indep ? 1.0
                                    : spec.kernel.profile1d(br) *
                                          spec.kernel.profile1d(bi));
        if (rho <= 0.0) return;
        out.push_back({spec.center_a + cplx(ar, ai),
                       spec.center_b + cplx(br, bi), w * rho});
        total += w * rho;
    };
    if (w_indep) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                push(eps * gl.nodes[i], eps * gl.nodes[j], 0.0, 0.0,
                     gl.weights[i] * gl.weights[j]);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        push(eps * gl.nodes[i], eps * gl.nodes[j],
                             eps * gl.nodes[k], eps * gl.nodes[l],
                             gl.weights[i] * gl.weights[j] * gl.weights[k] *
                                 gl.weights[l]);
    }
    if (total <= 0.0)
        throw std::runtime_error("disc quadrature: empty kernel support");
    for (auto& q : out) q.weight /= total;
    return out;
}

/// Shared pointwise evaluator of the theta-slices of one spec.
struct DiscEvaluator {
    PotentialField base;
    std::vector<QuadNode> nodes;
    double mass;

    explicit DiscEvaluator(const StructuralDiscSpec& spec)
        : base(spec.base),
          nodes(kernel_nodes(spec, base_w_independent(spec.base))),
          mass(spec.base.far_coeff()) {}

    double eval(cplx theta, cplx z, cplx w) const {
        if (std::abs(theta) < 1e-12) {
            // endpoint: mass * average of log|z - a| over the kernel
            double s = 0.0;
            for (const QuadNode& q : nodes)
                s += q.weight * std::log(std::abs(z - q.a) + 1e-300);
            return mass * s;
        }
        double s = 0.0;
        for (const QuadNode& q : nodes) {
            const Pt2 y = h_map_inverse(q.a, q.b, theta, Pt2{z, w});
            s += q.weight * base.eval(y.z, y.w);
        }
        // normalized potential of the pushforward: u o h^{-1} carries a
        // -mass*log|theta| constant, removed so that the theta = 0 endpoint
        // is the sup-norm limit and the family is continuous on [0, 1]
        return s + mass * std::log(std::abs(theta));
    }
};

}  // namespace

PotentialField disc_slice(const StructuralDiscSpec& spec, cplx theta) {
    spec.validate();
    if (!spec.theta_in_domain(theta))
        throw std::invalid_argument("disc_slice: theta outside the domain");
    auto ev = std::make_shared<DiscEvaluator>(spec);
    const int res = spec.base.grid().axis(0).n;
    PotentialField out(
        [ev, theta](cplx z, cplx w) { return ev->eval(theta, z, w); },
        Orientation::vertical, spec.base.domain(), res,
        spec.base.far_coeff());
    return out;
}

PotentialField disc_circle_average(const StructuralDiscSpec& spec, double eps,
                                   int res) {
    spec.validate();
    auto ev = std::make_shared<DiscEvaluator>(spec);
    std::vector<std::pair<cplx, double>> thetas;
    // uniform disc law realized as a convex center + circle quadrature
    thetas.emplace_back(cplx(1.0, 0.0), 1.0 / 3.0);
    const int nq = 16;
    for (int q = 0; q < nq; ++q) {
        const double t = 2.0 * M_PI * q / nq;
        thetas.emplace_back(
            cplx(1.0, 0.0) + 0.5 * eps * cplx(std::cos(t), std::sin(t)),
            (2.0 / 3.0) / nq);
    }
    for (const auto& [th, w] : thetas)
        if (!spec.theta_in_domain(th))
            throw std::invalid_argument(
                "disc_circle_average: radius leaves the theta domain");
    auto avg = [ev, thetas](cplx z, cplx w) {
        double s = 0.0;
        for (const auto& [th, wt] : thetas) s += wt * ev->eval(th, z, w);
        return s;
    };

    const Bidisk D = spec.base.domain();
    Grid4 g(Grid4::bidisk_axes(D, res));
    const auto& ax = g.axes();
    const bool w_indep = base_w_independent(spec.base);
    parallel_chunks(static_cast<std::size_t>(res), [&](std::size_t lo,
                                                       std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < res; ++j) {
                if (w_indep) {
                    const double v = std::max(
                        kFloor, avg(cplx(ax[0].coord(i), ax[1].coord(j)),
                                    cplx(0, 0)));
                    for (int k = 0; k < res; ++k)
                        for (int l = 0; l < res; ++l) g.at(i, j, k, l) = v;
                } else {
                    for (int k = 0; k < res; ++k)
                        for (int l = 0; l < res; ++l)
                            g.at(i, j, k, l) = std::max(
                                kFloor,
                                avg(cplx(ax[0].coord(i), ax[1].coord(j)),
                                    cplx(ax[2].coord(k), ax[3].coord(l))));
                }
            }
        }
    });
    PotentialField out(std::move(g), Orientation::vertical, D);
    out.set_far_coeff(spec.base.far_coeff());
    out.set_analytic(avg, /*collar_only=*/true);
    return out;
}

SubharmonicityReport subharmonicity_check(
    const StructuralDiscSpec& spec, const CoefficientForm& phi,
    const std::vector<cplx>& theta_samples,
    const std::vector<double>& circle_radii, int circle_points) {
    spec.validate();
    if (phi.orientation() != Orientation::horizontal)
        throw std::invalid_argument(
            "subharmonicity_check: phi must be horizontal");
    auto ev = std::make_shared<DiscEvaluator>(spec);
    const Bidisk D = spec.base.domain();
    const int res = phi.axes()[0].n;

    std::map<std::pair<double, double>, double> cache;
    auto pairing = [&](cplx theta) {
        const auto key = std::make_pair(theta.real(), theta.imag());
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        PotentialField u(
            [ev, theta](cplx z, cplx w) { return ev->eval(theta, z, w); },
            Orientation::vertical, D, res, spec.base.far_coeff());
        const double v = pair_current_form(u, phi).value;
        cache[key] = v;
        return v;
    };

    SubharmonicityReport rep;
    double vmin = 1e300, vmax = -1e300;
    for (const cplx& th0 : theta_samples) {
        if (!spec.theta_in_domain(th0)) continue;
        const double center = pairing(th0);
        rep.values.emplace_back(th0, center);
        vmin = std::min(vmin, center);
        vmax = std::max(vmax, center);
        ++rep.centers;
        for (double r : circle_radii) {
            bool inside = true;
            std::vector<cplx> ring;
            for (int q = 0; q < circle_points; ++q) {
                const double t = 2.0 * M_PI * q / circle_points;
                const cplx th = th0 + r * cplx(std::cos(t), std::sin(t));
                if (!spec.theta_in_domain(th)) inside = false;
                ring.push_back(th);
            }
            if (!inside) continue;
            double avg = 0.0;
            for (const cplx& th : ring) {
                const double v = pairing(th);
                avg += v;
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
            }
            avg /= circle_points;
            rep.worst_violation = std::max(rep.worst_violation, center - avg);
            rep.max_circle_gap =
                std::max(rep.max_circle_gap, std::abs(center - avg));
        }
    }
    rep.max_spread = rep.centers > 0 ? vmax - vmin : 0.0;
    return rep;
}

namespace {

std::vector<Pt2> probe_points(const Bidisk& D, bool with_w) {
    std::vector<Pt2> pts;
    const double rz = 0.6 * D.star_m_radius();
    const double rw = 0.6 * D.star_n_radius();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const cplx z(rz * (-1.0 + 0.5 * i), rz * (-1.0 + 0.5 * j));
            if (with_w) {
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l)
                        pts.push_back(Pt2{z, cplx(rw * (k - 1.0) * 0.7,
                                                  rw * (l - 1.0) * 0.7)});
            } else {
                pts.push_back(Pt2{z, cplx(0.1, -0.2)});
            }
        }
    return pts;
}

}  // namespace

DiscRegularityReport disc_regularity_probe(const StructuralDiscSpec& spec) {
    spec.validate();
    DiscEvaluator ev(spec);
    const bool w_dep = !base_w_independent(spec.base);
    const std::vector<Pt2> pts = probe_points(spec.base.domain(), w_dep);

    auto dist = [&](cplx ta, cplx tb) {
        double d = 0.0;
        for (const Pt2& x : pts)
            d = std::max(d, std::abs(ev.eval(ta, x.z, x.w) -
                                     ev.eval(tb, x.z, x.w)));
        return d;
    };

    DiscRegularityReport rep;
    for (double t : {0.01, 0.02, 0.05, 0.1})
        rep.lipschitz_c = std::max(rep.lipschitz_c, dist(cplx(t), 0.0) / t);

    // distances toward the identity endpoint
    const double ts[4] = {0.02, 0.05, 0.1, 0.2};
    for (double t : ts)
        rep.modulus_curve.emplace_back(t, dist(cplx(1.0 - t), 1.0));

    // modulus of continuity of the base over the probe set
    auto modulus = [&](double s) {
        double m = 0.0;
        for (const Pt2& x : pts)
            for (int q = 0; q < 8; ++q) {
                const double ang = 2.0 * M_PI * q / 8;
                const cplx d = s * cplx(std::cos(ang), std::sin(ang));
                m = std::max(m, std::abs(spec.base.eval(x.z + d, x.w) -
                                         spec.base.eval(x.z, x.w)));
                m = std::max(m, std::abs(spec.base.eval(x.z, x.w + d) -
                                         spec.base.eval(x.z, x.w)));
            }
        return m;
    };
    double sup_r = 0.0;
    for (const Pt2& x : pts)
        sup_r = std::max(sup_r, std::abs(spec.base.eval(x.z, x.w)));

    double best_res = 1e300;
    for (double A : {1.0, 2.0, 4.0, 8.0}) {
        double rmin = 1e300, rmax = 0.0, c = 0.0;
        for (const auto& [t, d] : rep.modulus_curve) {
            const double shape = sup_r * t + modulus(A * t) + 1e-300;
            const double ratio = d / shape;
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
            c = std::max(c, ratio);
        }
        const double res = rmax > 0.0 ? 1.0 - rmin / rmax : 0.0;
        if (res < best_res) {
            best_res = res;
            rep.fit_a = A;
            rep.fit_c = c;
            rep.fit_residual = res;
        }
    }
    rep.conforming = rep.fit_residual <= 0.2;
    return rep;
}

KobayashiChainReport kobayashi_chain_bound(const PotentialField& R,
                                           const PotentialField& S,
                                           const std::vector<int>& A_values) {
    if (std::abs(slice_mass(R).mean - 1.0) > 1e-3 ||
        std::abs(slice_mass(S).mean - 1.0) > 1e-3)
        throw std::invalid_argument(
            "kobayashi_chain_bound: inputs must be normalized");
    KobayashiChainReport rep;

    // degenerate one-disc family max(log|z|, log|theta|/A): endpoint
    // theta = 2^-A carries the circle measure at radius 1/2, and the
    // hyperbolic cost to theta = 0 shrinks to zero as A grows
    const cplx probes[5] = {cplx(0.2, 0.0), cplx(0.7, 0.1), cplx(1.3, 0.0),
                            cplx(0.1, 0.4), cplx(0.0, 0.9)};
    for (int A : A_values) {
        rep.degeneracy_bounds.emplace_back(A, std::atanh(std::pow(2.0, -A)));
        const double r = 0.5;  // |theta|^{1/A} with theta = 2^-A
        for (const cplx& z : probes) {
            const double u = std::max(std::log(std::abs(z)), std::log(r));
            double avg = 0.0;
            const int nq = 64;
            for (int q = 0; q < nq; ++q) {
                const double t = 2.0 * M_PI * q / nq;
                avg += std::log(
                    std::abs(z - r * cplx(std::cos(t), std::sin(t))));
            }
            avg /= nq;
            rep.slice_check_error =
                std::max(rep.slice_check_error, std::abs(u - avg));
        }
    }

    // identical currents: the empty chain has zero cost
    const std::vector<Pt2> pts = probe_points(R.domain(), true);
    double gap = 0.0;
    for (const Pt2& x : pts)
        gap = std::max(gap, std::abs(R.eval(x.z, x.w) - S.eval(x.z, x.w)));
    if (gap < 1e-12) {
        rep.zero_chain = true;
        return rep;
    }

    // two structural discs through the shared theta = 0 endpoint, each
    // crossing the rectangle from 1 to 0; hyperbolic length of [0,1] is
    // bounded by two inscribed discs of radius 1/2 around 1/4 and 3/4
    StructuralDiscSpec specR{R}, specS{S};
    DiscEvaluator evR(specR), evS(specS);
    for (const Pt2& x : pts)
        rep.endpoint_gap = std::max(
            rep.endpoint_gap, std::abs(evR.eval(0.0, x.z, x.w) -
                                       evS.eval(0.0, x.z, x.w)));
    const double hop = std::atanh(0.8);  // 0 to 1/2 inside D(1/4, 1/2)
    rep.generic_bound = 2.0 * (2.0 * hop);
    return rep;
}

namespace {
constexpr double kStages[4] = {0.2, 0.1, 0.05, 0.025};
constexpr int kZq = 64, kWq = 8;

double bicircle_mean(const PotentialField& u, cplx z0, cplx w0, double delta,
                     double eps) {
    double s = 0.0;
    for (int p = 0; p < kZq; ++p) {
        // half-step offset keeps axis-aligned singular points off the nodes
        const double a = 2.0 * M_PI * (p + 0.5) / kZq;
        const cplx z = z0 + delta * cplx(std::cos(a), std::sin(a));
        for (int q = 0; q < kWq; ++q) {
            const double b = 2.0 * M_PI * q / kWq;
            s += u.eval(z, w0 + eps * cplx(std::cos(b), std::sin(b)));
        }
    }
    return s / (kZq * kWq);
}
}  // namespace

std::vector<ReconstructionValue> reconstruct_potential_from_slices(
    const std::function<PotentialField(cplx)>& family,
    const std::vector<ReconstructionProbe>& probes) {
    std::map<std::pair<double, double>, PotentialField> cache;
    std::vector<ReconstructionValue> out;
    for (const ReconstructionProbe& p : probes) {
        const auto key = std::make_pair(p.theta0.real(), p.theta0.imag());
        if (!cache.count(key)) cache.emplace(key, family(p.theta0));
        const PotentialField& u = cache.at(key);
        ReconstructionValue v;
        for (double s : kStages)
            v.stages.push_back(bicircle_mean(u, p.z0, p.w0, s, s));
        v.value = v.stages.back();
        v.converged = std::abs(v.stages.back() -
                               v.stages[v.stages.size() - 2]) <= 1e-2;
        out.push_back(std::move(v));
    }
    return out;
}

double reconstruction_ddc_gap(const std::function<PotentialField(cplx)>& family,
                              cplx theta0, cplx w0, int res) {
    const PotentialField u = family(theta0);
    const double r = 0.7 * u.domain().star_m_radius();
    const Axis ax{res, -r, r};
    Grid2 rec(ax, ax), bar(ax, ax);
    const double eps = kStages[3];
    const double delta = 0.01;  // well under the grid step
    parallel_chunks(static_cast<std::size_t>(res), [&](std::size_t lo,
                                                       std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < res; ++j) {
                const cplx z = rec.node(i, j);
                rec.at(i, j) = bicircle_mean(u, z, w0, delta, eps);
                double s = 0.0;
                for (int q = 0; q < kWq; ++q) {
                    const double b = 2.0 * M_PI * q / kWq;
                    s += u.eval(z, w0 + eps * cplx(std::cos(b), std::sin(b)));
                }
                bar.at(i, j) = s / kWq;
            }
        }
    });
    const double h = ax.h();
    double gap = 0.0;
    for (int i = 1; i < res - 1; ++i)
        for (int j = 1; j < res - 1; ++j) {
            auto lap = [&](const Grid2& g) {
                return (g.at(i - 1, j) + g.at(i + 1, j) + g.at(i, j - 1) +
                        g.at(i, j + 1) - 4.0 * g.at(i, j)) /
                       (h * h);
            };
            gap += std::abs(lap(rec) - lap(bar)) * h * h / (2.0 * M_PI);
        }
    return gap;
}

}  // namespace hlab
