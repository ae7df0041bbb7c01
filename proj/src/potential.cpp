#include "hlab/potential.hpp"

#include <algorithm>

#include "hlab/parallel.hpp"

namespace hlab {

namespace {

Grid4 sample_grid(const PotentialField::Eval& u, const Bidisk& D, int res,
                  double floor_value) {
    Grid4 g(Grid4::bidisk_axes(D, res));
    auto& v = g.values();
    parallel_chunks(g.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            int i, j, k, l;
            g.unravel(idx, i, j, k, l);
            const Pt2 x = g.node(i, j, k, l);
            v[idx] = std::max(u(x.z, x.w), floor_value);
        }
    });
    return g;
}

}  // namespace

PotentialField::PotentialField(Grid4 grid, Orientation o, Bidisk D,
                               double floor_value)
    : grid_(std::move(grid)), orient_(o), domain_(D), floor_(floor_value) {}

PotentialField::PotentialField(Eval u, Orientation o, Bidisk D, int res,
                               double far_coeff)
    : grid_(sample_grid(u, D, res, kFloor)),
      orient_(o),
      domain_(D),
      floor_(kFloor),
      analytic_(std::move(u)),
      far_coeff_(far_coeff) {}

double PotentialField::eval(cplx z, cplx w) const {
    if (analytic_ && !analytic_collar_only_) return analytic_(z, w);
    if (orient_ == Orientation::vertical) {
        const double r = std::abs(z);
        if (r > domain_.m_radius) {
            const cplx zb = z * (domain_.m_radius / r);
            return grid_.interpolate(Pt2{zb, w}) +
                   far_coeff_ * std::log(r / domain_.m_radius);
        }
    } else {
        const double r = std::abs(w);
        if (r > domain_.n_radius) {
            const cplx wb = w * (domain_.n_radius / r);
            return grid_.interpolate(Pt2{z, wb}) +
                   far_coeff_ * std::log(r / domain_.n_radius);
        }
    }
    return grid_.interpolate(Pt2{z, w});
}

PotentialField vertical_line(cplx a, const Bidisk& D, int res) {
    if (std::abs(a) >= D.m_radius)
        throw std::invalid_argument("vertical_line: center must lie in M");
    return PotentialField(
        [a](cplx z, cplx) { return std::log(std::abs(z - a)); },
        Orientation::vertical, D, res, 1.0);
}

PotentialField horizontal_line(cplx b, const Bidisk& D, int res) {
    if (std::abs(b) >= D.n_radius)
        throw std::invalid_argument("horizontal_line: center must lie in N");
    return PotentialField(
        [b](cplx, cplx w) { return std::log(std::abs(w - b)); },
        Orientation::horizontal, D, res, 1.0);
}

namespace {

// Radial profile of the mollified line: dd^c mass law
// q(r) = (3/(pi s^2))(1 - r^2/s^2)^2 on r < s (unit total mass).
// Potential: u(r) = log s - 11/12 + (3v - 1.5 v^2 + v^3/3)/2, v = r^2/s^2,
// matching log r in C^1 at r = s. Hessian u_zz̄ = (3/(2 s^2))(1 - v)^2.
double mollified_log(double r, double s) {
    if (r >= s) return std::log(r);
    const double v = (r * r) / (s * s);
    return std::log(s) - 11.0 / 12.0 +
           0.5 * (3.0 * v - 1.5 * v * v + v * v * v / 3.0);
}
double mollified_hess(double r, double s) {
    if (r >= s) return 0.0;
    const double v = (r * r) / (s * s);
    return (3.0 / (2.0 * s * s)) * (1.0 - v) * (1.0 - v);
}

}  // namespace

PotentialField smoothed_vertical_line(cplx a, double s, const Bidisk& D,
                                      int res) {
    if (std::abs(a) + s >= D.inner_m_radius())
        throw std::invalid_argument(
            "smoothed_vertical_line: support must stay inside M'");
    PotentialField u(
        [a, s](cplx z, cplx) { return mollified_log(std::abs(z - a), s); },
        Orientation::vertical, D, res, 1.0);
    u.set_hessian([a, s](cplx z, cplx, double& hzz, double& hww, cplx& hzw) {
        hzz = mollified_hess(std::abs(z - a), s);
        hww = 0.0;
        hzw = 0.0;
    });
    return u;
}

PotentialField smoothed_horizontal_line(cplx b, double s, const Bidisk& D,
                                        int res) {
    if (std::abs(b) + s >= D.inner_n_radius())
        throw std::invalid_argument(
            "smoothed_horizontal_line: support must stay inside N''");
    PotentialField u(
        [b, s](cplx, cplx w) { return mollified_log(std::abs(w - b), s); },
        Orientation::horizontal, D, res, 1.0);
    u.set_hessian([b, s](cplx, cplx w, double& hzz, double& hww, cplx& hzw) {
        hzz = 0.0;
        hww = mollified_hess(std::abs(w - b), s);
        hzw = 0.0;
    });
    return u;
}

PotentialField canonical_seed(const Bidisk& D, int res) {
    return PotentialField(
        [](cplx z, cplx) { return std::max(std::log(std::abs(z)), 0.0); },
        Orientation::vertical, D, res, 1.0);
}

SliceMassReport slice_mass(const PotentialField& R) {
    const Bidisk& D = R.domain();
    const bool vert = R.orientation() == Orientation::vertical;
    const double radius = vert ? D.m_radius : D.n_radius;
    const double other = vert ? D.n_radius : D.m_radius;
    const double r1 = 0.93 * radius, r2 = 0.98 * radius;
    const auto& ring = R.collar_eval();  // exact on the collar when present
    const int nodes = ring ? 512 : 256;
    // fixed transverse sample points in the inner disk
    const double ang[5] = {0.0, 0.8, 2.5, 4.2, 5.6};
    const double rad[5] = {0.0, 0.35, 0.5, 0.25, 0.45};
    SliceMassReport rep;
    std::vector<double> masses;
    for (int sgl = 0; sgl < 5; ++sgl) {
        const cplx t = rad[sgl] * other *
                       cplx(std::cos(ang[sgl]), std::sin(ang[sgl]));
        auto ring_mean = [&](double r) {
            std::vector<double> vals(static_cast<std::size_t>(nodes));
            for (int i = 0; i < nodes; ++i) {
                const double phi = 2.0 * M_PI * i / nodes;
                const cplx p = r * cplx(std::cos(phi), std::sin(phi));
                const cplx zz = vert ? p : t, ww = vert ? t : p;
                vals[static_cast<std::size_t>(i)] =
                    ring ? ring(zz, ww) : R.eval(zz, ww);
            }
            return pairwise_sum(vals) / nodes;
        };
        masses.push_back((ring_mean(r2) - ring_mean(r1)) / std::log(r2 / r1));
    }
    rep.samples = 5;
    rep.mean = pairwise_sum(masses) / 5.0;
    for (double m : masses)
        rep.max_dev = std::max(rep.max_dev, std::abs(m - rep.mean));
    return rep;
}

PshReport psh_check(const PotentialField& R, double tol) {
    const Grid4& g = R.grid();
    if (R.has_analytic()) {
        // sub-mean on small circles in each coordinate plane; exact (up to
        // quadrature) on harmonic regions by the mean value property
        const auto ev = R.analytic();
        const int n0 = g.axis(0).n, n1w = g.axis(1).n, n2w = g.axis(2).n,
                  n3w = g.axis(3).n;
        const double rho_z = 0.25 * g.axis(0).h();
        const double rho_w = 0.25 * g.axis(2).h();
        const double floor_g = R.floor_value() + 1.0;
        const int nq = 16;
        std::vector<double> worst(static_cast<std::size_t>(n0), -1e300);
        std::vector<std::size_t> okc(static_cast<std::size_t>(n0), 0),
            tot(static_cast<std::size_t>(n0), 0);
        parallel_chunks(static_cast<std::size_t>(n0), [&](std::size_t lo,
                                                          std::size_t hi) {
            for (std::size_t ii = lo; ii < hi; ++ii) {
                const int i = static_cast<int>(ii);
                if (i == 0 || i == n0 - 1) continue;
                for (int j = 1; j < n1w - 1; ++j)
                    for (int k = 1; k < n2w - 1; ++k)
                        for (int l = 1; l < n3w - 1; ++l) {
                            const cplx z(g.axis(0).coord(i),
                                         g.axis(1).coord(j));
                            const cplx w(g.axis(2).coord(k),
                                         g.axis(3).coord(l));
                            const double u = ev(z, w);
                            if (u < floor_g) continue;
                            double mz = 0.0, mw = 0.0;
                            for (int q = 0; q < nq; ++q) {
                                const double th = 2.0 * M_PI * q / nq;
                                const cplx e(std::cos(th), std::sin(th));
                                mz += ev(z + rho_z * e, w);
                                mw += ev(z, w + rho_w * e);
                            }
                            mz /= nq;
                            mw /= nq;
                            const double viol = u - std::min(mz, mw);
                            worst[ii] = std::max(worst[ii], viol);
                            ++tot[ii];
                            if (viol <= tol) ++okc[ii];
                        }
            }
        });
        PshReport rep;
        std::size_t ok = 0, total = 0;
        for (int i = 0; i < n0; ++i) {
            ok += okc[static_cast<std::size_t>(i)];
            total += tot[static_cast<std::size_t>(i)];
            rep.worst_violation = std::max(
                rep.worst_violation, worst[static_cast<std::size_t>(i)]);
        }
        rep.checked = total;
        rep.ok_fraction = total ? static_cast<double>(ok) / total : 1.0;
        return rep;
    }
    const int n0 = g.axis(0).n, n1 = g.axis(1).n, n2 = g.axis(2).n,
              n3 = g.axis(3).n;
    const double floor_guard = R.floor_value() + 1.0;
    std::vector<double> worst(static_cast<std::size_t>(n0), -1e300);
    std::vector<std::size_t> okc(static_cast<std::size_t>(n0), 0),
        tot(static_cast<std::size_t>(n0), 0);
    parallel_chunks(static_cast<std::size_t>(n0), [&](std::size_t lo,
                                                      std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            if (i == 0 || i == n0 - 1) continue;
            for (int j = 1; j < n1 - 1; ++j)
                for (int k = 1; k < n2 - 1; ++k)
                    for (int l = 1; l < n3 - 1; ++l) {
                        const double u = g.at(i, j, k, l);
                        if (u < floor_guard) continue;
                        const double mz =
                            0.25 * (g.at(i - 1, j, k, l) + g.at(i + 1, j, k, l) +
                                    g.at(i, j - 1, k, l) + g.at(i, j + 1, k, l));
                        const double mw =
                            0.25 * (g.at(i, j, k - 1, l) + g.at(i, j, k + 1, l) +
                                    g.at(i, j, k, l - 1) + g.at(i, j, k, l + 1));
                        const double viol = u - std::min(mz, mw);
                        worst[ii] = std::max(worst[ii], viol);
                        ++tot[ii];
                        if (viol <= tol) ++okc[ii];
                    }
        }
    });
    PshReport rep;
    std::size_t ok = 0, total = 0;
    for (int i = 0; i < n0; ++i) {
        ok += okc[static_cast<std::size_t>(i)];
        total += tot[static_cast<std::size_t>(i)];
        rep.worst_violation =
            std::max(rep.worst_violation, worst[static_cast<std::size_t>(i)]);
    }
    rep.checked = total;
    rep.ok_fraction = total ? static_cast<double>(ok) / total : 1.0;
    return rep;
}

namespace {

Mat2c hessian_congruence(const Mat2c& H, const Mat2c& A) {
    // H'(x)_{jk} = sum_{pq} H_{pq} A_{pj} conj(A_{qk}) = A^T H conj(A)
    const Mat2c At{A.a, A.c, A.b, A.d};
    const Mat2c Ac{std::conj(A.a), std::conj(A.b), std::conj(A.c),
                   std::conj(A.d)};
    return At * H * Ac;
}

PotentialField transported(const PotentialField& u,
                           const std::function<Pt2(Pt2)>& phi,
                           const std::function<Mat2c(Pt2)>& dphi,
                           Orientation o, double far_scale) {
    const Bidisk D = u.domain();
    const int res = u.grid().axis(0).n;
    if (!u.has_analytic()) {
        // single interpolation of the source field at the mapped point;
        // errors do not compound across repeated transport
        Grid4 g(Grid4::bidisk_axes(D, res));
        auto& vals = g.values();
        parallel_chunks(g.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) {
                int i, j, k, l;
                g.unravel(idx, i, j, k, l);
                const Pt2 x = g.node(i, j, k, l);
                vals[idx] = std::max(u.eval(phi(x)), u.floor_value());
            }
        });
        PotentialField out(std::move(g), o, D, u.floor_value());
        out.set_far_coeff(u.far_coeff() * far_scale);
        return out;
    }
    {
        auto ue = u.analytic();
        PotentialField out(
            [phi, ue](cplx z, cplx w) {
                const Pt2 y = phi(Pt2{z, w});
                return ue(y.z, y.w);
            },
            o, D, res, u.far_coeff() * far_scale);
        if (u.has_hessian()) {
            auto hs = u.hessian();
            out.set_hessian([phi, dphi, hs](cplx z, cplx w, double& hzz,
                                            double& hww, cplx& hzw) {
                const Pt2 x{z, w};
                const Pt2 y = phi(x);
                double szz, sww;
                cplx szw;
                hs(y.z, y.w, szz, sww, szw);
                Mat2c H{szz, szw, std::conj(szw), sww};
                const Mat2c Hp = hessian_congruence(H, dphi(x));
                hzz = Hp.a.real();
                hww = Hp.d.real();
                hzw = Hp.b;
            });
        }
        return out;
    }
}

}  // namespace

PotentialField pullback_potential(const HenonLikeMap& f,
                                  const PotentialField& u) {
    if (u.orientation() != Orientation::vertical)
        throw std::invalid_argument("pullback_potential: input must be vertical");
    return transported(
        u, [f](Pt2 x) { return f.forward(x); },
        [f](Pt2 x) { return f.jacobian(x); }, Orientation::vertical,
        static_cast<double>(f.poly_degree()));
}

PotentialField pushforward_potential(const HenonLikeMap& f,
                                     const PotentialField& v) {
    if (v.orientation() != Orientation::horizontal)
        throw std::invalid_argument(
            "pushforward_potential: input must be horizontal");
    return transported(
        v, [f](Pt2 x) { return f.inverse(x); },
        [f](Pt2 x) { return f.jacobian_inverse(x); }, Orientation::horizontal,
        static_cast<double>(f.poly_degree()));
}

PotentialField scale_potential(const PotentialField& u, double c) {
    if (u.has_analytic()) {
        auto ue = u.analytic();
        PotentialField out([ue, c](cplx z, cplx w) { return c * ue(z, w); },
                           u.orientation(), u.domain(), u.grid().axis(0).n,
                           c * u.far_coeff());
        if (u.has_hessian()) {
            auto hs = u.hessian();
            out.set_hessian([hs, c](cplx z, cplx w, double& hzz, double& hww,
                                    cplx& hzw) {
                hs(z, w, hzz, hww, hzw);
                hzz *= c;
                hww *= c;
                hzw *= c;
            });
        }
        return out;
    }
    Grid4 g = u.grid();
    for (auto& v : g.values()) v *= c;
    PotentialField out(std::move(g), u.orientation(), u.domain(),
                       u.floor_value());
    out.set_far_coeff(c * u.far_coeff());
    return out;
}

PotentialField normalize_pullback(const HenonLikeMap& f,
                                  const PotentialField& u, int d) {
    if (u.orientation() == Orientation::vertical)
        return scale_potential(pullback_potential(f, u), 1.0 / d);
    return scale_potential(pushforward_potential(f, u), 1.0 / d);
}

PotentialField add_potentials(const PotentialField& a, double ca,
                              const PotentialField& b, double cb) {
    if (a.orientation() != b.orientation() ||
        a.grid().size() != b.grid().size())
        throw std::invalid_argument("add_potentials: incompatible fields");
    if (a.has_analytic() && b.has_analytic()) {
        auto ea = a.analytic();
        auto eb = b.analytic();
        PotentialField out(
            [ea, eb, ca, cb](cplx z, cplx w) {
                return ca * ea(z, w) + cb * eb(z, w);
            },
            a.orientation(), a.domain(), a.grid().axis(0).n,
            ca * a.far_coeff() + cb * b.far_coeff());
        if (a.has_hessian() && b.has_hessian()) {
            auto ha = a.hessian();
            auto hb = b.hessian();
            out.set_hessian([ha, hb, ca, cb](cplx z, cplx w, double& hzz,
                                             double& hww, cplx& hzw) {
                double z1, w1, z2, w2;
                cplx m1, m2;
                ha(z, w, z1, w1, m1);
                hb(z, w, z2, w2, m2);
                hzz = ca * z1 + cb * z2;
                hww = ca * w1 + cb * w2;
                hzw = ca * m1 + cb * m2;
            });
        }
        return out;
    }
    Grid4 g = a.grid();
    for (std::size_t i = 0; i < g.size(); ++i)
        g.values()[i] = ca * a.grid().values()[i] + cb * b.grid().values()[i];
    PotentialField out(std::move(g), a.orientation(), a.domain(),
                       a.floor_value());
    out.set_far_coeff(ca * a.far_coeff() + cb * b.far_coeff());
    return out;
}

PotentialField regularize(const PotentialField& u, const SmoothingKernel& k) {
    Grid4 g = u.grid();
    const auto axes = g.axes();
    // separable convolution axis by axis, clamped at the edges
    for (int a = 0; a < 4; ++a) {
        const auto taps = k.taps(axes[static_cast<std::size_t>(a)].h());
        const int r = static_cast<int>(taps.size() / 2);
        Grid4 next = g;
        const int n[4] = {axes[0].n, axes[1].n, axes[2].n, axes[3].n};
        parallel_chunks(g.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t idx = lo; idx < hi; ++idx) {
                int c[4];
                g.unravel(idx, c[0], c[1], c[2], c[3]);
                double acc = 0.0;
                for (int t = -r; t <= r; ++t) {
                    int cc[4] = {c[0], c[1], c[2], c[3]};
                    cc[a] = std::clamp(cc[a] + t, 0, n[a] - 1);
                    acc += taps[static_cast<std::size_t>(t + r)] *
                           g.at(cc[0], cc[1], cc[2], cc[3]);
                }
                next.values()[idx] = acc;
            }
        });
        g = std::move(next);
    }
    PotentialField out(std::move(g), u.orientation(), u.domain(),
                       u.floor_value());
    out.set_far_coeff(u.far_coeff());
    // The exact evaluator still matches on the pluriharmonic collar where
    // the slice-mass rings sample, provided the kernel stays clear of it.
    const Bidisk& D = u.domain();
    const bool vert = u.orientation() == Orientation::vertical;
    const double gap = vert ? (0.93 - D.inner_m_fraction) * D.m_radius
                            : (0.93 - D.inner_n_fraction) * D.n_radius;
    if (static_cast<bool>(u.collar_eval()) && k.epsilon < gap)
        out.set_analytic(u.collar_eval(), /*collar_only=*/true);
    return out;
}

PotentialField transpose_potential(const PotentialField& u) {
    const Bidisk& D = u.domain();
    Bidisk Dt(D.n_radius, D.m_radius, D.inner_n_fraction, D.inner_m_fraction,
              D.margin_fraction);
    const Orientation o = u.orientation() == Orientation::vertical
                              ? Orientation::horizontal
                              : Orientation::vertical;
    if (u.has_analytic()) {
        auto ue = u.analytic();
        PotentialField out([ue](cplx z, cplx w) { return ue(w, z); }, o, Dt,
                           u.grid().axis(0).n, u.far_coeff());
        if (u.has_hessian()) {
            auto hs = u.hessian();
            out.set_hessian([hs](cplx z, cplx w, double& hzz, double& hww,
                                 cplx& hzw) {
                double szz, sww;
                cplx szw;
                hs(w, z, szz, sww, szw);
                hzz = sww;
                hww = szz;
                hzw = std::conj(szw);
            });
        }
        return out;
    }
    const Grid4& g = u.grid();
    Grid4 gt({g.axes()[2], g.axes()[3], g.axes()[0], g.axes()[1]});
    for (int i = 0; i < gt.axis(0).n; ++i)
        for (int j = 0; j < gt.axis(1).n; ++j)
            for (int k = 0; k < gt.axis(2).n; ++k)
                for (int l = 0; l < gt.axis(3).n; ++l)
                    gt.at(i, j, k, l) = g.at(k, l, i, j);
    PotentialField out(std::move(gt), o, Dt, u.floor_value());
    out.set_far_coeff(u.far_coeff());
    return out;
}

}  // namespace hlab
