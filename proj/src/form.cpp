#include "hlab/form.hpp"

#include <algorithm>

#include "hlab/parallel.hpp"

namespace hlab {

namespace {

inline std::size_t shifted(const Grid4& g, const int c[4], int a, int s) {
    int cc[4] = {c[0], c[1], c[2], c[3]};
    cc[a] += s;
    return g.index(cc[0], cc[1], cc[2], cc[3]);
}

// 4th-order second derivative along axis a.
inline double d2(const Grid4& g, const int c[4], int a) {
    const double h = g.axis(a).h();
    const auto& v = g.values();
    return (-v[shifted(g, c, a, -2)] + 16.0 * v[shifted(g, c, a, -1)] -
            30.0 * v[g.index(c[0], c[1], c[2], c[3])] +
            16.0 * v[shifted(g, c, a, 1)] - v[shifted(g, c, a, 2)]) /
           (12.0 * h * h);
}

// 4th-order first derivative along axis a of the values produced by fn.
// Mixed derivative: apply the 5-point first-derivative stencil twice.
inline double d1d1(const Grid4& g, const int c[4], int a, int b) {
    const double ha = g.axis(a).h(), hb = g.axis(b).h();
    const auto& v = g.values();
    auto da = [&](int sb) {
        int cc[4] = {c[0], c[1], c[2], c[3]};
        cc[b] += sb;
        auto pick = [&](int sa) {
            int c2[4] = {cc[0], cc[1], cc[2], cc[3]};
            c2[a] += sa;
            return v[g.index(c2[0], c2[1], c2[2], c2[3])];
        };
        return (pick(-2) - 8.0 * pick(-1) + 8.0 * pick(1) - pick(2)) /
               (12.0 * ha);
    };
    return (da(-2) - 8.0 * da(-1) + 8.0 * da(1) - da(2)) / (12.0 * hb);
}

}  // namespace

CoefficientForm::CoefficientForm(std::array<Axis, 4> axes, Bidisk D,
                                 Orientation o, int band)
    : hzz(axes), hww(axes), hzw_re(axes), hzw_im(axes), domain_(D),
      orient_(o), band_(band) {}

double CoefficientForm::min_eigenvalue() const {
    const auto& ax = hzz.axes();
    double m = 1e300;
    for (int i = band_; i < ax[0].n - band_; ++i)
        for (int j = band_; j < ax[1].n - band_; ++j)
            for (int k = band_; k < ax[2].n - band_; ++k)
                for (int l = band_; l < ax[3].n - band_; ++l) {
                    const double a = hzz.at(i, j, k, l),
                                 d = hww.at(i, j, k, l);
                    const double off2 =
                        hzw_re.at(i, j, k, l) * hzw_re.at(i, j, k, l) +
                        hzw_im.at(i, j, k, l) * hzw_im.at(i, j, k, l);
                    const double tr = a + d;
                    const double disc =
                        std::sqrt(std::max(0.0, (a - d) * (a - d) + 4 * off2));
                    m = std::min(m, 0.5 * (tr - disc));
                }
    return m;
}

double CoefficientForm::sup_norm() const {
    const auto& ax = hzz.axes();
    double m = 0.0;
    for (int i = band_; i < ax[0].n - band_; ++i)
        for (int j = band_; j < ax[1].n - band_; ++j)
            for (int k = band_; k < ax[2].n - band_; ++k)
                for (int l = band_; l < ax[3].n - band_; ++l)
                    m = std::max({m, std::abs(hzz.at(i, j, k, l)),
                                  std::abs(hww.at(i, j, k, l)),
                                  std::abs(hzw_re.at(i, j, k, l)),
                                  std::abs(hzw_im.at(i, j, k, l))});
    return m;
}

double CoefficientForm::boundary_sup() const {
    const auto& ax = hzz.axes();
    double m = 0.0;
    for (int i = band_; i < ax[0].n - band_; ++i)
        for (int j = band_; j < ax[1].n - band_; ++j)
            for (int k = band_; k < ax[2].n - band_; ++k)
                for (int l = band_; l < ax[3].n - band_; ++l) {
                    const bool shell =
                        i == band_ || j == band_ || k == band_ || l == band_ ||
                        i == ax[0].n - band_ - 1 || j == ax[1].n - band_ - 1 ||
                        k == ax[2].n - band_ - 1 || l == ax[3].n - band_ - 1;
                    if (!shell) continue;
                    m = std::max({m, std::abs(hzz.at(i, j, k, l)),
                                  std::abs(hww.at(i, j, k, l)),
                                  std::abs(hzw_re.at(i, j, k, l)),
                                  std::abs(hzw_im.at(i, j, k, l))});
                }
    return m;
}

namespace {

CoefficientForm ddc_of_grid(const Grid4& g, const Bidisk& D, Orientation o) {
    CoefficientForm F(g.axes(), D, o, 2);
    const auto& ax = g.axes();
    const std::size_t n0 = static_cast<std::size_t>(ax[0].n);
    parallel_chunks(n0, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            if (i < 2 || i >= ax[0].n - 2) continue;
            for (int j = 2; j < ax[1].n - 2; ++j)
                for (int k = 2; k < ax[2].n - 2; ++k)
                    for (int l = 2; l < ax[3].n - 2; ++l) {
                        const int c[4] = {i, j, k, l};
                        F.hzz.at(i, j, k, l) =
                            0.25 * (d2(g, c, 0) + d2(g, c, 1));
                        F.hww.at(i, j, k, l) =
                            0.25 * (d2(g, c, 2) + d2(g, c, 3));
                        F.hzw_re.at(i, j, k, l) =
                            0.25 * (d1d1(g, c, 0, 2) + d1d1(g, c, 1, 3));
                        F.hzw_im.at(i, j, k, l) =
                            0.25 * (d1d1(g, c, 0, 3) - d1d1(g, c, 1, 2));
                    }
        }
    });
    return F;
}

}  // namespace

CoefficientForm ddc(const PotentialField& u) {
    if (u.grid().axis(0).n < 16)
        throw std::invalid_argument("ddc: grid resolution must be >= 16");
    return ddc_of_grid(u.grid(), u.domain(), u.orientation());
}

CoefficientForm ddc_at(const PotentialField& u, int res) {
    if (res == u.grid().axis(0).n && !u.has_analytic()) return ddc(u);
    Grid4 g(Grid4::bidisk_axes(u.domain(), res));
    auto& v = g.values();
    parallel_chunks(g.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            int i, j, k, l;
            g.unravel(idx, i, j, k, l);
            const Pt2 x = g.node(i, j, k, l);
            v[idx] = std::max(u.eval(x.z, x.w), u.floor_value());
        }
    });
    return ddc_of_grid(g, u.domain(), u.orientation());
}

CoefficientForm sampled_form(const PotentialField& u, int res, int ss) {
    if (!u.has_hessian()) return ddc_at(u, res);
    CoefficientForm F(Grid4::bidisk_axes(u.domain(), res), u.domain(),
                      u.orientation(), 2);
    const auto hs = u.hessian();
    const auto& ax = F.axes();
    // 2-point Gauss offsets per axis make cell sums 4th-order accurate
    const double g2 = 0.5 / std::sqrt(3.0);
    std::vector<double> off;
    if (ss <= 1) off = {0.0};
    else off = {-g2, g2};
    Grid4& hzz = F.hzz;
    parallel_chunks(hzz.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            int i, j, k, l;
            hzz.unravel(idx, i, j, k, l);
            double szz = 0.0, sww = 0.0;
            cplx szw = 0.0;
            int cnt = 0;
            for (double oa : off)
                for (double ob : off)
                    for (double oc : off)
                        for (double od : off) {
                            const cplx z(ax[0].coord(i) + oa * ax[0].h(),
                                         ax[1].coord(j) + ob * ax[1].h());
                            const cplx w(ax[2].coord(k) + oc * ax[2].h(),
                                         ax[3].coord(l) + od * ax[3].h());
                            double a, d;
                            cplx m;
                            hs(z, w, a, d, m);
                            szz += a;
                            sww += d;
                            szw += m;
                            ++cnt;
                        }
            F.hzz.values()[idx] = szz / cnt;
            F.hww.values()[idx] = sww / cnt;
            F.hzw_re.values()[idx] = szw.real() / cnt;
            F.hzw_im.values()[idx] = szw.imag() / cnt;
        }
    });
    return F;
}

CoefficientForm scale_form(const CoefficientForm& a, double c) {
    CoefficientForm F = a;
    for (auto* g : {&F.hzz, &F.hww, &F.hzw_re, &F.hzw_im})
        for (auto& v : g->values()) v *= c;
    return F;
}

CoefficientForm add_forms(const CoefficientForm& a, double ca,
                          const CoefficientForm& b, double cb) {
    if (a.axes()[0].n != b.axes()[0].n)
        throw std::invalid_argument("add_forms: resolution mismatch");
    CoefficientForm F = a;
    F.set_band(std::max(a.band(), b.band()));
    const Grid4* ga[4] = {&a.hzz, &a.hww, &a.hzw_re, &a.hzw_im};
    const Grid4* gb[4] = {&b.hzz, &b.hww, &b.hzw_re, &b.hzw_im};
    Grid4* gf[4] = {&F.hzz, &F.hww, &F.hzw_re, &F.hzw_im};
    for (int t = 0; t < 4; ++t)
        for (std::size_t i = 0; i < gf[t]->size(); ++i)
            gf[t]->values()[i] =
                ca * ga[t]->values()[i] + cb * gb[t]->values()[i];
    return F;
}

SliceMassReport form_slice_mass(const CoefficientForm& R) {
    const bool vert = R.orientation() == Orientation::vertical;
    const auto& ax = R.axes();
    const Grid4& H = vert ? R.hzz : R.hww;
    const double lim = 0.5 * (vert ? R.domain().n_radius : R.domain().m_radius);
    const int b = R.band();
    SliceMassReport rep;
    std::vector<double> masses;
    if (vert) {
        const double da = ax[0].h() * ax[1].h();
        for (int k = b; k < ax[2].n - b; ++k)
            for (int l = b; l < ax[3].n - b; ++l) {
                if (std::hypot(ax[2].coord(k), ax[3].coord(l)) > lim) continue;
                std::vector<double> terms;
                terms.reserve(static_cast<std::size_t>(ax[0].n) * ax[1].n);
                for (int i = b; i < ax[0].n - b; ++i)
                    for (int j = b; j < ax[1].n - b; ++j)
                        terms.push_back(H.at(i, j, k, l));
                masses.push_back((2.0 / M_PI) * pairwise_sum(terms) * da);
            }
    } else {
        const double da = ax[2].h() * ax[3].h();
        for (int i = b; i < ax[0].n - b; ++i)
            for (int j = b; j < ax[1].n - b; ++j) {
                if (std::hypot(ax[0].coord(i), ax[1].coord(j)) > lim) continue;
                std::vector<double> terms;
                for (int k = b; k < ax[2].n - b; ++k)
                    for (int l = b; l < ax[3].n - b; ++l)
                        terms.push_back(H.at(i, j, k, l));
                masses.push_back((2.0 / M_PI) * pairwise_sum(terms) * da);
            }
    }
    rep.samples = static_cast<int>(masses.size());
    if (masses.empty()) return rep;
    rep.mean = pairwise_sum(masses) / masses.size();
    for (double m : masses)
        rep.max_dev = std::max(rep.max_dev, std::abs(m - rep.mean));
    return rep;
}

Grid4 ddc_density(const CoefficientForm& psi) {
    const auto& ax = psi.axes();
    Grid4 D(ax);
    const int b = psi.band() + 2;
    const double invpi2 = 1.0 / (M_PI * M_PI);
    parallel_chunks(static_cast<std::size_t>(ax[0].n), [&](std::size_t lo,
                                                           std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            if (i < b || i >= ax[0].n - b) continue;
            for (int j = b; j < ax[1].n - b; ++j)
                for (int k = b; k < ax[2].n - b; ++k)
                    for (int l = b; l < ax[3].n - b; ++l) {
                        const int c[4] = {i, j, k, l};
                        const double lap_z_hww =
                            d2(psi.hww, c, 0) + d2(psi.hww, c, 1);
                        const double lap_w_hzz =
                            d2(psi.hzz, c, 2) + d2(psi.hzz, c, 3);
                        const double mixed =
                            d1d1(psi.hzw_re, c, 0, 2) +
                            d1d1(psi.hzw_re, c, 1, 3) +
                            d1d1(psi.hzw_im, c, 0, 3) -
                            d1d1(psi.hzw_im, c, 1, 2);
                        D.at(i, j, k, l) =
                            invpi2 * (lap_z_hww + lap_w_hzz - 2.0 * mixed);
                    }
        }
    });
    return D;
}

double ddc_mass(const CoefficientForm& psi) {
    const Grid4 D = ddc_density(psi);
    std::vector<double> terms;
    terms.reserve(D.size());
    for (double v : D.values()) terms.push_back(std::abs(v));
    return pairwise_sum(terms) * D.cell_volume();
}

double contraction_density(const CoefficientForm& r, const CoefficientForm& s,
                           int i, int j, int k, int l) {
    const double re = r.hzw_re.at(i, j, k, l) * s.hzw_re.at(i, j, k, l) +
                      r.hzw_im.at(i, j, k, l) * s.hzw_im.at(i, j, k, l);
    return (4.0 / (M_PI * M_PI)) *
           (r.hzz.at(i, j, k, l) * s.hww.at(i, j, k, l) +
            r.hww.at(i, j, k, l) * s.hzz.at(i, j, k, l) - 2.0 * re);
}

PairingResult pair_current_form(const PotentialField& R,
                                const CoefficientForm& phi, int res) {
    if (R.orientation() == phi.orientation())
        throw std::invalid_argument(
            "pair_current_form: orientations must be opposite");
    if (res == 0) res = phi.axes()[0].n;
    PairingResult out;
    const CoefficientForm Rf = sampled_form(R, res);
    const int b = std::max(Rf.band(), phi.band());
    const auto& ax = phi.axes();
    if (Rf.axes()[0].n != ax[0].n)
        throw std::invalid_argument("pair_current_form: resolution mismatch");
    {
        std::vector<double> terms;
        for (int i = b; i < ax[0].n - b; ++i)
            for (int j = b; j < ax[1].n - b; ++j)
                for (int k = b; k < ax[2].n - b; ++k)
                    for (int l = b; l < ax[3].n - b; ++l)
                        terms.push_back(
                            contraction_density(Rf, phi, i, j, k, l));
        out.contraction = pairwise_sum(terms) * phi.cell_volume();
    }
    if (phi.boundary_sup() <= 1e-8 * (phi.sup_norm() + 1e-30)) {
        const Grid4 dens = ddc_density(phi);
        out.by_parts = pair_eval_with_density(
            [&R](cplx z, cplx w) { return R.eval(z, w); }, dens,
            phi.band() + 2);
        out.has_by_parts = true;
    }
    out.value = out.has_by_parts ? out.by_parts : out.contraction;
    return out;
}

double pair_eval_with_density(const std::function<double(cplx, cplx)>& u,
                              const Grid4& dens, int band) {
    const auto& ax = dens.axes();
    const double vol = dens.cell_volume();
    const std::size_t n0 = static_cast<std::size_t>(ax[0].n);
    std::vector<double> plane(n0, 0.0);
    parallel_chunks(n0, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = static_cast<int>(ii);
            if (i < band || i >= ax[0].n - band) continue;
            std::vector<double> terms;
            for (int j = band; j < ax[1].n - band; ++j)
                for (int k = band; k < ax[2].n - band; ++k)
                    for (int l = band; l < ax[3].n - band; ++l) {
                        const double d = dens.at(i, j, k, l);
                        if (d == 0.0) continue;
                        const Pt2 x = dens.node(i, j, k, l);
                        terms.push_back(u(x.z, x.w) * d);
                    }
            plane[ii] = pairwise_sum(terms);
        }
    });
    return pairwise_sum(plane) * vol;
}

CoefficientForm pullback_form(const HenonLikeMap& f, const CoefficientForm& R) {
    CoefficientForm F(R.axes(), R.domain(), R.orientation(), R.band());
    const auto& ax = R.axes();
    parallel_chunks(F.hzz.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            int i, j, k, l;
            F.hzz.unravel(idx, i, j, k, l);
            if (!F.valid(i, j, k, l)) continue;
            const Pt2 x = F.hzz.node(i, j, k, l);
            const Pt2 y = f.forward(x);
            if (!R.hzz.contains(y)) continue;  // form vanishes off its grid
            const cplx m(R.hzw_re.interpolate(y), R.hzw_im.interpolate(y));
            Mat2c H{R.hzz.interpolate(y), m, std::conj(m),
                    R.hww.interpolate(y)};
            const Mat2c A = f.jacobian(x);
            const Mat2c At{A.a, A.c, A.b, A.d};
            const Mat2c Ac{std::conj(A.a), std::conj(A.b), std::conj(A.c),
                           std::conj(A.d)};
            const Mat2c Hp = At * H * Ac;
            F.hzz.values()[idx] = Hp.a.real();
            F.hww.values()[idx] = Hp.d.real();
            F.hzw_re.values()[idx] = Hp.b.real();
            F.hzw_im.values()[idx] = Hp.b.imag();
        }
    });
    return F;
}

CoefficientForm lemma_base_form(const Bidisk& D, int res, int band) {
    CoefficientForm F(Grid4::bidisk_axes(D, res), D, Orientation::horizontal,
                      band);
    const double rb = 0.92 * D.n_radius;
    const auto& ax = F.axes();
    for (int i = 0; i < ax[0].n; ++i)
        for (int j = 0; j < ax[1].n; ++j)
            for (int k = 0; k < ax[2].n; ++k)
                for (int l = 0; l < ax[3].n; ++l) {
                    const Pt2 x = F.hzz.node(i, j, k, l);
                    const double aw = std::abs(x.w);
                    if (aw >= rb) continue;
                    const double t = 1.0 - (aw * aw) / (rb * rb);
                    const double beta = t * t * t;
                    const double rho = std::norm(x.z) + std::norm(x.w);
                    F.hww.at(i, j, k, l) = rho * beta;
                }
    return F;
}

std::pair<CoefficientForm, CoefficientForm> decompose_test_form(
    const CoefficientForm& psi_prime) {
    if (psi_prime.boundary_sup() >
        1e-8 * (psi_prime.sup_norm() + 1e-30))
        throw std::invalid_argument(
            "decompose_test_form: input must be compactly supported inside "
            "the valid grid region");
    const CoefficientForm base =
        lemma_base_form(psi_prime.domain(), psi_prime.axes()[0].n,
                        psi_prime.band());
    const Grid4 dBase = ddc_density(base);
    const Grid4 dPrime = ddc_density(psi_prime);
    double supd = 0.0;
    for (double v : dPrime.values()) supd = std::max(supd, std::abs(v));
    const double tol = 1e-7 * (supd + 1.0);
    const double rb = 0.92 * psi_prime.domain().n_radius;
    const auto& ax = psi_prime.axes();
    const int b = psi_prime.band() + 2;
    double A = 1.0;
    bool ok = false;
    for (int p = 0; p <= 60 && !ok; ++p, A *= 2.0) {
        ok = true;
        for (int i = b; i < ax[0].n - b && ok; ++i)
            for (int j = b; j < ax[1].n - b && ok; ++j)
                for (int k = b; k < ax[2].n - b && ok; ++k)
                    for (int l = b; l < ax[3].n - b && ok; ++l) {
                        const double need = dPrime.at(i, j, k, l);
                        if (A * dBase.at(i, j, k, l) + need < -tol) {
                            const Pt2 x = dPrime.node(i, j, k, l);
                            if (std::abs(x.w) >= rb)
                                throw std::invalid_argument(
                                    "decompose_test_form: support leaves the "
                                    "positivity region of the base form");
                            ok = false;
                        }
                    }
        if (ok) break;
    }
    if (!ok)
        throw std::runtime_error("decompose_test_form: no admissible multiple");
    CoefficientForm second = scale_form(base, A);
    CoefficientForm first = add_forms(second, 1.0, psi_prime, 1.0);
    return {first, second};
}

}  // namespace hlab
