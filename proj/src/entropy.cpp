#include "hlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hlab/parallel.hpp"

namespace hlab {

namespace {

// Forward (or backward) orbit table, row-major: slot i*n_max+j = j-th
// iterate of sample i. Orbits freeze at the escape radius so distances
// between diverged samples stay bounded and comparable.
std::vector<Pt2> orbit_table(const HenonLikeMap& f, const std::vector<Pt2>& xs,
                             int n_max, bool backward = false) {
    const std::size_t S = xs.size();
    const std::size_t nn = static_cast<std::size_t>(n_max);
    std::vector<Pt2> tab(S * nn);
    const double R = f.escape_radius();
    parallel_chunks(S, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Pt2 x = xs[i];
            bool frozen = false;
            for (std::size_t j = 0; j < nn; ++j) {
                tab[i * nn + j] = x;
                if (frozen) continue;
                const Pt2 y = backward ? f.inverse(x) : f.forward(x);
                if (std::max(std::abs(y.z), std::abs(y.w)) > R)
                    frozen = true;
                else
                    x = y;
            }
        }
    });
    return tab;
}

double dist2(Pt2 a, Pt2 b) {
    return std::norm(a.z - b.z) + std::norm(a.w - b.w);
}

// max_{0<=j<n} dist(f^j x_i, f^j x_k), with early exit above the cutoff
double bowen_dist2(const std::vector<Pt2>& tab, std::size_t n_max,
                   std::size_t i, std::size_t k, std::size_t n,
                   double cutoff2) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        m = std::max(m, dist2(tab[i * n_max + j], tab[k * n_max + j]));
        if (m >= cutoff2) return m;
    }
    return m;
}

// two-sigma slope uncertainty of the least-squares line
double slope_band(const std::vector<double>& x, const std::vector<double>& y,
                  const LineFit& fit) {
    const std::size_t k = x.size();
    if (k < 3) return 0.0;
    double xm = 0.0;
    for (double v : x) xm += v;
    xm /= static_cast<double>(k);
    double ss = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss += r * r;
        sxx += (x[i] - xm) * (x[i] - xm);
    }
    if (sxx == 0.0) return 0.0;
    return 2.0 * std::sqrt(ss / static_cast<double>(k - 2) / sxx);
}

// fit over the n >= 3 tail (burn-in discarded) restricted to depths the
// estimator still resolves; falls back to all valid points when the range
// is too short to have a tail
void fit_rate(EntropyEstimate& e, double sign, const std::vector<char>& ok) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < e.n_values.size(); ++i)
        if (e.n_values[i] >= 3 && ok[i] && std::isfinite(e.raw[i])) {
            xs.push_back(e.n_values[i]);
            ys.push_back(e.raw[i]);
        }
    if (xs.size() < 2) {
        xs.clear();
        ys.clear();
        for (std::size_t i = 0; i < e.n_values.size(); ++i)
            if (ok[i] && std::isfinite(e.raw[i])) {
                xs.push_back(e.n_values[i]);
                ys.push_back(e.raw[i]);
            }
    }
    if (xs.size() < 2) return;
    e.fit = fit_line(xs, ys);
    e.rate = sign * e.fit.slope;
    e.band = slope_band(xs, ys, e.fit);
}

// same intersection count as mu_points(depth), atoms taken at an earlier
// (or later) orbit stage; the defining equation bounds the orbit through
// step 2*depth
MuCloud cloud_at_step(const HenonLikeMap& f, cplx a, cplx b, int depth,
                      int step) {
    MuCloud mu;
    mu.n = depth;
    mu.a = a;
    mu.b = b;
    mu.route = MuRoute::points;
    const int d = f.poly_degree();
    double dn = 1.0;
    for (int i = 0; i < 2 * depth; ++i) dn *= d;
    mu.roots_expected = static_cast<int>(dn);
    const RootSolveResult r =
        solve_orbit_roots(f, a, b, 2 * depth, f.domain().m_radius);
    mu.newton_failures = r.stats.newton_failures;
    mu.max_residual = r.stats.max_residual;
    const double w = 1.0 / dn;
    for (const cplx& zeta : r.roots) {
        const OrbitPoint o = iterate_orbit(f, Pt2{zeta, b}, step);
        if (!o.representable) continue;
        mu.measure.add(o.point, w);
        ++mu.roots_found;
    }
    mu.measure.sort_points();
    mu.generic_ok = mu.roots_found >= 0.95 * mu.roots_expected;
    return mu;
}

}  // namespace

MuCloud k_proxy_samples(const HenonLikeMap& f, int clouds, int depth,
                        std::uint64_t seed, int atom_step) {
    if (clouds < 1) throw std::invalid_argument("k_proxy: need >= 1 cloud");
    if (atom_step < 0) atom_step = depth;
    if (atom_step > 2 * depth)
        throw std::invalid_argument("k_proxy: atom_step beyond orbit control");
    Rng rng(seed);
    std::vector<cplx> as(static_cast<std::size_t>(clouds));
    std::vector<cplx> bs(static_cast<std::size_t>(clouds));
    for (int i = 0; i < clouds; ++i) {
        as[static_cast<std::size_t>(i)] =
            rng.disk(0.9 * f.domain().inner_m_radius());
        bs[static_cast<std::size_t>(i)] =
            rng.disk(0.9 * f.domain().inner_n_radius());
    }
    std::vector<MuCloud> parts(static_cast<std::size_t>(clouds));
    parallel_chunks(static_cast<std::size_t>(clouds),
                    [&](std::size_t lo, std::size_t hi) {
                        for (std::size_t i = lo; i < hi; ++i)
                            parts[i] = atom_step == depth
                                           ? mu_points(f, as[i], bs[i], depth)
                                           : cloud_at_step(f, as[i], bs[i],
                                                           depth, atom_step);
                    });
    MuCloud out;
    out.n = depth;
    out.route = MuRoute::points;
    out.generic_ok = true;
    const double wscale = 1.0 / clouds;
    for (const MuCloud& p : parts) {
        for (std::size_t i = 0; i < p.measure.size(); ++i)
            out.measure.add(p.measure.points[i], wscale * p.measure.weights[i]);
        out.roots_found += p.roots_found;
        out.roots_expected += p.roots_expected;
        out.newton_failures += p.newton_failures;
        out.max_residual = std::max(out.max_residual, p.max_residual);
        out.generic_ok = out.generic_ok && p.generic_ok;
    }
    out.measure.sort_points();
    return out;
}

EntropyEstimate separated_entropy(const HenonLikeMap& f,
                                  const AtomicMeasure& samples, int n_max,
                                  double eps) {
    if (n_max < 1 || eps <= 0.0)
        throw std::invalid_argument("separated_entropy: bad parameters");
    EntropyEstimate e;
    e.method = EntropyMethod::separated;
    const std::size_t S = samples.size();
    const std::size_t nn = static_cast<std::size_t>(n_max);
    const std::vector<Pt2> tab = orbit_table(f, samples.points, n_max);
    const double eps2 = eps * eps;
    std::vector<char> ok;
    for (int n = 1; n <= n_max; ++n) {
        // greedy maximal packing in the canonical sample order
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < S; ++i) {
            bool sep = true;
            for (std::size_t k : kept)
                if (bowen_dist2(tab, nn, i, k, static_cast<std::size_t>(n),
                                eps2) < eps2) {
                    sep = false;
                    break;
                }
            if (sep) kept.push_back(i);
        }
        e.n_values.push_back(n);
        e.raw.push_back(std::log(static_cast<double>(kept.size())));
        // once the packing holds a sizable fraction of the whole sample
        // set the count is capped by sample exhaustion, not dynamics
        ok.push_back(2 * kept.size() < S ? 1 : 0);
    }
    for (char c : ok) e.saturated = e.saturated || c == 0;
    fit_rate(e, +1.0, ok);
    return e;
}

EntropyEstimate bowen_measure_entropy(const MuCloud& mu,
                                      const HenonLikeMap& f, int n_max,
                                      double eps, int centers) {
    if (n_max < 1 || eps <= 0.0 || centers < 1)
        throw std::invalid_argument("bowen_entropy: bad parameters");
    EntropyEstimate e;
    e.method = EntropyMethod::bowen;
    const std::size_t S = mu.measure.size();
    if (S == 0) return e;
    const std::size_t nn = static_cast<std::size_t>(n_max);
    const std::vector<Pt2> tab = orbit_table(f, mu.measure.points, n_max);
    const double eps2 = eps * eps;
    const double mass = mu.measure.total_mass();
    const std::size_t stride =
        std::max<std::size_t>(1, S / static_cast<std::size_t>(centers));
    std::vector<std::size_t> ctr;
    for (std::size_t i = 0; i < S; i += stride) ctr.push_back(i);
    // ball mass and atom count per (center, n)
    std::vector<double> ball(ctr.size() * nn, 0.0);
    std::vector<int> count(ctr.size() * nn, 0);
    parallel_chunks(ctr.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            const std::size_t ic = ctr[c];
            for (std::size_t i = 0; i < S; ++i) {
                // first n with d_n > eps; the ball membership is nested in n
                std::size_t j = 0;
                double m = 0.0;
                while (j < nn && m < eps2) {
                    m = std::max(
                        m, dist2(tab[ic * nn + j], tab[i * nn + j]));
                    if (m < eps2) ++j;
                }
                for (std::size_t n = 0; n < j; ++n) {
                    ball[c * nn + n] += mu.measure.weights[i];
                    ++count[c * nn + n];
                }
            }
        }
    });
    std::vector<char> ok;
    for (std::size_t n = 0; n < nn; ++n) {
        double lsum = 0.0;
        std::size_t used = 0;
        int thin = 0;
        for (std::size_t c = 0; c < ctr.size(); ++c) {
            if (count[c * nn + n] == 0) continue;
            lsum += std::log(ball[c * nn + n] / mass);
            ++used;
            if (count[c * nn + n] < 10) ++thin;
        }
        e.n_values.push_back(static_cast<int>(n) + 1);
        e.raw.push_back(used > 0 ? lsum / static_cast<double>(used)
                                 : -std::numeric_limits<double>::infinity());
        // balls holding < 10 atoms sit on the sample-resolution floor;
        // such depths are flagged and kept out of the rate fit
        ok.push_back(thin * 10 <= static_cast<int>(ctr.size()) ? 1 : 0);
    }
    for (char c : ok) e.undersampled = e.undersampled || c == 0;
    fit_rate(e, -1.0, ok);
    return e;
}

EntropyEstimate lov_estimate(const HenonLikeMap& f, int n_max, int mc_samples,
                             bool backward, std::uint64_t seed) {
    if (n_max < 1 || mc_samples < 1)
        throw std::invalid_argument("lov_estimate: bad parameters");
    EntropyEstimate e;
    e.method = EntropyMethod::lov;
    const double r1 = f.domain().inner_m_radius();
    const double r2 = f.domain().inner_n_radius();
    const double vol = M_PI * M_PI * r1 * r1 * r2 * r2;
    Rng rng(seed);
    const std::size_t S = static_cast<std::size_t>(mc_samples);
    const std::size_t nn = static_cast<std::size_t>(n_max);
    std::vector<Pt2> x0(S);
    for (std::size_t i = 0; i < S; ++i)
        x0[i] = Pt2{rng.disk(r1), rng.disk(r2)};
    // graph-volume integrand per (sample, n); 0 marks an exited orbit.
    // The inverse-map volume is evaluated over the same forward orbits by
    // the substitution x = f^{n-1}(y): the survivor set coincides and
    // Df^{-j}(x) = Df^{n-1-j}(y) (Df^{n-1}(y))^{-1} with the Jacobian
    // factor |det Df^{n-1}(y)|^2; a direct backward Monte Carlo would see
    // survivor fractions ~ |det Df|^{2n} and never reach useful depths.
    std::vector<double> dets(S * nn, 0.0);
    std::vector<int> alive(nn, 0);
    parallel_chunks(S, [&](std::size_t lo, std::size_t hi) {
        std::vector<Mat2c> Jk(nn);  // Df^k along the forward orbit
        for (std::size_t i = lo; i < hi; ++i) {
            Pt2 x = x0[i];
            Mat2c J = Mat2c::identity();
            Mat2c M = Mat2c::identity();  // I + sum_j (Df^j)^H (Df^j)
            for (std::size_t n = 1; n <= nn; ++n) {
                if (backward) {
                    Jk[n - 1] = J;
                    const cplx dj = J.det();
                    const Mat2c Jinv{J.d / dj, -J.b / dj, -J.c / dj,
                                     J.a / dj};
                    Mat2c Mb = Mat2c::identity();
                    for (std::size_t j = 1; j < n; ++j) {
                        const Mat2c B = Jk[n - 1 - j] * Jinv;
                        const Mat2c G = B.adjoint() * B;
                        Mb.a += G.a;
                        Mb.b += G.b;
                        Mb.c += G.c;
                        Mb.d += G.d;
                    }
                    dets[i * nn + (n - 1)] =
                        std::real(Mb.det()) * std::norm(dj);
                } else {
                    dets[i * nn + (n - 1)] = std::real(M.det());
                }
                if (n == nn) break;
                const Mat2c Dstep = f.jacobian(x);
                x = f.forward(x);
                if (std::abs(x.z) > r1 || std::abs(x.w) > r2) break;
                J = Dstep * J;
                const Mat2c G = J.adjoint() * J;
                M.a += G.a;
                M.b += G.b;
                M.c += G.c;
                M.d += G.d;
            }
        }
    });
    for (std::size_t n = 0; n < nn; ++n) {
        double vsum = 0.0;
        {
            std::vector<double> col(S);
            int live = 0;
            for (std::size_t i = 0; i < S; ++i) {
                col[i] = dets[i * nn + n];
                if (col[i] > 0.0) ++live;
            }
            alive[n] = live;
            vsum = pairwise_sum(col);
        }
        const double vn = vol * vsum / static_cast<double>(S);
        e.n_values.push_back(static_cast<int>(n) + 1);
        e.raw.push_back(vn > 0.0 ? std::log(vn)
                                 : -std::numeric_limits<double>::infinity());
    }
    e.undersampled = alive[nn - 1] < 100;
    fit_rate(e, +1.0, std::vector<char>(nn, 1));
    return e;
}

}  // namespace hlab
