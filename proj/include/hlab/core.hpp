#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlab {

using cplx = std::complex<double>;

/// A point of C^2.
struct Pt2 {
    cplx z;
    cplx w;
};

/// 2x2 complex matrix, row major: [a b; c d].
struct Mat2c {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mat2c identity() { return Mat2c{}; }

    Mat2c operator*(const Mat2c& o) const {
        return Mat2c{a * o.a + b * o.c, a * o.b + b * o.d,
                     c * o.a + d * o.c, c * o.b + d * o.d};
    }
    cplx det() const { return a * d - b * c; }
    Mat2c adjoint() const {
        return Mat2c{std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    double norm_inf() const {
        return std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
    }
};

/// Deterministic 64-bit generator; splitmix-seeded xorshift.
/// Kept local so runs reproduce bit-identically across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL;
        for (int i = 0; i < 4; ++i) {
            x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
            x ^= x >> 27; x *= 0x94d049bb133111ebULL;
            x ^= x >> 31;
            s_[i & 1] = x ? x : 0x2545f4914f6cdd1dULL;
        }
    }
    std::uint64_t next_u64() {
        std::uint64_t x = s_[0];
        const std::uint64_t y = s_[1];
        s_[0] = y;
        x ^= x << 23;
        s_[1] = x ^ y ^ (x >> 17) ^ (y >> 26);
        return s_[1] + y;
    }
    /// Uniform in [0,1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform on the disk of given radius centered at 0.
    cplx disk(double radius) {
        const double r = radius * std::sqrt(uniform());
        const double phi = 2.0 * M_PI * uniform();
        return cplx(r * std::cos(phi), r * std::sin(phi));
    }

  private:
    std::uint64_t s_[2];
};

/// Fixed-order pairwise accumulation over a precomputed vector.
/// Summation order depends only on the length, never on threading.
double pairwise_sum(const std::vector<double>& v);

/// Least squares fit y = a + b*x; returns {a, b, relative residual}.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rel_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// FNV-1a 64-bit, used for output-file integrity checksums.
std::uint64_t fnv1a(const void* data, std::size_t n);

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

}  // namespace hlab
