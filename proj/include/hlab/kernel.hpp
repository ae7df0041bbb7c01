#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hlab {

/// Radial mollifier data. The 1-d profile (35/32ε)(1-(x/ε)²)³ on [-ε,ε]
/// has unit integral; 2-d and 4-d kernels are tensor products of it.
struct SmoothingKernel {
    double epsilon = 0.1;

    explicit SmoothingKernel(double eps) : epsilon(eps) {
        if (!(eps > 0.0))
            throw std::invalid_argument("kernel: epsilon must be positive");
    }

    double profile1d(double x) const {
        const double t = x / epsilon;
        if (std::abs(t) >= 1.0) return 0.0;
        const double q = 1.0 - t * t;
        return (35.0 / 32.0) * q * q * q / epsilon;
    }

    /// Trapezoid check of the 1-d unit integral (diagnostic).
    double integral1d(int nodes = 4001) const {
        const double h = 2.0 * epsilon / (nodes - 1);
        double s = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double x = -epsilon + h * i;
            const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
            s += w * profile1d(x);
        }
        return s * h;
    }

    /// Discrete taps at spacing h, normalized to exact unit sum so that
    /// separable convolution conserves grid sums exactly.
    std::vector<double> taps(double h) const {
        const int r = static_cast<int>(std::ceil(epsilon / h));
        std::vector<double> t(static_cast<std::size_t>(2 * r + 1));
        double s = 0.0;
        for (int i = -r; i <= r; ++i) {
            t[static_cast<std::size_t>(i + r)] = profile1d(i * h);
            s += t[static_cast<std::size_t>(i + r)];
        }
        if (s <= 0.0) { t.assign(1, 1.0); return t; }
        for (auto& v : t) v /= s;
        return t;
    }
    int radius_cells(double h) const {
        return static_cast<int>(std::ceil(epsilon / h));
    }
};

}  // namespace hlab
