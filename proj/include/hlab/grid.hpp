#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hlab/bidisk.hpp"
#include "hlab/core.hpp"

namespace hlab {

/// Uniform node axis including both endpoints.
struct Axis {
    int n = 0;
    double lo = 0.0, hi = 0.0;

    double h() const { return n > 1 ? (hi - lo) / (n - 1) : 0.0; }
    double coord(int i) const { return lo + h() * i; }
    /// Fractional index of x; clamped to the axis range.
    double frac_index(double x) const {
        if (n < 2) return 0.0;
        double t = (x - lo) / h();
        if (t < 0.0) t = 0.0;
        if (t > n - 1) t = static_cast<double>(n - 1);
        return t;
    }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// 4-real-dimensional scalar grid over the bidisk:
/// axes = (re z, im z, re w, im w).
class Grid4 {
  public:
    Grid4() = default;
    Grid4(std::array<Axis, 4> axes)
        : ax_(axes),
          v_(static_cast<std::size_t>(axes[0].n) * axes[1].n * axes[2].n *
             axes[3].n, 0.0) {}

    static std::array<Axis, 4> bidisk_axes(const Bidisk& D, int res) {
        return {Axis{res, -D.m_radius, D.m_radius},
                Axis{res, -D.m_radius, D.m_radius},
                Axis{res, -D.n_radius, D.n_radius},
                Axis{res, -D.n_radius, D.n_radius}};
    }

    const std::array<Axis, 4>& axes() const { return ax_; }
    const Axis& axis(int a) const { return ax_[static_cast<std::size_t>(a)]; }
    std::size_t size() const { return v_.size(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    std::size_t index(int i, int j, int k, int l) const {
        return ((static_cast<std::size_t>(i) * ax_[1].n + j) * ax_[2].n + k) *
                   ax_[3].n + l;
    }
    double& at(int i, int j, int k, int l) { return v_[index(i, j, k, l)]; }
    double at(int i, int j, int k, int l) const { return v_[index(i, j, k, l)]; }

    void unravel(std::size_t idx, int& i, int& j, int& k, int& l) const {
        l = static_cast<int>(idx % ax_[3].n); idx /= ax_[3].n;
        k = static_cast<int>(idx % ax_[2].n); idx /= ax_[2].n;
        j = static_cast<int>(idx % ax_[1].n); idx /= ax_[1].n;
        i = static_cast<int>(idx);
    }
    Pt2 node(int i, int j, int k, int l) const {
        return Pt2{cplx(ax_[0].coord(i), ax_[1].coord(j)),
                   cplx(ax_[2].coord(k), ax_[3].coord(l))};
    }
    double cell_volume() const {
        return ax_[0].h() * ax_[1].h() * ax_[2].h() * ax_[3].h();
    }
    bool contains(Pt2 x) const {
        return ax_[0].contains(x.z.real()) && ax_[1].contains(x.z.imag()) &&
               ax_[2].contains(x.w.real()) && ax_[3].contains(x.w.imag());
    }

    /// Multilinear interpolation; coordinates are clamped to the grid.
    double interpolate(Pt2 x) const;

  private:
    std::array<Axis, 4> ax_{};
    std::vector<double> v_;
};

/// 2-real-dimensional scalar grid over one complex plane.
class Grid2 {
  public:
    Grid2() = default;
    Grid2(Axis re, Axis im)
        : re_(re), im_(im),
          v_(static_cast<std::size_t>(re.n) * im.n, 0.0) {}

    const Axis& re() const { return re_; }
    const Axis& im() const { return im_; }
    std::size_t size() const { return v_.size(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * im_.n + j;
    }
    double& at(int i, int j) { return v_[index(i, j)]; }
    double at(int i, int j) const { return v_[index(i, j)]; }
    cplx node(int i, int j) const { return cplx(re_.coord(i), im_.coord(j)); }
    double cell_area() const { return re_.h() * im_.h(); }
    double interpolate(cplx z) const;

  private:
    Axis re_{}, im_{};
    std::vector<double> v_;
};

/// Little-endian binary grid file: 64-byte header
/// (magic "HLGRID4\0", version, 4 axis resolutions, bidisk radii,
/// orientation byte, floor) followed by raw doubles.
void write_grid_file(const std::string& path, const Grid4& g,
                     std::uint8_t orientation, double floor_value);
Grid4 read_grid_file(const std::string& path, std::uint8_t* orientation,
                     double* floor_value);

}  // namespace hlab
