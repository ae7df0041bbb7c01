#pragma once

#include <functional>

#include "hlab/bidisk.hpp"
#include "hlab/grid.hpp"
#include "hlab/henon.hpp"
#include "hlab/kernel.hpp"

namespace hlab {

enum class Orientation : std::uint8_t { vertical = 0, horizontal = 1 };

constexpr int kDefaultRes = 48;
constexpr double kFloor = -40.0;

/// Grid sample of a psh potential u on the bidisk, standing for the
/// positive (1,1)-current with that local potential. When the potential
/// has an exact pointwise evaluator (lines, orbit sums, disc averages)
/// it is carried along and preferred by high-accuracy integrals.
class PotentialField {
  public:
    using Eval = std::function<double(cplx, cplx)>;
    /// Exact complex Hessian: fills (u_zz̄, u_ww̄, u_zw̄).
    using Hessian = std::function<void(cplx, cplx, double&, double&, cplx&)>;

    PotentialField() = default;
    PotentialField(Grid4 grid, Orientation o, Bidisk D,
                   double floor_value = kFloor);
    /// Samples the evaluator onto a fresh grid (floor-clipped).
    PotentialField(Eval u, Orientation o, Bidisk D, int res,
                   double far_coeff);

    const Grid4& grid() const { return grid_; }
    Grid4& mutable_grid() { return grid_; }
    Orientation orientation() const { return orient_; }
    const Bidisk& domain() const { return domain_; }
    double floor_value() const { return floor_; }
    double far_coeff() const { return far_coeff_; }
    void set_far_coeff(double c) { far_coeff_ = c; }
    /// True when the evaluator is valid everywhere (not just the collar).
    bool has_analytic() const {
        return static_cast<bool>(analytic_) && !analytic_collar_only_;
    }
    const Eval& analytic() const { return analytic_; }
    /// Evaluator that may be valid only on the pluriharmonic collar
    /// (kept by regularize for the slice-mass rings); may be empty.
    const Eval& collar_eval() const { return analytic_; }
    void set_analytic(Eval e, bool collar_only = false) {
        analytic_ = std::move(e);
        analytic_collar_only_ = collar_only;
    }
    void drop_analytic() { analytic_ = nullptr; hessian_ = nullptr; }
    bool has_hessian() const { return static_cast<bool>(hessian_); }
    const Hessian& hessian() const { return hessian_; }
    void set_hessian(Hessian h) { hessian_ = std::move(h); }

    /// Pointwise value: the exact evaluator when present, otherwise grid
    /// interpolation with the radial log continuation outside the domain.
    double eval(cplx z, cplx w) const;
    double eval(Pt2 x) const { return eval(x.z, x.w); }

  private:
    Grid4 grid_;
    Orientation orient_ = Orientation::vertical;
    Bidisk domain_;
    double floor_ = kFloor;
    Eval analytic_;
    bool analytic_collar_only_ = false;
    Hessian hessian_;
    double far_coeff_ = 1.0;  // slope of the log continuation = slice mass
};

/// u(z,w) = log|z - a|; unit slice mass.
PotentialField vertical_line(cplx a, const Bidisk& D, int res = kDefaultRes);
/// u(z,w) = log|w - b|.
PotentialField horizontal_line(cplx b, const Bidisk& D, int res = kDefaultRes);

/// Line current mollified in its own plane with the C^1 radial law
/// dd^c u = (3/(pi s^2))(1 - r^2/s^2)^2 on r < s: exact potential and
/// Hessian in closed form, unit slice mass.
PotentialField smoothed_vertical_line(cplx a, double s, const Bidisk& D,
                                      int res = kDefaultRes);
PotentialField smoothed_horizontal_line(cplx b, double s, const Bidisk& D,
                                        int res = kDefaultRes);

/// u(z,w) = log max(|z|, 1): the canonical vertical seed.
PotentialField canonical_seed(const Bidisk& D, int res = kDefaultRes);

struct SliceMassReport {
    double mean = 0.0;
    double max_dev = 0.0;
    int samples = 0;
};
/// Riesz mass of the slices: angular means on two circles in the
/// pluriharmonic collar, mass = (mean(r2) - mean(r1)) / log(r2/r1),
/// averaged over fixed transverse sample points; also the max deviation.
SliceMassReport slice_mass(const PotentialField& R);

struct PshReport {
    double ok_fraction = 1.0;
    double worst_violation = 0.0;  // positive = sub-mean failure
    std::size_t checked = 0;
};
/// Discrete sub-mean check on coordinate 4-neighbor circles.
PshReport psh_check(const PotentialField& R, double tol);

/// u o f on the grid of u (vertical inputs); analytic evaluators compose
/// exactly. Slice mass multiplies by the polynomial degree.
PotentialField pullback_potential(const HenonLikeMap& f,
                                  const PotentialField& u);
/// v o f^{-1} (horizontal inputs).
PotentialField pushforward_potential(const HenonLikeMap& f,
                                     const PotentialField& v);
/// L_v = f^*/d (vertical) or L_h = f_*/d (horizontal).
PotentialField normalize_pullback(const HenonLikeMap& f,
                                  const PotentialField& u, int d);

PotentialField scale_potential(const PotentialField& u, double c);
PotentialField add_potentials(const PotentialField& a, double ca,
                              const PotentialField& b, double cb);

/// Separable 4-d convolution of the grid with the product bump; the exact
/// evaluator is kept (it agrees on the pluriharmonic collar where the
/// high-accuracy integrals sample) unless the kernel is too wide for the
/// collar, in which case it is dropped.
PotentialField regularize(const PotentialField& u, const SmoothingKernel& k);

/// Swap the two coordinates; orientation flips.
PotentialField transpose_potential(const PotentialField& u);

}  // namespace hlab
