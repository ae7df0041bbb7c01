#pragma once

#include <utility>

#include "hlab/potential.hpp"

namespace hlab {

constexpr int kFormRes = 32;

/// Grid of 2x2 Hermitian coefficient matrices of a continuous (1,1)-form:
/// entries (u_zz̄, u_ww̄, u_zw̄) per node; the lower off-diagonal is the
/// conjugate by storage. A band of boundary cells is invalid (finite
/// difference stencils) and excluded from integrals.
class CoefficientForm {
  public:
    CoefficientForm() = default;
    CoefficientForm(std::array<Axis, 4> axes, Bidisk D, Orientation o,
                    int band);

    Grid4 hzz, hww, hzw_re, hzw_im;

    const Bidisk& domain() const { return domain_; }
    Orientation orientation() const { return orient_; }
    int band() const { return band_; }
    void set_band(int b) { band_ = b; }
    const std::array<Axis, 4>& axes() const { return hzz.axes(); }
    double cell_volume() const { return hzz.cell_volume(); }

    bool valid(int i, int j, int k, int l) const {
        const auto& ax = hzz.axes();
        return i >= band_ && j >= band_ && k >= band_ && l >= band_ &&
               i < ax[0].n - band_ && j < ax[1].n - band_ &&
               k < ax[2].n - band_ && l < ax[3].n - band_;
    }
    Mat2c H(int i, int j, int k, int l) const {
        const cplx m(hzw_re.at(i, j, k, l), hzw_im.at(i, j, k, l));
        return Mat2c{hzz.at(i, j, k, l), m, std::conj(m), hww.at(i, j, k, l)};
    }
    /// Smallest eigenvalue over the valid region.
    double min_eigenvalue() const;
    bool positive(double tol = 1e-9) const { return min_eigenvalue() >= -tol; }
    /// Largest |entry| over the valid region.
    double sup_norm() const;
    /// Largest |entry| on the outermost valid shell; ~0 means the form is
    /// compactly supported inside the grid (integration by parts is exact).
    double boundary_sup() const;

  private:
    Bidisk domain_;
    Orientation orient_ = Orientation::vertical;
    int band_ = 2;
};

/// Complex Hessian of the potential by 4th-order central differences on
/// its grid (band = 2 invalid cells).
CoefficientForm ddc(const PotentialField& u);
/// Same, after resampling the potential onto a res^4 grid.
CoefficientForm ddc_at(const PotentialField& u, int res);

/// Form sampled from an exact Hessian evaluator with per-cell subsampling
/// (ss^4 points) so that cell sums integrate to higher order; falls back
/// to ddc_at when no Hessian is attached.
CoefficientForm sampled_form(const PotentialField& u, int res, int ss = 2);

CoefficientForm scale_form(const CoefficientForm& a, double c);
CoefficientForm add_forms(const CoefficientForm& a, double ca,
                          const CoefficientForm& b, double cb);

/// Slice mass of the form: vertical, (2/pi) * sum of u_zz̄ over a z-plane
/// at fixed (w) node, averaged over slice nodes with |w| below half the
/// transverse radius; mirrored for horizontal.
SliceMassReport form_slice_mass(const CoefficientForm& R);

/// Density of dd^c(Psi) against the volume element:
/// <dd^c u, Psi> = ∫ u D(Psi) dV for compactly supported Psi.
/// D = (1/pi^2)[Lap_z(h_ww) + Lap_w(h_zz) - 2(...mixed...)], 4th order.
Grid4 ddc_density(const CoefficientForm& psi);
/// L1 mass of D(psi) over the valid region (closedness defect).
double ddc_mass(const CoefficientForm& psi);

/// Pointwise wedge/contraction density of two opposite-orientation forms:
/// (4/pi^2)[r_zz̄ s_ww̄ + r_ww̄ s_zz̄ - 2 Re(r_zw̄ conj(s_zw̄))].
double contraction_density(const CoefficientForm& r, const CoefficientForm& s,
                           int i, int j, int k, int l);

struct PairingResult {
    double value = 0.0;        // the reported pairing
    double contraction = 0.0;  // ∫ <ddc u, Phi>
    double by_parts = 0.0;     // ∫ u D(Phi), when Phi is compactly supported
    bool has_by_parts = false;
};
/// <R, Phi> for a vertical potential against a horizontal form (and the
/// mirrored case). Contraction always; by-parts when Phi is compactly
/// supported inside the grid, in which case it is the reported value.
PairingResult pair_current_form(const PotentialField& R,
                                const CoefficientForm& phi, int res = 0);

/// ∫ u(x) dens(x) dV over the valid band of the density grid, with u given
/// by an exact evaluator. The cheap path for pairings against a fixed
/// compactly supported test form.
double pair_eval_with_density(const std::function<double(cplx, cplx)>& u,
                              const Grid4& dens, int band);

/// H'(x) = A(x)^T H(f(x)) conj(A(x)): congruence transport of the
/// coefficients under the holomorphic map (per-cell; escape cells zeroed).
CoefficientForm pullback_form(const HenonLikeMap& f, const CoefficientForm& R);

/// Splits a real compactly supported form Psi' as the difference of two
/// dd^c-nonnegative forms (A*Psi + Psi', A*Psi) with Psi = (|z|^2+|w|^2)
/// times a positive w-plane bump, and A the smallest power of two that
/// makes the first output dd^c-nonnegative on the grid.
std::pair<CoefficientForm, CoefficientForm> decompose_test_form(
    const CoefficientForm& psi_prime);

/// The base form used by decompose_test_form (exposed for tests).
CoefficientForm lemma_base_form(const Bidisk& D, int res, int band);

}  // namespace hlab
