#pragma once

#include <stdexcept>

namespace hlab {

/// Product domain D = M x N with M = {|z| < m_radius}, N = {|w| < n_radius}.
/// inner_m_fraction defines M' (where inverse images land),
/// inner_n_fraction defines N'' (where forward images land),
/// margin_fraction defines the working sub-bidisk D* used by the disc family.
struct Bidisk {
    double m_radius = 3.0;
    double n_radius = 3.0;
    double inner_m_fraction = 0.8;
    double inner_n_fraction = 0.8;
    double margin_fraction = 0.9;

    Bidisk() = default;
    Bidisk(double mr, double nr, double im, double in, double mf)
        : m_radius(mr), n_radius(nr), inner_m_fraction(im),
          inner_n_fraction(in), margin_fraction(mf) {
        validate();
    }

    void validate() const {
        if (m_radius <= 0.0 || n_radius <= 0.0)
            throw std::invalid_argument("bidisk: radii must be positive");
        if (!(inner_m_fraction > 0.0 && inner_m_fraction < 1.0) ||
            !(inner_n_fraction > 0.0 && inner_n_fraction < 1.0))
            throw std::invalid_argument("bidisk: inner fractions must lie in (0,1)");
        if (!(margin_fraction > 0.0 && margin_fraction < 1.0))
            throw std::invalid_argument("bidisk: margin fraction must lie in (0,1)");
        // strict nesting M' << M* << M and N'' << N* << N
        if (!(inner_m_fraction < margin_fraction) ||
            !(inner_n_fraction < margin_fraction))
            throw std::invalid_argument("bidisk: inner fractions must be < margin fraction");
    }

    double inner_m_radius() const { return m_radius * inner_m_fraction; }
    double inner_n_radius() const { return n_radius * inner_n_fraction; }
    double star_m_radius() const { return m_radius * margin_fraction; }
    double star_n_radius() const { return n_radius * margin_fraction; }
};

}  // namespace hlab
