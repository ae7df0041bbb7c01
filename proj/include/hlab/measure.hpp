#pragma once

#include <array>
#include <string>
#include <vector>

#include "hlab/core.hpp"

namespace hlab {

/// Weighted point cloud in C^2.
struct AtomicMeasure {
    std::vector<Pt2> points;
    std::vector<double> weights;

    double total_mass() const;
    std::size_t size() const { return points.size(); }
    void add(Pt2 x, double w) { points.push_back(x); weights.push_back(w); }

    /// Mixed real moments E[x1^a x2^b x3^c x4^d] over (re z, im z, re w, im w)
    /// for all exponent tuples with 1 <= a+b+c+d <= degree, in a fixed
    /// lexicographic order shared by all callers. Normalized by total mass.
    std::vector<double> moments(int degree) const;

    /// First moment as a point of C^2.
    Pt2 mean() const;

    /// Sort atoms lexicographically (re z, im z, re w, im w, weight);
    /// canonical order for deterministic downstream processing.
    void sort_points();

    void write_csv(const std::string& path) const;
    static AtomicMeasure read_csv(const std::string& path);
};

/// Exponent tuples enumerated in the order used by AtomicMeasure::moments.
std::vector<std::array<int, 4>> moment_exponents(int degree);

/// Max absolute difference of shared moment vectors.
double moment_distance(const std::vector<double>& a,
                       const std::vector<double>& b);

}  // namespace hlab
