#pragma once

#include "hlab/equilibrium.hpp"

namespace hlab {

enum class EntropyMethod : std::uint8_t { separated = 0, bowen = 1, lov = 2 };

/// Growth-rate estimate with its fit diagnostics (rates in nats).
struct EntropyEstimate {
    EntropyMethod method = EntropyMethod::separated;
    std::vector<int> n_values;
    std::vector<double> raw;  // log N(n,eps) / log geo-mean ball mass / log V_n
    double rate = 0.0;
    double band = 0.0;        // confidence band from the fit residual
    LineFit fit;
    bool saturated = false;     // packing exhausted the sample set
    bool undersampled = false;  // too many Bowen balls with < 10 atoms
};

/// Merged point clouds over random (a,b) in the inner bidisk: the sample
/// proxy for the two-sided bounded set used by the entropy estimators.
/// Atoms sit at orbit stage `atom_step` (default: depth); the root
/// condition controls the orbit through step 2*depth, so an early stage
/// leaves more forward steps bounded for the Bowen metrics.
MuCloud k_proxy_samples(const HenonLikeMap& f, int clouds, int depth,
                        std::uint64_t seed, int atom_step = -1);

/// Greedy maximal (n,eps)-separated packing of the samples under the
/// forward Bowen metric max_{0<=j<n} dist(f^j x, f^j y); fits log N vs n
/// (n < 3 burn-in discarded). Orbits freeze at the escape radius.
EntropyEstimate separated_entropy(const HenonLikeMap& f,
                                  const AtomicMeasure& samples, int n_max,
                                  double eps);

/// Bowen-ball measure entropy: mu(B_n(x,eps)) estimated as the atom weight
/// fraction within the Bowen ball around strided centers; the rate is minus
/// the fitted slope of the log geometric mean.
EntropyEstimate bowen_measure_entropy(const MuCloud& mu,
                                      const HenonLikeMap& f, int n_max,
                                      double eps, int centers = 256);

/// Monte-Carlo volume growth of the truncated orbit graph over
/// D_* = M' x N'': integrand det(I + sum_{j<n} (Df^j)^H (Df^j)) over
/// starting points whose first n iterates stay in D_*.
EntropyEstimate lov_estimate(const HenonLikeMap& f, int n_max,
                             int mc_samples, bool backward = false,
                             std::uint64_t seed = 7);

}  // namespace hlab
