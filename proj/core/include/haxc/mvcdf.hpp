#pragma once

#include <optional>
#include <vector>

namespace haxc {

/// Rectangle probability problem P(X <= upper) for X multivariate normal
/// (nu absent) or Student t (nu present) with the given mean/location and
/// covariance/dispersion matrix (row-major). Upper limits may be +infinity.
///
/// Dimension is capped at 6. Absolute accuracy: ~1e-6 for m <= 3, ~1e-4 for
/// m in 4..6 (randomized QMC with a fixed internal seed, so evaluation is
/// deterministic).
struct MvnProblem {
    int dim = 0;
    std::vector<double> upper;
    std::vector<double> mean;  // empty = zero vector
    std::vector<double> cov;   // row-major dim*dim
    std::optional<double> nu;  // degrees of freedom (Student t)

    static constexpr int kMaxDim = 6;
};

double mvn_cdf(const MvnProblem& p);
double mvt_cdf(const MvnProblem& p);

/// Bivariate standard normal P(X <= h, Y <= k) with correlation rho.
double bvn_cdf(double h, double k, double rho);

/// Bivariate standard t with nu degrees of freedom and correlation rho.
double bvt_cdf(double h, double k, double rho, double nu);

} // namespace haxc
