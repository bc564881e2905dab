#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace haxc {

/// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// log of the standard normal density.
inline double norm_logpdf(double x) {
    return -0.5 * x * x - 0.9189385332046727417803297; // log(sqrt(2 pi))
}

double norm_quantile(double p);

/// Univariate Student t CDF with nu > 0 degrees of freedom.
double t_cdf(double x, double nu);

/// Quantile of the chi-square distribution (nu > 0, possibly non-integer).
double chisq_quantile(double p, double nu);

/// log chi-square density.
double chisq_logpdf(double x, double nu);

namespace quad {

/// Adaptive Simpson on [a,b] to absolute tolerance tol.
double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                int max_depth = 48);

/// Adaptive integration over [a,b] with initial split points inserted
/// (useful when the mass is concentrated far from the endpoints).
double adaptive_split(const std::function<double(double)>& f, const std::vector<double>& knots,
                      double tol, int max_depth = 48);

} // namespace quad

namespace linalg {

/// Cholesky factor (lower) of a symmetric PSD matrix, row-major n x n.
/// Nearly singular matrices are repaired by clamping eigenvalues at zero;
/// eigenvalues below -1e-10 * max eigenvalue raise validation_error.
std::vector<double> cholesky_psd(std::vector<double> a, int n);

/// Eigenvalues of a symmetric matrix (Jacobi sweeps), ascending.
std::vector<double> sym_eigenvalues(std::vector<double> a, int n);

} // namespace linalg

} // namespace haxc
