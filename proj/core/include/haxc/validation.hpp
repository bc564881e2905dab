#pragma once

#include <span>
#include <string>
#include <vector>

namespace haxc {

/// Row-major n x d sample storage with column names.
struct SampleMatrix {
    long long n = 0;
    int d = 0;
    std::vector<double> data;
    std::vector<std::string> names;

    double at(long long row, int col) const {
        return data[static_cast<std::size_t>(row) * static_cast<std::size_t>(d) +
                    static_cast<std::size_t>(col)];
    }
    std::vector<double> column(int col) const {
        std::vector<double> out(static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = at(i, col);
        return out;
    }
};

/// Tie-corrected sample Kendall's tau (tau-b), O(n log n) by merge-sort
/// inversion counting (Knight's algorithm).
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Kolmogorov-Smirnov statistic sup |Fhat(u) - u| against the uniform law on
/// [0,1]; values outside [0,1] are an error.
double ks_uniform(std::span<const double> values);

struct EmpiricalCdf {
    double value = 0.0;
    double se = 0.0; // binomial standard error
};

/// Fraction of rows componentwise <= u.
EmpiricalCdf empirical_cdf(const SampleMatrix& sample, std::span<const double> u);

/// Pairwise Kendall's tau matrix (symmetric, unit diagonal).
std::vector<double> tau_matrix(const SampleMatrix& sample);

} // namespace haxc
