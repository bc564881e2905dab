#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haxc/dnorm.hpp"
#include "haxc/hierarchy.hpp"

namespace haxc {

namespace stdf {

/// Comonotone bound, l(x) = max x_j. Not differentiable.
struct Max {
    int d = 0;
};

/// Independence, l(x) = sum x_j.
struct Sum {
    int d = 0;
};

/// l(x) = (sum x_j^(1/alpha))^alpha, alpha in (0,1].
struct Gumbel {
    int d = 0;
    double alpha = 0.5;
};

/// Recursive Gumbel composition over a tree with "alpha" per internal node.
struct NestedGumbel {
    HierarchyTree tree;
};

/// l(x) = sum over non-empty J of (-1)^(|J|+1) (sum_{j in J} x_j^-theta)^(-1/theta).
struct NegLogistic {
    int d = 0;
    double theta = 1.0;
};

/// Parameterized by the matrix gamma of pairwise semivariogram values
/// gamma_ij = Var(eps_i - eps_j)/2 of the underlying log-normal generator.
struct HuslerReiss {
    std::vector<double> gamma; // row-major d*d, zero diagonal, positive off-diagonal
    int d = 0;
};

/// Extremal t with correlation matrix P and nu > 0.
struct ExtremalT {
    double nu = 1.0;
    std::vector<double> corr;
    int d = 0;
};

using Variant = std::variant<Max, Sum, Gumbel, NestedGumbel, NegLogistic, HuslerReiss, ExtremalT>;

} // namespace stdf

/// Closed-form stable tail dependence function: homogeneous of order 1,
/// 1 at unit vectors, max <= l <= sum. Zero coordinates are dropped
/// (l restricted to the nonzero ones); l(0) = 0.
class Stdf {
public:
    explicit Stdf(stdf::Variant v);

    static Stdf from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Husler-Reiss spec from the covariance matrix of the log-normal
    /// generator: gamma_ij = (cov_ii + cov_jj - 2 cov_ij)/2.
    static Stdf husler_reiss_from_covariance(const std::vector<double>& cov, int d);

    int dimension() const { return d_; }
    const stdf::Variant& variant() const { return variant_; }

    /// True when partial derivatives exist (everything except Max).
    bool smooth() const;

    double value(std::span<const double> x) const;

    /// Mixed partial derivative with respect to the coordinates in the bit
    /// mask B (bit j = coordinate j+1), at strictly positive x. The sign is
    /// (-1)^(|B|-1).
    double partial(std::uint64_t b_mask, std::span<const double> x) const;

    /// log |D_B l|; -infinity marks an exactly-zero derivative (absent term).
    double log_abs_partial(std::uint64_t b_mask, std::span<const double> x) const;

    /// Whether partials come from finite differences (Husler-Reiss, extremal
    /// t, and nested Gumbel blocks of size > 2); callers relying on them
    /// inherit the reduced accuracy.
    bool partials_by_finite_difference(std::uint64_t b_mask) const;

    /// A d-norm generator whose stable tail dependence function is this one;
    /// the Monte Carlo route used by cross-checks.
    DnormGenerator matching_generator() const;

private:
    double nested_value_log(std::span<const double> x) const;

    stdf::Variant variant_;
    int d_ = 0;
};

} // namespace haxc
