#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haxc/hierarchy.hpp"
#include "haxc/rng.hpp"

namespace haxc {

/// Monte Carlo estimate with standard error.
struct McResult {
    double estimate = 0.0;
    double se = 0.0;
};

namespace dnorm {

struct Comonotone {
    int d = 0;
};

/// Random permutation of (d, 0, ..., 0).
struct IndepPermutation {
    int d = 0;
};

/// W_j independent with Gamma(1-alpha) W_j ~ Frechet(1/alpha); Gumbel
/// dependence with parameter alpha in (0,1).
struct GumbelFrechet {
    int d = 0;
    double alpha = 0.5;
};

/// W_j independent scaled Weibull(theta); negative logistic dependence.
struct NegLogisticWeibull {
    int d = 0;
    double theta = 1.0;
};

/// W_j = sqrt(2 pi) max(0, eps_j), eps ~ N(0, P) with correlation matrix P.
struct Schlather {
    std::vector<double> corr; // row-major d*d
    int d = 0;
};

/// W_j = max(0, eps_j)^nu / c_nu, eps ~ N(0, P).
struct ExtremalT {
    double nu = 1.0;
    std::vector<double> corr;
    int d = 0;
};

/// W_j = exp(eps_j - sigma_j^2/2), eps ~ N(0, Sigma) for a covariance Sigma.
struct BrownResnick {
    std::vector<double> cov;
    int d = 0;
};

/// Hierarchical generator for nested Gumbel dependence: internal nodes carry
/// "alpha" (decreasing along paths, root alpha < 1); each leaf gets a private
/// terminal Frechet variable with shape 1/alpha(parent of leaf).
struct NestedGumbel {
    HierarchyTree tree;
};

/// Two-level hierarchical log-normal generator: level-1 vector ~ N(0, Sigma0)
/// shared per sector, level-2 vectors ~ N(0, Sigma_s) per coordinate;
/// W_sj = exp((W*_s + W*_sj) - (Sigma0_ss + Sigmas_jj)/2).
struct HierHuslerReiss {
    std::vector<double> sigma0;              // S x S
    std::vector<std::vector<double>> sigmas; // per sector d_s x d_s
};

/// Two-level hierarchical truncated-power generator:
/// W_sj = max(0, (W*_s + W*_sj)/sqrt(Sigma0_ss + Sigmas_jj))^nu / c_nu.
struct HierExtremalT {
    double nu = 1.0;
    std::vector<double> sigma0;
    std::vector<std::vector<double>> sigmas;
};

/// Caller-supplied copula sampler plus marginal quantile functions with unit
/// means: W_j = Q_j(U_j), U ~ C. In-process only (not expressible in JSON).
struct GeneralCopulaMargins {
    int d = 0;
    std::function<void(Rng&, std::vector<double>&)> copula_sampler;
    std::vector<std::function<double(double)>> quantiles;
};

using Variant = std::variant<Comonotone, IndepPermutation, GumbelFrechet, NegLogisticWeibull,
                             Schlather, ExtremalT, BrownResnick, NestedGumbel, HierHuslerReiss,
                             HierExtremalT, GeneralCopulaMargins>;

} // namespace dnorm

/// Sampler for a non-negative random vector W with unit component means; the
/// induced stable tail dependence function is l(x) = E max_j x_j W_j.
class DnormGenerator {
public:
    explicit DnormGenerator(dnorm::Variant v);

    static DnormGenerator from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    int dimension() const { return d_; }
    const dnorm::Variant& variant() const { return variant_; }

    /// One draw of W into out (size d).
    void draw(Rng& rng, std::span<double> out) const;

    /// Almost-sure upper bound on max_j W_j when one exists (comonotone,
    /// permutation); enables exact stopping in the max-stable sampler.
    std::optional<double> sup_bound() const;

    /// Monte Carlo estimate of l(x) = E max_j x_j W_j over n draws.
    McResult mc_stdf(std::span<const double> x, long long n, Rng& rng) const;

    /// For the two-level log-normal generator: the covariance matrix of the
    /// flattened d-dimensional construction (block structure).
    std::vector<double> composed_covariance() const;

    /// For the two-level truncated-power generator: the flattened correlation
    /// matrix.
    std::vector<double> composed_correlation() const;

private:
    dnorm::Variant variant_;
    int d_ = 0;
    // precomputed factors and constants
    std::vector<double> chol_;
    std::vector<double> chol0_;              // hierarchical level-1 factor
    std::vector<std::vector<double>> chols_; // hierarchical level-2 factors
    std::vector<int> sector_of_;             // coordinate -> sector (hierarchical)
    std::vector<int> within_index_;          // coordinate -> index within sector
    double norm_const_ = 1.0;                // Gamma(1-alpha), Gamma(1+1/theta), c_nu
    // nested Gumbel bookkeeping
    std::vector<int> ng_internal_;               // internal non-root nodes in draw order
    std::vector<double> ng_ratio_;               // alpha_node / alpha_parent
    std::vector<double> ng_alpha_;               // per node
    std::vector<std::vector<int>> ng_leaf_path_; // coordinate -> internal ancestors (non-root)
    std::vector<double> ng_leaf_shape_alpha_;    // alpha of leaf's parent
};

/// Monte Carlo estimate of l(x1,x2) for W = (Q1(U1), Q2(U2)) with U1, U2
/// independent, via the partial-derivative expectation form
///   l(x) = x1 E[Z1 F2(Z1 x1/x2)] + x2 E[Z2 F1(Z2 x2/x1)],  Zj ~ Fj.
/// Cross-check companion to DnormGenerator::mc_stdf for the general-margins
/// construction.
McResult mc_stdf_indep2_partial(const std::function<double(double)>& quantile1,
                                const std::function<double(double)>& cdf1,
                                const std::function<double(double)>& quantile2,
                                const std::function<double(double)>& cdf2, double x1, double x2,
                                long long n, Rng& rng);

} // namespace haxc
