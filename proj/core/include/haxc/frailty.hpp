#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haxc/generators.hpp"
#include "haxc/hierarchy.hpp"
#include "haxc/rng.hpp"

namespace haxc {

/// Positive alpha-stable PS(alpha) with Laplace transform exp(-t^alpha),
/// alpha in (0,1]; degenerate at 1 for alpha = 1. Kanter's representation.
double sample_positive_stable(double alpha, Rng& rng);

/// Gamma(1/theta, rate 1) frailty; Laplace transform (1+t)^(-1/theta).
double sample_gamma_frailty(double theta, Rng& rng);

/// Exponentially tilted stable with Laplace transform
/// exp(-h((1+t)^alpha - 1)), alpha in (0,1], h > 0.
///
/// Sampled exactly by splitting into m = ceil(h) i.i.d. pieces, each a
/// rejection-tilted scaled positive stable with acceptance >= 1/e.
double sample_tilted_stable(double alpha, double h, Rng& rng);

/// Marginal frailty V with E[exp(-tV)] = psi(t).
double sample_frailty(const Generator& psi, Rng& rng);

/// A hierarchy whose root and internal nodes carry Archimedean generator
/// parameters of one family (Gumbel "alpha" or Clayton "theta"); leaves map
/// to coordinates and carry nothing. Construction checks the parameter
/// ordering required by the sufficient nesting condition:
///   Gumbel:  0 < alpha_child <= alpha_parent <= 1 along every path
///   Clayton: theta_parent <= theta_child, all positive
class FrailtyTree {
public:
    FrailtyTree(HierarchyTree tree, GenFamily family);

    static FrailtyTree from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    const HierarchyTree& tree() const { return tree_; }
    GenFamily family() const { return family_; }
    int dimension() const { return tree_.dimension(); }

    double node_param(int node_idx) const;
    Generator node_generator(int node_idx) const;

    /// Generator attached to coordinate j (its deepest internal ancestor).
    Generator leaf_generator(int coord) const;

    /// One draw of the whole frailty cascade; returns the per-coordinate
    /// frailty values (each leaf receives its deepest internal ancestor's).
    std::vector<double> sample(Rng& rng) const;

private:
    void validate() const;

    HierarchyTree tree_;
    GenFamily family_;
};

} // namespace haxc
