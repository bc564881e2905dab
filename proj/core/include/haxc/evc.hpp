#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haxc/dnorm.hpp"
#include "haxc/frailty.hpp"
#include "haxc/stdf.hpp"

namespace haxc {

namespace evc {

struct Independence {
    int d = 0;
};

/// Exact Gumbel EVC path: U_j = exp(-(E_j/V)^alpha), V ~ PS(alpha).
struct GumbelExact {
    int d = 0;
    double alpha = 0.5;
};

/// Exact nested Gumbel path via a hierarchy of positive stable frailties.
struct NestedGumbelExact {
    FrailtyTree frailties; // Gumbel family
};

struct Truncation {
    enum class Mode { Fixed, ExactStopping };
    Mode mode = Mode::Fixed;
    long long n_points = 1000;
};

/// Poisson-point max-stable construction over a d-norm generator; exact when
/// the generator is bounded and exact stopping is requested, otherwise
/// truncated at a fixed number of points.
struct Spectral {
    DnormGenerator generator;
    Truncation truncation;
};

using Variant = std::variant<Independence, GumbelExact, NestedGumbelExact, Spectral>;

} // namespace evc

/// Extreme-value copula sampler (one row per draw, copula scale).
class EvcModel {
public:
    explicit EvcModel(evc::Variant v);

    static EvcModel from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    int dimension() const { return d_; }
    const evc::Variant& variant() const { return variant_; }

    /// One copula-scale draw U into out.
    void draw_row(Rng& rng, std::span<double> out) const;

    /// One draw of the max-stable vector Z with unit Frechet margins
    /// (spectral models only).
    std::vector<double> sample_maxstable(Rng& rng) const;

    /// The closed-form stable tail dependence function of this EVC, when one
    /// is available (independence, Gumbel, nested Gumbel).
    std::optional<Stdf> implied_stdf() const;

private:
    evc::Variant variant_;
    int d_ = 0;
};

/// C(u) = exp(-l(-log u_1, ..., -log u_d)) for u in (0,1]^d.
double evc_cdf(const Stdf& l, std::span<const double> u);

} // namespace haxc
