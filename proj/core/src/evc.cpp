#include "haxc/evc.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "haxc/errors.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

EvcModel::EvcModel(evc::Variant v) : variant_(std::move(v)) {
    std::visit(
        [this](auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, evc::Independence>) {
                require(m.d >= 1, "evc: dimension must be >= 1");
                d_ = m.d;
            } else if constexpr (std::is_same_v<T, evc::GumbelExact>) {
                require(m.d >= 1, "evc: dimension must be >= 1");
                require(m.alpha > 0.0 && m.alpha <= 1.0, "evc gumbel: alpha must be in (0,1]");
                d_ = m.d;
            } else if constexpr (std::is_same_v<T, evc::NestedGumbelExact>) {
                require(m.frailties.family() == GenFamily::Gumbel,
                        "evc nested gumbel: frailty tree must be a Gumbel chain");
                d_ = m.frailties.dimension();
            } else if constexpr (std::is_same_v<T, evc::Spectral>) {
                d_ = m.generator.dimension();
                if (m.truncation.mode == evc::Truncation::Mode::ExactStopping)
                    require(m.generator.sup_bound().has_value(),
                            "evc spectral: exact stopping needs an almost-sure bound on the "
                            "generator; use a fixed truncation instead");
                else
                    require(m.truncation.n_points >= 1,
                            "evc spectral: truncation size must be >= 1");
            }
        },
        variant_);
}

std::vector<double> EvcModel::sample_maxstable(Rng& rng) const {
    const auto* m = std::get_if<evc::Spectral>(&variant_);
    require_capability(m != nullptr,
                       "sample_maxstable: only spectral models expose the max-stable vector");
    std::vector<double> z(static_cast<std::size_t>(d_), 0.0);
    std::vector<double> w(static_cast<std::size_t>(d_));
    double arrival = 0.0;
    if (m->truncation.mode == evc::Truncation::Mode::Fixed) {
        for (long long i = 0; i < m->truncation.n_points; ++i) {
            arrival += rng.exponential();
            const double p = 1.0 / arrival;
            m->generator.draw(rng, w);
            for (int j = 0; j < d_; ++j)
                z[static_cast<std::size_t>(j)] =
                    std::max(z[static_cast<std::size_t>(j)], p * w[static_cast<std::size_t>(j)]);
        }
        return z;
    }
    const double bound = *m->generator.sup_bound();
    constexpr long long kMaxPoints = 100000000;
    for (long long i = 0;; ++i) {
        require(i < kMaxPoints, "evc spectral: exact stopping did not terminate");
        arrival += rng.exponential();
        const double p = 1.0 / arrival;
        double zmin = z[0];
        for (int j = 1; j < d_; ++j) zmin = std::min(zmin, z[static_cast<std::size_t>(j)]);
        if (i > 0 && p * bound < zmin) break; // no later point can change any coordinate
        m->generator.draw(rng, w);
        for (int j = 0; j < d_; ++j)
            z[static_cast<std::size_t>(j)] =
                std::max(z[static_cast<std::size_t>(j)], p * w[static_cast<std::size_t>(j)]);
    }
    return z;
}

void EvcModel::draw_row(Rng& rng, std::span<double> out) const {
    require(static_cast<int>(out.size()) == d_, "evc draw: output size mismatch");
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, evc::Independence>) {
                for (auto& u : out) u = rng.uniform();
            } else if constexpr (std::is_same_v<T, evc::GumbelExact>) {
                const double v = sample_positive_stable(m.alpha, rng);
                for (auto& u : out) u = std::exp(-std::pow(rng.exponential() / v, m.alpha));
            } else if constexpr (std::is_same_v<T, evc::NestedGumbelExact>) {
                const auto frail = m.frailties.sample(rng);
                for (int j = 0; j < d_; ++j) {
                    const double alpha_j = m.frailties.node_param(
                        m.frailties.tree().parent_of_leaf(j + 1));
                    out[static_cast<std::size_t>(j)] = std::exp(-std::pow(
                        rng.exponential() / frail[static_cast<std::size_t>(j)], alpha_j));
                }
            } else if constexpr (std::is_same_v<T, evc::Spectral>) {
                const auto z = sample_maxstable(rng);
                for (int j = 0; j < d_; ++j)
                    out[static_cast<std::size_t>(j)] =
                        std::exp(-1.0 / z[static_cast<std::size_t>(j)]);
            }
        },
        variant_);
}

std::optional<Stdf> EvcModel::implied_stdf() const {
    if (const auto* m = std::get_if<evc::Independence>(&variant_)) return Stdf(stdf::Sum{m->d});
    if (const auto* m = std::get_if<evc::GumbelExact>(&variant_))
        return Stdf(stdf::Gumbel{m->d, m->alpha});
    if (const auto* m = std::get_if<evc::NestedGumbelExact>(&variant_))
        return Stdf(stdf::NestedGumbel{m->frailties.tree()});
    return std::nullopt;
}

double evc_cdf(const Stdf& l, std::span<const double> u) {
    require(static_cast<int>(u.size()) == l.dimension(), "evc_cdf: point dimension mismatch");
    std::vector<double> x(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        require(u[j] > 0.0 && u[j] <= 1.0, "evc_cdf: u must be in (0,1]");
        x[j] = -std::log(u[j]);
    }
    return std::exp(-l.value(x));
}

EvcModel EvcModel::from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("type"), "evc: missing 'type'");
    const auto t = j.at("type").get<std::string>();
    if (t == "independence") return EvcModel(evc::Independence{j.at("d").get<int>()});
    if (t == "gumbel")
        return EvcModel(evc::GumbelExact{j.at("d").get<int>(), j.at("alpha").get<double>()});
    if (t == "nested_gumbel") {
        auto tree = j.at("tree");
        if (!tree.contains("family")) tree["family"] = "gumbel";
        return EvcModel(evc::NestedGumbelExact{FrailtyTree::from_json(tree)});
    }
    if (t == "spectral") {
        evc::Truncation trunc;
        if (j.contains("truncation")) {
            const auto& tj = j.at("truncation");
            const auto mode = tj.at("mode").get<std::string>();
            if (mode == "exact") {
                trunc.mode = evc::Truncation::Mode::ExactStopping;
            } else if (mode == "fixed") {
                trunc.mode = evc::Truncation::Mode::Fixed;
                if (tj.contains("n")) trunc.n_points = tj.at("n").get<long long>();
            } else {
                throw validation_error("evc spectral: unknown truncation mode '" + mode + "'");
            }
        }
        return EvcModel(evc::Spectral{DnormGenerator::from_json(j.at("generator")), trunc});
    }
    throw validation_error("evc: unknown type '" + t + "'");
}

nlohmann::json EvcModel::to_json() const {
    nlohmann::json j;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, evc::Independence>) {
                j = {{"type", "independence"}, {"d", m.d}};
            } else if constexpr (std::is_same_v<T, evc::GumbelExact>) {
                j = {{"type", "gumbel"}, {"d", m.d}, {"alpha", m.alpha}};
            } else if constexpr (std::is_same_v<T, evc::NestedGumbelExact>) {
                j = {{"type", "nested_gumbel"}, {"tree", m.frailties.to_json()}};
            } else if constexpr (std::is_same_v<T, evc::Spectral>) {
                nlohmann::json tj;
                if (m.truncation.mode == evc::Truncation::Mode::ExactStopping)
                    tj = {{"mode", "exact"}};
                else
                    tj = {{"mode", "fixed"}, {"n", m.truncation.n_points}};
                j = {{"type", "spectral"},
                     {"generator", m.generator.to_json()},
                     {"truncation", std::move(tj)}};
            }
        },
        variant_);
    return j;
}

} // namespace haxc
