#include "haxc/dnorm.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "haxc/errors.hpp"
#include "haxc/frailty.hpp"
#include "haxc/special.hpp"
#include "json_util.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

namespace {

void check_correlation(const std::vector<double>& m, int n, const std::string& what) {
    require(static_cast<int>(m.size()) == n * n, what + ": matrix size mismatch");
    for (int i = 0; i < n; ++i)
        require(std::fabs(m[static_cast<std::size_t>(i * n + i)] - 1.0) <= 1e-12,
                what + ": correlation matrix must have unit diagonal");
}

/// z = L eps with fresh standard normals; eps drawn in index order.
void mvn_draw(const std::vector<double>& chol, int n, Rng& rng, std::vector<double>& z) {
    thread_local std::vector<double> eps;
    eps.resize(static_cast<std::size_t>(n));
    for (auto& e : eps) e = rng.normal();
    z.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += chol[static_cast<std::size_t>(i * n + j)] * eps[static_cast<std::size_t>(j)];
        z[static_cast<std::size_t>(i)] = s;
    }
}

double trunc_power_const(double nu) {
    // c_nu = 2^(nu/2 - 1) Gamma((nu+1)/2) / sqrt(pi) = E[max(0, Z)^nu]
    return std::exp((nu / 2.0 - 1.0) * std::log(2.0) + std::lgamma((nu + 1.0) / 2.0) -
                    0.5 * std::log(M_PI));
}

} // namespace

DnormGenerator::DnormGenerator(dnorm::Variant v) : variant_(std::move(v)) {
    std::visit(
        [this](auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, dnorm::Comonotone> ||
                          std::is_same_v<T, dnorm::IndepPermutation>) {
                require(g.d >= 1, "dnorm: dimension must be >= 1");
                d_ = g.d;
            } else if constexpr (std::is_same_v<T, dnorm::GumbelFrechet>) {
                require(g.d >= 1, "dnorm: dimension must be >= 1");
                require(g.alpha > 0.0 && g.alpha < 1.0,
                        "dnorm: Gumbel-Frechet alpha must be in (0,1)");
                d_ = g.d;
                norm_const_ = std::tgamma(1.0 - g.alpha);
            } else if constexpr (std::is_same_v<T, dnorm::NegLogisticWeibull>) {
                require(g.d >= 1, "dnorm: dimension must be >= 1");
                require(g.theta > 0.0, "dnorm: negative logistic theta must be > 0");
                d_ = g.d;
                norm_const_ = std::tgamma(1.0 + 1.0 / g.theta);
            } else if constexpr (std::is_same_v<T, dnorm::Schlather>) {
                d_ = g.d;
                check_correlation(g.corr, d_, "dnorm schlather");
                chol_ = linalg::cholesky_psd(g.corr, d_);
                norm_const_ = trunc_power_const(1.0); // 1/sqrt(2 pi)
            } else if constexpr (std::is_same_v<T, dnorm::ExtremalT>) {
                require(g.nu > 0.0, "dnorm: extremal t nu must be > 0");
                d_ = g.d;
                check_correlation(g.corr, d_, "dnorm extremal t");
                chol_ = linalg::cholesky_psd(g.corr, d_);
                norm_const_ = trunc_power_const(g.nu);
            } else if constexpr (std::is_same_v<T, dnorm::BrownResnick>) {
                d_ = g.d;
                require(static_cast<int>(g.cov.size()) == d_ * d_,
                        "dnorm brown-resnick: matrix size mismatch");
                chol_ = linalg::cholesky_psd(g.cov, d_);
            } else if constexpr (std::is_same_v<T, dnorm::NestedGumbel>) {
                d_ = g.tree.dimension();
                ng_alpha_.assign(static_cast<std::size_t>(g.tree.node_count()), 0.0);
                for (int i = 0; i < g.tree.node_count(); ++i) {
                    if (g.tree.is_leaf(i)) continue;
                    const auto& n = g.tree.node(i);
                    auto it = n.params.find("alpha");
                    require(it != n.params.end(),
                            "dnorm nested gumbel: node '" + n.id + "' missing alpha");
                    ng_alpha_[static_cast<std::size_t>(i)] = it->second;
                }
                const double alpha0 = ng_alpha_[static_cast<std::size_t>(g.tree.root())];
                require(alpha0 > 0.0 && alpha0 < 1.0,
                        "dnorm nested gumbel: root alpha must be in (0,1)");
                // DFS pre-order over internal non-root nodes; ordering check.
                std::vector<int> stack{g.tree.root()};
                while (!stack.empty()) {
                    const int i = stack.back();
                    stack.pop_back();
                    const auto& ch = g.tree.node(i).children;
                    for (auto it = ch.rbegin(); it != ch.rend(); ++it)
                        if (!g.tree.is_leaf(*it)) stack.push_back(*it);
                    if (i == g.tree.root()) continue;
                    const double ap = ng_alpha_[static_cast<std::size_t>(g.tree.node(i).parent)];
                    const double ac = ng_alpha_[static_cast<std::size_t>(i)];
                    require(ac > 0.0 && ac <= ap,
                            "dnorm nested gumbel: alpha must not increase along paths (node '" +
                                g.tree.node(i).id + "')");
                    ng_internal_.push_back(i);
                    ng_ratio_.push_back(ac / ap);
                }
                for (int j = 1; j <= d_; ++j) {
                    auto path = g.tree.path_nodes(j);
                    std::vector<int> anc;
                    for (std::size_t k = 1; k + 1 < path.size(); ++k) anc.push_back(path[k]);
                    ng_leaf_path_.push_back(std::move(anc));
                    ng_leaf_shape_alpha_.push_back(ng_alpha_[static_cast<std::size_t>(
                        g.tree.parent_of_leaf(j))]);
                }
                norm_const_ = std::tgamma(1.0 - alpha0);
            } else if constexpr (std::is_same_v<T, dnorm::HierHuslerReiss> ||
                                 std::is_same_v<T, dnorm::HierExtremalT>) {
                const int S = static_cast<int>(g.sigmas.size());
                require(S >= 1, "dnorm hierarchical: need at least one sector");
                require(static_cast<int>(g.sigma0.size()) == S * S,
                        "dnorm hierarchical: sigma0 must be S x S for S sectors");
                chol0_ = linalg::cholesky_psd(g.sigma0, S);
                d_ = 0;
                for (int s = 0; s < S; ++s) {
                    const auto& ms = g.sigmas[static_cast<std::size_t>(s)];
                    const int ds = static_cast<int>(std::lround(std::sqrt(
                        static_cast<double>(ms.size()))));
                    require(ds * ds == static_cast<int>(ms.size()) && ds >= 1,
                            "dnorm hierarchical: sector matrix must be square");
                    chols_.push_back(linalg::cholesky_psd(ms, ds));
                    for (int k = 0; k < ds; ++k) {
                        sector_of_.push_back(s);
                        within_index_.push_back(k);
                    }
                    d_ += ds;
                }
                if constexpr (std::is_same_v<T, dnorm::HierExtremalT>) {
                    require(g.nu > 0.0, "dnorm hierarchical extremal t: nu must be > 0");
                    norm_const_ = trunc_power_const(g.nu);
                }
            } else if constexpr (std::is_same_v<T, dnorm::GeneralCopulaMargins>) {
                require(g.d >= 1 && g.copula_sampler &&
                            static_cast<int>(g.quantiles.size()) == g.d,
                        "dnorm general margins: sampler and d quantile functions required");
                d_ = g.d;
            }
        },
        variant_);
}

void DnormGenerator::draw(Rng& rng, std::span<double> out) const {
    require(static_cast<int>(out.size()) == d_, "dnorm draw: output size mismatch");
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, dnorm::Comonotone>) {
                for (auto& w : out) w = 1.0;
            } else if constexpr (std::is_same_v<T, dnorm::IndepPermutation>) {
                for (auto& w : out) w = 0.0;
                auto idx = static_cast<int>(rng.uniform() * d_);
                if (idx >= d_) idx = d_ - 1;
                out[static_cast<std::size_t>(idx)] = static_cast<double>(d_);
            } else if constexpr (std::is_same_v<T, dnorm::GumbelFrechet>) {
                for (auto& w : out)
                    w = std::pow(rng.exponential(), -g.alpha) / norm_const_;
            } else if constexpr (std::is_same_v<T, dnorm::NegLogisticWeibull>) {
                for (auto& w : out)
                    w = std::pow(rng.exponential(), 1.0 / g.theta) / norm_const_;
            } else if constexpr (std::is_same_v<T, dnorm::Schlather>) {
                thread_local std::vector<double> z;
                mvn_draw(chol_, d_, rng, z);
                for (int j = 0; j < d_; ++j)
                    out[static_cast<std::size_t>(j)] =
                        std::max(0.0, z[static_cast<std::size_t>(j)]) / norm_const_;
            } else if constexpr (std::is_same_v<T, dnorm::ExtremalT>) {
                thread_local std::vector<double> z;
                mvn_draw(chol_, d_, rng, z);
                for (int j = 0; j < d_; ++j)
                    out[static_cast<std::size_t>(j)] =
                        std::pow(std::max(0.0, z[static_cast<std::size_t>(j)]), g.nu) /
                        norm_const_;
            } else if constexpr (std::is_same_v<T, dnorm::BrownResnick>) {
                thread_local std::vector<double> z;
                mvn_draw(chol_, d_, rng, z);
                for (int j = 0; j < d_; ++j)
                    out[static_cast<std::size_t>(j)] =
                        std::exp(z[static_cast<std::size_t>(j)] -
                                 0.5 * g.cov[static_cast<std::size_t>(j * d_ + j)]);
            } else if constexpr (std::is_same_v<T, dnorm::NestedGumbel>) {
                thread_local std::vector<double> node_v;
                node_v.assign(static_cast<std::size_t>(g.tree.node_count()), 1.0);
                for (std::size_t i = 0; i < ng_internal_.size(); ++i)
                    node_v[static_cast<std::size_t>(ng_internal_[i])] =
                        sample_positive_stable(ng_ratio_[i], rng);
                for (int j = 0; j < d_; ++j) {
                    const double alpha_term = ng_leaf_shape_alpha_[static_cast<std::size_t>(j)];
                    double w = std::pow(rng.exponential(), -alpha_term) / norm_const_;
                    for (int n : ng_leaf_path_[static_cast<std::size_t>(j)])
                        w *= std::pow(node_v[static_cast<std::size_t>(n)],
                                      ng_alpha_[static_cast<std::size_t>(n)]);
                    out[static_cast<std::size_t>(j)] = w;
                }
            } else if constexpr (std::is_same_v<T, dnorm::HierHuslerReiss>) {
                const int S = static_cast<int>(g.sigmas.size());
                thread_local std::vector<double> z0, zs;
                mvn_draw(chol0_, S, rng, z0);
                int base = 0;
                for (int s = 0; s < S; ++s) {
                    const int ds = static_cast<int>(std::lround(std::sqrt(
                        static_cast<double>(g.sigmas[static_cast<std::size_t>(s)].size()))));
                    mvn_draw(chols_[static_cast<std::size_t>(s)], ds, rng, zs);
                    const double v0 = g.sigma0[static_cast<std::size_t>(s * S + s)];
                    for (int k = 0; k < ds; ++k) {
                        const double vk =
                            g.sigmas[static_cast<std::size_t>(s)][static_cast<std::size_t>(k * ds + k)];
                        out[static_cast<std::size_t>(base + k)] =
                            std::exp(z0[static_cast<std::size_t>(s)] +
                                     zs[static_cast<std::size_t>(k)] - 0.5 * (v0 + vk));
                    }
                    base += ds;
                }
            } else if constexpr (std::is_same_v<T, dnorm::HierExtremalT>) {
                const int S = static_cast<int>(g.sigmas.size());
                thread_local std::vector<double> z0, zs;
                mvn_draw(chol0_, S, rng, z0);
                int base = 0;
                for (int s = 0; s < S; ++s) {
                    const int ds = static_cast<int>(std::lround(std::sqrt(
                        static_cast<double>(g.sigmas[static_cast<std::size_t>(s)].size()))));
                    mvn_draw(chols_[static_cast<std::size_t>(s)], ds, rng, zs);
                    const double v0 = g.sigma0[static_cast<std::size_t>(s * S + s)];
                    for (int k = 0; k < ds; ++k) {
                        const double vk =
                            g.sigmas[static_cast<std::size_t>(s)][static_cast<std::size_t>(k * ds + k)];
                        const double eps = (z0[static_cast<std::size_t>(s)] +
                                            zs[static_cast<std::size_t>(k)]) /
                                           std::sqrt(v0 + vk);
                        out[static_cast<std::size_t>(base + k)] =
                            std::pow(std::max(0.0, eps), g.nu) / norm_const_;
                    }
                    base += ds;
                }
            } else if constexpr (std::is_same_v<T, dnorm::GeneralCopulaMargins>) {
                thread_local std::vector<double> u;
                u.resize(static_cast<std::size_t>(d_));
                g.copula_sampler(rng, u);
                for (int j = 0; j < d_; ++j)
                    out[static_cast<std::size_t>(j)] =
                        g.quantiles[static_cast<std::size_t>(j)](u[static_cast<std::size_t>(j)]);
            }
        },
        variant_);
}

std::optional<double> DnormGenerator::sup_bound() const {
    if (std::holds_alternative<dnorm::Comonotone>(variant_)) return 1.0;
    if (std::holds_alternative<dnorm::IndepPermutation>(variant_))
        return static_cast<double>(d_);
    return std::nullopt;
}

McResult DnormGenerator::mc_stdf(std::span<const double> x, long long n, Rng& rng) const {
    require(static_cast<int>(x.size()) == d_, "mc_stdf: x size mismatch");
    require(n >= 1, "mc_stdf: n must be >= 1");
    for (double v : x) require(v >= 0.0, "mc_stdf: x must be non-negative");
    std::vector<double> w(static_cast<std::size_t>(d_));
    double sum = 0.0, sumsq = 0.0;
    for (long long i = 0; i < n; ++i) {
        draw(rng, w);
        double m = 0.0;
        for (int j = 0; j < d_; ++j)
            m = std::max(m, x[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)]);
        sum += m;
        sumsq += m * m;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = n > 1 ? std::max(0.0, (sumsq - static_cast<double>(n) * mean * mean) /
                                                 (static_cast<double>(n) - 1.0))
                             : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

std::vector<double> DnormGenerator::composed_covariance() const {
    const auto* g = std::get_if<dnorm::HierHuslerReiss>(&variant_);
    require(g != nullptr, "composed_covariance: not a hierarchical log-normal generator");
    const int S = static_cast<int>(g->sigmas.size());
    std::vector<double> cov(static_cast<std::size_t>(d_ * d_), 0.0);
    for (int i = 0; i < d_; ++i) {
        const int si = sector_of_[static_cast<std::size_t>(i)];
        const int wi = within_index_[static_cast<std::size_t>(i)];
        for (int j = 0; j < d_; ++j) {
            const int sj = sector_of_[static_cast<std::size_t>(j)];
            const int wj = within_index_[static_cast<std::size_t>(j)];
            double c = g->sigma0[static_cast<std::size_t>(si * S + sj)];
            if (si == sj) {
                const auto& ms = g->sigmas[static_cast<std::size_t>(si)];
                const int ds = static_cast<int>(std::lround(std::sqrt(
                    static_cast<double>(ms.size()))));
                c += ms[static_cast<std::size_t>(wi * ds + wj)];
            }
            cov[static_cast<std::size_t>(i * d_ + j)] = c;
        }
    }
    return cov;
}

std::vector<double> DnormGenerator::composed_correlation() const {
    const auto* g = std::get_if<dnorm::HierExtremalT>(&variant_);
    require(g != nullptr, "composed_correlation: not a hierarchical truncated-power generator");
    const int S = static_cast<int>(g->sigmas.size());
    std::vector<double> var(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        const int s = sector_of_[static_cast<std::size_t>(i)];
        const auto& ms = g->sigmas[static_cast<std::size_t>(s)];
        const int ds = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ms.size()))));
        const int w = within_index_[static_cast<std::size_t>(i)];
        var[static_cast<std::size_t>(i)] = g->sigma0[static_cast<std::size_t>(s * S + s)] +
                                           ms[static_cast<std::size_t>(w * ds + w)];
    }
    std::vector<double> corr(static_cast<std::size_t>(d_ * d_), 0.0);
    for (int i = 0; i < d_; ++i) {
        const int si = sector_of_[static_cast<std::size_t>(i)];
        const int wi = within_index_[static_cast<std::size_t>(i)];
        for (int j = 0; j < d_; ++j) {
            const int sj = sector_of_[static_cast<std::size_t>(j)];
            const int wj = within_index_[static_cast<std::size_t>(j)];
            double c = g->sigma0[static_cast<std::size_t>(si * S + sj)];
            if (si == sj) {
                const auto& ms = g->sigmas[static_cast<std::size_t>(si)];
                const int ds = static_cast<int>(std::lround(std::sqrt(
                    static_cast<double>(ms.size()))));
                c += ms[static_cast<std::size_t>(wi * ds + wj)];
            }
            corr[static_cast<std::size_t>(i * d_ + j)] =
                c / std::sqrt(var[static_cast<std::size_t>(i)] * var[static_cast<std::size_t>(j)]);
        }
    }
    return corr;
}

McResult mc_stdf_indep2_partial(const std::function<double(double)>& quantile1,
                                const std::function<double(double)>& cdf1,
                                const std::function<double(double)>& quantile2,
                                const std::function<double(double)>& cdf2, double x1, double x2,
                                long long n, Rng& rng) {
    require(x1 > 0.0 && x2 > 0.0, "mc_stdf_indep2_partial: x must be positive");
    double sum = 0.0, sumsq = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double z1 = quantile1(rng.uniform());
        const double z2 = quantile2(rng.uniform());
        const double v = x1 * z1 * cdf2(z1 * x1 / x2) + x2 * z2 * cdf1(z2 * x2 / x1);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = n > 1 ? std::max(0.0, (sumsq - static_cast<double>(n) * mean * mean) /
                                                 (static_cast<double>(n) - 1.0))
                             : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

DnormGenerator DnormGenerator::from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("variant"), "dnorm: missing 'variant'");
    const auto v = j.at("variant").get<std::string>();
    auto get_d = [&j]() { return j.at("d").get<int>(); };
    if (v == "comonotone") return DnormGenerator(dnorm::Comonotone{get_d()});
    if (v == "indep_permutation") return DnormGenerator(dnorm::IndepPermutation{get_d()});
    if (v == "gumbel_frechet")
        return DnormGenerator(dnorm::GumbelFrechet{get_d(), j.at("alpha").get<double>()});
    if (v == "neg_logistic_weibull")
        return DnormGenerator(dnorm::NegLogisticWeibull{get_d(), j.at("theta").get<double>()});
    if (v == "schlather") {
        int n = 0;
        auto m = detail::parse_matrix(j.at("corr"), "dnorm schlather", &n);
        return DnormGenerator(dnorm::Schlather{std::move(m), n});
    }
    if (v == "extremal_t") {
        int n = 0;
        auto m = detail::parse_matrix(j.at("corr"), "dnorm extremal t", &n);
        return DnormGenerator(dnorm::ExtremalT{j.at("nu").get<double>(), std::move(m), n});
    }
    if (v == "brown_resnick") {
        int n = 0;
        auto m = detail::parse_matrix(j.at("cov"), "dnorm brown-resnick", &n);
        return DnormGenerator(dnorm::BrownResnick{std::move(m), n});
    }
    if (v == "nested_gumbel")
        return DnormGenerator(dnorm::NestedGumbel{HierarchyTree::from_json(j.at("tree"))});
    if (v == "hier_husler_reiss" || v == "hier_extremal_t") {
        int s = 0;
        auto sigma0 = detail::parse_matrix(j.at("sigma0"), "dnorm hierarchical sigma0", &s);
        std::vector<std::vector<double>> sigmas;
        for (const auto& mj : j.at("sigmas")) {
            int ds = 0;
            sigmas.push_back(detail::parse_matrix(mj, "dnorm hierarchical sector matrix", &ds));
        }
        require(static_cast<int>(sigmas.size()) == s,
                "dnorm hierarchical: sigma0 dimension must equal the number of sectors");
        if (v == "hier_husler_reiss")
            return DnormGenerator(dnorm::HierHuslerReiss{std::move(sigma0), std::move(sigmas)});
        return DnormGenerator(
            dnorm::HierExtremalT{j.at("nu").get<double>(), std::move(sigma0), std::move(sigmas)});
    }
    throw validation_error("dnorm: unknown variant '" + v + "'");
}

nlohmann::json DnormGenerator::to_json() const {
    nlohmann::json j;
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, dnorm::Comonotone>) {
                j = {{"variant", "comonotone"}, {"d", g.d}};
            } else if constexpr (std::is_same_v<T, dnorm::IndepPermutation>) {
                j = {{"variant", "indep_permutation"}, {"d", g.d}};
            } else if constexpr (std::is_same_v<T, dnorm::GumbelFrechet>) {
                j = {{"variant", "gumbel_frechet"}, {"d", g.d}, {"alpha", g.alpha}};
            } else if constexpr (std::is_same_v<T, dnorm::NegLogisticWeibull>) {
                j = {{"variant", "neg_logistic_weibull"}, {"d", g.d}, {"theta", g.theta}};
            } else if constexpr (std::is_same_v<T, dnorm::Schlather>) {
                j = {{"variant", "schlather"}, {"corr", detail::emit_matrix(g.corr, g.d)}};
            } else if constexpr (std::is_same_v<T, dnorm::ExtremalT>) {
                j = {{"variant", "extremal_t"},
                     {"nu", g.nu},
                     {"corr", detail::emit_matrix(g.corr, g.d)}};
            } else if constexpr (std::is_same_v<T, dnorm::BrownResnick>) {
                j = {{"variant", "brown_resnick"}, {"cov", detail::emit_matrix(g.cov, g.d)}};
            } else if constexpr (std::is_same_v<T, dnorm::NestedGumbel>) {
                j = {{"variant", "nested_gumbel"}, {"tree", g.tree.to_json()}};
            } else if constexpr (std::is_same_v<T, dnorm::HierHuslerReiss> ||
                                 std::is_same_v<T, dnorm::HierExtremalT>) {
                const int S = static_cast<int>(g.sigmas.size());
                nlohmann::json sig = nlohmann::json::array();
                for (const auto& ms : g.sigmas) {
                    const int ds = static_cast<int>(std::lround(std::sqrt(
                        static_cast<double>(ms.size()))));
                    sig.push_back(detail::emit_matrix(ms, ds));
                }
                j = {{"sigma0", detail::emit_matrix(g.sigma0, S)}, {"sigmas", std::move(sig)}};
                if constexpr (std::is_same_v<T, dnorm::HierExtremalT>) {
                    j["variant"] = "hier_extremal_t";
                    j["nu"] = g.nu;
                } else {
                    j["variant"] = "hier_husler_reiss";
                }
            } else if constexpr (std::is_same_v<T, dnorm::GeneralCopulaMargins>) {
                throw capability_error(
                    "dnorm: general copula-margins generators are in-process only");
            }
        },
        variant_);
    return j;
}

} // namespace haxc
