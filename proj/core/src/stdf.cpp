#include "haxc/stdf.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include <nlohmann/json.hpp>

#include "haxc/errors.hpp"
#include "haxc/mvcdf.hpp"
#include "json_util.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

int popcount(std::uint64_t m) { return std::popcount(m); }

/// log of |falling factorial| (alpha)_m = alpha (alpha-1) ... (alpha-m+1)
/// for alpha in (0,1]; returns -inf when the product is exactly zero.
double log_abs_falling(double alpha, int m) {
    double s = std::log(alpha);
    for (int l = 1; l < m; ++l) {
        const double f = static_cast<double>(l) - alpha;
        if (f == 0.0) return kNegInf;
        s += std::log(f);
    }
    return s;
}

/// Central mixed finite difference with one Richardson step; h_c = step*x_c.
double fd_mixed(const std::function<double(std::span<const double>)>& f,
                std::span<const double> x, const std::vector<int>& coords, double step) {
    std::vector<double> pt(x.begin(), x.end());
    const int m = static_cast<int>(coords.size());
    auto eval = [&](double scale) {
        std::vector<double> h(static_cast<std::size_t>(m));
        for (int c = 0; c < m; ++c)
            h[static_cast<std::size_t>(c)] = scale * step * x[static_cast<std::size_t>(coords[static_cast<std::size_t>(c)])];
        double acc = 0.0;
        const int patterns = 1 << m;
        for (int p = 0; p < patterns; ++p) {
            for (int c = 0; c < m; ++c) {
                const int j = coords[static_cast<std::size_t>(c)];
                const double s = (p >> c) & 1 ? 1.0 : -1.0;
                pt[static_cast<std::size_t>(j)] =
                    x[static_cast<std::size_t>(j)] + s * h[static_cast<std::size_t>(c)];
            }
            const double sign = popcount(static_cast<std::uint64_t>(p)) % 2 == m % 2 ? 1.0 : -1.0;
            acc += sign * f(pt);
        }
        for (int c = 0; c < m; ++c) {
            const int j = coords[static_cast<std::size_t>(c)];
            pt[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
            acc /= 2.0 * h[static_cast<std::size_t>(c)];
        }
        return acc;
    };
    const double coarse = eval(1.0);
    const double fine = eval(0.5);
    return (4.0 * fine - coarse) / 3.0;
}

double fd_base_step(int order) {
    switch (order) {
        case 1: return 3e-5;
        case 2: return 2e-4;
        case 3: return 1e-3;
        default: return 4e-3;
    }
}

} // namespace

Stdf::Stdf(stdf::Variant v) : variant_(std::move(v)) {
    std::visit(
        [this](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, stdf::Max> || std::is_same_v<T, stdf::Sum>) {
                require(s.d >= 1, "stdf: dimension must be >= 1");
                d_ = s.d;
            } else if constexpr (std::is_same_v<T, stdf::Gumbel>) {
                require(s.d >= 1, "stdf: dimension must be >= 1");
                require(s.alpha > 0.0 && s.alpha <= 1.0, "stdf gumbel: alpha must be in (0,1]");
                d_ = s.d;
            } else if constexpr (std::is_same_v<T, stdf::NestedGumbel>) {
                d_ = s.tree.dimension();
                for (int i = 0; i < s.tree.node_count(); ++i) {
                    if (s.tree.is_leaf(i)) continue;
                    const auto& n = s.tree.node(i);
                    auto it = n.params.find("alpha");
                    require(it != n.params.end(),
                            "stdf nested gumbel: node '" + n.id + "' missing alpha");
                    require(it->second > 0.0 && it->second <= 1.0,
                            "stdf nested gumbel: alpha of node '" + n.id + "' must be in (0,1]");
                    if (n.parent >= 0) {
                        const double ap = s.tree.node(n.parent).params.at("alpha");
                        require(it->second <= ap,
                                "stdf nested gumbel: alpha must not increase along paths (node '" +
                                    n.id + "')");
                    }
                }
            } else if constexpr (std::is_same_v<T, stdf::NegLogistic>) {
                require(s.d >= 1, "stdf: dimension must be >= 1");
                require(s.theta > 0.0, "stdf negative logistic: theta must be > 0");
                require_capability(s.d <= 20, "stdf negative logistic: dimension too large");
                d_ = s.d;
            } else if constexpr (std::is_same_v<T, stdf::HuslerReiss>) {
                d_ = s.d;
                require(static_cast<int>(s.gamma.size()) == d_ * d_,
                        "stdf husler-reiss: matrix size mismatch");
                for (int i = 0; i < d_; ++i) {
                    require(s.gamma[static_cast<std::size_t>(i * d_ + i)] == 0.0,
                            "stdf husler-reiss: gamma diagonal must be zero");
                    for (int j = 0; j < d_; ++j)
                        if (i != j)
                            require(s.gamma[static_cast<std::size_t>(i * d_ + j)] > 0.0,
                                    "stdf husler-reiss: off-diagonal gamma must be positive");
                }
            } else if constexpr (std::is_same_v<T, stdf::ExtremalT>) {
                require(s.nu > 0.0, "stdf extremal t: nu must be > 0");
                d_ = s.d;
                require(static_cast<int>(s.corr.size()) == d_ * d_,
                        "stdf extremal t: matrix size mismatch");
                for (int i = 0; i < d_; ++i)
                    require(std::fabs(s.corr[static_cast<std::size_t>(i * d_ + i)] - 1.0) <= 1e-12,
                            "stdf extremal t: correlation matrix must have unit diagonal");
            }
        },
        variant_);
}

bool Stdf::smooth() const { return !std::holds_alternative<stdf::Max>(variant_); }

double Stdf::nested_value_log(std::span<const double> x) const {
    const auto& s = std::get<stdf::NestedGumbel>(variant_);
    const auto& tree = s.tree;
    // leaf coordinate for each leaf node
    std::vector<int> coord_of(static_cast<std::size_t>(tree.node_count()), -1);
    for (int j = 1; j <= d_; ++j) coord_of[static_cast<std::size_t>(tree.leaf_node(j))] = j - 1;

    std::function<double(int)> rec = [&](int idx) -> double {
        if (tree.is_leaf(idx)) {
            const double v = x[static_cast<std::size_t>(coord_of[static_cast<std::size_t>(idx)])];
            return v > 0.0 ? std::log(v) : kNegInf;
        }
        const double alpha = tree.node(idx).params.at("alpha");
        std::vector<double> terms;
        for (int c : tree.node(idx).children) {
            const double lc = rec(c);
            if (lc != kNegInf) terms.push_back(lc / alpha);
        }
        if (terms.empty()) return kNegInf;
        return alpha * logsumexp(terms);
    };
    return rec(tree.root());
}

double Stdf::value(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == d_, "stdf: point dimension mismatch");
    for (double v : x) require(v >= 0.0, "stdf: coordinates must be non-negative");

    std::vector<int> nz;
    for (int j = 0; j < d_; ++j)
        if (x[static_cast<std::size_t>(j)] > 0.0) nz.push_back(j);
    if (nz.empty()) return 0.0;

    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, stdf::Max>) {
                double m = 0.0;
                for (double v : x) m = std::max(m, v);
                return m;
            } else if constexpr (std::is_same_v<T, stdf::Sum>) {
                double acc = 0.0;
                for (double v : x) acc += v;
                return acc;
            } else if constexpr (std::is_same_v<T, stdf::Gumbel>) {
                std::vector<double> logs;
                for (int j : nz) logs.push_back(std::log(x[static_cast<std::size_t>(j)]) / s.alpha);
                return std::exp(s.alpha * logsumexp(logs));
            } else if constexpr (std::is_same_v<T, stdf::NestedGumbel>) {
                return std::exp(nested_value_log(x));
            } else if constexpr (std::is_same_v<T, stdf::NegLogistic>) {
                // inclusion-exclusion over non-empty subsets of the nonzero coords
                const int m = static_cast<int>(nz.size());
                double acc = 0.0;
                for (std::uint64_t sub = 1; sub < (1ULL << m); ++sub) {
                    double sj = 0.0;
                    for (int k = 0; k < m; ++k)
                        if (sub >> k & 1ULL)
                            sj += std::pow(x[static_cast<std::size_t>(nz[static_cast<std::size_t>(k)])],
                                           -s.theta);
                    const double term = std::pow(sj, -1.0 / s.theta);
                    acc += popcount(sub) % 2 == 1 ? term : -term;
                }
                return acc;
            } else if constexpr (std::is_same_v<T, stdf::HuslerReiss>) {
                const int m = static_cast<int>(nz.size());
                if (m == 1) return x[static_cast<std::size_t>(nz[0])];
                double acc = 0.0;
                for (int a = 0; a < m; ++a) {
                    const int j = nz[static_cast<std::size_t>(a)];
                    MvnProblem p;
                    p.dim = m - 1;
                    for (int b = 0; b < m; ++b) {
                        if (b == a) continue;
                        const int i = nz[static_cast<std::size_t>(b)];
                        p.upper.push_back(s.gamma[static_cast<std::size_t>(i * d_ + j)] -
                                          std::log(x[static_cast<std::size_t>(i)] /
                                                   x[static_cast<std::size_t>(j)]));
                    }
                    for (int b = 0; b < m; ++b) {
                        if (b == a) continue;
                        const int i = nz[static_cast<std::size_t>(b)];
                        for (int c = 0; c < m; ++c) {
                            if (c == a) continue;
                            const int k = nz[static_cast<std::size_t>(c)];
                            const double g_ij = s.gamma[static_cast<std::size_t>(i * d_ + j)];
                            const double g_kj = s.gamma[static_cast<std::size_t>(k * d_ + j)];
                            const double g_ik = s.gamma[static_cast<std::size_t>(i * d_ + k)];
                            p.cov.push_back(i == k ? 2.0 * g_ij : g_ij + g_kj - g_ik);
                        }
                    }
                    acc += x[static_cast<std::size_t>(j)] * mvn_cdf(p);
                }
                return acc;
            } else if constexpr (std::is_same_v<T, stdf::ExtremalT>) {
                const int m = static_cast<int>(nz.size());
                if (m == 1) return x[static_cast<std::size_t>(nz[0])];
                double acc = 0.0;
                for (int a = 0; a < m; ++a) {
                    const int j = nz[static_cast<std::size_t>(a)];
                    MvnProblem p;
                    p.dim = m - 1;
                    p.nu = s.nu + 1.0;
                    for (int b = 0; b < m; ++b) {
                        if (b == a) continue;
                        const int i = nz[static_cast<std::size_t>(b)];
                        p.upper.push_back(std::pow(x[static_cast<std::size_t>(j)] /
                                                       x[static_cast<std::size_t>(i)],
                                                   1.0 / s.nu));
                        p.mean.push_back(s.corr[static_cast<std::size_t>(i * d_ + j)]);
                    }
                    for (int b = 0; b < m; ++b) {
                        if (b == a) continue;
                        const int i = nz[static_cast<std::size_t>(b)];
                        for (int c = 0; c < m; ++c) {
                            if (c == a) continue;
                            const int k = nz[static_cast<std::size_t>(c)];
                            p.cov.push_back((s.corr[static_cast<std::size_t>(i * d_ + k)] -
                                             s.corr[static_cast<std::size_t>(i * d_ + j)] *
                                                 s.corr[static_cast<std::size_t>(j * d_ + k)]) /
                                            (s.nu + 1.0));
                        }
                    }
                    acc += x[static_cast<std::size_t>(j)] * mvt_cdf(p);
                }
                return acc;
            }
        },
        variant_);
}

bool Stdf::partials_by_finite_difference(std::uint64_t b_mask) const {
    if (std::holds_alternative<stdf::HuslerReiss>(variant_) ||
        std::holds_alternative<stdf::ExtremalT>(variant_))
        return true;
    if (std::holds_alternative<stdf::NestedGumbel>(variant_)) return popcount(b_mask) > 2;
    return false;
}

namespace {

/// Value/gradient/mixed-second recursion for the nested Gumbel composition,
/// tracking at most two active coordinates (i and optionally j).
struct NestedDiff {
    double v = 0.0, di = 0.0, dj = 0.0, dij = 0.0;
};

NestedDiff nested_diff(const HierarchyTree& tree, const std::vector<int>& coord_of,
                       std::span<const double> x, int idx, int ci, int cj) {
    if (tree.is_leaf(idx)) {
        const int c = coord_of[static_cast<std::size_t>(idx)];
        NestedDiff r;
        r.v = x[static_cast<std::size_t>(c)];
        r.di = c == ci ? 1.0 : 0.0;
        r.dj = c == cj ? 1.0 : 0.0;
        return r;
    }
    const double alpha = tree.node(idx).params.at("alpha");
    const double ia = 1.0 / alpha;
    double S = 0.0, Sa = 0.0, Sb = 0.0, Sab = 0.0;
    for (int c : tree.node(idx).children) {
        const auto child = nested_diff(tree, coord_of, x, c, ci, cj);
        const double w = std::pow(child.v, ia);
        S += w;
        const double dw = ia * std::pow(child.v, ia - 1.0);
        Sa += dw * child.di;
        Sb += dw * child.dj;
        Sab += ia * (ia - 1.0) * std::pow(child.v, ia - 2.0) * child.di * child.dj +
               dw * child.dij;
    }
    NestedDiff r;
    r.v = std::pow(S, alpha);
    const double f1 = alpha * std::pow(S, alpha - 1.0);
    r.di = f1 * Sa;
    r.dj = f1 * Sb;
    r.dij = alpha * (alpha - 1.0) * std::pow(S, alpha - 2.0) * Sa * Sb + f1 * Sab;
    return r;
}

} // namespace

double Stdf::partial(std::uint64_t b_mask, std::span<const double> x) const {
    require(static_cast<int>(x.size()) == d_, "stdf: point dimension mismatch");
    require(b_mask != 0, "stdf partial: empty index set");
    require((b_mask >> d_) == 0, "stdf partial: index set outside 1..d");
    for (double v : x) require(v > 0.0, "stdf partial: coordinates must be strictly positive");
    require_capability(smooth(), "stdf: the comonotone bound has no partial derivatives");

    const int m = popcount(b_mask);

    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, stdf::Sum>) {
                return m == 1 ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, stdf::Gumbel>) {
                const double la = log_abs_partial(b_mask, x);
                if (la == kNegInf) return 0.0;
                return (m % 2 == 1 ? 1.0 : -1.0) * std::exp(la);
            } else if constexpr (std::is_same_v<T, stdf::NestedGumbel>) {
                if (m > 2) {
                    std::vector<int> coords;
                    for (int j = 0; j < d_; ++j)
                        if (b_mask >> j & 1ULL) coords.push_back(j);
                    return fd_mixed([this](std::span<const double> p) { return value(p); }, x,
                                    coords, fd_base_step(m));
                }
                std::vector<int> coord_of(static_cast<std::size_t>(s.tree.node_count()), -1);
                for (int j = 1; j <= d_; ++j)
                    coord_of[static_cast<std::size_t>(s.tree.leaf_node(j))] = j - 1;
                int ci = -1, cj = -1;
                for (int j = 0; j < d_; ++j) {
                    if (!(b_mask >> j & 1ULL)) continue;
                    if (ci < 0)
                        ci = j;
                    else
                        cj = j;
                }
                const auto r = nested_diff(s.tree, coord_of, x, s.tree.root(), ci, cj);
                return m == 1 ? r.di : r.dij;
            } else if constexpr (std::is_same_v<T, stdf::NegLogistic>) {
                // term-by-term differentiation of the inclusion-exclusion form
                const std::uint64_t full = (1ULL << d_) - 1;
                const std::uint64_t comp = full & ~b_mask;
                double logfac = 0.0;
                for (int l = 0; l < m; ++l) logfac += std::log(1.0 / s.theta + l);
                double logxb = 0.0;
                for (int j = 0; j < d_; ++j)
                    if (b_mask >> j & 1ULL)
                        logxb += (-s.theta - 1.0) * std::log(x[static_cast<std::size_t>(j)]);
                double acc = 0.0;
                std::uint64_t sub = comp;
                for (;;) {
                    const std::uint64_t jset = b_mask | sub;
                    double sj = 0.0;
                    for (int j = 0; j < d_; ++j)
                        if (jset >> j & 1ULL)
                            sj += std::pow(x[static_cast<std::size_t>(j)], -s.theta);
                    const double term = std::exp(logfac + m * std::log(s.theta) +
                                                 (-1.0 / s.theta - m) * std::log(sj) + logxb);
                    acc += popcount(jset) % 2 == 1 ? term : -term;
                    if (sub == 0) break;
                    sub = (sub - 1) & comp;
                }
                return acc;
            } else { // HuslerReiss, ExtremalT: finite differences
                std::vector<int> coords;
                for (int j = 0; j < d_; ++j)
                    if (b_mask >> j & 1ULL) coords.push_back(j);
                return fd_mixed([this](std::span<const double> p) { return value(p); }, x, coords,
                                fd_base_step(m));
            }
        },
        variant_);
}

double Stdf::log_abs_partial(std::uint64_t b_mask, std::span<const double> x) const {
    require(b_mask != 0, "stdf partial: empty index set");
    const int m = popcount(b_mask);

    if (const auto* s = std::get_if<stdf::Gumbel>(&variant_)) {
        require(static_cast<int>(x.size()) == d_, "stdf: point dimension mismatch");
        for (double v : x) require(v > 0.0, "stdf partial: coordinates must be strictly positive");
        const double lf = log_abs_falling(s->alpha, m);
        if (lf == kNegInf) return kNegInf; // alpha = 1 and |B| >= 2: zero derivative
        std::vector<double> logs;
        for (int j = 0; j < d_; ++j)
            logs.push_back(std::log(x[static_cast<std::size_t>(j)]) / s->alpha);
        const double log_s = logsumexp(logs);
        double log_xb = 0.0;
        for (int j = 0; j < d_; ++j)
            if (b_mask >> j & 1ULL)
                log_xb += (1.0 / s->alpha - 1.0) * std::log(x[static_cast<std::size_t>(j)]);
        return lf + (s->alpha - m) * log_s - m * std::log(s->alpha) + log_xb;
    }

    const double v = partial(b_mask, x);
    const double expected_sign = m % 2 == 1 ? 1.0 : -1.0;
    const double signed_v = v * expected_sign;
    if (signed_v <= 0.0) {
        if (std::fabs(v) < 1e-7) return kNegInf; // exact or numerical zero: absent term
        throw validation_error("stdf partial: sign violates (-1)^(|B|-1) convention");
    }
    return std::log(signed_v);
}

DnormGenerator Stdf::matching_generator() const {
    return std::visit(
        [&](const auto& s) -> DnormGenerator {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, stdf::Max>) {
                return DnormGenerator(dnorm::Comonotone{d_});
            } else if constexpr (std::is_same_v<T, stdf::Sum>) {
                return DnormGenerator(dnorm::IndepPermutation{d_});
            } else if constexpr (std::is_same_v<T, stdf::Gumbel>) {
                if (s.alpha == 1.0) return DnormGenerator(dnorm::IndepPermutation{d_});
                return DnormGenerator(dnorm::GumbelFrechet{d_, s.alpha});
            } else if constexpr (std::is_same_v<T, stdf::NestedGumbel>) {
                return DnormGenerator(dnorm::NestedGumbel{s.tree});
            } else if constexpr (std::is_same_v<T, stdf::NegLogistic>) {
                return DnormGenerator(dnorm::NegLogisticWeibull{d_, s.theta});
            } else if constexpr (std::is_same_v<T, stdf::HuslerReiss>) {
                // variogram embedding anchored at the first coordinate:
                // cov_ij = gamma_i1 + gamma_j1 - gamma_ij reproduces gamma as
                // the semivariogram (first coordinate degenerate at 1)
                std::vector<double> cov(static_cast<std::size_t>(d_ * d_));
                for (int i = 0; i < d_; ++i)
                    for (int j = 0; j < d_; ++j)
                        cov[static_cast<std::size_t>(i * d_ + j)] =
                            s.gamma[static_cast<std::size_t>(i * d_)] +
                            s.gamma[static_cast<std::size_t>(j * d_)] -
                            s.gamma[static_cast<std::size_t>(i * d_ + j)];
                return DnormGenerator(dnorm::BrownResnick{std::move(cov), d_});
            } else { // ExtremalT
                return DnormGenerator(dnorm::ExtremalT{s.nu, s.corr, d_});
            }
        },
        variant_);
}

Stdf Stdf::husler_reiss_from_covariance(const std::vector<double>& cov, int d) {
    require(static_cast<int>(cov.size()) == d * d, "stdf husler-reiss: matrix size mismatch");
    std::vector<double> gamma(static_cast<std::size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j)
                gamma[static_cast<std::size_t>(i * d + j)] =
                    0.5 * (cov[static_cast<std::size_t>(i * d + i)] +
                           cov[static_cast<std::size_t>(j * d + j)]) -
                    cov[static_cast<std::size_t>(i * d + j)];
    return Stdf(stdf::HuslerReiss{std::move(gamma), d});
}

Stdf Stdf::from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("variant"), "stdf: missing 'variant'");
    const auto v = j.at("variant").get<std::string>();
    auto get_d = [&j]() { return j.at("d").get<int>(); };
    if (v == "max") return Stdf(stdf::Max{get_d()});
    if (v == "sum") return Stdf(stdf::Sum{get_d()});
    if (v == "gumbel") return Stdf(stdf::Gumbel{get_d(), j.at("alpha").get<double>()});
    if (v == "nested_gumbel") return Stdf(stdf::NestedGumbel{HierarchyTree::from_json(j.at("tree"))});
    if (v == "neg_logistic") return Stdf(stdf::NegLogistic{get_d(), j.at("theta").get<double>()});
    if (v == "husler_reiss") {
        int n = 0;
        if (j.contains("gamma")) {
            auto m = detail::parse_matrix(j.at("gamma"), "stdf husler-reiss gamma", &n);
            return Stdf(stdf::HuslerReiss{std::move(m), n});
        }
        auto m = detail::parse_matrix(j.at("sigma"), "stdf husler-reiss sigma", &n);
        return husler_reiss_from_covariance(m, n);
    }
    if (v == "extremal_t") {
        int n = 0;
        auto m = detail::parse_matrix(j.at("corr"), "stdf extremal t", &n);
        return Stdf(stdf::ExtremalT{j.at("nu").get<double>(), std::move(m), n});
    }
    throw validation_error("stdf: unknown variant '" + v + "'");
}

nlohmann::json Stdf::to_json() const {
    nlohmann::json j;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, stdf::Max>) {
                j = {{"variant", "max"}, {"d", s.d}};
            } else if constexpr (std::is_same_v<T, stdf::Sum>) {
                j = {{"variant", "sum"}, {"d", s.d}};
            } else if constexpr (std::is_same_v<T, stdf::Gumbel>) {
                j = {{"variant", "gumbel"}, {"d", s.d}, {"alpha", s.alpha}};
            } else if constexpr (std::is_same_v<T, stdf::NestedGumbel>) {
                j = {{"variant", "nested_gumbel"}, {"tree", s.tree.to_json()}};
            } else if constexpr (std::is_same_v<T, stdf::NegLogistic>) {
                j = {{"variant", "neg_logistic"}, {"d", s.d}, {"theta", s.theta}};
            } else if constexpr (std::is_same_v<T, stdf::HuslerReiss>) {
                j = {{"variant", "husler_reiss"}, {"gamma", detail::emit_matrix(s.gamma, s.d)}};
            } else if constexpr (std::is_same_v<T, stdf::ExtremalT>) {
                j = {{"variant", "extremal_t"},
                     {"nu", s.nu},
                     {"corr", detail::emit_matrix(s.corr, s.d)}};
            }
        },
        variant_);
    return j;
}

} // namespace haxc
