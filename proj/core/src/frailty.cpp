#include "haxc/frailty.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "haxc/errors.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

double sample_positive_stable(double alpha, Rng& rng) {
    require(alpha > 0.0 && alpha <= 1.0, "positive stable: alpha must be in (0,1]");
    if (alpha == 1.0) return 1.0;
    // V = (A(Theta)/E)^((1-alpha)/alpha) with Zolotarev's function
    // A(th) = [sin(a th)^a sin((1-a)th)^(1-a) / sin(th)]^(1/(1-a)).
    const double theta = M_PI * rng.uniform();
    const double e = rng.exponential();
    const double log_a = (alpha * std::log(std::sin(alpha * theta)) +
                          (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * theta)) -
                          std::log(std::sin(theta))) /
                         (1.0 - alpha);
    return std::exp((1.0 - alpha) / alpha * (log_a - std::log(e)));
}

double sample_gamma_frailty(double theta, Rng& rng) {
    require(theta > 0.0, "gamma frailty: theta must be > 0");
    return rng.gamma(1.0 / theta);
}

double sample_tilted_stable(double alpha, double h, Rng& rng) {
    require(alpha > 0.0 && alpha <= 1.0, "tilted stable: alpha must be in (0,1]");
    require(h > 0.0, "tilted stable: h must be > 0");
    if (alpha == 1.0) return h; // Laplace transform exp(-h t): point mass
    const long long m = std::max<long long>(1, static_cast<long long>(std::ceil(h)));
    const double scale = std::pow(h / static_cast<double>(m), 1.0 / alpha);
    double total = 0.0;
    for (long long i = 0; i < m; ++i) {
        for (;;) {
            const double s = scale * sample_positive_stable(alpha, rng);
            if (rng.exponential() > s) { // accept with probability exp(-s)
                total += s;
                break;
            }
        }
    }
    return total;
}

double sample_frailty(const Generator& psi, Rng& rng) {
    switch (psi.family()) {
        case GenFamily::Clayton: return sample_gamma_frailty(psi.param(), rng);
        case GenFamily::Gumbel: return sample_positive_stable(psi.param(), rng);
        case GenFamily::IndepExp: return 1.0;
    }
    return 1.0;
}

namespace {

const char* param_key(GenFamily f) { return f == GenFamily::Gumbel ? "alpha" : "theta"; }

} // namespace

FrailtyTree::FrailtyTree(HierarchyTree tree, GenFamily family)
    : tree_(std::move(tree)), family_(family) {
    require_capability(family_ != GenFamily::IndepExp,
                       "frailty tree: only Gumbel and Clayton chains are supported");
    validate();
}

void FrailtyTree::validate() const {
    const char* key = param_key(family_);
    for (int i = 0; i < tree_.node_count(); ++i) {
        const auto& n = tree_.node(i);
        if (tree_.is_leaf(i)) {
            require(n.params.empty(),
                    "frailty tree: leaf '" + n.id + "' must not carry parameters");
            continue;
        }
        auto it = n.params.find(key);
        require(it != n.params.end(), "frailty tree: node '" + n.id + "' missing parameter '" +
                                          std::string(key) + "'");
        for (const auto& [k, v] : n.params)
            require(k == key, "frailty tree: node '" + n.id + "' carries unknown parameter '" + k +
                                  "' (mixed families are unsupported)");
        const double p = it->second;
        if (family_ == GenFamily::Gumbel)
            require(p > 0.0 && p <= 1.0, "frailty tree: alpha of node '" + n.id +
                                             "' must be in (0,1]");
        else
            require(p > 0.0, "frailty tree: theta of node '" + n.id + "' must be > 0");
    }
    // Parameter ordering along every root-to-leaf path.
    for (int j = 1; j <= tree_.dimension(); ++j) {
        auto path = tree_.path_nodes(j);
        for (std::size_t k = 0; k + 2 < path.size(); ++k) {
            const double pp = node_param(path[k]);
            const double pc = node_param(path[k + 1]);
            if (family_ == GenFamily::Gumbel)
                require(pc <= pp, "frailty tree: alpha must not increase from '" +
                                      tree_.node(path[k]).id + "' to '" + tree_.node(path[k + 1]).id +
                                      "' (sufficient nesting condition)");
            else
                require(pp <= pc, "frailty tree: theta must not decrease from '" +
                                      tree_.node(path[k]).id + "' to '" + tree_.node(path[k + 1]).id +
                                      "' (sufficient nesting condition)");
        }
    }
}

double FrailtyTree::node_param(int node_idx) const {
    return tree_.node(node_idx).params.at(param_key(family_));
}

Generator FrailtyTree::node_generator(int node_idx) const {
    return family_ == GenFamily::Gumbel ? Generator::gumbel(node_param(node_idx))
                                        : Generator::clayton(node_param(node_idx));
}

Generator FrailtyTree::leaf_generator(int coord) const {
    return node_generator(tree_.parent_of_leaf(coord));
}

std::vector<double> FrailtyTree::sample(Rng& rng) const {
    std::vector<double> value(static_cast<std::size_t>(tree_.node_count()), 0.0);

    // Level by level in node index order after the root; a node's parent is
    // resolved before the node because we walk ordered by depth.
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(tree_.node_count()));
    std::vector<int> stack{tree_.root()};
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        order.push_back(i);
        const auto& ch = tree_.node(i).children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it)
            if (!tree_.is_leaf(*it)) stack.push_back(*it);
    }

    for (int idx : order) {
        const int parent = tree_.node(idx).parent;
        if (parent < 0) {
            value[static_cast<std::size_t>(idx)] =
                family_ == GenFamily::Gumbel ? sample_positive_stable(node_param(idx), rng)
                                             : sample_gamma_frailty(node_param(idx), rng);
            continue;
        }
        const double vp = value[static_cast<std::size_t>(parent)];
        const double pp = node_param(parent);
        const double pc = node_param(idx);
        if (family_ == GenFamily::Gumbel) {
            const double ratio = pc / pp;
            value[static_cast<std::size_t>(idx)] =
                ratio == 1.0 ? vp
                             : std::pow(vp, pp / pc) * sample_positive_stable(ratio, rng);
        } else {
            const double ratio = pp / pc;
            value[static_cast<std::size_t>(idx)] =
                ratio == 1.0 ? vp : sample_tilted_stable(ratio, vp, rng);
        }
    }

    std::vector<double> per_coord(static_cast<std::size_t>(tree_.dimension()));
    for (int j = 1; j <= tree_.dimension(); ++j)
        per_coord[static_cast<std::size_t>(j - 1)] =
            value[static_cast<std::size_t>(tree_.parent_of_leaf(j))];
    return per_coord;
}

FrailtyTree FrailtyTree::from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("family"), "frailty tree: missing 'family'");
    const auto fam = j.at("family").get<std::string>();
    GenFamily f;
    if (fam == "gumbel")
        f = GenFamily::Gumbel;
    else if (fam == "clayton")
        f = GenFamily::Clayton;
    else
        throw validation_error("frailty tree: unknown family '" + fam + "'");
    return FrailtyTree(HierarchyTree::from_json(j), f);
}

nlohmann::json FrailtyTree::to_json() const {
    auto j = tree_.to_json();
    j["family"] = family_ == GenFamily::Gumbel ? "gumbel" : "clayton";
    return j;
}

} // namespace haxc
