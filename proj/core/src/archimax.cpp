#include "haxc/archimax.hpp"

#include <cmath>

#include "haxc/errors.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

std::vector<double> sample_axc_row(const Generator& psi, const EvcModel& evc, RowRngs& rngs) {
    const int d = evc.dimension();
    std::vector<double> u(static_cast<std::size_t>(d));
    const double v = sample_frailty(psi, rngs.frailty);
    evc.draw_row(rngs.evc, u);
    if (psi.family() == GenFamily::IndepExp) return u; // psi(-log y) = y
    for (auto& uj : u) uj = psi.psi(-std::log(uj) / v);
    return u;
}

std::vector<double> sample_haxc_row(const FrailtyTree& frailties, const EvcModel& evc,
                                    RowRngs& rngs) {
    const int d = evc.dimension();
    require(frailties.dimension() == d,
            "haxc: frailty tree and EVC dimensions differ (" +
                std::to_string(frailties.dimension()) + " vs " + std::to_string(d) + ")");
    const auto v = frailties.sample(rngs.frailty);
    std::vector<double> u(static_cast<std::size_t>(d));
    evc.draw_row(rngs.evc, u);
    for (int j = 0; j < d; ++j) {
        const auto psi_j = frailties.leaf_generator(j + 1);
        u[static_cast<std::size_t>(j)] = psi_j.psi(-std::log(u[static_cast<std::size_t>(j)]) /
                                                   v[static_cast<std::size_t>(j)]);
    }
    return u;
}

std::vector<double> sample_naxc_row(const FrailtyTree& frailties,
                                    std::span<const EvcModel> sector_evcs, RowRngs& rngs) {
    const auto sizes = frailties.tree().two_level_sizes();
    require(sizes.size() == sector_evcs.size(),
            "naxc: number of sector EVCs (" + std::to_string(sector_evcs.size()) +
                ") must match the frailty tree's sectors (" + std::to_string(sizes.size()) + ")");
    for (std::size_t s = 0; s < sizes.size(); ++s)
        require(sector_evcs[s].dimension() == sizes[s],
                "naxc: sector " + std::to_string(s + 1) + " EVC dimension mismatch");

    const auto v = frailties.sample(rngs.frailty);
    const int d = frailties.dimension();
    std::vector<double> u(static_cast<std::size_t>(d));
    std::vector<double> y;
    int base = 0;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        y.resize(static_cast<std::size_t>(sizes[s]));
        sector_evcs[s].draw_row(rngs.evc, y);
        for (int k = 0; k < sizes[s]; ++k) {
            const int j = base + k;
            const auto psi_j = frailties.leaf_generator(j + 1);
            u[static_cast<std::size_t>(j)] =
                psi_j.psi(-std::log(y[static_cast<std::size_t>(k)]) / v[static_cast<std::size_t>(j)]);
        }
        base += sizes[s];
    }
    return u;
}

double cdf_axc(const Generator& psi, const Stdf& l, std::span<const double> u) {
    require(static_cast<int>(u.size()) == l.dimension(), "cdf_axc: point dimension mismatch");
    std::vector<double> x(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        require(u[j] > 0.0 && u[j] <= 1.0, "cdf_axc: u must be in (0,1]");
        x[j] = psi.psi_inv(u[j]);
    }
    return psi.psi(l.value(x));
}

double pairwise_margin_cdf(const Generator& psi, const Stdf& nested_stdf, int i, int j,
                           double u_i, double u_j) {
    const auto* ns = std::get_if<stdf::NestedGumbel>(&nested_stdf.variant());
    require_capability(ns != nullptr,
                       "pairwise_margin_cdf: needs a nested-Gumbel stable tail dependence "
                       "function");
    const int d = nested_stdf.dimension();
    require(i >= 1 && i <= d && j >= 1 && j <= d && i != j,
            "pairwise_margin_cdf: invalid coordinate pair");
    // alpha of the lowest common ancestor of the two leaves
    const auto pi = ns->tree.path_nodes(i);
    const auto pj = ns->tree.path_nodes(j);
    double alpha = 0.0;
    for (std::size_t k = 0; k < std::min(pi.size(), pj.size()); ++k) {
        if (pi[k] != pj[k]) break;
        alpha = ns->tree.node(pi[k]).params.at("alpha");
    }
    const Stdf l2(stdf::Gumbel{2, alpha});
    const double uv[2] = {u_i, u_j};
    return cdf_axc(psi, l2, uv);
}

double naxc_cdf(const FrailtyTree& frailties, std::span<const Stdf> sector_stdfs,
                std::span<const double> u) {
    const auto sizes = frailties.tree().two_level_sizes();
    require(sizes.size() == sector_stdfs.size(), "naxc_cdf: sector count mismatch");
    require(static_cast<int>(u.size()) == frailties.dimension(),
            "naxc_cdf: point dimension mismatch");

    const auto psi0 = frailties.node_generator(frailties.tree().root());
    double outer = 0.0;
    int base = 0;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        require(sector_stdfs[s].dimension() == sizes[s], "naxc_cdf: sector dimension mismatch");
        const auto psi_s = frailties.leaf_generator(base + 1);
        const double cs = cdf_axc(psi_s, sector_stdfs[s],
                                  u.subspan(static_cast<std::size_t>(base),
                                            static_cast<std::size_t>(sizes[s])));
        outer += psi0.psi_inv(cs);
        base += sizes[s];
    }
    return psi0.psi(outer);
}

} // namespace haxc
