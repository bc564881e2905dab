#pragma once

#include <span>
#include <vector>

#include "haxc/evc.hpp"
#include "haxc/frailty.hpp"
#include "haxc/generators.hpp"
#include "haxc/rng.hpp"
#include "haxc/stdf.hpp"

namespace haxc {

/// One Archimax draw U_j = psi(-log Y_j / V), Y ~ evc, V the frailty of psi.
/// The frailty comes from rngs.frailty and the EVC row from rngs.evc.
std::vector<double> sample_axc_row(const Generator& psi, const EvcModel& evc, RowRngs& rngs);

/// One hierarchical Archimax draw: the frailty cascade supplies each
/// coordinate's frailty and generator (of its deepest internal ancestor);
/// the EVC may carry its own, possibly different, hierarchy.
std::vector<double> sample_haxc_row(const FrailtyTree& frailties, const EvcModel& evc,
                                    RowRngs& rngs);

/// One nested Archimax draw with nested frailties and per-sector EVCs
/// (cross-sector dependence is the independence product, the one case whose
/// nested form is known to hold). The frailty tree must be two-level; sector
/// s uses psi_s and its own EVC of dimension d_s.
std::vector<double> sample_naxc_row(const FrailtyTree& frailties,
                                    std::span<const EvcModel> sector_evcs, RowRngs& rngs);

/// C(u) = psi(l(psi^{-1}(u_1), ..., psi^{-1}(u_d))).
double cdf_axc(const Generator& psi, const Stdf& l, std::span<const double> u);

/// Bivariate margin of an Archimax copula with nested Gumbel stable tail
/// dependence function: a Gumbel-l AXC whose alpha belongs to the lowest
/// common ancestor of the two coordinates.
double pairwise_margin_cdf(const Generator& psi, const Stdf& nested_stdf, int i, int j,
                           double u_i, double u_j);

/// CDF of the nested Archimax construction C_0(C_1(u_1), ..., C_S(u_S)) with
/// C_0 Archimedean (psi of the frailty root) and C_s Archimax with psi_s and
/// the sector stable tail dependence function l_s.
double naxc_cdf(const FrailtyTree& frailties, std::span<const Stdf> sector_stdfs,
                std::span<const double> u);

} // namespace haxc
