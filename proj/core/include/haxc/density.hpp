#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "haxc/generators.hpp"
#include "haxc/stdf.hpp"

namespace haxc {

namespace partitions {

constexpr int kMaxDim = 12; // Bell(12) = 4,213,597

long long bell(int d);
long long stirling2(int d, int k);

/// Streams every set partition of {1..d} exactly once (restricted growth
/// strings), calling f(blocks, k) with blocks = span of k bit masks.
/// Memory stays O(d).
void for_each(int d, const std::function<void(std::span<const std::uint64_t>, int)>& f);

} // namespace partitions

/// Numerically stable log-density of a d-dimensional Archimax copula at an
/// interior point, via two nested log-sum-exp levels over the set-partition
/// expansion; every term enters in log scale.
double axc_log_density(const Generator& psi, const Stdf& l, std::span<const double> u);

/// exp(axc_log_density); may underflow to 0 in deep tails.
double axc_density(const Generator& psi, const Stdf& l, std::span<const double> u);

/// Closed-form fast path for the Gumbel stable tail dependence function,
/// using precomputed per-k partition sums of falling-factorial products.
double gumbel_stdf_log_density(const Generator& psi, double alpha, std::span<const double> u);

} // namespace haxc
