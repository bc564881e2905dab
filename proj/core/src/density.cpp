#include "haxc/density.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "haxc/errors.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

} // namespace

namespace partitions {

long long bell(int d) {
    require(d >= 0 && d <= kMaxDim, "partitions: dimension out of range");
    // Bell triangle
    std::vector<long long> prev{1}, cur;
    for (int i = 1; i <= d; ++i) {
        cur.assign(static_cast<std::size_t>(i) + 1, 0);
        cur[0] = prev.back();
        for (int j = 1; j <= i; ++j) cur[static_cast<std::size_t>(j)] =
            cur[static_cast<std::size_t>(j - 1)] + prev[static_cast<std::size_t>(j - 1)];
        prev = cur;
    }
    return prev.front();
}

long long stirling2(int d, int k) {
    require(d >= 0 && d <= kMaxDim, "partitions: dimension out of range");
    if (k < 0 || k > d) return 0;
    if (d == 0) return k == 0 ? 1 : 0;
    std::vector<long long> row{1}; // S(0, 0)
    for (int n = 1; n <= d; ++n) {
        std::vector<long long> next(static_cast<std::size_t>(n) + 1, 0);
        for (int m = 1; m <= n; ++m) {
            const long long below = m <= n - 1 ? row[static_cast<std::size_t>(m)] : 0;
            const long long left = row[static_cast<std::size_t>(m - 1)];
            next[static_cast<std::size_t>(m)] = m * below + left;
        }
        row = next;
    }
    return row[static_cast<std::size_t>(k)];
}

void for_each(int d, const std::function<void(std::span<const std::uint64_t>, int)>& f) {
    require(d >= 1, "partitions: dimension must be >= 1");
    require_capability(d <= kMaxDim, "partitions: dimension " + std::to_string(d) +
                                         " exceeds cap " + std::to_string(kMaxDim));
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
    std::vector<int> a(static_cast<std::size_t>(d), 0);
    std::vector<int> b(static_cast<std::size_t>(d), 0); // b[i] = max prefix of a[0..i-1]
    std::vector<std::uint64_t> blocks(static_cast<std::size_t>(d), 0);
    for (;;) {
        int k = 0;
        for (int i = 0; i < d; ++i) k = std::max(k, a[static_cast<std::size_t>(i)] + 1);
        for (int g = 0; g < k; ++g) blocks[static_cast<std::size_t>(g)] = 0;
        for (int i = 0; i < d; ++i)
            blocks[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])] |= 1ULL << i;
        f(std::span<const std::uint64_t>(blocks.data(), static_cast<std::size_t>(k)), k);

        int i = d - 1;
        while (i > 0 && a[static_cast<std::size_t>(i)] > b[static_cast<std::size_t>(i)]) --i;
        if (i == 0) return;
        a[static_cast<std::size_t>(i)] += 1;
        for (int j = i + 1; j < d; ++j) {
            a[static_cast<std::size_t>(j)] = 0;
            b[static_cast<std::size_t>(j)] = std::max(b[static_cast<std::size_t>(j - 1)],
                                                      a[static_cast<std::size_t>(j - 1)]);
        }
    }
}

} // namespace partitions

namespace {

struct DensityPoint {
    std::vector<double> x;       // psi^{-1}(u)
    double ell = 0.0;            // l(x)
    double log_dpsi_inv_sum = 0; // sum_j log((-psi^{-1})'(u_j))
};

DensityPoint prepare_point(const Generator& psi, const Stdf& l, std::span<const double> u) {
    const int d = l.dimension();
    require(static_cast<int>(u.size()) == d, "density: point dimension mismatch");
    require_capability(l.smooth(),
                       "density: the comonotone stable tail dependence function is not "
                       "differentiable");
    require_capability(d <= partitions::kMaxDim,
                       "density: dimension exceeds the partition-sum cap");
    DensityPoint p;
    p.x.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        require(u[static_cast<std::size_t>(j)] > 0.0 && u[static_cast<std::size_t>(j)] < 1.0,
                "density: u must be in the open interval (0,1)");
        p.x[static_cast<std::size_t>(j)] = psi.psi_inv(u[static_cast<std::size_t>(j)]);
        p.log_dpsi_inv_sum += psi.log_neg_dpsi_inv(u[static_cast<std::size_t>(j)]);
    }
    p.ell = l.value(p.x);
    require(std::isfinite(p.ell) && p.ell > 0.0, "density: l(psi^{-1}(u)) is not finite");
    return p;
}

} // namespace

double axc_log_density(const Generator& psi, const Stdf& l, std::span<const double> u) {
    const int d = l.dimension();
    const auto p = prepare_point(psi, l, u);

    // log |D_B l| per subset mask of {1..d}; -inf marks an absent term.
    const std::size_t n_subsets = 1ULL << d;
    std::vector<double> log_db(n_subsets, kNegInf);
    for (std::uint64_t mask = 1; mask < n_subsets; ++mask)
        log_db[mask] = l.log_abs_partial(mask, p.x);

    // Two streaming passes over all partitions: per-k maxima first, then the
    // log-sum-exp accumulation (the max must precede the sum).
    std::vector<double> a_max(static_cast<std::size_t>(d) + 1, kNegInf);
    partitions::for_each(d, [&](std::span<const std::uint64_t> blocks, int k) {
        double a = 0.0;
        for (auto bm : blocks) {
            const double t = log_db[bm];
            if (t == kNegInf) return; // zero derivative: partition contributes nothing
            a += t;
        }
        a_max[static_cast<std::size_t>(k)] = std::max(a_max[static_cast<std::size_t>(k)], a);
    });
    std::vector<double> a_sum(static_cast<std::size_t>(d) + 1, 0.0);
    partitions::for_each(d, [&](std::span<const std::uint64_t> blocks, int k) {
        double a = 0.0;
        for (auto bm : blocks) {
            const double t = log_db[bm];
            if (t == kNegInf) return;
            a += t;
        }
        a_sum[static_cast<std::size_t>(k)] += std::exp(a - a_max[static_cast<std::size_t>(k)]);
    });

    double b_max = kNegInf;
    std::vector<double> b_k(static_cast<std::size_t>(d) + 1, kNegInf);
    for (int k = 1; k <= d; ++k) {
        if (a_max[static_cast<std::size_t>(k)] == kNegInf) continue;
        b_k[static_cast<std::size_t>(k)] = psi.log_abs_deriv(k, p.ell) +
                                           a_max[static_cast<std::size_t>(k)] +
                                           std::log(a_sum[static_cast<std::size_t>(k)]);
        b_max = std::max(b_max, b_k[static_cast<std::size_t>(k)]);
    }
    require(b_max != kNegInf, "density: all partition terms vanished");
    double s = 0.0;
    for (int k = 1; k <= d; ++k)
        if (b_k[static_cast<std::size_t>(k)] != kNegInf)
            s += std::exp(b_k[static_cast<std::size_t>(k)] - b_max);
    return p.log_dpsi_inv_sum + b_max + std::log(s);
}

double axc_density(const Generator& psi, const Stdf& l, std::span<const double> u) {
    return std::exp(axc_log_density(psi, l, u));
}

double gumbel_stdf_log_density(const Generator& psi, double alpha, std::span<const double> u) {
    const int d = static_cast<int>(u.size());
    require(d >= 1, "density: dimension must be >= 1");
    require(alpha > 0.0 && alpha <= 1.0, "density: Gumbel alpha must be in (0,1]");
    require_capability(d <= partitions::kMaxDim,
                       "density: dimension exceeds the partition-sum cap");

    // t_k = sum over partitions with k blocks of prod_B |(alpha)_{|B|}|,
    // via the partial Bell recurrence B(n,k) = sum_m C(n-1,m-1) x_m B(n-m,k-1);
    // all partitions with the same k carry the same sign (-1)^(d-k).
    std::vector<double> xabs(static_cast<std::size_t>(d) + 1, 0.0);
    for (int m = 1; m <= d; ++m) {
        double v = alpha;
        for (int l = 1; l < m; ++l) v *= static_cast<double>(l) - alpha;
        xabs[static_cast<std::size_t>(m)] = v;
    }
    std::vector<double> binom(static_cast<std::size_t>(d) * static_cast<std::size_t>(d + 1), 0.0);
    auto c_at = [&](int n, int r) -> double& {
        return binom[static_cast<std::size_t>(n) * static_cast<std::size_t>(d + 1) +
                     static_cast<std::size_t>(r)];
    };
    for (int n = 0; n < d; ++n) {
        c_at(n, 0) = 1.0;
        for (int r = 1; r <= n; ++r)
            c_at(n, r) = (n - 1 >= 0 ? (r <= n - 1 ? c_at(n - 1, r) : 0.0) : 0.0) +
                         (r - 1 <= n - 1 ? c_at(n - 1, r - 1) : 0.0);
    }
    std::vector<std::vector<double>> bellp(static_cast<std::size_t>(d) + 1,
                                           std::vector<double>(static_cast<std::size_t>(d) + 1, 0.0));
    bellp[0][0] = 1.0;
    for (int n = 1; n <= d; ++n)
        for (int k = 1; k <= n; ++k) {
            double acc = 0.0;
            for (int m = 1; m <= n - k + 1; ++m)
                acc += c_at(n - 1, m - 1) * xabs[static_cast<std::size_t>(m)] *
                       bellp[static_cast<std::size_t>(n - m)][static_cast<std::size_t>(k - 1)];
            bellp[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = acc;
        }

    // log S with S = sum_j psi^{-1}(u_j)^(1/alpha), plus the per-coordinate
    // factor sum_j [log((-psi^{-1})'(u_j)) + (1/alpha - 1) log psi^{-1}(u_j)].
    double per_coord = 0.0;
    double log_s = kNegInf;
    std::vector<double> logs(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        require(u[static_cast<std::size_t>(j)] > 0.0 && u[static_cast<std::size_t>(j)] < 1.0,
                "density: u must be in the open interval (0,1)");
        const double xj = psi.psi_inv(u[static_cast<std::size_t>(j)]);
        require(xj > 0.0 && std::isfinite(xj), "density: psi^{-1}(u) out of range");
        const double lx = std::log(xj);
        logs[static_cast<std::size_t>(j)] = lx / alpha;
        per_coord += psi.log_neg_dpsi_inv(u[static_cast<std::size_t>(j)]) +
                     (1.0 / alpha - 1.0) * lx;
    }
    double mx = kNegInf;
    for (double v : logs) mx = std::max(mx, v);
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - mx);
    log_s = mx + std::log(acc);

    const double ell = std::exp(alpha * log_s);
    require(std::isfinite(ell) && ell > 0.0, "density: l(psi^{-1}(u)) is not finite");

    double best = kNegInf;
    std::vector<double> terms(static_cast<std::size_t>(d) + 1, kNegInf);
    for (int k = 1; k <= d; ++k) {
        const double tk = bellp[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)];
        if (tk <= 0.0) continue;
        terms[static_cast<std::size_t>(k)] =
            psi.log_abs_deriv(k, ell) + (alpha * k - d) * log_s + std::log(tk);
        best = std::max(best, terms[static_cast<std::size_t>(k)]);
    }
    require(best != kNegInf, "density: all partition terms vanished");
    double s = 0.0;
    for (int k = 1; k <= d; ++k)
        if (terms[static_cast<std::size_t>(k)] != kNegInf)
            s += std::exp(terms[static_cast<std::size_t>(k)] - best);

    return -d * std::log(alpha) + per_coord + best + std::log(s);
}

} // namespace haxc
