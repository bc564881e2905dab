#include "haxc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "haxc/errors.hpp"

namespace haxc {

using detail::require;

namespace {

/// Counts inversions while merge-sorting v in place.
long long merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                      std::size_t hi) {
    if (hi - lo <= 1) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    long long cnt = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            cnt += static_cast<long long>(mid - i);
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
              buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return cnt;
}

long long tie_pairs(const std::vector<double>& sorted_keys) {
    long long t = 0;
    std::size_t i = 0;
    while (i < sorted_keys.size()) {
        std::size_t j = i + 1;
        while (j < sorted_keys.size() && sorted_keys[j] == sorted_keys[i]) ++j;
        const long long run = static_cast<long long>(j - i);
        t += run * (run - 1) / 2;
        i = j;
    }
    return t;
}

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "kendall_tau: column lengths differ");
    const auto n = static_cast<long long>(x.size());
    require(n >= 2, "kendall_tau: need at least two observations");

    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // ties in x, joint ties, and y reordered by x
    std::vector<double> ys(x.size());
    long long n1 = 0, n3 = 0;
    {
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t j = i + 1;
            while (j < idx.size() && x[idx[j]] == x[idx[i]]) ++j;
            const long long run = static_cast<long long>(j - i);
            n1 += run * (run - 1) / 2;
            std::size_t a = i;
            while (a < j) {
                std::size_t b = a + 1;
                while (b < j && y[idx[b]] == y[idx[a]]) ++b;
                const long long jr = static_cast<long long>(b - a);
                n3 += jr * (jr - 1) / 2;
                a = b;
            }
            i = j;
        }
        for (std::size_t k = 0; k < idx.size(); ++k) ys[k] = y[idx[k]];
    }

    std::vector<double> sorted_y = ys;
    std::vector<double> buf(ys.size());
    const long long swaps = merge_count(sorted_y, buf, 0, ys.size());
    const long long n2 = tie_pairs(sorted_y);

    const long long n0 = n * (n - 1) / 2;
    require(n1 < n0 && n2 < n0, "kendall_tau: a column is constant");

    const double num = static_cast<double>(n0 - n1 - n2 + n3 - 2 * swaps);
    const double den = n1 == n2 ? static_cast<double>(n0 - n1)
                                : std::sqrt(static_cast<double>(n0 - n1)) *
                                      std::sqrt(static_cast<double>(n0 - n2));
    return std::clamp(num / den, -1.0, 1.0);
}

double ks_uniform(std::span<const double> values) {
    const auto n = static_cast<long long>(values.size());
    require(n >= 10, "ks_uniform: need at least 10 observations");
    std::vector<double> v(values.begin(), values.end());
    for (double u : v)
        require(u >= 0.0 && u <= 1.0, "ks_uniform: values must lie in [0,1]");
    std::sort(v.begin(), v.end());
    double stat = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double u = v[static_cast<std::size_t>(i)];
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - u;
        const double lo = u - static_cast<double>(i) / static_cast<double>(n);
        stat = std::max(stat, std::max(hi, lo));
    }
    return stat;
}

EmpiricalCdf empirical_cdf(const SampleMatrix& sample, std::span<const double> u) {
    require(static_cast<int>(u.size()) == sample.d, "empirical_cdf: point dimension mismatch");
    require(sample.n >= 1, "empirical_cdf: empty sample");
    long long count = 0;
    for (long long i = 0; i < sample.n; ++i) {
        bool all = true;
        for (int j = 0; j < sample.d; ++j)
            if (sample.at(i, j) > u[static_cast<std::size_t>(j)]) {
                all = false;
                break;
            }
        count += all ? 1 : 0;
    }
    const double p = static_cast<double>(count) / static_cast<double>(sample.n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(sample.n))};
}

std::vector<double> tau_matrix(const SampleMatrix& sample) {
    const int d = sample.d;
    std::vector<double> m(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 1.0);
    std::vector<std::vector<double>> cols;
    cols.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) cols.push_back(sample.column(j));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double t = kendall_tau(cols[static_cast<std::size_t>(i)],
                                         cols[static_cast<std::size_t>(j)]);
            m[static_cast<std::size_t>(i * d + j)] = t;
            m[static_cast<std::size_t>(j * d + i)] = t;
        }
    return m;
}

} // namespace haxc
