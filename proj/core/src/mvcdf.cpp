#include "haxc/mvcdf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "haxc/errors.hpp"
#include "haxc/rng.hpp"
#include "haxc/special.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

double norm_quantile(double p) {
    static const boost::math::normal_distribution<double> dist;
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return boost::math::quantile(dist, p);
}

double t_cdf(double x, double nu) {
    require(nu > 0.0, "t_cdf: degrees of freedom must be > 0");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    boost::math::students_t_distribution<double> dist(nu);
    return boost::math::cdf(dist, x);
}

double chisq_quantile(double p, double nu) {
    boost::math::chi_squared_distribution<double> dist(nu);
    return boost::math::quantile(dist, p);
}

double chisq_logpdf(double x, double nu) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    const double h = nu / 2.0;
    return (h - 1.0) * std::log(x) - x / 2.0 - h * std::log(2.0) - std::lgamma(h);
}

namespace quad {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
           adaptive_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

} // namespace

double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    return adaptive_rec(f, a, fa, b, fb, m, fm, simpson(f, a, fa, b, fb, m, fm), tol, max_depth);
}

double adaptive_split(const std::function<double(double)>& f, const std::vector<double>& knots,
                      double tol, int max_depth) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        total += adaptive(f, knots[i], knots[i + 1], tol / static_cast<double>(knots.size()),
                          max_depth);
    return total;
}

} // namespace quad

namespace linalg {

std::vector<double> sym_eigenvalues(std::vector<double> a, int n) {
    // Cyclic Jacobi; n is tiny here so convergence is quick.
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> cholesky_psd(std::vector<double> a, int n) {
    auto try_chol = [n](std::vector<double> m) -> std::vector<double> {
        auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i * n + j)]; };
        for (int j = 0; j < n; ++j) {
            double d = at(j, j);
            for (int k = 0; k < j; ++k) d -= at(j, k) * at(j, k);
            if (d <= 0.0) return {};
            at(j, j) = std::sqrt(d);
            for (int i = j + 1; i < n; ++i) {
                double s = at(i, j);
                for (int k = 0; k < j; ++k) s -= at(i, k) * at(j, k);
                at(i, j) = s / at(j, j);
            }
            for (int i = 0; i < j; ++i) at(i, j) = 0.0;
        }
        return m;
    };

    auto r = try_chol(a);
    if (!r.empty()) return r;

    // Borderline PSD: verify the spectrum, then retry with a small ridge.
    auto ev = sym_eigenvalues(a, n);
    const double scale = std::max(std::fabs(ev.front()), std::fabs(ev.back()));
    require(ev.front() >= -1e-10 * std::max(scale, 1.0),
            "matrix is not positive semi-definite (min eigenvalue " + std::to_string(ev.front()) +
                ")");
    double ridge = std::max(scale, 1.0) * 1e-14;
    for (int attempt = 0; attempt < 8; ++attempt, ridge *= 32.0) {
        auto b = a;
        for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i * n + i)] += ridge;
        r = try_chol(b);
        if (!r.empty()) return r;
    }
    throw validation_error("matrix is not positive semi-definite");
}

} // namespace linalg

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Drezner-Wesolowsky style single integral over theta with r = sin(theta);
/// the integrand is bounded by 1 and smooth away from theta = pi/2.
double bvn_upper_part(double h, double k, double rho, double tol) {
    const double a = std::asin(std::clamp(rho, -1.0, 1.0));
    auto f = [&](double th) {
        const double s = std::sin(th);
        const double c2 = std::max(1.0 - s * s, 1e-300);
        return std::exp(-(h * h + k * k - 2.0 * h * k * s) / (2.0 * c2));
    };
    return quad::adaptive(f, 0.0, a, tol) / (2.0 * M_PI);
}

} // namespace

double bvn_cdf(double h, double k, double rho) {
    require(rho >= -1.0 && rho <= 1.0, "bvn_cdf: correlation out of [-1,1]");
    if (std::isinf(h) || std::isinf(k)) {
        if (h == -kInf || k == -kInf) return 0.0;
        if (h == kInf) return norm_cdf(k);
        return norm_cdf(h);
    }
    if (rho >= 1.0) return norm_cdf(std::min(h, k));
    if (rho <= -1.0) return std::max(0.0, norm_cdf(h) + norm_cdf(k) - 1.0);
    if (rho == 0.0) return norm_cdf(h) * norm_cdf(k);
    return norm_cdf(h) * norm_cdf(k) + bvn_upper_part(h, k, rho, 5e-14);
}

double bvt_cdf(double h, double k, double rho, double nu) {
    require(nu > 0.0, "bvt_cdf: degrees of freedom must be > 0");
    if (std::isinf(h) || std::isinf(k)) {
        if (h == -kInf || k == -kInf) return 0.0;
        if (h == kInf) return t_cdf(k, nu);
        return t_cdf(h, nu);
    }
    // Scale mixture over S ~ chi^2_nu: P = E[ Phi2(h r, k r; rho) ], r = sqrt(S/nu).
    auto integrand = [&](double s) {
        const double r = std::sqrt(s / nu);
        return std::exp(chisq_logpdf(s, nu)) * bvn_cdf(h * r, k * r, rho);
    };
    std::vector<double> knots;
    for (double p : {1e-12, 0.005, 0.05, 0.25, 0.5, 0.75, 0.95, 0.995, 1.0 - 1e-12})
        knots.push_back(chisq_quantile(p, nu));
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    return std::clamp(quad::adaptive_split(integrand, knots, 1e-10), 0.0, 1.0);
}

namespace {

struct Standardized {
    int m = 0;
    std::vector<double> b;    // standardized finite upper limits
    std::vector<double> corr; // correlation matrix, row-major
};

/// Subtract the mean, scale by sqrt of the diagonal and drop +inf limits
/// (dropping a coordinate is exact marginalization). -inf gives probability 0.
std::optional<Standardized> standardize(const MvnProblem& p) {
    require(p.dim >= 1, "mvcdf: dimension must be >= 1");
    require_capability(p.dim <= MvnProblem::kMaxDim,
                       "mvcdf: dimension " + std::to_string(p.dim) + " exceeds cap " +
                           std::to_string(MvnProblem::kMaxDim));
    require(static_cast<int>(p.upper.size()) == p.dim, "mvcdf: limits size mismatch");
    require(static_cast<int>(p.cov.size()) == p.dim * p.dim, "mvcdf: matrix size mismatch");
    require(p.mean.empty() || static_cast<int>(p.mean.size()) == p.dim,
            "mvcdf: mean size mismatch");

    std::vector<int> keep;
    for (int i = 0; i < p.dim; ++i) {
        const double mu = p.mean.empty() ? 0.0 : p.mean[static_cast<std::size_t>(i)];
        const double bi = p.upper[static_cast<std::size_t>(i)];
        if (bi == -kInf) return std::nullopt;
        if (bi == kInf) continue;
        (void)mu;
        keep.push_back(i);
    }
    Standardized s;
    s.m = static_cast<int>(keep.size());
    s.b.resize(keep.size());
    s.corr.assign(keep.size() * keep.size(), 0.0);
    std::vector<double> sd(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const int gi = keep[i];
        const double v = p.cov[static_cast<std::size_t>(gi * p.dim + gi)];
        require(v > 0.0, "mvcdf: non-positive variance on the diagonal");
        sd[i] = std::sqrt(v);
        const double mu = p.mean.empty() ? 0.0 : p.mean[static_cast<std::size_t>(gi)];
        s.b[i] = (p.upper[static_cast<std::size_t>(gi)] - mu) / sd[i];
    }
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j)
            s.corr[i * keep.size() + j] =
                p.cov[static_cast<std::size_t>(keep[i] * p.dim + keep[j])] / (sd[i] * sd[j]);

    // Sort by limit (ascending): tighter constraints first stabilizes the
    // separation-of-variables transform.
    std::vector<std::size_t> ord(keep.size());
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b2) { return s.b[a] < s.b[b2]; });
    Standardized out;
    out.m = s.m;
    out.b.resize(s.b.size());
    out.corr.assign(s.corr.size(), 0.0);
    for (std::size_t i = 0; i < ord.size(); ++i) {
        out.b[i] = s.b[ord[i]];
        for (std::size_t j = 0; j < ord.size(); ++j)
            out.corr[i * ord.size() + j] = s.corr[ord[i] * ord.size() + ord[j]];
    }
    return out;
}

/// Genz separation-of-variables integrand for one QMC point w in [0,1]^{m-1},
/// optionally scaling the limits by r (Student t mixture).
double sov_value(const Standardized& s, const std::vector<double>& L, const double* w, double r) {
    const int m = s.m;
    const auto lat = [&](int i, int j) { return L[static_cast<std::size_t>(i * m + j)]; };
    double prod = norm_cdf(s.b[0] * r / lat(0, 0));
    if (prod <= 0.0) return 0.0;
    std::vector<double> y(static_cast<std::size_t>(m - 1));
    double e_prev = prod;
    for (int i = 1; i < m; ++i) {
        const double ui = std::min(std::max(w[i - 1] * e_prev, 1e-16), 1.0 - 1e-16);
        y[static_cast<std::size_t>(i - 1)] = norm_quantile(ui);
        double dot = 0.0;
        for (int j = 0; j < i; ++j) dot += lat(i, j) * y[static_cast<std::size_t>(j)];
        const double e_i = norm_cdf((s.b[static_cast<std::size_t>(i)] * r - dot) / lat(i, i));
        prod *= e_i;
        if (prod <= 0.0) return 0.0;
        e_prev = e_i;
    }
    return prod;
}

/// Randomized rank-1 lattice (sqrt-prime generators) with a fixed internal
/// seed; returns the mean over shifts and iterates until the spread between
/// shifts is below tol.
double genz_qmc(const Standardized& s, std::optional<double> nu, double tol) {
    const int m = s.m;
    auto L = linalg::cholesky_psd(s.corr, m);
    // Guard against exact zeros on the diagonal from degenerate correlation.
    for (int i = 0; i < m; ++i) {
        auto& d = L[static_cast<std::size_t>(i * m + i)];
        if (d < 1e-12) d = 1e-12;
    }

    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    const int dim_qmc = (nu ? 1 : 0) + (m - 1);
    std::vector<double> q(static_cast<std::size_t>(std::max(dim_qmc, 1)));
    for (int i = 0; i < dim_qmc; ++i) q[static_cast<std::size_t>(i)] = std::sqrt(primes[i]);

    constexpr int kShifts = 12;
    Rng shift_rng(0x5eedbead2024ULL); // fixed: evaluation is deterministic
    std::vector<std::vector<double>> shifts(kShifts, std::vector<double>(q.size()));
    for (auto& sh : shifts)
        for (auto& v : sh) v = shift_rng.uniform();

    std::vector<double> sums(kShifts, 0.0);
    std::vector<double> w(q.size());
    long long done = 0;
    long long target = 4096;
    double mean = 0.0;
    for (int iter = 0; iter < 8; ++iter) {
        for (long long k = done + 1; k <= target; ++k) {
            for (int sh = 0; sh < kShifts; ++sh) {
                for (std::size_t i = 0; i < q.size(); ++i) {
                    double v = std::fmod(static_cast<double>(k) * q[i] + shifts[static_cast<std::size_t>(sh)][i], 1.0);
                    // reflect to [0,1] tent map (baker transform) for smoother lattices
                    w[i] = 1.0 - std::fabs(2.0 * v - 1.0);
                }
                double r = 1.0;
                const double* wp = w.data();
                if (nu) {
                    const double u0 = std::min(std::max(w[0], 1e-15), 1.0 - 1e-15);
                    r = std::sqrt(chisq_quantile(u0, *nu) / *nu);
                    wp = w.data() + 1;
                }
                sums[static_cast<std::size_t>(sh)] += sov_value(s, L, wp, r);
            }
        }
        done = target;
        mean = 0.0;
        for (double v : sums) mean += v;
        mean /= static_cast<double>(kShifts) * static_cast<double>(done);
        double var = 0.0;
        for (double v : sums) {
            const double d = v / static_cast<double>(done) - mean;
            var += d * d;
        }
        var /= kShifts * (kShifts - 1.0);
        if (3.0 * std::sqrt(var) < 0.5 * tol) break;
        target *= 2;
    }
    return std::clamp(mean, 0.0, 1.0);
}

double rect_prob(const MvnProblem& p, std::optional<double> nu) {
    auto s0 = standardize(p);
    if (!s0) return 0.0;
    const auto& s = *s0;
    if (s.m == 0) return 1.0;
    if (s.m == 1) return nu ? t_cdf(s.b[0], *nu) : norm_cdf(s.b[0]);
    if (s.m == 2) {
        require(s.corr[1] >= -1.0 - 1e-12 && s.corr[1] <= 1.0 + 1e-12,
                "mvcdf: correlation out of [-1,1] (matrix is not positive semi-definite)");
        const double rho = std::clamp(s.corr[1], -1.0, 1.0);
        return nu ? bvt_cdf(s.b[0], s.b[1], rho, *nu) : bvn_cdf(s.b[0], s.b[1], rho);
    }
    const double tol = s.m <= 3 ? 1e-6 : 1e-4;
    return genz_qmc(s, nu, tol);
}

} // namespace

double mvn_cdf(const MvnProblem& p) {
    require(!p.nu, "mvn_cdf: problem carries degrees of freedom, use mvt_cdf");
    return rect_prob(p, std::nullopt);
}

double mvt_cdf(const MvnProblem& p) {
    require(p.nu.has_value(), "mvt_cdf: degrees of freedom missing");
    require(*p.nu > 0.0, "mvt_cdf: degrees of freedom must be > 0");
    return rect_prob(p, p.nu);
}

} // namespace haxc
