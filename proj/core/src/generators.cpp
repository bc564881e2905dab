#include "haxc/generators.hpp"

#include <cmath>
#include <limits>

#include "haxc/errors.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

} // namespace

Generator::Generator(GenFamily f, double p) : family_(f), param_(p) {
    if (family_ == GenFamily::Gumbel) build_gumbel_coefficients();
}

Generator Generator::clayton(double theta) {
    require(theta > 0.0, "generator: Clayton theta must be > 0");
    return Generator(GenFamily::Clayton, theta);
}

Generator Generator::gumbel(double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, "generator: Gumbel alpha must be in (0,1]");
    return Generator(GenFamily::Gumbel, alpha);
}

Generator Generator::indep_exp() { return Generator(GenFamily::IndepExp, 0.0); }

std::string Generator::name() const {
    switch (family_) {
        case GenFamily::Clayton: return "clayton";
        case GenFamily::Gumbel: return "gumbel";
        case GenFamily::IndepExp: return "indep_exp";
    }
    return "?";
}

double Generator::psi(double t) const {
    require(t >= 0.0, "generator: psi requires t >= 0");
    switch (family_) {
        case GenFamily::Clayton: return std::exp(-std::log1p(t) / param_);
        case GenFamily::Gumbel: return std::exp(-std::pow(t, param_));
        case GenFamily::IndepExp: return std::exp(-t);
    }
    return 0.0;
}

double Generator::psi_inv(double u) const {
    require(u > 0.0 && u <= 1.0, "generator: psi_inv requires u in (0,1]");
    switch (family_) {
        case GenFamily::Clayton: return std::expm1(-param_ * std::log(u));
        case GenFamily::Gumbel: return std::pow(-std::log(u), 1.0 / param_);
        case GenFamily::IndepExp: return -std::log(u);
    }
    return 0.0;
}

double Generator::log_neg_dpsi_inv(double u) const {
    require(u > 0.0 && u < 1.0, "generator: log_neg_dpsi_inv requires u in (0,1)");
    switch (family_) {
        case GenFamily::Clayton:
            return std::log(param_) - (param_ + 1.0) * std::log(u);
        case GenFamily::Gumbel:
            return -std::log(param_) + (1.0 / param_ - 1.0) * std::log(-std::log(u)) - std::log(u);
        case GenFamily::IndepExp:
            return -std::log(u);
    }
    return 0.0;
}

void Generator::build_gumbel_coefficients() {
    // R_{k+1}(y) coefficients from R_k via
    //   c_{k+1,m} = (k - alpha m) c_{k,m} + alpha c_{k,m-1},
    // all terms non-negative for alpha <= 1.
    const double alpha = param_;
    const double log_alpha = std::log(alpha);
    gumbel_log_coef_.assign(static_cast<std::size_t>(kMaxDerivOrder) + 1, {});
    gumbel_log_coef_[1] = {kNegInf, log_alpha}; // index by m; m=0 unused
    for (int k = 1; k < kMaxDerivOrder; ++k) {
        const auto& cur = gumbel_log_coef_[static_cast<std::size_t>(k)];
        std::vector<double> next(static_cast<std::size_t>(k) + 2, kNegInf);
        for (int m = 1; m <= k + 1; ++m) {
            double stay = kNegInf;
            if (m <= k) {
                const double f = static_cast<double>(k) - alpha * m;
                if (f > 0.0) stay = std::log(f) + cur[static_cast<std::size_t>(m)];
            }
            double carry = kNegInf;
            if (m - 1 >= 1 && m - 1 <= k) carry = log_alpha + cur[static_cast<std::size_t>(m - 1)];
            next[static_cast<std::size_t>(m)] = logaddexp(stay, carry);
        }
        gumbel_log_coef_[static_cast<std::size_t>(k) + 1] = std::move(next);
    }
}

double Generator::log_abs_deriv(int k, double t) const {
    require(k >= 1, "generator: derivative order must be >= 1");
    require(t > 0.0, "generator: log_abs_deriv requires t > 0");
    require_capability(k <= kMaxDerivOrder,
                       "generator: derivative order " + std::to_string(k) + " exceeds cap " +
                           std::to_string(kMaxDerivOrder));
    switch (family_) {
        case GenFamily::IndepExp:
            return -t;
        case GenFamily::Clayton: {
            const double a = 1.0 / param_;
            double s = 0.0;
            for (int j = 0; j < k; ++j) s += std::log(a + j);
            return s - (a + k) * std::log1p(t);
        }
        case GenFamily::Gumbel: {
            const double alpha = param_;
            const double log_t = std::log(t);
            const auto& coef = gumbel_log_coef_[static_cast<std::size_t>(k)];
            double acc = kNegInf;
            for (int m = 1; m <= k; ++m)
                acc = logaddexp(acc, coef[static_cast<std::size_t>(m)] + m * alpha * log_t);
            return -std::pow(t, alpha) + acc - k * log_t;
        }
    }
    return 0.0;
}

} // namespace haxc
