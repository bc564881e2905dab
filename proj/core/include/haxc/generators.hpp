#pragma once

#include <string>
#include <vector>

namespace haxc {

enum class GenFamily { Clayton, Gumbel, IndepExp };

/// Completely monotone Archimedean generator psi with inverse and signed
/// high-order derivatives, evaluated in log scale.
///
///   Clayton(theta>0):    psi(t) = (1+t)^(-1/theta)
///   Gumbel(alpha in (0,1]): psi(t) = exp(-t^alpha)
///   IndepExp:            psi(t) = exp(-t)
class Generator {
public:
    static Generator clayton(double theta);
    static Generator gumbel(double alpha);
    static Generator indep_exp();

    GenFamily family() const { return family_; }
    double param() const { return param_; }
    std::string name() const;

    /// psi(t) for t >= 0.
    double psi(double t) const;

    /// psi^{-1}(u) for u in (0, 1].
    double psi_inv(double u) const;

    /// log of (-psi^{-1})'(u), u in (0,1).
    double log_neg_dpsi_inv(double u) const;

    /// log of (-1)^k psi^{(k)}(t), k >= 1, t > 0. Finite for all supported
    /// inputs; derivative order is capped at kMaxDerivOrder.
    double log_abs_deriv(int k, double t) const;

    static constexpr int kMaxDerivOrder = 12;

private:
    Generator(GenFamily f, double p);
    void build_gumbel_coefficients();

    GenFamily family_;
    double param_;
    // log coefficients of the polynomial R_k with
    // (-1)^k psi^{(k)}(t) = psi(t) t^{-k} R_k(t^alpha); all coefficients are
    // non-negative for alpha <= 1, so the table is exact in log space.
    std::vector<std::vector<double>> gumbel_log_coef_;
};

} // namespace haxc
