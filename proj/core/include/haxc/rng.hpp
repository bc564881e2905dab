#pragma once

#include <cmath>
#include <cstdint>

namespace haxc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// xoshiro256++ generator with splitmix64 seeding.
///
/// Streams are derived from (seed, stream, substream) by hashing, so
/// per-row / per-purpose streams are reproducible independently of how
/// much randomness other streams consume. This is what makes sampling
/// embarrassingly parallel and lets two models share realizations by
/// sharing a seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { seed_state(seed); }

    /// Derived stream: deterministic function of (seed, stream, substream).
    static Rng stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
        std::uint64_t mix = seed;
        (void)detail::splitmix64(mix);
        mix ^= 0x9e3779b97f4a7c15ULL * (stream + 0x632be59bd9b4e019ULL);
        (void)detail::splitmix64(mix);
        mix ^= 0xc2b2ae3d27d4eb4fULL * (substream + 0x9e3779b97f4a7c15ULL);
        Rng r(0);
        r.seed_state(mix);
        return r;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on (lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard exponential.
    double exponential() { return -std::log(uniform()); }

    /// Standard normal via the Marsaglia polar method (second variate cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    /// Gamma(shape, rate 1) via Marsaglia-Tsang, with the usual boost for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    void seed_state(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& s : s_) s = detail::splitmix64(sm);
        has_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// The pair of per-row streams used by copula samplers: frailties and the
/// EVC part draw from separate streams so that models sharing a seed share
/// EVC realizations regardless of their frailty structure.
struct RowRngs {
    Rng frailty;
    Rng evc;

    static RowRngs for_row(std::uint64_t seed, std::uint64_t row) {
        return RowRngs{Rng::stream(seed, row, 0), Rng::stream(seed, row, 1)};
    }
};

} // namespace haxc
