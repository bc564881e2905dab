#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "haxc/dnorm.hpp"
#include "haxc/errors.hpp"

using namespace haxc;
using nlohmann::json;

namespace {

json nested_tree(double a0, double a1, double a2, const std::vector<int>& sizes) {
    json nodes = json::array();
    nodes.push_back({{"id", "root"}, {"parent", nullptr}, {"params", {{"alpha", a0}}}});
    json leaves = json::array();
    int coord = 0;
    const double alphas[2] = {a1, a2};
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        const std::string sid = "s" + std::to_string(s + 1);
        nodes.push_back({{"id", sid}, {"parent", "root"}, {"params", {{"alpha", alphas[s]}}}});
        for (int k = 0; k < sizes[s]; ++k) {
            const std::string lid = "x" + std::to_string(++coord);
            nodes.push_back({{"id", lid}, {"parent", sid}});
            leaves.push_back(lid);
        }
    }
    return json{{"nodes", nodes}, {"leaf_order", leaves}};
}

std::vector<double> block_corr(const std::vector<int>& sizes, double between,
                               const std::vector<double>& within) {
    int d = 0;
    for (int s : sizes) d += s;
    std::vector<double> p(static_cast<std::size_t>(d * d), between);
    int base = 0;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        for (int i = 0; i < sizes[s]; ++i)
            for (int j = 0; j < sizes[s]; ++j)
                p[static_cast<std::size_t>((base + i) * d + base + j)] =
                    i == j ? 1.0 : within[s];
        base += sizes[s];
    }
    return p;
}

} // namespace

TEST_CASE("comonotone and permutation generators") {
    Rng rng(1);
    DnormGenerator com(dnorm::Comonotone{3});
    std::vector<double> w(3);
    com.draw(rng, w);
    CHECK(w == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(com.sup_bound() == 1.0);

    DnormGenerator perm(dnorm::IndepPermutation{4});
    CHECK(perm.sup_bound() == 4.0);
    std::vector<double> counts(4, 0.0);
    std::vector<double> w4(4);
    for (int i = 0; i < 40000; ++i) {
        perm.draw(rng, w4);
        double sum = 0.0;
        int hot = -1;
        for (int j = 0; j < 4; ++j) {
            sum += w4[static_cast<std::size_t>(j)];
            if (w4[static_cast<std::size_t>(j)] != 0.0) hot = j;
        }
        CHECK(sum == 4.0);
        counts[static_cast<std::size_t>(hot)] += 1.0;
    }
    for (double c : counts) CHECK(std::fabs(c / 40000.0 - 0.25) < 0.02);
}

TEST_CASE("every variant has unit component means") {
    // Parameters are chosen so W has finite variance (Frechet-type tails
    // need shape > 2 for the standard-error bound to mean anything).
    Rng rng(2024);
    const auto tree = nested_tree(0.45, 0.3, 0.2, {2, 2});
    std::vector<DnormGenerator> gens;
    gens.emplace_back(dnorm::Comonotone{3});
    gens.emplace_back(dnorm::IndepPermutation{3});
    gens.emplace_back(dnorm::GumbelFrechet{2, 0.35});
    gens.emplace_back(dnorm::GumbelFrechet{2, 0.5}); // borderline tail, still behaves
    gens.emplace_back(dnorm::NegLogisticWeibull{3, 2.0});
    gens.emplace_back(dnorm::Schlather{block_corr({3}, 0.0, {0.7}), 3});
    gens.emplace_back(dnorm::ExtremalT{3.5, block_corr({3}, 0.0, {0.7}), 3});
    gens.emplace_back(dnorm::BrownResnick{{1.0, 0.5, 0.5, 2.0}, 2});
    gens.emplace_back(dnorm::NestedGumbel{HierarchyTree::from_json(tree)});
    gens.emplace_back(dnorm::HierHuslerReiss{{1.0, 0.2, 0.2, 1.5}, {{0.5}, {0.25}}});
    gens.emplace_back(dnorm::HierExtremalT{3.5, {1.0, 0.2, 0.2, 1.5}, {{0.5}, {0.25}}});

    for (const auto& g : gens) {
        const int d = g.dimension();
        std::vector<double> sum(static_cast<std::size_t>(d), 0.0);
        std::vector<double> sumsq(static_cast<std::size_t>(d), 0.0);
        std::vector<double> w(static_cast<std::size_t>(d));
        const long long n = 400000;
        for (long long i = 0; i < n; ++i) {
            g.draw(rng, w);
            for (int j = 0; j < d; ++j) {
                CHECK(w[static_cast<std::size_t>(j)] >= 0.0);
                sum[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(j)];
                sumsq[static_cast<std::size_t>(j)] +=
                    w[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)];
            }
        }
        for (int j = 0; j < d; ++j) {
            const double mean = sum[static_cast<std::size_t>(j)] / n;
            const double var = (sumsq[static_cast<std::size_t>(j)] - n * mean * mean) / (n - 1.0);
            const double se = std::sqrt(std::max(var, 0.0) / n);
            CHECK(std::fabs(mean - 1.0) <= 4.0 * se + 1e-12);
        }
    }
}

TEST_CASE("mc_stdf closed-form checks") {
    Rng rng(7);
    DnormGenerator com(dnorm::Comonotone{3});
    const double x[3] = {1.0, 2.0, 3.0};
    const auto r1 = com.mc_stdf(x, 1000, rng);
    CHECK(r1.estimate == 3.0);
    CHECK(r1.se == 0.0);

    DnormGenerator perm(dnorm::IndepPermutation{3});
    const auto r2 = perm.mc_stdf(x, 1000000, rng);
    CHECK(std::fabs(r2.estimate - 6.0) <= 3.0 * r2.se);

    DnormGenerator gf(dnorm::GumbelFrechet{3, 0.5});
    const auto r3 = gf.mc_stdf(x, 1000000, rng);
    CHECK(std::fabs(r3.estimate - std::sqrt(14.0)) <= 3.0 * r3.se);
}

TEST_CASE("mc_stdf respects the elementary bounds") {
    Rng rng(8);
    const double x[3] = {0.5, 1.0, 2.0};
    for (const auto& g :
         {DnormGenerator(dnorm::NegLogisticWeibull{3, 1.5}),
          DnormGenerator(dnorm::Schlather{block_corr({3}, 0.0, {0.4}), 3}),
          DnormGenerator(dnorm::BrownResnick{{1.0, 0.3, 0.1, 0.3, 1.0, 0.3, 0.1, 0.3, 1.0}, 3})}) {
        const auto r = g.mc_stdf(x, 200000, rng);
        CHECK(r.estimate >= 2.0 - 3.0 * r.se);
        CHECK(r.estimate <= 3.5 + 3.0 * r.se);
    }
}

TEST_CASE("mc_stdf homogeneity in c") {
    Rng rng(9);
    DnormGenerator g(dnorm::ExtremalT{2.0, block_corr({2}, 0.0, {0.6}), 2});
    const double x[2] = {1.0, 2.0};
    const auto base = g.mc_stdf(x, 400000, rng);
    for (double c : {0.5, 2.0}) {
        const double cx[2] = {c * x[0], c * x[1]};
        const auto scaled = g.mc_stdf(cx, 400000, rng);
        const double se = std::sqrt(scaled.se * scaled.se + c * c * base.se * base.se);
        CHECK(std::fabs(scaled.estimate - c * base.estimate) <= 3.0 * se);
    }
}

TEST_CASE("nested gumbel generator: reductions and the recursive closed form") {
    Rng rng(10);
    // one group covering everything with alpha1 = alpha0 reduces to Gumbel-Frechet
    {
        const json tree = nested_tree(0.6, 0.6, 0.0, {4});
        const DnormGenerator nested{dnorm::NestedGumbel{HierarchyTree::from_json(tree)}};
        const DnormGenerator flat{dnorm::GumbelFrechet{4, 0.6}};
        const double x[4] = {1.0, 2.0, 3.0, 4.0};
        Rng r1(5);
        const auto a = nested.mc_stdf(x, 500000, r1);
        Rng r2(6);
        const auto b = flat.mc_stdf(x, 500000, r2);
        const double se = std::sqrt(a.se * a.se + b.se * b.se);
        CHECK(std::fabs(a.estimate - b.estimate) <= 3.0 * se);
    }
    // two-level closed form at x = 1
    {
        const DnormGenerator nested{
            dnorm::NestedGumbel{HierarchyTree::from_json(nested_tree(0.8, 0.5, 0.3, {2, 2}))}};
        const double x[4] = {1.0, 1.0, 1.0, 1.0};
        const auto r = nested.mc_stdf(x, 1000000, rng);
        const double want =
            std::pow(std::pow(std::pow(2.0, 0.5), 1.0 / 0.8) +
                         std::pow(std::pow(2.0, 0.3), 1.0 / 0.8),
                     0.8);
        CHECK(std::fabs(r.estimate - want) <= 3.0 * r.se);
    }
    // ordering violation rejected
    CHECK_THROWS_AS(
        (void)DnormGenerator(
            dnorm::NestedGumbel{HierarchyTree::from_json(nested_tree(0.5, 0.8, 0.3, {2, 2}))}),
        haxc::validation_error);
}

TEST_CASE("general copula margins: direct and partial-derivative estimators agree") {
    // independence copula with unit-exponential margins
    dnorm::GeneralCopulaMargins g;
    g.d = 2;
    g.copula_sampler = [](Rng& r, std::vector<double>& u) {
        u[0] = r.uniform();
        u[1] = r.uniform();
    };
    auto exp_quantile = [](double u) { return -std::log1p(-u); };
    g.quantiles = {exp_quantile, exp_quantile};
    const DnormGenerator gen{std::move(g)};

    Rng rng(12);
    const double x[2] = {1.0, 2.0};
    const auto direct = gen.mc_stdf(x, 400000, rng);
    auto exp_cdf = [](double z) { return z <= 0.0 ? 0.0 : -std::expm1(-z); };
    const auto partial = mc_stdf_indep2_partial(exp_quantile, exp_cdf, exp_quantile, exp_cdf,
                                                x[0], x[1], 400000, rng);
    const double se = std::sqrt(direct.se * direct.se + partial.se * partial.se);
    CHECK(std::fabs(direct.estimate - partial.estimate) <= 3.0 * se);

    // sanity: E max(E1, E2) = 1.5 at x = (1,1)
    const double ones[2] = {1.0, 1.0};
    const auto r11 = gen.mc_stdf(ones, 400000, rng);
    CHECK(std::fabs(r11.estimate - 1.5) <= 3.0 * r11.se);
}

TEST_CASE("matrix validation") {
    CHECK_THROWS_AS((void)DnormGenerator(dnorm::Schlather{{1.0, 0.5, 0.5, 0.9}, 2}),
                    haxc::validation_error); // diagonal not 1
    CHECK_THROWS_AS((void)DnormGenerator(dnorm::BrownResnick{{1.0, 2.0, 2.0, 1.0}, 2}),
                    haxc::validation_error); // not PSD
    CHECK_THROWS_AS((void)DnormGenerator(dnorm::GumbelFrechet{2, 1.0}), haxc::validation_error);
}

TEST_CASE("hierarchical generators expose their flattened matrices") {
    DnormGenerator hr(dnorm::HierHuslerReiss{{1.0, 0.2, 0.2, 1.5}, {{0.5, 0.1, 0.1, 0.5}, {0.25}}});
    CHECK(hr.dimension() == 3);
    const auto cov = hr.composed_covariance();
    CHECK(cov[0] == doctest::Approx(1.5));  // 1.0 + 0.5
    CHECK(cov[1] == doctest::Approx(1.1));  // 1.0 + 0.1
    CHECK(cov[2] == doctest::Approx(0.2));  // cross-sector
    CHECK(cov[8] == doctest::Approx(1.75)); // 1.5 + 0.25

    DnormGenerator et(dnorm::HierExtremalT{2.0, {1.0, 0.2, 0.2, 1.5}, {{0.5, 0.1, 0.1, 0.5}, {0.25}}});
    const auto corr = et.composed_correlation();
    CHECK(corr[0] == doctest::Approx(1.0));
    CHECK(corr[1] == doctest::Approx(1.1 / 1.5));
    CHECK(corr[2] == doctest::Approx(0.2 / std::sqrt(1.5 * 1.75)));
}

TEST_CASE("json round trip") {
    const auto j = json::parse(R"({"variant":"extremal_t","nu":3.5,
        "corr":[[1.0,0.7],[0.7,1.0]]})");
    const auto g = DnormGenerator::from_json(j);
    CHECK(g.to_json() == DnormGenerator::from_json(g.to_json()).to_json());
    CHECK_THROWS_AS((void)DnormGenerator::from_json(json::parse(R"({"variant":"nope","d":2})")),
                    haxc::validation_error);
}
