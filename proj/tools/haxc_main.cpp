// Command line front end: sample copula models, evaluate log-densities and
// stable tail dependence functions, and run statistical checks against a
// JSON model spec.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "haxc/density.hpp"
#include "haxc/errors.hpp"
#include "haxc/model_spec.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCapability = 2;
constexpr int kExitRuntime = 3;

std::uint64_t effective_seed(const haxc::CopulaModel& model, std::optional<std::uint64_t> flag) {
    return flag ? *flag : model.default_seed();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out.good()) throw haxc::validation_error("cannot open output file '" + path + "'");
    return out;
}

int cmd_sample(const std::string& spec_path, long long n, std::optional<std::uint64_t> seed,
               const std::string& out_path, int threads) {
    const auto model = haxc::CopulaModel::from_file(spec_path);
    const auto sample = haxc::sample_model(model, n, effective_seed(model, seed), threads);
    if (out_path == "-") {
        haxc::write_csv(sample, std::cout);
    } else {
        auto out = open_out(out_path);
        haxc::write_csv(sample, out);
    }
    return kExitOk;
}

int cmd_density(const std::string& spec_path, const std::string& points_path,
                const std::string& out_path) {
    const auto model = haxc::CopulaModel::from_file(spec_path);
    if (!model.has_density()) {
        // surface the capability error with the model's own message
        std::vector<double> probe(static_cast<std::size_t>(model.dimension()), 0.5);
        (void)model.log_density(probe);
    }

    std::ifstream in(points_path);
    if (!in.good())
        throw haxc::validation_error("cannot open points file '" + points_path + "'");
    const auto points = haxc::read_csv(in);
    if (points.d != model.dimension())
        throw haxc::validation_error(
            "points file has " + std::to_string(points.d) + " columns but the model dimension is " +
            std::to_string(model.dimension()));

    std::string body = "log_density,error\n";
    char buf[40];
    bool any_row_error = false;
    std::vector<double> u(static_cast<std::size_t>(points.d));
    for (long long i = 0; i < points.n; ++i) {
        for (int j = 0; j < points.d; ++j) u[static_cast<std::size_t>(j)] = points.at(i, j);
        try {
            const double ld = model.log_density(u);
            std::snprintf(buf, sizeof buf, "%.17g", ld);
            body += buf;
            body += ",\n";
        } catch (const haxc::error& e) {
            any_row_error = true;
            body += ",\"row " + std::to_string(i + 1) + ": " + e.what() + "\"\n";
        }
    }
    if (out_path == "-") {
        std::cout << body;
    } else {
        auto out = open_out(out_path);
        out << body;
    }
    return any_row_error ? kExitValidation : kExitOk;
}

int cmd_stdf(const std::string& spec_path, const std::string& points_path,
             const std::string& out_path, long long mc_n, std::optional<std::uint64_t> seed) {
    const auto model = haxc::CopulaModel::from_file(spec_path);
    if (!model.stdf_spec())
        throw haxc::validation_error(
            "the model spec has no 'stdf' block and none is implied by its 'evc' block");
    const auto& l = *model.stdf_spec();

    std::ifstream in(points_path);
    if (!in.good())
        throw haxc::validation_error("cannot open points file '" + points_path + "'");
    const auto points = haxc::read_csv(in);
    if (points.d != l.dimension())
        throw haxc::validation_error("points file has " + std::to_string(points.d) +
                                     " columns but the stdf dimension is " +
                                     std::to_string(l.dimension()));

    std::string body = mc_n > 0 ? "stdf,mc_estimate,mc_se\n" : "stdf\n";
    char buf[40];
    std::vector<double> x(static_cast<std::size_t>(points.d));
    std::optional<haxc::DnormGenerator> gen;
    haxc::Rng rng = haxc::Rng::stream(seed ? *seed : model.default_seed(), 0, 2);
    if (mc_n > 0) gen = l.matching_generator();
    for (long long i = 0; i < points.n; ++i) {
        for (int j = 0; j < points.d; ++j) x[static_cast<std::size_t>(j)] = points.at(i, j);
        std::snprintf(buf, sizeof buf, "%.17g", l.value(x));
        body += buf;
        if (mc_n > 0) {
            const auto mc = gen->mc_stdf(x, mc_n, rng);
            std::snprintf(buf, sizeof buf, ",%.17g", mc.estimate);
            body += buf;
            std::snprintf(buf, sizeof buf, ",%.17g", mc.se);
            body += buf;
        }
        body += '\n';
    }
    if (out_path == "-") {
        std::cout << body;
    } else {
        auto out = open_out(out_path);
        out << body;
    }
    return kExitOk;
}

int cmd_check(const std::string& spec_path, const std::string& level, long long n,
              std::optional<std::uint64_t> seed, const std::string& json_out) {
    const auto model = haxc::CopulaModel::from_file(spec_path);
    const long long eff_n = n > 0 ? n : (level == "full" ? 100000 : 10000);
    const auto report = haxc::run_check(model, level, eff_n, effective_seed(model, seed));
    for (const auto& c : report.checks)
        std::printf("[%s] %-42s statistic=%.6g threshold=%.6g\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.statistic, c.threshold);
    std::printf("%s: %zu checks, level %s\n", report.pass ? "OK" : "FAILED",
                report.checks.size(), level.c_str());
    if (!json_out.empty()) {
        auto out = open_out(json_out);
        out << report.to_json().dump(2) << "\n";
    }
    return report.pass ? kExitOk : kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Archimax copula construction, sampling and evaluation"};
    app.require_subcommand(1);

    std::string spec_path, out_path = "-", points_path, level = "quick", json_out;
    long long n = 1000, mc_n = 0, check_n = 0;
    std::optional<std::uint64_t> seed;
    int threads = 1;

    auto* sample = app.add_subcommand("sample", "Draw n rows from the model and write CSV");
    sample->add_option("--spec", spec_path, "Model spec JSON")->required();
    sample->add_option("--n", n, "Number of rows")->required();
    sample->add_option("--seed", seed, "Seed (overrides the spec)");
    sample->add_option("--out", out_path, "Output CSV path ('-' = stdout)");
    sample->add_option("--threads", threads, "Worker threads (output is identical)");

    auto* density = app.add_subcommand("density", "Evaluate the log-density at points");
    density->add_option("--spec", spec_path, "Model spec JSON")->required();
    density->add_option("--points", points_path, "Input points CSV")->required();
    density->add_option("--out", out_path, "Output CSV path ('-' = stdout)");

    auto* stdf = app.add_subcommand("stdf", "Evaluate the stable tail dependence function");
    stdf->add_option("--spec", spec_path, "Model spec JSON")->required();
    stdf->add_option("--points", points_path, "Input points CSV")->required();
    stdf->add_option("--out", out_path, "Output CSV path ('-' = stdout)");
    stdf->add_option("--mc", mc_n, "Also report a Monte Carlo estimate over this many draws");
    stdf->add_option("--seed", seed, "Seed for the Monte Carlo estimate");

    auto* check = app.add_subcommand("check", "Run statistical checks against the model");
    check->add_option("--spec", spec_path, "Model spec JSON")->required();
    check->add_option("--level", level, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    check->add_option("--n", check_n, "Sample size (default 10^4 quick, 10^5 full)");
    check->add_option("--seed", seed, "Seed (overrides the spec)");
    check->add_option("--json", json_out, "Also write a machine-readable JSON report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return cmd_sample(spec_path, n, seed, out_path, threads);
        if (density->parsed()) return cmd_density(spec_path, points_path, out_path);
        if (stdf->parsed()) return cmd_stdf(spec_path, points_path, out_path, mc_n, seed);
        if (check->parsed()) return cmd_check(spec_path, level, check_n, seed, json_out);
    } catch (const haxc::capability_error& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return kExitCapability;
    } catch (const haxc::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
