#include "haxc/model_spec.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "haxc/density.hpp"
#include "haxc/errors.hpp"

namespace haxc {

using detail::require;
using detail::require_capability;

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Ac: return "ac";
        case ModelKind::Evc: return "evc";
        case ModelKind::Axc: return "axc";
        case ModelKind::Haxc: return "haxc";
        case ModelKind::Naxc: return "naxc";
    }
    return "?";
}

namespace {

ModelKind kind_from_string(const std::string& s) {
    if (s == "ac") return ModelKind::Ac;
    if (s == "evc") return ModelKind::Evc;
    if (s == "axc") return ModelKind::Axc;
    if (s == "haxc") return ModelKind::Haxc;
    if (s == "naxc") return ModelKind::Naxc;
    throw validation_error("model: unknown kind '" + s + "'");
}

Generator generator_from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("family"), "generator block: missing 'family'");
    const auto f = j.at("family").get<std::string>();
    if (f == "clayton") return Generator::clayton(j.at("theta").get<double>());
    if (f == "gumbel") return Generator::gumbel(j.at("alpha").get<double>());
    if (f == "indep_exp") return Generator::indep_exp();
    throw validation_error("generator block: unknown family '" + f + "'");
}

nlohmann::json generator_to_json(const Generator& g) {
    nlohmann::json j{{"family", g.name()}};
    if (g.family() == GenFamily::Clayton) j["theta"] = g.param();
    if (g.family() == GenFamily::Gumbel) j["alpha"] = g.param();
    return j;
}

} // namespace

CopulaModel CopulaModel::from_json(const nlohmann::json& j) {
    require(j.is_object(), "model: expected a JSON object");
    CopulaModel m;

    if (j.contains("seed")) {
        require(j.at("seed").is_number_unsigned() || j.at("seed").is_number_integer(),
                "model: 'seed' must be a 64-bit unsigned integer");
        m.seed_ = j.at("seed").get<std::uint64_t>();
    }

    if (j.contains("generator")) m.generator_ = generator_from_json(j.at("generator"));
    if (j.contains("frailty_tree")) m.frailty_ = FrailtyTree::from_json(j.at("frailty_tree"));
    if (j.contains("stdf")) m.stdf_ = Stdf::from_json(j.at("stdf"));

    bool sector_product = false;
    if (j.contains("evc")) {
        const auto& ej = j.at("evc");
        if (ej.is_object() && ej.contains("type") &&
            ej.at("type").get<std::string>() == "sector_product") {
            sector_product = true;
            require(ej.contains("sectors") && ej.at("sectors").is_array() &&
                        !ej.at("sectors").empty(),
                    "evc block: sector_product needs a non-empty 'sectors' array");
            for (const auto& sj : ej.at("sectors"))
                m.sector_evcs_.push_back(EvcModel::from_json(sj));
        } else {
            m.evc_ = EvcModel::from_json(ej);
        }
    }

    if (j.contains("kind")) {
        m.kind_ = kind_from_string(j.at("kind").get<std::string>());
    } else { // infer from the blocks present
        if (!m.sector_evcs_.empty())
            m.kind_ = ModelKind::Naxc;
        else if (m.frailty_)
            m.kind_ = ModelKind::Haxc;
        else if (m.generator_ && m.evc_)
            m.kind_ = ModelKind::Axc;
        else if (m.generator_)
            m.kind_ = ModelKind::Ac;
        else if (m.evc_)
            m.kind_ = ModelKind::Evc;
        else
            throw validation_error("model: no blocks to infer a kind from");
    }

    // Per-kind block requirements.
    switch (m.kind_) {
        case ModelKind::Ac:
            require(m.generator_.has_value(), "model kind 'ac': missing 'generator' block");
            require(!m.evc_ && !sector_product,
                    "model kind 'ac': unexpected 'evc' block (use kind 'axc')");
            break;
        case ModelKind::Evc:
            require(m.evc_.has_value(), "model kind 'evc': missing 'evc' block");
            require(!m.generator_, "model kind 'evc': unexpected 'generator' block");
            break;
        case ModelKind::Axc:
            require(m.generator_.has_value(), "model kind 'axc': missing 'generator' block");
            require(m.evc_.has_value(), "model kind 'axc': missing 'evc' block");
            break;
        case ModelKind::Haxc:
            require(m.frailty_.has_value(), "model kind 'haxc': missing 'frailty_tree' block");
            require(m.evc_.has_value(),
                    "model kind 'haxc': missing 'evc' block (sector_product is for kind 'naxc')");
            break;
        case ModelKind::Naxc:
            require(m.frailty_.has_value(), "model kind 'naxc': missing 'frailty_tree' block");
            require(!m.sector_evcs_.empty(),
                    "model kind 'naxc': the 'evc' block must be a sector_product; a dependent "
                    "cross-sector EVC has no verified nested form");
            break;
    }

    // Dimension: explicit or implied.
    int implied = 0;
    if (m.frailty_)
        implied = m.frailty_->dimension();
    else if (m.evc_)
        implied = m.evc_->dimension();
    else if (!m.sector_evcs_.empty()) {
        for (const auto& e : m.sector_evcs_) implied += e.dimension();
    } else if (m.stdf_)
        implied = m.stdf_->dimension();
    else if (j.contains("dimension"))
        implied = j.at("dimension").get<int>();
    m.d_ = implied;
    if (j.contains("dimension"))
        require(j.at("dimension").get<int>() == m.d_,
                "model: 'dimension' (" + std::to_string(j.at("dimension").get<int>()) +
                    ") disagrees with the blocks (" + std::to_string(m.d_) + ")");
    require(m.d_ >= 1, "model: dimension must be >= 1");

    // Derive a stable tail dependence function when the EVC has one.
    if (!m.stdf_) {
        if (m.kind_ == ModelKind::Ac) m.stdf_ = Stdf(stdf::Sum{m.d_});
        if (m.evc_) m.stdf_ = m.evc_->implied_stdf();
    }

    m.validate_dimensions();
    return m;
}

void CopulaModel::validate_dimensions() const {
    if (frailty_ && evc_)
        require(frailty_->dimension() == evc_->dimension(),
                "model: 'frailty_tree' dimension (" + std::to_string(frailty_->dimension()) +
                    ") and 'evc' dimension (" + std::to_string(evc_->dimension()) +
                    ") disagree");
    if (stdf_)
        require(stdf_->dimension() == d_,
                "model: 'stdf' dimension (" + std::to_string(stdf_->dimension()) +
                    ") disagrees with the model dimension (" + std::to_string(d_) + ")");
    if (!sector_evcs_.empty()) {
        const auto sizes = frailty_->tree().two_level_sizes();
        require(sizes.size() == sector_evcs_.size(),
                "model: 'evc' sector count (" + std::to_string(sector_evcs_.size()) +
                    ") disagrees with the 'frailty_tree' sectors (" +
                    std::to_string(sizes.size()) + ")");
        for (std::size_t s = 0; s < sizes.size(); ++s)
            require(sector_evcs_[s].dimension() == sizes[s],
                    "model: sector " + std::to_string(s + 1) + " EVC dimension (" +
                        std::to_string(sector_evcs_[s].dimension()) +
                        ") disagrees with the frailty tree (" + std::to_string(sizes[s]) + ")");
    }
}

CopulaModel CopulaModel::from_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open model spec '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error("model spec '" + path + "': " + e.what());
    }
    return from_json(j);
}

nlohmann::json CopulaModel::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind_);
    j["dimension"] = d_;
    j["seed"] = seed_;
    if (generator_) j["generator"] = generator_to_json(*generator_);
    if (frailty_) j["frailty_tree"] = frailty_->to_json();
    if (evc_) j["evc"] = evc_->to_json();
    if (!sector_evcs_.empty()) {
        nlohmann::json sectors = nlohmann::json::array();
        for (const auto& e : sector_evcs_) sectors.push_back(e.to_json());
        j["evc"] = {{"type", "sector_product"}, {"sectors", std::move(sectors)}};
    }
    if (stdf_) j["stdf"] = stdf_->to_json();
    return j;
}

std::vector<double> CopulaModel::draw_row(RowRngs& rngs) const {
    switch (kind_) {
        case ModelKind::Ac: {
            const EvcModel indep{evc::Independence{d_}};
            return sample_axc_row(*generator_, indep, rngs);
        }
        case ModelKind::Evc: {
            std::vector<double> u(static_cast<std::size_t>(d_));
            evc_->draw_row(rngs.evc, u);
            return u;
        }
        case ModelKind::Axc: return sample_axc_row(*generator_, *evc_, rngs);
        case ModelKind::Haxc: return sample_haxc_row(*frailty_, *evc_, rngs);
        case ModelKind::Naxc: return sample_naxc_row(*frailty_, sector_evcs_, rngs);
    }
    return {};
}

bool CopulaModel::has_cdf() const {
    switch (kind_) {
        case ModelKind::Ac: return true;
        case ModelKind::Evc:
        case ModelKind::Axc: return stdf_.has_value();
        case ModelKind::Haxc: return false;
        case ModelKind::Naxc: {
            for (const auto& e : sector_evcs_)
                if (!e.implied_stdf()) return false;
            return true;
        }
    }
    return false;
}

double CopulaModel::cdf(std::span<const double> u) const {
    require_capability(has_cdf(), "model kind '" + to_string(kind_) +
                                      "': no closed-form CDF is available");
    switch (kind_) {
        case ModelKind::Ac:
        case ModelKind::Axc: return cdf_axc(*generator_, *stdf_, u);
        case ModelKind::Evc: return evc_cdf(*stdf_, u);
        case ModelKind::Naxc: {
            std::vector<Stdf> sector_stdfs;
            for (const auto& e : sector_evcs_) sector_stdfs.push_back(*e.implied_stdf());
            return naxc_cdf(*frailty_, sector_stdfs, u);
        }
        default: return 0.0;
    }
}

bool CopulaModel::has_density() const {
    if (kind_ != ModelKind::Ac && kind_ != ModelKind::Axc && kind_ != ModelKind::Evc)
        return false;
    return stdf_ && stdf_->smooth() && d_ <= partitions::kMaxDim;
}

double CopulaModel::log_density(std::span<const double> u) const {
    if (kind_ == ModelKind::Haxc || kind_ == ModelKind::Naxc)
        throw capability_error("model kind '" + to_string(kind_) +
                               "': no density is available for hierarchical or nested "
                               "constructions");
    require_capability(has_density(), "model: no density is available (needs a smooth stable "
                                      "tail dependence function and dimension <= " +
                                          std::to_string(partitions::kMaxDim) + ")");
    const Generator& psi = generator_ ? *generator_ : Generator::indep_exp();
    if (const auto* g = std::get_if<stdf::Gumbel>(&stdf_->variant()))
        return gumbel_stdf_log_density(psi, g->alpha, u);
    return axc_log_density(psi, *stdf_, u);
}

SampleMatrix sample_model(const CopulaModel& model, long long n, std::uint64_t seed,
                          int threads) {
    require(n >= 1, "sample: n must be >= 1");
    require(threads >= 1, "sample: thread count must be >= 1");
    SampleMatrix m;
    m.n = n;
    m.d = model.dimension();
    m.data.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(m.d), 0.0);
    for (int j = 1; j <= m.d; ++j) m.names.push_back("u" + std::to_string(j));

    auto worker = [&](long long lo, long long hi) {
        for (long long i = lo; i < hi; ++i) {
            auto rngs = RowRngs::for_row(seed, static_cast<std::uint64_t>(i));
            const auto row = model.draw_row(rngs);
            std::copy(row.begin(), row.end(),
                      m.data.begin() + static_cast<std::ptrdiff_t>(i * m.d));
        }
    };
    if (threads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const long long chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long long lo = t * chunk;
            const long long hi = std::min<long long>(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return m;
}

void write_csv(const SampleMatrix& m, std::ostream& os) {
    for (int j = 0; j < m.d; ++j)
        os << (j ? "," : "") << (j < static_cast<int>(m.names.size())
                                     ? m.names[static_cast<std::size_t>(j)]
                                     : "u" + std::to_string(j + 1));
    os << "\n";
    char buf[40];
    for (long long i = 0; i < m.n; ++i) {
        std::string line;
        for (int j = 0; j < m.d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
            if (j) line += ',';
            line += buf;
        }
        line += '\n';
        os << line;
    }
}

SampleMatrix read_csv(std::istream& is) {
    SampleMatrix m;
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "csv: empty input");
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) m.names.push_back(field);
        m.d = static_cast<int>(m.names.size());
        require(m.d >= 1, "csv: empty header");
    }
    long long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        int col = 0;
        while (std::getline(ss, field, ',')) {
            try {
                m.data.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw validation_error("csv line " + std::to_string(lineno) + ", field " +
                                       std::to_string(col + 1) + ": not a number: '" + field +
                                       "'");
            }
            ++col;
        }
        require(col == m.d, "csv line " + std::to_string(lineno) + ": expected " +
                                std::to_string(m.d) + " fields, got " + std::to_string(col));
        ++m.n;
    }
    return m;
}

nlohmann::json CheckReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"statistic", c.statistic},
                       {"threshold", c.threshold},
                       {"pass", c.pass}});
    return nlohmann::json{{"level", level}, {"checks", std::move(arr)}, {"pass", pass}};
}

namespace {

double tau_of_generator(const Generator& g) {
    switch (g.family()) {
        case GenFamily::Clayton: return g.param() / (g.param() + 2.0);
        case GenFamily::Gumbel: return 1.0 - g.param();
        case GenFamily::IndepExp: return 0.0;
    }
    return 0.0;
}

/// Pairwise tau targets where a closed form exists; NaN marks "no target".
std::vector<double> tau_targets(const CopulaModel& model) {
    const int d = model.dimension();
    std::vector<double> t(static_cast<std::size_t>(d) * static_cast<std::size_t>(d),
                          std::numeric_limits<double>::quiet_NaN());
    auto set = [&](int i, int j, double v) {
        t[static_cast<std::size_t>(i * d + j)] = v;
        t[static_cast<std::size_t>(j * d + i)] = v;
    };
    switch (model.kind()) {
        case ModelKind::Ac:
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) set(i, j, tau_of_generator(*model.generator()));
            break;
        case ModelKind::Evc: {
            const auto& e = *model.evc();
            if (const auto* g = std::get_if<evc::GumbelExact>(&e.variant())) {
                for (int i = 0; i < d; ++i)
                    for (int j = i + 1; j < d; ++j) set(i, j, 1.0 - g->alpha);
            } else if (const auto* ng = std::get_if<evc::NestedGumbelExact>(&e.variant())) {
                const auto& tree = ng->frailties.tree();
                for (int i = 0; i < d; ++i)
                    for (int j = i + 1; j < d; ++j) {
                        const auto pi = tree.path_nodes(i + 1);
                        const auto pj = tree.path_nodes(j + 1);
                        double alpha = 0.0;
                        for (std::size_t k = 0; k < std::min(pi.size(), pj.size()); ++k) {
                            if (pi[k] != pj[k]) break;
                            alpha = ng->frailties.node_param(pi[k]);
                        }
                        set(i, j, 1.0 - alpha);
                    }
            }
            break;
        }
        case ModelKind::Haxc: {
            // Analytic targets only for the nested Archimedean case
            // (independence EVC): pairwise copula is the LCA node's family.
            if (!std::holds_alternative<evc::Independence>(model.evc()->variant())) break;
            const auto& ft = *model.frailty_tree();
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) {
                    const auto pi = ft.tree().path_nodes(i + 1);
                    const auto pj = ft.tree().path_nodes(j + 1);
                    int lca = -1;
                    for (std::size_t k = 0; k < std::min(pi.size(), pj.size()); ++k) {
                        if (pi[k] != pj[k]) break;
                        lca = pi[k];
                    }
                    if (lca >= 0) set(i, j, tau_of_generator(ft.node_generator(lca)));
                }
            break;
        }
        default: break;
    }
    return t;
}

} // namespace

CheckReport run_check(const CopulaModel& model, const std::string& level, long long n,
                      std::uint64_t seed) {
    require(level == "quick" || level == "full", "check: level must be 'quick' or 'full'");
    CheckReport report;
    report.level = level;
    const int d = model.dimension();

    const auto sample = sample_model(model, n, seed);
    auto add = [&](const std::string& name, double stat, double threshold, bool pass) {
        report.checks.push_back({name, stat, threshold, pass});
        report.pass = report.pass && pass;
    };

    // Range and margin uniformity.
    double min_v = 1.0, max_v = 0.0;
    for (double v : sample.data) {
        min_v = std::min(min_v, v);
        max_v = std::max(max_v, v);
    }
    add("entries_in_unit_interval", std::max(max_v - 1.0, -min_v), 0.0,
        min_v >= 0.0 && max_v <= 1.0);
    const double ks_crit = 1.63 / std::sqrt(static_cast<double>(n)); // 1% critical value
    for (int j = 0; j < d; ++j) {
        const double ks = ks_uniform(sample.column(j));
        add("margin_uniform_ks_u" + std::to_string(j + 1), ks, ks_crit, ks <= ks_crit);
    }

    // Calibration targets.
    const auto targets = tau_targets(model);
    const auto taus = tau_matrix(sample);
    bool any_target = false;
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double tgt = targets[static_cast<std::size_t>(i * d + j)];
            if (std::isnan(tgt)) continue;
            any_target = true;
            worst = std::max(worst,
                             std::fabs(taus[static_cast<std::size_t>(i * d + j)] - tgt));
        }
    if (any_target) add("kendall_tau_targets_max_abs_error", worst, 0.03, worst <= 0.03);

    // Hierarchical ordering: within-sector dependence exceeds between-sector.
    if (model.frailty_tree()) {
        const auto& tree = model.frailty_tree()->tree();
        bool two_level = true;
        std::vector<int> sector(static_cast<std::size_t>(d), 0);
        try {
            for (int j = 1; j <= d; ++j)
                sector[static_cast<std::size_t>(j - 1)] = tree.sector_node_of(j);
            (void)tree.two_level_sizes();
        } catch (const error&) {
            two_level = false;
        }
        if (two_level) {
            double min_within = 1.0, max_between = -1.0;
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) {
                    const double t = taus[static_cast<std::size_t>(i * d + j)];
                    if (sector[static_cast<std::size_t>(i)] == sector[static_cast<std::size_t>(j)])
                        min_within = std::min(min_within, t);
                    else
                        max_between = std::max(max_between, t);
                }
            if (max_between > -1.0 && min_within < 1.0)
                add("within_sector_tau_exceeds_between", min_within - max_between, 0.0,
                    min_within > max_between);
        }
    }

    if (level == "full" && model.has_cdf()) {
        // Empirical CDF against the closed form on an interior grid.
        double worst_z = 0.0;
        const double grid[3] = {0.25, 0.5, 0.75};
        std::vector<double> u(static_cast<std::size_t>(d));
        for (double g1 : grid)
            for (double g2 : grid) {
                for (int j = 0; j < d; ++j)
                    u[static_cast<std::size_t>(j)] = j % 2 == 0 ? g1 : g2;
                const auto emp = empirical_cdf(sample, u);
                const double se = std::max(emp.se, 1e-4);
                worst_z = std::max(worst_z, std::fabs(emp.value - model.cdf(u)) / se);
            }
        add("empirical_cdf_matches_closed_form_z", worst_z, 4.0, worst_z <= 4.0);
    }

    return report;
}

} // namespace haxc
