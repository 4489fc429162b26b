// qemfit: fit censored/grouped lifetime data by EM, MCEM, or QEM,
// run simulation studies, and replay the embedded reference datasets.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qem/csv.hpp"
#include "qem/em.hpp"
#include "qem/fixtures.hpp"
#include "qem/oracle.hpp"
#include "qem/simulation.hpp"

using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitFit = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

qem::ModelTag parse_model_or_throw(const std::string& name) {
    auto tag = qem::parse_model_name(name);
    if (!tag)
        throw UsageError("unknown model '" + name + "'");
    return *tag;
}

qem::ModelParams default_initial(qem::ModelTag tag) {
    using namespace qem;
    switch (tag) {
        case ModelTag::exponential: return ModelParams(ExponentialParams{1.0});
        case ModelTag::normal: return ModelParams(NormalParams{0.0, 1.0});
        case ModelTag::laplace: return ModelParams(LaplaceParams{0.0, 1.0});
        case ModelTag::rayleigh: return ModelParams(RayleighParams{1.0});
        case ModelTag::weibull: return ModelParams(WeibullParams{1.0, 1.0});
    }
    throw UsageError("unknown model");
}

qem::ModelParams parse_init(qem::ModelTag tag, const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string field;
    while (std::getline(ss, field, ',')) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size())
            throw UsageError("malformed --init value '" + field + "'");
        values.push_back(v);
    }
    try {
        return qem::ModelParams::from_values(tag, values);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad --init: ") + e.what());
    }
}

qem::Dataset load_dataset(const std::string& path, bool grouped) {
    std::ifstream in(path);
    if (!in)
        throw qem::DataError("cannot open data file '" + path + "'");
    if (grouped) {
        auto rows = qem::parse_grouped_csv(in);
        return qem::expand_grouped(rows);
    }
    return qem::parse_interval_csv(in);
}

json params_to_json(const qem::ModelParams& p) {
    json j;
    const auto names = qem::param_names(p.tag());
    const auto values = p.values();
    for (std::size_t d = 0; d < values.size(); ++d)
        j[std::string(names[d])] = values[d];
    return j;
}

json result_to_json(qem::ModelTag tag, const qem::FitConfig& cfg, const qem::FitResult& r) {
    json j;
    j["model"] = std::string(qem::model_name(tag));
    j["strategy"] = std::string(qem::strategy_name(cfg.strategy));
    j["k"] = cfg.grid_size;
    j["xi_scheme"] = std::string(qem::xi_scheme_name(cfg.scheme));
    j["eps"] = cfg.epsilon;
    j["max_iterations"] = cfg.max_iterations;
    j["seed"] = cfg.seed;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["estimate"] = params_to_json(r.estimate);
    json trace = json::array();
    for (const auto& p : r.trace)
        trace.push_back(params_to_json(p));
    j["trace"] = trace;
    j["loglik_trace"] = r.loglik_trace;
    return j;
}

void print_fit_text(qem::ModelTag tag, const qem::FitConfig& cfg, const qem::FitResult& r,
                    bool trace) {
    const auto names = qem::param_names(tag);
    std::cout << "model:      " << qem::model_name(tag) << "\n";
    std::cout << "strategy:   " << qem::strategy_name(cfg.strategy);
    if (cfg.strategy != qem::Strategy::exact_em)
        std::cout << " (K=" << cfg.grid_size << ", " << qem::xi_scheme_name(cfg.scheme) << ")";
    std::cout << "\n";
    std::cout << "iterations: " << r.iterations << "\n";
    std::cout << "converged:  " << (r.converged ? "yes" : "no") << "\n";
    const auto est = r.estimate.values();
    for (std::size_t d = 0; d < est.size(); ++d)
        std::cout << names[d] << " = " << format_g(est[d]) << "\n";
    if (tag == qem::ModelTag::exponential)
        std::cout << "mean (1/lambda) = " << format_g(1.0 / est[0]) << "\n";
    std::cout << "loglik = " << format_g(r.loglik_trace.back()) << "\n";
    if (trace) {
        std::cout << "\n  s";
        for (auto n : names)
            std::cout << "  " << n;
        std::cout << "  loglik\n";
        for (std::size_t s = 0; s < r.trace.size(); ++s) {
            std::cout << "  " << s;
            for (double v : r.trace[s].values())
                std::cout << "  " << format_g(v);
            std::cout << "  " << format_g(r.loglik_trace[s]) << "\n";
        }
    }
}

int cmd_fit(const std::string& model_name_str, const std::string& data_path, bool grouped,
            const std::string& strategy_str, int k, double eps, int max_iter,
            std::optional<std::uint64_t> seed, const std::string& init_csv,
            const std::string& scheme_str, bool trace, const std::string& output) {
    const auto tag = parse_model_or_throw(model_name_str);
    const auto strategy = qem::parse_strategy_name(strategy_str);
    if (!strategy)
        throw UsageError("unknown strategy '" + strategy_str + "'");
    const auto scheme = qem::parse_xi_scheme_name(scheme_str);
    if (!scheme)
        throw UsageError("unknown xi scheme '" + scheme_str + "'");
    if (output != "text" && output != "json")
        throw UsageError("--output must be text or json");

    qem::FitConfig cfg(init_csv.empty() ? default_initial(tag) : parse_init(tag, init_csv));
    cfg.strategy = *strategy;
    cfg.grid_size = k;
    cfg.scheme = *scheme;
    cfg.epsilon = eps;
    cfg.max_iterations = max_iter;
    if (seed) {
        cfg.seed = *seed;
    } else if (cfg.strategy == qem::Strategy::mcem) {
        cfg.seed = std::random_device{}(); // unseeded MCEM is intentionally non-reproducible
    }

    const qem::Dataset data = load_dataset(data_path, grouped);
    const qem::FitResult result = qem::run_fit(tag, data, cfg);

    if (output == "json")
        std::cout << result_to_json(tag, cfg, result).dump(2) << "\n";
    else
        print_fit_text(tag, cfg, result, trace);
    return 0;
}

// flat `key = value` file
std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw qem::DataError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (!key.empty())
            kv[key] = value;
    }
    return kv;
}

const std::string& require_key(const std::map<std::string, std::string>& kv,
                               const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw UsageError("config file is missing required key '" + key + "'");
    return it->second;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "' has malformed value '" + s + "'");
    }
}

long to_long(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "' has malformed value '" + s + "'");
    }
}

std::vector<qem::StudyCell> parse_cells(const std::string& spec) {
    std::vector<qem::StudyCell> cells;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            continue;
        item = item.substr(b, e - b + 1);
        std::string name = item;
        int k = 0;
        if (const auto colon = item.find(':'); colon != std::string::npos) {
            name = item.substr(0, colon);
            k = static_cast<int>(to_long(item.substr(colon + 1), "cells"));
        }
        const auto strategy = qem::parse_strategy_name(name);
        if (!strategy)
            throw UsageError("unknown strategy '" + name + "' in cells");
        if (*strategy != qem::Strategy::exact_em && k < 1)
            throw UsageError("cell '" + item + "' needs a grid size, e.g. qem:100");
        cells.push_back({*strategy, k});
    }
    if (cells.empty())
        throw UsageError("config key 'cells' lists no cells");
    return cells;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const auto kv = parse_config_file(config_path);
    const auto tag = parse_model_or_throw(require_key(kv, "model"));

    std::vector<double> truth_values;
    for (const auto name : qem::param_names(tag))
        truth_values.push_back(to_double(require_key(kv, std::string(name)), std::string(name)));

    qem::StudyConfig cfg(tag, qem::ModelParams::from_values(tag, truth_values));
    cfg.sample_size = static_cast<int>(to_long(require_key(kv, "n"), "n"));
    cfg.censored_count = static_cast<int>(to_long(require_key(kv, "r"), "r"));
    cfg.replications = static_cast<int>(to_long(require_key(kv, "replications"), "replications"));
    cfg.cells = parse_cells(require_key(kv, "cells"));
    if (auto it = kv.find("iterations"); it != kv.end())
        cfg.iterations_per_fit = static_cast<int>(to_long(it->second, "iterations"));
    if (auto it = kv.find("seed"); it != kv.end())
        cfg.base_seed = static_cast<std::uint64_t>(to_long(it->second, "seed"));
    if (auto it = kv.find("threads"); it != kv.end())
        cfg.threads = static_cast<int>(to_long(it->second, "threads"));

    static const char* known[] = {"model",        "n",    "r",       "replications", "cells",
                                  "iterations",   "seed", "threads", "lambda",       "mu",
                                  "sigma",        "beta"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw UsageError("config file has unknown key '" + key + "'");
    }

    const qem::StudyTable table = qem::run_study(cfg);

    std::filesystem::create_directories(out_dir);
    const auto csv_path = std::filesystem::path(out_dir) / "study.csv";
    const auto txt_path = std::filesystem::path(out_dir) / "study.txt";
    std::ofstream(csv_path) << qem::study_csv(table);
    std::ofstream(txt_path) << qem::study_text(table);

    std::cout << qem::study_text(table);
    std::cout << "wrote " << csv_path.string() << " and " << txt_path.string() << "\n";
    return 0;
}

struct FixtureReport {
    std::string label;
    double got;
    double reported;
};

void print_reports(const std::string& name, const std::vector<FixtureReport>& reports) {
    std::cout << "fixture: " << name << "\n";
    for (const auto& r : reports) {
        std::cout << "  " << r.label << " = " << format_g(r.got) << "   reported: " << format_g(r.reported)
                  << "   |diff| = " << format_g(std::fabs(r.got - r.reported)) << "\n";
    }
}

int cmd_fixtures(const std::string& name) {
    using namespace qem;
    if (name == "leukemia") {
        FitConfig cfg(ModelParams(ExponentialParams{1.0}));
        cfg.strategy = Strategy::exact_em;
        cfg.epsilon = 1e-9;
        cfg.max_iterations = 10000;
        const auto r = run_fit(ModelTag::exponential, fixtures::leukemia(), cfg);
        print_reports(name, {{"sigma (mean remission)", 1.0 / r.estimate.exponential().rate, 39.89}});
        return 0;
    }
    if (name == "gupta") {
        FitConfig cfg(ModelParams(NormalParams{0.0, 1.0}));
        cfg.strategy = Strategy::exact_em;
        cfg.epsilon = 1e-15;
        cfg.max_iterations = 10;
        const auto r = run_fit(ModelTag::normal, fixtures::gupta(), cfg);
        print_reports(name, {{"mu (EM, s=10)", r.estimate.normal().location, 1.7424},
                             {"sigma (EM, s=10)", r.estimate.normal().scale, 0.0793}});
        return 0;
    }
    if (name == "balakrishnan") {
        FitConfig cfg(ModelParams(LaplaceParams{0.0, 1.0}));
        cfg.strategy = Strategy::qem;
        cfg.grid_size = 1000;
        cfg.epsilon = 1e-15;
        cfg.max_iterations = 10;
        const auto r = run_fit(ModelTag::laplace, fixtures::balakrishnan(), cfg);
        print_reports(name, {{"mu (QEM K=1000, s=10)", r.estimate.laplace().location, 49.76609},
                             {"sigma (QEM K=1000, s=10)", r.estimate.laplace().scale, 4.687432}});
        return 0;
    }
    if (name == "rayleigh20") {
        std::vector<FixtureReport> reports;
        for (double b0 : {1.0, 10.0}) {
            FitConfig cfg(ModelParams(RayleighParams{b0}));
            cfg.strategy = Strategy::qem;
            cfg.grid_size = 1000;
            cfg.epsilon = 1e-15;
            cfg.max_iterations = 10;
            const auto r = run_fit(ModelTag::rayleigh, fixtures::rayleigh20(), cfg);
            reports.push_back({"beta (QEM K=1000, s=10, from " + format_g(b0) + ")",
                               r.estimate.rayleigh().scale, 6.1338});
        }
        print_reports(name, reports);
        return 0;
    }
    if (name == "nelson-cracks") {
        FitConfig wcfg(ModelParams(WeibullParams{1.0, 1.0}));
        wcfg.strategy = Strategy::qem;
        wcfg.grid_size = 100;
        wcfg.epsilon = 1e-5;
        wcfg.max_iterations = 2000;
        const auto wr = run_fit(ModelTag::weibull, fixtures::nelson_cracks(), wcfg);

        FitConfig ecfg(ModelParams(ExponentialParams{1.0}));
        ecfg.strategy = Strategy::qem;
        ecfg.grid_size = 10000;
        ecfg.epsilon = 1e-5;
        ecfg.max_iterations = 2000;
        const auto er = run_fit(ModelTag::exponential, fixtures::nelson_cracks(), ecfg);

        print_reports(name, {{"lambda (weibull QEM K=100)", wr.estimate.weibull().rate, 0.001674018},
                             {"beta (weibull QEM K=100)", wr.estimate.weibull().shape, 1.497657},
                             {"lambda (exponential QEM K=10000)", er.estimate.exponential().rate,
                              0.01209699}});
        return 0;
    }
    throw UsageError("unknown fixture '" + name + "' (try: leukemia, gupta, balakrishnan, "
                     "rayleigh20, nelson-cracks)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum-likelihood fitting of interval-censored and grouped lifetime data\n"
                 "by the EM algorithm with exact, Monte Carlo (MCEM), and quantile-grid (QEM)\n"
                 "E-steps."};
    app.require_subcommand(1);

    // fit
    std::string model, data_path, strategy = "qem", init_csv, scheme = "midpoint", output = "text";
    bool grouped = false, trace = false;
    int k = 1000, max_iter = 500;
    double eps = 1e-5;
    std::optional<std::uint64_t> seed;
    auto* fit = app.add_subcommand("fit", "Fit a lifetime model to interval or grouped CSV data");
    fit->add_option("--model", model, "exponential|normal|laplace|rayleigh|weibull")->required();
    fit->add_option("--data", data_path, "CSV path (lower,upper or lower,upper,count)")->required();
    fit->add_flag("--grouped", grouped, "data file uses the grouped lower,upper,count schema");
    fit->add_option("--strategy", strategy, "em|mcem|qem (default qem)");
    fit->add_option("--k", k, "grid/sample size K (default 1000)");
    fit->add_option("--eps", eps, "relative stopping precision (default 1e-5)");
    fit->add_option("--max-iter", max_iter, "iteration cap (default 500)");
    fit->add_option("--seed", seed, "MCEM seed (unseeded runs draw one from the OS)");
    fit->add_option("--init", init_csv, "comma-separated starting parameters");
    fit->add_option("--xi-scheme", scheme, "midpoint|left|shifted (default midpoint)");
    fit->add_flag("--trace", trace, "print the per-iteration parameter table");
    fit->add_option("--output", output, "text|json (default text)");

    // simulate
    std::string config_path, out_dir = ".";
    auto* sim = app.add_subcommand("simulate", "Run a bias/MSE/SRE simulation study");
    sim->add_option("--config", config_path, "flat key = value study configuration")->required();
    sim->add_option("--out", out_dir, "output directory for study.csv / study.txt");

    // fixtures
    std::string fixture_name;
    auto* fx = app.add_subcommand("fixtures", "Replay an embedded reference dataset");
    fx->add_option("--name", fixture_name,
                   "leukemia|gupta|balakrishnan|rayleigh20|nelson-cracks")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (fit->parsed())
            return cmd_fit(model, data_path, grouped, strategy, k, eps, max_iter, seed, init_csv,
                           scheme, trace, output);
        if (sim->parsed())
            return cmd_simulate(config_path, out_dir);
        return cmd_fixtures(fixture_name);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const qem::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const qem::FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitFit;
    } catch (const qem::ZeroMassError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitFit;
    } catch (const qem::DegenerateMStepError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitFit;
    } catch (const qem::NoUniqueRootError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitFit;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
