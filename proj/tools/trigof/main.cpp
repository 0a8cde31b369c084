// trigof: goodness-of-fit testing from trigonometric moments of the PIT.
//
// Exit status: 0 success, 2 data or numerical failure, 64 usage error.

#include "trigof/errors.hpp"
#include "trigof/estimate.hpp"
#include "trigof/families.hpp"
#include "trigof/gof.hpp"
#include "trigof/hconst.hpp"
#include "trigof/io.hpp"
#include "trigof/power.hpp"
#include "trigof/scaling.hpp"
#include "trigof/simharness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace trigof;

constexpr int exit_ok = 0;
constexpr int exit_data = 2;
constexpr int exit_usage = 64;

// Bad flags that only surface after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int g_digits = 17;

double rounded(double v) {
    if (g_digits >= 17 || !std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", g_digits, v);
    return std::strtod(buf, nullptr);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", g_digits, v);
    return buf;
}

json to_json(const linalg::Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(rounded(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(rounded(x));
    return a;
}

linalg::Matrix matrix_from_json(const json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
    if (rows < 1 || rows > 3 || cols < 1 || cols > 3) throw DataError("matrix in JSON has unsupported shape");
    linalg::Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int jj = 0; jj < cols; ++jj) m(i, jj) = j.at(i).at(jj).get<double>();
    return m;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw UsageError(std::string(what) + ": empty entry in '" + s + "'");
        const char* first = item.data() + b;
        const char* last = item.data() + e + 1;
        double v = 0.0;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || p != last) throw UsageError(std::string(what) + ": not a number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(std::string(what) + ": empty list");
    return out;
}

// a:b:step, or a single value.
std::vector<double> parse_grid(const std::string& s, const char* what) {
    if (s.find(':') == std::string::npos) return parse_list(s, what);
    std::string t = s;
    for (char& c : t)
        if (c == ':') c = ',';
    const auto p = parse_list(t, what);
    if (p.size() != 3 || !(p[2] > 0.0) || p[1] < p[0])
        throw UsageError(std::string(what) + ": expected from:to:step with step > 0");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((p[1] - p[0]) / p[2] + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(p[0] + static_cast<double>(k) * p[2]);
    return out;
}

FamilyId resolve_family(const std::string& name) {
    try {
        return family_from_name(name);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

EstimatorKind resolve_estimator(const std::string& name) {
    try {
        return estimator_from_name(name);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

KnownMask resolve_mask(FamilyId fam, const std::vector<std::string>& bindings) {
    KnownMask mask = KnownMask::none(fam);
    for (const auto& kv : bindings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--known expects name=value, got '" + kv + "'");
        const auto value = parse_list(kv.substr(eq + 1), "--known");
        if (value.size() != 1) throw UsageError("--known expects a single value in '" + kv + "'");
        try {
            mask.fix(fam, kv.substr(0, eq), value[0]);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    return mask;
}

ParamVector resolve_theta(FamilyId fam, const std::string& text) {
    ParamVector theta = parse_list(text, "--theta");
    try {
        validate(fam, theta);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return theta;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("TRIGOF_SEED")) {
        std::uint64_t v = 0;
        const std::string s(env);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw UsageError("TRIGOF_SEED must be a non-negative integer");
        return v;
    }
    return 20240901;
}

json params_json(FamilyId fam) {
    json a = json::array();
    for (auto p : info(fam).params) a.push_back(std::string(p));
    return a;
}

json test_json(const TestResult& r, const KnownMask& mask, double alpha) {
    json j;
    j["family"] = std::string(family_name(r.family));
    j["estimator"] = to_string(r.kind);
    j["n"] = r.moments.n;
    j["params"] = params_json(r.family);
    j["theta"] = to_json(r.fit.theta);
    json known = json::object();
    for (int i : mask.known_indices()) known[std::string(info(r.family).params[i])] = rounded(mask.value(i));
    j["known"] = known;
    j["estimated"] = r.estimated;
    j["fit"] = {{"converged", r.fit.converged},
                {"iterations", r.fit.iterations},
                {"residual", rounded(r.fit.residual)},
                {"note", r.fit.note}};
    j["c_n"] = rounded(r.moments.c);
    j["s_n"] = rounded(r.moments.s);
    j["sigma"] = to_json(r.sigma);
    j["t_n"] = rounded(r.tn);
    j["p_chi2"] = rounded(r.p_chi2);
    j["z_c"] = rounded(r.zc);
    j["z_s"] = rounded(r.zs);
    j["alpha"] = rounded(alpha);
    j["reject"] = r.p_chi2 < alpha;
    if (r.mc) {
        j["mc"] = {{"reps", r.mc->reps},
                   {"completed", r.mc->completed},
                   {"failures", r.mc->failures},
                   {"exceed", r.mc->exceed},
                   {"p_value", rounded(r.mc->p_value)},
                   {"raw_proportion", rounded(r.mc->raw_proportion)}};
    } else {
        j["mc"] = nullptr;
    }
    return j;
}

// ------------------------------------------------------------------ test

struct TestArgs {
    std::string family;
    std::string estimator = "ml";
    std::vector<std::string> known;
    double alpha = 0.05;
    std::size_t mc_reps = 10000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string input;
};

int cmd_test(const TestArgs& a) {
    const FamilyId fam = resolve_family(a.family);
    const EstimatorKind kind = resolve_estimator(a.estimator);
    const KnownMask mask = resolve_mask(fam, a.known);
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    if (!mask.all_known() && !has_estimator(fam, kind))
        throw UsageError(std::string(family_name(fam)) + " has no " + to_string(kind) + " estimator");
    if (!supports_mask(fam, kind, mask))
        throw UsageError("this combination of known parameters is not supported for " + std::string(family_name(fam)));
    const std::uint64_t seed = a.seed ? *a.seed : default_seed();

    const Sample x = io::load_sample(a.input);
    std::optional<McOptions> mc;
    if (a.mc_reps > 0) mc = McOptions{a.mc_reps, seed, a.threads, 0.01};
    const TestResult r = run_test(fam, kind, mask, x, mc);
    json j = test_json(r, mask, a.alpha);
    if (mc) j["mc"]["seed"] = seed;
    std::cout << j.dump(2) << '\n';
    return exit_ok;
}

// ------------------------------------------------------------- constants

struct ConstantsArgs {
    int h = 0;
    std::string args;
    bool logistic = false;
};

int cmd_constants(const ConstantsArgs& a) {
    json j;
    if (a.logistic) {
        const auto k = hconst::logistic_constants();
        j["logistic"] = {{"c_cos", rounded(k.c_cos)},
                         {"c_sin", rounded(k.c_sin)},
                         {"m_cos", rounded(k.m_cos)},
                         {"m_sin", rounded(k.m_sin)}};
    }
    if (a.h != 0) {
        if (a.h < 1 || a.h > 37) throw UsageError("--h must be in 1..37");
        if (a.args.empty()) throw UsageError("--h needs --args");
        const auto args = parse_list(a.args, "--args");
        if (static_cast<int>(args.size()) != hconst::arity(a.h))
            throw UsageError("h" + std::to_string(a.h) + " takes " + std::to_string(hconst::arity(a.h)) +
                             " argument(s)");
        double v;
        try {
            v = hconst::h(a.h, args);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        j["index"] = a.h;
        j["args"] = to_json(args);
        j["value"] = rounded(v);
    }
    if (!a.logistic && a.h == 0) throw UsageError("constants: give --h with --args, or --logistic");
    std::cout << j.dump(2) << '\n';
    return exit_ok;
}

// -------------------------------------------------------------- matrices

struct MatricesArgs {
    std::string family;
    std::string estimator = "ml";
    std::string theta;
    std::vector<std::string> known;
    std::string verify;
};

int cmd_matrices_verify(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
    }
    try {
        const FamilyId fam = resolve_family(j.at("family").get<std::string>());
        const EstimatorKind kind = resolve_estimator(j.at("estimator").get<std::string>());
        MatrixSet ms{fam, kind, matrix_from_json(j.at("G")), matrix_from_json(j.at("R")),
                     matrix_from_json(j.at("J")), j.at("required_known").get<std::vector<int>>()};
        KnownMask mask = KnownMask::none(fam);
        for (auto& [name, v] : j.at("known").items()) mask.fix(fam, name, v.get<double>());
        const linalg::Matrix s = sigma(ms, mask);
        const linalg::Matrix stored = matrix_from_json(j.at("sigma"));
        const bool same = s == stored;
        json out = {{"identical", same}, {"sigma", to_json(s)}};
        std::cout << out.dump(2) << '\n';
        return same ? exit_ok : exit_data;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed matrices JSON: ") + e.what());
    }
}

int cmd_matrices(const MatricesArgs& a) {
    if (!a.verify.empty()) return cmd_matrices_verify(a.verify);
    if (a.family.empty() || a.theta.empty()) throw UsageError("matrices: --family and --theta are required");
    const FamilyId fam = resolve_family(a.family);
    const EstimatorKind kind = resolve_estimator(a.estimator);
    const ParamVector theta = resolve_theta(fam, a.theta);
    const KnownMask mask = resolve_mask(fam, a.known);
    if (!supports(fam, kind)) throw UsageError(std::string(family_name(fam)) + " has no " + to_string(kind) + " matrices");
    const MatrixSet ms = matrices(fam, kind, theta);
    json j;
    j["family"] = std::string(family_name(fam));
    j["estimator"] = to_string(kind);
    j["params"] = params_json(fam);
    j["theta"] = to_json(theta);
    json known = json::object();
    for (int i : mask.known_indices()) known[std::string(info(fam).params[i])] = rounded(mask.value(i));
    j["known"] = known;
    j["required_known"] = ms.required_known;
    j["G"] = to_json(ms.G);
    j["R"] = to_json(ms.R);
    j["J"] = to_json(ms.J);
    j["sigma"] = to_json(sigma(ms, mask));
    std::cout << j.dump(2) << '\n';
    return exit_ok;
}

// ----------------------------------------------------------------- power

struct PowerArgs {
    std::string pcase;
    std::string estimator = "ml";
    double lambda = std::nan("");
    double alpha = 0.05;
    std::string delta;
    std::string delta1;
    std::string delta2;
    bool empirical = false;
    std::size_t n = 2000;
    std::size_t reps = 4000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

int cmd_power(const PowerArgs& a) {
    power::LocalAlternative alt;
    try {
        alt.kind = power::case_from_name(a.pcase);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    alt.estimator = resolve_estimator(a.estimator);
    alt.alpha_level = a.alpha;
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    switch (alt.kind) {
        case power::Case::gamma_vs_gg:
            alt.theta0 = {std::isnan(a.lambda) ? 1.0 : a.lambda, 1.0};
            break;
        case power::Case::weibull_vs_gg:
            if (!std::isnan(a.lambda)) throw UsageError("--lambda does not apply to the weibull case");
            alt.theta0 = {1.0, 1.0};
            break;
        case power::Case::epd_vs_apd:
            alt.theta0 = {std::isnan(a.lambda) ? 1.5 : a.lambda, 0.0, 1.0};
            break;
    }
    if (alt.kind != power::Case::epd_vs_apd && alt.estimator != EstimatorKind::ml)
        throw UsageError("only --estimator ml applies to the " + a.pcase + " case");

    std::vector<double> d1;
    std::vector<double> d2;
    const bool two = alt.kind == power::Case::epd_vs_apd;
    if (two) {
        if (!a.delta.empty()) throw UsageError("the epd case takes --delta1 and/or --delta2");
        const auto g1 = a.delta1.empty() ? std::vector<double>{0.0} : parse_grid(a.delta1, "--delta1");
        const auto g2 = a.delta2.empty() ? std::vector<double>{0.0} : parse_grid(a.delta2, "--delta2");
        if (a.delta1.empty() && a.delta2.empty()) throw UsageError("the epd case needs --delta1 or --delta2");
        for (double x : g1)
            for (double y : g2) {
                d1.push_back(x);
                d2.push_back(y);
            }
    } else {
        if (!a.delta1.empty() || !a.delta2.empty()) throw UsageError("this case takes --delta");
        d1 = a.delta.empty() ? parse_grid(alt.kind == power::Case::gamma_vs_gg ? "0:30:0.5" : "0:40:0.5", "--delta")
                             : parse_grid(a.delta, "--delta");
        d2.assign(d1.size(), 0.0);
    }
    try {
        power::validate_alternative(alt);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    const auto curve = power::power_curve(alt, d1, d2);
    if (!a.empirical) {
        std::cout << (two ? "delta1,delta2,ncp,power\n" : "delta,ncp,power\n");
        for (const auto& p : curve) {
            if (two) std::cout << fmt(p.delta1) << ',' << fmt(p.delta2);
            else std::cout << fmt(p.delta1);
            std::cout << ',' << fmt(p.ncp) << ',' << fmt(p.power) << '\n';
        }
        return exit_ok;
    }
    const power::SimOptions so{a.n, a.reps, a.seed ? *a.seed : default_seed(), a.threads};
    std::cout << (two ? "delta1,delta2,empirical,std_error,failures,asymptotic\n"
                      : "delta,empirical,std_error,failures,asymptotic\n");
    for (const auto& p : curve) {
        const auto e = power::empirical_power(alt, p.delta1, p.delta2, so);
        if (two) std::cout << fmt(p.delta1) << ',' << fmt(p.delta2);
        else std::cout << fmt(p.delta1);
        std::cout << ',' << fmt(e.rate) << ',' << fmt(e.std_error) << ',' << e.failures << ',' << fmt(p.power) << '\n';
    }
    return exit_ok;
}

// --------------------------------------------------------------- ellipse

struct EllipseArgs {
    std::string sigma;
    std::string family;
    std::string estimator = "ml";
    std::string theta;
    std::vector<std::string> known;
    double level = 0.95;
    int points = 256;
};

int cmd_ellipse(const EllipseArgs& a) {
    linalg::Matrix s;
    if (!a.sigma.empty()) {
        const auto v = parse_list(a.sigma, "--sigma");
        if (v.size() != 3) throw UsageError("--sigma expects s11,s12,s22");
        s = linalg::Matrix(2, 2, {v[0], v[1], v[1], v[2]});
    } else {
        if (a.family.empty() || a.theta.empty()) throw UsageError("ellipse: give --sigma, or --family with --theta");
        const FamilyId fam = resolve_family(a.family);
        const EstimatorKind kind = resolve_estimator(a.estimator);
        const ParamVector theta = resolve_theta(fam, a.theta);
        const KnownMask mask = resolve_mask(fam, a.known);
        if (!supports(fam, kind)) throw UsageError(std::string(family_name(fam)) + " has no " + to_string(kind) + " matrices");
        s = sigma(fam, kind, theta, mask);
    }
    if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
    if (a.points < 3) throw UsageError("--points must be at least 3");
    const Ellipse e = ellipse(s, a.level, a.points);
    std::cout << "# level=" << fmt(e.level) << " q=" << fmt(e.q) << " semi_major=" << fmt(e.semi_major)
              << " semi_minor=" << fmt(e.semi_minor) << " rotation=" << fmt(e.rotation) << '\n';
    std::cout << "# c_threshold=" << fmt(e.c_threshold) << " s_threshold=" << fmt(e.s_threshold) << '\n';
    std::cout << "index,c,s\n";
    for (std::size_t k = 0; k < e.boundary.size(); ++k)
        std::cout << k << ',' << fmt(e.boundary[k].c) << ',' << fmt(e.boundary[k].s) << '\n';
    return exit_ok;
}

// ----------------------------------------------------------------- study

struct StudyArgs {
    std::string config;
    bool snapshot = false;
    std::string n = "50,100,200";
    std::size_t reps = 1000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string json_path;
};

int cmd_study(const StudyArgs& a) {
    sim::StudyConfig cfg;
    if (a.snapshot) {
        std::vector<std::size_t> grid;
        for (double v : parse_list(a.n, "--n")) {
            if (!(v >= 2.0) || v != std::floor(v)) throw UsageError("--n entries must be integers >= 2");
            grid.push_back(static_cast<std::size_t>(v));
        }
        cfg = sim::default_snapshot(grid, a.reps, a.seed ? *a.seed : default_seed());
    } else {
        if (a.config.empty()) throw UsageError("study: give --config FILE or --snapshot");
        cfg = sim::load_config(a.config);
        if (a.seed) cfg.seed = *a.seed;
    }
    if (a.threads) cfg.threads = a.threads;
    try {
        sim::validate(cfg);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    const auto report = a.snapshot ? sim::power_snapshot(cfg) : sim::level_study(cfg);
    sim::write_csv(std::cout, report, g_digits);
    if (!a.json_path.empty()) {
        json j;
        j["seed"] = cfg.seed;
        j["reps"] = cfg.reps;
        j["alpha"] = rounded(cfg.alpha_level);
        j["cells"] = json::array();
        for (const auto& c : report.cells) {
            j["cells"].push_back({{"label", c.label},
                                  {"n", c.n},
                                  {"reps", c.reps},
                                  {"rejections", c.rejections},
                                  {"failures", c.failures},
                                  {"rate", rounded(c.rate)},
                                  {"std_error", rounded(c.std_error)},
                                  {"wall_seconds", c.wall_seconds},
                                  {"flagged", c.flagged},
                                  {"error", c.error}});
        }
        std::ofstream out(a.json_path);
        if (!out) throw DataError("cannot write '" + a.json_path + "'");
        out << j.dump(2) << '\n';
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Goodness-of-fit tests from trigonometric moments of the probability integral transform"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--digits", g_digits, "Significant digits in numeric output")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Fit a family to a data file and run the test");
    test->add_option("--family", ta.family, "Null family")->required();
    test->add_option("--estimator", ta.estimator, "ml or mm")->capture_default_str();
    test->add_option("--known", ta.known, "Known parameter, name=value (repeatable)");
    test->add_option("--alpha", ta.alpha, "Significance level")->capture_default_str();
    test->add_option("--mc-reps", ta.mc_reps, "Monte-Carlo replications (0 disables)")->capture_default_str();
    test->add_option("--seed", ta.seed, "Seed (default: TRIGOF_SEED or a fixed value)");
    test->add_option("--threads", ta.threads, "Worker threads (0: all cores)");
    test->add_option("input", ta.input, "One value per line")->required();

    ConstantsArgs ca;
    auto* constants = app.add_subcommand("constants", "Evaluate the h integrals or the logistic constants");
    constants->set_help_flag("--help", "Print this help message and exit");
    constants->add_option("--h", ca.h, "Index 1..37");
    constants->add_option("--args", ca.args, "Comma-separated arguments");
    constants->add_flag("--logistic", ca.logistic, "Print the four logistic constants");

    MatricesArgs ma;
    auto* mats = app.add_subcommand("matrices", "Print G, R, J and Sigma");
    mats->add_option("--family", ma.family, "Family");
    mats->add_option("--estimator", ma.estimator, "ml or mm")->capture_default_str();
    mats->add_option("--theta", ma.theta, "Comma-separated parameter values");
    mats->add_option("--known", ma.known, "Known parameter, name=value (repeatable)");
    mats->add_option("--verify", ma.verify, "Recompute Sigma from a saved matrices JSON file");

    PowerArgs pa;
    auto* pw = app.add_subcommand("power", "Asymptotic (or simulated) power under local alternatives");
    pw->add_option("--case", pa.pcase, "gamma, weibull or epd")->required();
    pw->add_option("--estimator", pa.estimator, "ml or mm (mm: epd only)")->capture_default_str();
    pw->add_option("--lambda", pa.lambda, "Null shape (gamma: default 1; epd: default 1.5)");
    pw->add_option("--alpha", pa.alpha, "Significance level")->capture_default_str();
    pw->add_option("--delta", pa.delta, "from:to:step or list (gamma, weibull)");
    pw->add_option("--delta1", pa.delta1, "Asymmetry drift grid (epd)");
    pw->add_option("--delta2", pa.delta2, "Tail drift grid (epd)");
    pw->add_flag("--empirical", pa.empirical, "Simulate the rejection rate at each grid point");
    pw->add_option("--n", pa.n, "Sample size for --empirical")->capture_default_str();
    pw->add_option("--reps", pa.reps, "Replications for --empirical")->capture_default_str();
    pw->add_option("--seed", pa.seed, "Seed (default: TRIGOF_SEED or a fixed value)");
    pw->add_option("--threads", pa.threads, "Worker threads (0: all cores)");

    EllipseArgs ea;
    auto* ell = app.add_subcommand("ellipse", "Confidence ellipse for sqrt(n) (C_n, S_n)");
    ell->add_option("--sigma", ea.sigma, "s11,s12,s22");
    ell->add_option("--family", ea.family, "Family (instead of --sigma)");
    ell->add_option("--estimator", ea.estimator, "ml or mm")->capture_default_str();
    ell->add_option("--theta", ea.theta, "Comma-separated parameter values");
    ell->add_option("--known", ea.known, "Known parameter, name=value (repeatable)");
    ell->add_option("--level", ea.level, "Coverage level")->capture_default_str();
    ell->add_option("--points", ea.points, "Boundary points")->capture_default_str();

    StudyArgs sa;
    auto* study = app.add_subcommand("study", "Run a seeded level study or the built-in power snapshot");
    study->add_option("--config", sa.config, "Study config file");
    study->add_flag("--snapshot", sa.snapshot, "Laplace-null power snapshot instead of a config file");
    study->add_option("--n", sa.n, "Sample sizes for --snapshot")->capture_default_str();
    study->add_option("--reps", sa.reps, "Replications for --snapshot")->capture_default_str();
    study->add_option("--seed", sa.seed, "Seed (default: config value, TRIGOF_SEED or a fixed value)");
    study->add_option("--threads", sa.threads, "Worker threads (0: all cores)");
    study->add_option("--json", sa.json_path, "Also write a JSON summary here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*test) return cmd_test(ta);
        if (*constants) return cmd_constants(ca);
        if (*mats) return cmd_matrices(ma);
        if (*pw) return cmd_power(pa);
        if (*ell) return cmd_ellipse(ea);
        if (*study) return cmd_study(sa);
    } catch (const UsageError& e) {
        std::cerr << "trigof: " << e.what() << '\n';
        return exit_usage;
    } catch (const DataError& e) {
        std::cerr << "trigof: data error: " << e.what() << '\n';
        return exit_data;
    } catch (const Error& e) {
        std::cerr << "trigof: " << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
