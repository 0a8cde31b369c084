#include "trigof/simharness.hpp"

#include "trigof/errors.hpp"
#include "trigof/gof.hpp"
#include "trigof/rng.hpp"
#include "trigof/scaling.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace trigof::sim {

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (jobs < t) t = static_cast<unsigned>(std::max<std::size_t>(1, jobs));
    return t;
}

// Runs body(rep) for rep in [0, reps) on `threads` workers.
template <class Body>
void parallel_reps(std::size_t reps, unsigned threads, Body&& body) {
    const unsigned nt = worker_count(threads, reps);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= reps) break;
            body(rep);
        }
    };
    if (nt == 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(work);
}

void draw(const Cell& cell, rng::Stream& stream, std::span<double> out) {
    if (cell.data)
        sample_into(cell.data->family, cell.data->theta, stream, out);
    else
        sample_into(cell.family, cell.theta, stream, out);
}

CellReport run_cell(const Cell& cell, std::size_t n, std::uint64_t cell_key, const StudyConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    CellReport rep;
    rep.label = cell.label;
    rep.n = n;
    rep.reps = cfg.reps;
    const double crit = -2.0 * std::log(cfg.alpha_level);
    const KnownMask mask = cell.mask();

    std::vector<signed char> outcome(cfg.reps, 0);
    parallel_reps(cfg.reps, cfg.threads, [&](std::size_t r) {
        thread_local Sample x;
        x.resize(n);
        auto stream = rng::Stream::substream(cfg.seed, cell_key, r);
        try {
            draw(cell, stream, x);
            const FitResult f = fit(cell.family, cell.kind, mask, x);
            if (!f.converged) throw EstimationError("fit did not converge", f.residual);
            const TestResult t = evaluate(cell.family, cell.kind, mask, f.theta, x);
            outcome[r] = t.tn > crit ? 1 : 0;
        } catch (const Error&) {
            outcome[r] = -1;
        }
    });

    for (signed char o : outcome) {
        if (o < 0) ++rep.failures;
        if (o > 0) ++rep.rejections;
    }
    const std::size_t done = rep.reps - rep.failures;
    if (done > 0) {
        rep.rate = static_cast<double>(rep.rejections) / static_cast<double>(done);
        rep.std_error = std::sqrt(rep.rate * (1.0 - rep.rate) / static_cast<double>(done));
    } else {
        rep.error = "every replication failed";
    }
    rep.flagged = static_cast<double>(rep.failures) >= 0.01 * static_cast<double>(rep.reps);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

StudyReport run_study(const StudyConfig& cfg) {
    validate(cfg);
    StudyReport out;
    std::uint64_t key = 0;
    for (const Cell& cell : cfg.cells) {
        for (std::size_t n : cfg.n_grid) {
            const std::uint64_t k = key++;
            try {
                out.cells.push_back(run_cell(cell, n, k, cfg));
            } catch (const Error& e) {
                CellReport failed;
                failed.label = cell.label;
                failed.n = n;
                failed.reps = cfg.reps;
                failed.flagged = true;
                failed.error = e.what();
                out.cells.push_back(failed);
            }
        }
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) throw DataError("not a number: '" + s + "'", line);
    return v;
}

std::uint64_t to_count(const std::string& s, std::size_t line) {
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) throw DataError("not a non-negative integer: '" + s + "'", line);
    return v;
}

ParamVector to_vector(const std::string& s, std::size_t line) {
    ParamVector v;
    for (const auto& item : split(s, ',')) v.push_back(to_double(item, line));
    return v;
}

}  // namespace

KnownMask Cell::mask() const {
    KnownMask m = KnownMask::none(family);
    for (auto [i, v] : known) m.fix(i, v);
    return m;
}

void validate(const StudyConfig& cfg) {
    if (cfg.reps < 100) throw ConfigError("study: reps must be at least 100");
    if (cfg.n_grid.empty()) throw ConfigError("study: empty n grid");
    if (cfg.cells.empty()) throw ConfigError("study: no cells");
    if (!(cfg.alpha_level > 0.0 && cfg.alpha_level < 1.0)) throw ConfigError("study: alpha must lie in (0, 1)");
    for (std::size_t n : cfg.n_grid)
        if (n < 2) throw ConfigError("study: sample sizes must be at least 2");
    for (const Cell& c : cfg.cells) {
        trigof::validate(c.family, c.theta);
        const KnownMask m = c.mask();
        if (!m.all_known() && !has_estimator(c.family, c.kind))
            throw ConfigError("study cell '" + c.label + "': no " + to_string(c.kind) + " estimator");
        if (!supports_mask(c.family, c.kind, m))
            throw ConfigError("study cell '" + c.label + "': mask not supported");
        if (!supports(c.family, c.kind))
            throw ConfigError("study cell '" + c.label + "': no covariance matrices for this estimator");
        if (c.data) trigof::validate(c.data->family, c.data->theta);
    }
}

StudyReport level_study(const StudyConfig& cfg) { return run_study(cfg); }

StudyReport power_snapshot(const StudyConfig& cfg) {
    if (cfg.cells.empty()) throw ConfigError("power snapshot: no alternatives");
    for (const Cell& c : cfg.cells)
        if (!c.data) throw ConfigError("power snapshot: cell '" + c.label + "' has no data source");
    return run_study(cfg);
}

StudyConfig default_snapshot(std::vector<std::size_t> n_grid, std::size_t reps, std::uint64_t seed) {
    StudyConfig cfg;
    cfg.n_grid = std::move(n_grid);
    cfg.reps = reps;
    cfg.seed = seed;
    auto cell = [](std::string label, DataSource d) {
        return Cell{std::move(label), FamilyId::laplace, EstimatorKind::mm, {0.0, 1.0}, {}, std::move(d)};
    };
    cfg.cells.push_back(cell("laplace", {FamilyId::laplace, {0.0, 1.0}}));
    cfg.cells.push_back(cell("normal", {FamilyId::normal, {0.0, 1.0}}));
    cfg.cells.push_back(cell("student-t(5)", {FamilyId::student_t, {5.0, 0.0, 1.0}}));
    cfg.cells.push_back(cell("logistic", {FamilyId::logistic, {0.0, 1.0}}));
    return cfg;
}

CovarianceCheck covariance_check(const Cell& cell, std::size_t n, std::size_t reps, std::uint64_t seed,
                                 unsigned threads) {
    if (reps < 2) throw ConfigError("covariance check: need at least 2 replications");
    const KnownMask mask = cell.mask();
    std::vector<std::array<double, 2>> z(reps);
    std::vector<char> ok(reps, 0);
    const double rn = std::sqrt(static_cast<double>(n));
    parallel_reps(reps, threads, [&](std::size_t r) {
        thread_local Sample x;
        x.resize(n);
        auto stream = rng::Stream::substream(seed, 0, r);
        try {
            draw(cell, stream, x);
            const FitResult f = fit(cell.family, cell.kind, mask, x);
            if (!f.converged) return;
            const TrigMoments m = trig_moments(cell.family, f.theta, x);
            z[r] = {rn * m.c, rn * m.s};
            ok[r] = 1;
        } catch (const Error&) {
        }
    });

    CovarianceCheck out;
    out.reps = reps;
    double mean[2] = {0.0, 0.0};
    std::size_t k = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        if (!ok[r]) continue;
        ++k;
        mean[0] += z[r][0];
        mean[1] += z[r][1];
    }
    out.failures = reps - k;
    if (k < 2) throw EstimationError("covariance check: too few successful replications", 0.0);
    mean[0] /= static_cast<double>(k);
    mean[1] /= static_cast<double>(k);

    out.empirical = linalg::Matrix(2, 2);
    out.std_error = linalg::Matrix(2, 2);
    out.sigma = sigma(cell.family, cell.kind, cell.theta, mask);
    const double dk = static_cast<double>(k);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            // Products of centred components; their mean estimates the
            // covariance and their spread gives its standard error.
            double s1 = 0.0;
            double s2 = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                if (!ok[r]) continue;
                const double w = (z[r][i] - mean[i]) * (z[r][j] - mean[j]);
                s1 += w;
                s2 += w * w;
            }
            const double m = s1 / dk;
            out.empirical(i, j) = s1 / (dk - 1.0);
            out.std_error(i, j) = std::sqrt(std::max(0.0, s2 / dk - m * m) / dk);
            const double zval = std::abs(out.empirical(i, j) - out.sigma(i, j)) / out.std_error(i, j);
            out.max_z = std::max(out.max_z, zval);
        }
    }
    return out;
}

StudyConfig parse_config(std::istream& in) {
    StudyConfig cfg;
    Cell* cur = nullptr;
    std::optional<FamilyId> data_family;
    ParamVector data_theta;
    std::vector<std::string> known_text;
    std::size_t lineno = 0;

    // Binds the pending known/data keys of the current cell once its family is known.
    auto finish = [&](std::size_t line) {
        if (!cur) return;
        if (cur->theta.empty()) throw DataError("cell '" + cur->label + "' has no theta", line);
        for (const auto& kv : known_text) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw DataError("known binding must be name=value: '" + kv + "'", line);
            const int idx = param_index(cur->family, trim(kv.substr(0, eq)));
            cur->known.emplace_back(idx, to_double(trim(kv.substr(eq + 1)), line));
        }
        if (data_family) {
            if (data_theta.empty()) throw DataError("cell '" + cur->label + "' has data_family but no data_theta", line);
            cur->data = DataSource{*data_family, data_theta};
        }
        if (cur->label.empty()) cur->label = std::string(family_name(cur->family)) + "-" + to_string(cur->kind);
        known_text.clear();
        data_family.reset();
        data_theta.clear();
    };

    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line == "[cell]") {
            finish(lineno);
            cfg.cells.push_back(Cell{"", FamilyId::normal, EstimatorKind::ml, {}, {}, std::nullopt});
            cur = &cfg.cells.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("expected key = value", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (!cur) {
                if (key == "reps") cfg.reps = to_count(val, lineno);
                else if (key == "alpha") cfg.alpha_level = to_double(val, lineno);
                else if (key == "seed") cfg.seed = to_count(val, lineno);
                else if (key == "threads") cfg.threads = static_cast<unsigned>(to_count(val, lineno));
                else if (key == "n") {
                    cfg.n_grid.clear();
                    for (const auto& item : split(val, ',')) cfg.n_grid.push_back(to_count(item, lineno));
                } else {
                    throw DataError("unknown key '" + key + "'", lineno);
                }
                continue;
            }
            if (key == "label") cur->label = val;
            else if (key == "family") cur->family = family_from_name(val);
            else if (key == "estimator") cur->kind = estimator_from_name(val);
            else if (key == "theta") cur->theta = to_vector(val, lineno);
            else if (key == "known") known_text = split(val, ',');
            else if (key == "data_family") data_family = family_from_name(val);
            else if (key == "data_theta") data_theta = to_vector(val, lineno);
            else throw DataError("unknown cell key '" + key + "'", lineno);
        } catch (const DataError&) {
            throw;
        } catch (const Error& e) {
            throw DataError(e.what(), lineno);
        }
    }
    try {
        finish(lineno);
    } catch (const DataError&) {
        throw;
    } catch (const Error& e) {
        throw DataError(e.what(), lineno);
    }
    return cfg;
}

StudyConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open study config '" + path + "'");
    return parse_config(in);
}

void write_csv(std::ostream& out, const StudyReport& report, int digits) {
    out << "label,n,reps,rejections,failures,rate,std_error,wall_seconds,flagged,error\n";
    out << std::setprecision(digits);
    for (const auto& c : report.cells) {
        out << c.label << ',' << c.n << ',' << c.reps << ',' << c.rejections << ',' << c.failures << ',' << c.rate
            << ',' << c.std_error << ',' << c.wall_seconds << ',' << (c.flagged ? 1 : 0) << ',' << '"' << c.error
            << '"' << '\n';
    }
}

}  // namespace trigof::sim
