#pragma once

#include "trigof/estimate.hpp"
#include "trigof/families.hpp"
#include "trigof/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace trigof::sim {

struct DataSource {
    FamilyId family;
    ParamVector theta;
};

struct Cell {
    std::string label;
    FamilyId family;  // null family under test
    EstimatorKind kind = EstimatorKind::ml;
    ParamVector theta;  // null parameter used to simulate under H0
    // (index, value) pairs held fixed during estimation.
    std::vector<std::pair<int, double>> known;
    // Data-generating distribution when it differs from the null.
    std::optional<DataSource> data;

    KnownMask mask() const;
};

struct StudyConfig {
    std::vector<Cell> cells;
    std::vector<std::size_t> n_grid;
    std::size_t reps = 1000;
    double alpha_level = 0.05;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct CellReport {
    std::string label;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::size_t rejections = 0;
    std::size_t failures = 0;
    double rate = 0.0;  // rejections / (reps - failures)
    double std_error = 0.0;
    double wall_seconds = 0.0;
    bool flagged = false;  // failure fraction at or above 1%
    std::string error;     // non-empty when the whole cell failed
};

struct StudyReport {
    std::vector<CellReport> cells;
};

// Throws ConfigError on reps < 100, an empty grid or an unsupported cell.
void validate(const StudyConfig& cfg);

// Rejection rates of the chi-squared test with data drawn under each cell's
// null. Replication r of grid point k uses substream (seed, k, r).
StudyReport level_study(const StudyConfig& cfg);

// As level_study, but every cell must name a data source.
StudyReport power_snapshot(const StudyConfig& cfg);

// Laplace-null (MM) snapshot against normal, Student-t(5), logistic and
// Laplace data.
StudyConfig default_snapshot(std::vector<std::size_t> n_grid, std::size_t reps, std::uint64_t seed);

// Empirical covariance of sqrt(n) (C_n, S_n) at the fitted parameter,
// against Sigma at the true parameter.
struct CovarianceCheck {
    linalg::Matrix empirical;
    linalg::Matrix std_error;  // Monte-Carlo standard error per entry
    linalg::Matrix sigma;
    std::size_t reps = 0;
    std::size_t failures = 0;
    // max over entries of |empirical - sigma| / std_error
    double max_z = 0.0;
};

CovarianceCheck covariance_check(const Cell& cell, std::size_t n, std::size_t reps, std::uint64_t seed,
                                 unsigned threads = 0);

// Key = value text with [cell] sections; see README for the keys.
StudyConfig parse_config(std::istream& in);
StudyConfig load_config(const std::string& path);

void write_csv(std::ostream& out, const StudyReport& report, int digits = 17);

}  // namespace trigof::sim
