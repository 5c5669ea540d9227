#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace rhode::harness {

/// Exit-code contract of the CLI.
enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3, kValidationFailure = 4 };

struct PointResult {
    Complex z;
    Mat2 u;
    /// Scalar family only: the Cauchy-integral value of u(z).
    std::optional<Complex> scalar_oracle;
};

struct JumpSample {
    Complex z;
    double residual;
};

struct SolveReport {
    std::vector<PointResult> points;
    std::vector<JumpSample> jump;
    double determinant_residual = 0.0;
    std::optional<double> oracle_max;
    std::optional<double> oracle_mean;
    double stage1_seconds = 0.0;
    double stage2_seconds = 0.0;
    std::size_t nodes = 0;
    bool cache_hit = false;
    std::vector<std::string> warnings;
};

struct ValidationRow {
    std::string check;
    std::string location;
    double value;
    std::optional<double> tolerance;
    bool pass() const { return !tolerance || value <= *tolerance; }
};

struct ValidateReport {
    std::vector<ValidationRow> rows;
    bool pass() const;
};

struct ConvergenceLevel {
    double step;
    std::size_t nodes;
    double max_error;
    double mean_error;
    std::optional<double> order;
};

struct ConvergeReport {
    std::string metric;
    std::vector<ConvergenceLevel> levels;
    bool monotone() const;
};

struct ComparisonRow {
    Complex z;
    Mat2 solver;
    Mat2 oracle;
    double deviation;
};

struct CompareReport {
    std::vector<ComparisonRow> rows;
    double max_deviation = 0.0;
    double mean_deviation = 0.0;
    Mat2 u_inf = Mat2::identity();
};

/// Stage 1, from the cache when `config.cache_path` names a matching file;
/// otherwise computed and, with a cache path set, written there.
ReconstructedCoefficient stage_one(const RunConfig& config, const ContourMesh& mesh, const JumpCoefficient& coef,
                                   bool* cache_hit = nullptr);

/// U at every point, evaluated on `workers` threads (0: hardware concurrency).
/// Results are returned in input order.
std::vector<Mat2> evaluate_points(const ReconstructedCoefficient& rc, const std::vector<Complex>& points,
                                  std::size_t workers);

/// Points strictly inside the cut at which jump residuals are sampled.
std::vector<Complex> jump_sample_points(const ContourMesh& mesh, std::size_t count);

SolveReport run_solve(const RunConfig& config);
ValidateReport run_validate(const RunConfig& config);
ConvergeReport run_converge(const RunConfig& config);
CompareReport run_oracle_compare(const RunConfig& config);

void write_solution_csv(std::ostream& out, const SolveReport& report);
void write_validation_csv(std::ostream& out, const ValidateReport& report);
void write_convergence_csv(std::ostream& out, const ConvergeReport& report);
void write_comparison_csv(std::ostream& out, const CompareReport& report);

/// Entry point shared by the executable and the tests. Diagnostics go to `log`.
int run_cli(int argc, const char* const* argv, std::ostream& log);

} // namespace rhode::harness
