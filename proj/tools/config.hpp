#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <rhode/rhode.hpp>

namespace rhode::harness {

enum class Mode { Solve, Validate, Converge, OracleCompare };

std::string_view to_string(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;

/// Configuration problem; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct LineSpec {
    double im = 0.0;
    double re_min = -10.0;
    double re_max = 10.0;
    std::size_t count = 100;
};

struct ToleranceBlock {
    double jump = 1e-2;
    double determinant = 1e-4;
    double concat = 1e-10;
    double exact_r = 1e-10;
    double oracle_max = 1e-2;
    double oracle_mean = 1e-3;
};

struct ScalarSpec {
    /// "exp": m = 1 + amplitude * exp(i * wavenumber * z); "rational": m = ratio(z).
    std::string form = "exp";
    Complex amplitude{0.5, 0.0};
    double wavenumber = 1.0;
    Rational ratio;
};

struct CoefficientSpec {
    std::string family;
    Rational c, p;
    Polynomial l, m, n;
    ScalarSpec scalar;
    Mat2 constant = Mat2::identity();
    std::array<Rational, 4> entries;
    /// Canonical JSON text of the block.
    std::string canonical;
};

struct RunConfig {
    std::string source = "<config>";
    Mode mode = Mode::Solve;

    CoefficientSpec coefficient;

    Complex base{0.0, 2.0};
    double truncation_height = 80.0;
    double step = 0.02;

    std::vector<Complex> points;
    std::optional<LineSpec> line;

    ToleranceBlock tolerances;
    ReconstructOptions solver;
    std::size_t workers = 0;

    std::size_t jump_points = 10;
    std::optional<double> jump_offset;

    std::optional<std::filesystem::path> csv_path;
    std::optional<std::filesystem::path> report_path;
    std::optional<std::filesystem::path> cache_path;

    HalfLineCut cut() const { return {base}; }
    ContourMesh mesh() const { return build_mesh(cut(), truncation_height, step); }
    ContourMesh mesh_with_step(double s) const { return build_mesh(cut(), truncation_height, s); }
    double offset() const { return jump_offset.value_or(10.0 * step); }

    /// Imaginary part of the evaluation line, or of the first explicit point.
    double evaluation_im() const;
};

RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// A built jump coefficient plus family-specific extras used by the oracles.
struct CoefficientBundle {
    std::shared_ptr<const JumpCoefficient> jump;
    std::optional<KhrapkovCoefficient> khrapkov;
    std::optional<ScalarFunction> scalar;
};

/// Builds the configured coefficient and checks it against `mesh`
/// (denominators, nonvanishing scalar jumps).
CoefficientBundle make_coefficient(const RunConfig& config, const ContourMesh& mesh);

/// Stable identifier of the coefficient block, stored in stage-1 caches.
std::string family_hash(const RunConfig& config);

} // namespace rhode::harness
