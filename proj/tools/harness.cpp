#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

namespace rhode::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string describe(Complex z) { return "(" + format_real(z.real()) + ", " + format_real(z.imag()) + ")"; }

using Oracle = std::function<Mat2(Complex)>;

/// Reference solution for families that have one.
Oracle make_oracle(const RunConfig& config, const CoefficientBundle& bundle, const ContourMesh& mesh,
                   Mat2* u_inf = nullptr) {
    if (bundle.scalar) {
        auto oracle = std::make_shared<ScalarCauchyOracle>(*bundle.scalar, mesh);
        return [oracle](Complex z) { return Mat2::diag((*oracle)(z), 1.0); };
    }
    if (bundle.khrapkov) {
        auto oracle = std::make_shared<CorrectedKhrapkov>(KhrapkovSolution(*bundle.khrapkov, mesh),
                                                          default_far_point(mesh.base(), config.evaluation_im()));
        if (u_inf) *u_inf = oracle->u_inf();
        return [oracle](Complex z) { return (*oracle)(z); };
    }
    throw Error(ErrorKind::UnsupportedFamily,
                "family '" + config.coefficient.family + "' has no closed-form oracle (use khrapkov, paper-test or scalar)");
}

void write_u(std::ostream& out, const Mat2& u) {
    for (Complex e : {u.m11, u.m12, u.m21, u.m22}) out << ',' << format_real(e.real()) << ',' << format_real(e.imag());
}

constexpr const char* kUHeader = "re_u11,im_u11,re_u12,im_u12,re_u21,im_u21,re_u22,im_u22";

} // namespace

bool ValidateReport::pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.pass(); });
}

bool ConvergeReport::monotone() const {
    for (std::size_t k = 1; k < levels.size(); ++k) {
        if (!(levels[k].max_error < levels[k - 1].max_error)) return false;
    }
    return true;
}

ReconstructedCoefficient stage_one(const RunConfig& config, const ContourMesh& mesh, const JumpCoefficient& coef,
                                   bool* cache_hit) {
    if (cache_hit) *cache_hit = false;
    const std::string hash = family_hash(config);
    if (config.cache_path && std::filesystem::exists(*config.cache_path)) {
        std::ifstream in(*config.cache_path);
        try {
            auto rc = read_cache(in, mesh, hash);
            rc.truncation_deviation = distance_from_identity(eval_jump(coef, mesh[0]));
            if (cache_hit) *cache_hit = true;
            return rc;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CacheMismatch) throw;
        }
    }
    auto rc = reconstruct(coef, mesh, config.solver);
    if (config.cache_path) {
        std::ofstream out(*config.cache_path);
        if (!out) throw Error(ErrorKind::CacheMismatch, "cannot write cache file " + config.cache_path->string());
        write_cache(out, rc, hash);
    }
    return rc;
}

std::vector<Mat2> evaluate_points(const ReconstructedCoefficient& rc, const std::vector<Complex>& points,
                                  std::size_t workers) {
    std::vector<Mat2> out(points.size());
    std::vector<std::exception_ptr> failures(points.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < points.size(); k = next++) {
            try {
                out[k] = evaluate_U(rc, points[k]);
            } catch (...) {
                failures[k] = std::current_exception();
            }
        }
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(points.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!failures[k]) continue;
        try {
            std::rethrow_exception(failures[k]);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(e.what()) + " [evaluation point " + std::to_string(k) + " " +
                                      describe(points[k]) + "]");
        }
    }
    return out;
}

std::vector<Complex> jump_sample_points(const ContourMesh& mesh, std::size_t count) {
    const double lo = mesh.base().imag();
    const double hi = mesh.truncation().imag();
    std::vector<Complex> out;
    for (std::size_t k = 1; k <= count; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(count + 1);
        out.emplace_back(mesh.base().real(), lo + frac * (hi - lo));
    }
    return out;
}

SolveReport run_solve(const RunConfig& config) {
    const ContourMesh mesh = config.mesh();
    const CoefficientBundle bundle = make_coefficient(config, mesh);
    SolveReport report;
    report.nodes = mesh.size();

    auto start = Clock::now();
    const ReconstructedCoefficient rc = stage_one(config, mesh, *bundle.jump, &report.cache_hit);
    report.stage1_seconds = seconds_since(start);
    report.warnings = rc.warnings;

    start = Clock::now();
    const auto values = evaluate_points(rc, config.points, config.workers);
    report.stage2_seconds = seconds_since(start);

    std::optional<ScalarCauchyOracle> scalar;
    if (bundle.scalar) scalar.emplace(*bundle.scalar, mesh);
    for (std::size_t k = 0; k < values.size(); ++k) {
        PointResult row{config.points[k], values[k], std::nullopt};
        if (scalar) row.scalar_oracle = (*scalar)(row.z);
        report.points.push_back(row);
    }

    for (Complex z : jump_sample_points(mesh, config.jump_points)) {
        report.jump.push_back({z, jump_residual(rc, *bundle.jump, z, config.offset())});
    }
    for (Complex z : config.points) report.determinant_residual = std::max(report.determinant_residual, determinant_residual(rc, z));

    if (bundle.scalar || bundle.khrapkov) {
        const Oracle oracle = make_oracle(config, bundle, mesh);
        double worst = 0.0, total = 0.0;
        for (const auto& p : report.points) {
            const double d = (p.u - oracle(p.z)).norm();
            worst = std::max(worst, d);
            total += d;
        }
        report.oracle_max = worst;
        report.oracle_mean = total / static_cast<double>(report.points.size());
    }
    return report;
}

ValidateReport run_validate(const RunConfig& config) {
    const ContourMesh mesh = config.mesh();
    const CoefficientBundle bundle = make_coefficient(config, mesh);
    const ReconstructedCoefficient rc = stage_one(config, mesh, *bundle.jump);
    const auto& tol = config.tolerances;
    ValidateReport report;

    for (Complex z : jump_sample_points(mesh, config.jump_points)) {
        report.rows.push_back({"jump", describe(z), jump_residual(rc, *bundle.jump, z, config.offset()), tol.jump});
    }
    for (Complex z : config.points) {
        report.rows.push_back({"determinant", describe(z), determinant_residual(rc, z), tol.determinant});
    }

    const Complex z0 = config.points.front();
    const SampledField field(mesh, rc.r, z0);
    const std::size_t last = mesh.size() - 1;
    report.rows.push_back({"oe_concat", "nodes 0," + std::to_string(last / 2) + "," + std::to_string(last) + " z=" + describe(z0),
                           oe_concat_check(field, 0, last / 2, last), tol.concat});
    report.rows.push_back({"oe_inverse", "nodes 0," + std::to_string(last) + " z=" + describe(z0),
                           oe_inverse_check(field, 0, last), std::nullopt});
    if (auto loop = loop_identity_residual(rc, *bundle.jump)) {
        report.rows.push_back({"loop_identity", "all nodes", *loop, tol.exact_r});
    }
    return report;
}

ConvergeReport run_converge(const RunConfig& config) {
    ConvergeReport report;
    const bool constant = config.coefficient.family == "constant";
    if (config.coefficient.family == "rational") {
        throw Error(ErrorKind::UnsupportedFamily, "converge needs a family with a reference solution");
    }
    report.metric = constant ? "equilibrium |h - t|" : "max-norm deviation from oracle";

    for (int level = 0; level < 3; ++level) {
        const double step = config.step / std::pow(2.0, level);
        const ContourMesh mesh = config.mesh_with_step(step);
        const CoefficientBundle bundle = make_coefficient(config, mesh);
        const ReconstructedCoefficient rc = reconstruct(*bundle.jump, mesh, config.solver);

        ConvergenceLevel row{step, mesh.size(), 0.0, 0.0, std::nullopt};
        if (constant) {
            const EigenFrame& f = rc.frame;
            double total = 0.0;
            for (std::size_t k = 0; k < f.h1.size(); ++k) {
                const double d = std::max(std::abs(f.h1[k] - f.t1[k]), std::abs(f.h2[k] - f.t2[k]));
                row.max_error = std::max(row.max_error, d);
                total += d;
            }
            row.mean_error = f.h1.empty() ? 0.0 : total / static_cast<double>(f.h1.size());
        } else {
            const Oracle oracle = make_oracle(config, bundle, mesh);
            const auto values = evaluate_points(rc, config.points, config.workers);
            double total = 0.0;
            for (std::size_t k = 0; k < values.size(); ++k) {
                const double d = (values[k] - oracle(config.points[k])).norm();
                row.max_error = std::max(row.max_error, d);
                total += d;
            }
            row.mean_error = total / static_cast<double>(values.size());
        }
        if (!report.levels.empty() && row.max_error > 0.0 && report.levels.back().max_error > 0.0) {
            row.order = std::log2(report.levels.back().max_error / row.max_error);
        }
        report.levels.push_back(row);
    }
    return report;
}

CompareReport run_oracle_compare(const RunConfig& config) {
    const ContourMesh mesh = config.mesh();
    const CoefficientBundle bundle = make_coefficient(config, mesh);
    CompareReport report;
    const Oracle oracle = make_oracle(config, bundle, mesh, &report.u_inf);
    const ReconstructedCoefficient rc = stage_one(config, mesh, *bundle.jump);
    const auto values = evaluate_points(rc, config.points, config.workers);
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const Mat2 ref = oracle(config.points[k]);
        const double d = (values[k] - ref).norm();
        report.rows.push_back({config.points[k], values[k], ref, d});
        report.max_deviation = std::max(report.max_deviation, d);
        total += d;
    }
    report.mean_deviation = total / static_cast<double>(values.size());
    return report;
}

void write_solution_csv(std::ostream& out, const SolveReport& report) {
    const bool scalar = !report.points.empty() && report.points.front().scalar_oracle.has_value();
    out << "re_z,im_z," << kUHeader;
    if (scalar) out << ",re_oracle_u11,im_oracle_u11";
    out << '\n';
    for (const auto& p : report.points) {
        out << format_real(p.z.real()) << ',' << format_real(p.z.imag());
        write_u(out, p.u);
        if (scalar) out << ',' << format_real(p.scalar_oracle->real()) << ',' << format_real(p.scalar_oracle->imag());
        out << '\n';
    }
}

void write_validation_csv(std::ostream& out, const ValidateReport& report) {
    out << "check,location,value,tolerance,pass\n";
    for (const auto& r : report.rows) {
        out << r.check << ",\"" << r.location << "\"," << format_real(r.value) << ','
            << (r.tolerance ? format_real(*r.tolerance) : std::string("-")) << ',' << (r.pass() ? "yes" : "no") << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const ConvergeReport& report) {
    out << "step,nodes,max_error,mean_error,order\n";
    for (const auto& l : report.levels) {
        out << format_real(l.step) << ',' << l.nodes << ',' << format_real(l.max_error) << ','
            << format_real(l.mean_error) << ',' << (l.order ? format_real(*l.order) : std::string("-")) << '\n';
    }
}

void write_comparison_csv(std::ostream& out, const CompareReport& report) {
    out << "re_z,im_z," << kUHeader
        << ",re_k11,im_k11,re_k12,im_k12,re_k21,im_k21,re_k22,im_k22,deviation\n";
    for (const auto& r : report.rows) {
        out << format_real(r.z.real()) << ',' << format_real(r.z.imag());
        write_u(out, r.solver);
        write_u(out, r.oracle);
        out << ',' << format_real(r.deviation) << '\n';
    }
}

namespace {

void write_report(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::CacheMismatch, "cannot write report " + path.string());
    out << doc.dump(2) << '\n';
}

template <class Writer>
void emit(const RunConfig& config, Writer&& writer) {
    if (config.csv_path) {
        std::ofstream out(*config.csv_path);
        if (!out) throw Error(ErrorKind::CacheMismatch, "cannot write " + config.csv_path->string());
        writer(out);
    } else {
        writer(std::cout);
    }
}

int dispatch(const RunConfig& config, std::ostream& log) {
    using nlohmann::json;
    switch (config.mode) {
    case Mode::Solve: {
        const SolveReport rep = run_solve(config);
        for (const auto& w : rep.warnings) log << "warning: " << w << '\n';
        emit(config, [&](std::ostream& out) { write_solution_csv(out, rep); });
        double jump_max = 0.0;
        for (const auto& j : rep.jump) jump_max = std::max(jump_max, j.residual);
        log << "nodes " << rep.nodes << (rep.cache_hit ? " (stage 1 from cache)" : "") << ", stage 1 "
            << rep.stage1_seconds << " s, stage 2 " << rep.stage2_seconds << " s\n"
            << "max jump residual " << jump_max << ", max determinant residual " << rep.determinant_residual << '\n';
        if (rep.oracle_max) log << "oracle deviation max " << *rep.oracle_max << ", mean " << *rep.oracle_mean << '\n';
        if (config.report_path) {
            json doc{{"mode", "solve"},
                     {"nodes", rep.nodes},
                     {"cache_hit", rep.cache_hit},
                     {"stage1_seconds", rep.stage1_seconds},
                     {"stage2_seconds", rep.stage2_seconds},
                     {"determinant_residual", rep.determinant_residual},
                     {"warnings", rep.warnings}};
            json jumps = json::array();
            for (const auto& j : rep.jump) jumps.push_back({{"im", j.z.imag()}, {"residual", j.residual}});
            doc["jump_residuals"] = jumps;
            if (rep.oracle_max) {
                doc["oracle_max"] = *rep.oracle_max;
                doc["oracle_mean"] = *rep.oracle_mean;
            }
            write_report(*config.report_path, doc);
        }
        return kOk;
    }
    case Mode::Validate: {
        const ValidateReport rep = run_validate(config);
        emit(config, [&](std::ostream& out) { write_validation_csv(out, rep); });
        for (const auto& r : rep.rows) {
            if (!r.pass()) log << "FAIL " << r.check << " at " << r.location << ": " << r.value << " > " << *r.tolerance << '\n';
        }
        if (config.report_path) {
            json rows = json::array();
            for (const auto& r : rep.rows) {
                rows.push_back({{"check", r.check}, {"location", r.location}, {"value", r.value},
                                {"tolerance", r.tolerance ? json(*r.tolerance) : json(nullptr)}, {"pass", r.pass()}});
            }
            write_report(*config.report_path, json{{"mode", "validate"}, {"pass", rep.pass()}, {"rows", rows}});
        }
        log << (rep.pass() ? "validation passed\n" : "validation FAILED\n");
        return rep.pass() ? kOk : kValidationFailure;
    }
    case Mode::Converge: {
        const ConvergeReport rep = run_converge(config);
        emit(config, [&](std::ostream& out) { write_convergence_csv(out, rep); });
        const bool at_roundoff = !rep.levels.empty() && rep.levels.front().max_error <= 1e-12;
        log << "metric: " << rep.metric
            << (rep.monotone() ? ", monotone decrease\n" : at_roundoff ? ", at roundoff\n" : ", NOT monotone\n");
        if (config.report_path) {
            json levels = json::array();
            for (const auto& l : rep.levels) {
                levels.push_back({{"step", l.step}, {"nodes", l.nodes}, {"max_error", l.max_error},
                                  {"mean_error", l.mean_error}, {"order", l.order ? json(*l.order) : json(nullptr)}});
            }
            write_report(*config.report_path,
                         json{{"mode", "converge"}, {"metric", rep.metric}, {"monotone", rep.monotone()}, {"levels", levels}});
        }
        return rep.monotone() || at_roundoff ? kOk : kValidationFailure;
    }
    case Mode::OracleCompare: {
        const CompareReport rep = run_oracle_compare(config);
        emit(config, [&](std::ostream& out) { write_comparison_csv(out, rep); });
        log << "oracle deviation max " << rep.max_deviation << ", mean " << rep.mean_deviation << '\n';
        const bool pass = rep.max_deviation <= config.tolerances.oracle_max && rep.mean_deviation <= config.tolerances.oracle_mean;
        if (config.report_path) {
            write_report(*config.report_path, json{{"mode", "oracle-compare"},
                                                   {"max_deviation", rep.max_deviation},
                                                   {"mean_deviation", rep.mean_deviation},
                                                   {"pass", pass}});
        }
        return pass ? kOk : kValidationFailure;
    }
    }
    return kOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& log) {
    CLI::App app{"Half-line 2x2 Riemann-Hilbert solver (Riccati marching + ordered exponentials)"};
    app.require_subcommand(1);
    std::string config_path, out_path, cache_path, report_path;
    for (Mode mode : {Mode::Solve, Mode::Validate, Mode::Converge, Mode::OracleCompare}) {
        auto* sub = app.add_subcommand(std::string(to_string(mode)));
        sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
        sub->add_option("--out", out_path, "Output CSV path (default: stdout)");
        sub->add_option("--cache", cache_path, "Stage-1 cache file");
        sub->add_option("--report", report_path, "Machine-readable JSON summary");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, log, log);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig config = load_config(config_path);
        config.mode = *parse_mode(app.get_subcommands().front()->get_name());
        if (!out_path.empty()) config.csv_path = out_path;
        if (!cache_path.empty()) config.cache_path = cache_path;
        if (!report_path.empty()) config.report_path = report_path;
        return dispatch(config, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::UnsupportedFamily ? kConfigError : kSolverError;
    }
}

} // namespace rhode::harness
