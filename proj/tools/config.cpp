#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rhode::harness {

using json = nlohmann::json;

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
    case Mode::Solve: return "solve";
    case Mode::Validate: return "validate";
    case Mode::Converge: return "converge";
    case Mode::OracleCompare: return "oracle-compare";
    }
    return "solve";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
    if (text == "solve") return Mode::Solve;
    if (text == "validate") return Mode::Validate;
    if (text == "converge") return Mode::Converge;
    if (text == "oracle-compare") return Mode::OracleCompare;
    return std::nullopt;
}

double RunConfig::evaluation_im() const {
    if (line) return line->im;
    return points.empty() ? base.imag() : points.front().imag();
}

namespace {

using Path = std::vector<std::string>;

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::string join(const Path& path) {
    std::string out;
    for (const auto& p : path) {
        if (!out.empty()) out += '.';
        out += p;
    }
    return out.empty() ? "<root>" : out;
}

/// Walks the config with the raw text at hand so that semantic errors can be
/// reported at the line of the offending key.
class Reader {
public:
    Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const Path& path, const std::string& message) const {
        throw ConfigError(source_, locate(path), join(path) + ": " + message);
    }

    std::size_t locate(const Path& path) const {
        std::size_t pos = 0;
        std::size_t found = std::string_view::npos;
        for (const auto& key : path) {
            if (!key.empty() && key.front() == '[') continue;
            const auto hit = text_.find("\"" + key + "\"", pos);
            if (hit == std::string_view::npos) break;
            found = hit;
            pos = hit + 1;
        }
        return found == std::string_view::npos ? 1 : line_of_offset(text_, found);
    }

    const json& require(const json& obj, const Path& path, const std::string& key) const {
        if (!obj.is_object() || !obj.contains(key)) fail(path, "missing required key '" + key + "'");
        return obj.at(key);
    }

    void only_keys(const json& obj, const Path& path, std::initializer_list<const char*> allowed) const {
        if (!obj.is_object()) fail(path, "expected an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, _] : obj.items()) {
            if (!ok.count(key)) {
                Path p = path;
                p.push_back(key);
                fail(p, "unknown key");
            }
        }
    }

    double number(const json& v, const Path& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(path, "number must be finite");
        return d;
    }

    double positive(const json& v, const Path& path) const {
        const double d = number(v, path);
        if (!(d > 0.0)) fail(path, "must be positive");
        return d;
    }

    std::size_t count(const json& v, const Path& path) const {
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a nonnegative integer");
        return static_cast<std::size_t>(v.get<long long>());
    }

    Complex complex(const json& v, const Path& path) const {
        if (v.is_number()) return {number(v, path), 0.0};
        if (!v.is_array() || v.size() != 2) fail(path, "expected a complex number [re, im]");
        return {number(v[0], path), number(v[1], path)};
    }

    Polynomial polynomial(const json& v, const Path& path) const {
        if (!v.is_array() || v.empty()) fail(path, "expected a nonempty list of [re, im] coefficients");
        std::vector<Complex> coeffs;
        for (const auto& c : v) coeffs.push_back(complex(c, path));
        return Polynomial(std::move(coeffs));
    }

    Rational rational(const json& v, const Path& path) const {
        if (v.is_array()) return Rational::of(polynomial(v, path));
        only_keys(v, path, {"numerator", "denominator"});
        Rational r;
        r.numerator = polynomial(require(v, path, "numerator"), extend(path, "numerator"));
        if (v.contains("denominator")) r.denominator = polynomial(v.at("denominator"), extend(path, "denominator"));
        if (r.denominator.degree() < 0) fail(extend(path, "denominator"), "denominator is identically zero");
        return r;
    }

    static Path extend(Path path, const std::string& key) {
        path.push_back(key);
        return path;
    }

private:
    std::string_view text_;
    std::string source_;
};

CoefficientSpec read_coefficient(const Reader& rd, const json& block) {
    const Path path{"coefficient"};
    CoefficientSpec spec;
    const json& fam = rd.require(block, path, "family");
    if (!fam.is_string()) rd.fail(Reader::extend(path, "family"), "expected a string");
    spec.family = fam.get<std::string>();
    spec.canonical = block.dump();
    auto at = [&](const std::string& key) { return Reader::extend(path, key); };

    if (spec.family == "paper-test") {
        rd.only_keys(block, path, {"family"});
    } else if (spec.family == "khrapkov") {
        rd.only_keys(block, path, {"family", "c", "p", "l", "m", "n"});
        spec.c = rd.rational(rd.require(block, path, "c"), at("c"));
        spec.p = rd.rational(rd.require(block, path, "p"), at("p"));
        spec.l = rd.polynomial(rd.require(block, path, "l"), at("l"));
        spec.m = rd.polynomial(rd.require(block, path, "m"), at("m"));
        spec.n = rd.polynomial(rd.require(block, path, "n"), at("n"));
        try {
            KhrapkovCoefficient check(spec.c, spec.p, spec.l, spec.m, spec.n);
        } catch (const Error& e) {
            rd.fail(at("l"), e.what());
        }
    } else if (spec.family == "scalar") {
        rd.only_keys(block, path, {"family", "form", "amplitude", "wavenumber", "numerator", "denominator"});
        if (block.contains("form")) {
            if (!block.at("form").is_string()) rd.fail(at("form"), "expected a string");
            spec.scalar.form = block.at("form").get<std::string>();
        }
        if (spec.scalar.form == "exp") {
            if (block.contains("amplitude")) spec.scalar.amplitude = rd.complex(block.at("amplitude"), at("amplitude"));
            if (block.contains("wavenumber")) spec.scalar.wavenumber = rd.number(block.at("wavenumber"), at("wavenumber"));
        } else if (spec.scalar.form == "rational") {
            json sub = json::object();
            sub["numerator"] = rd.require(block, path, "numerator");
            if (block.contains("denominator")) sub["denominator"] = block.at("denominator");
            spec.scalar.ratio = rd.rational(sub, path);
        } else {
            rd.fail(at("form"), "scalar form must be 'exp' or 'rational'");
        }
    } else if (spec.family == "constant") {
        rd.only_keys(block, path, {"family", "matrix"});
        const json& m = rd.require(block, path, "matrix");
        if (!m.is_array() || m.size() != 4) rd.fail(at("matrix"), "expected four entries [m11, m12, m21, m22]");
        spec.constant = {rd.complex(m[0], at("matrix")), rd.complex(m[1], at("matrix")), rd.complex(m[2], at("matrix")),
                         rd.complex(m[3], at("matrix"))};
    } else if (spec.family == "rational") {
        rd.only_keys(block, path, {"family", "entries"});
        const json& e = rd.require(block, path, "entries");
        if (!e.is_array() || e.size() != 4) rd.fail(at("entries"), "expected four rational entries");
        for (std::size_t k = 0; k < 4; ++k) spec.entries[k] = rd.rational(e[k], at("entries"));
    } else {
        rd.fail(Reader::extend(path, "family"),
                "unknown family '" + spec.family + "' (expected khrapkov, paper-test, scalar, constant, rational)");
    }
    return spec;
}

} // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(source, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
    }
    Reader rd(text, source);
    rd.only_keys(root, {}, {"mode", "coefficient", "cut", "evaluation", "tolerances", "solver", "validation", "output",
                            "cache"});

    RunConfig cfg;
    cfg.source = source;
    if (root.contains("mode")) {
        const json& m = root.at("mode");
        auto mode = m.is_string() ? parse_mode(m.get<std::string>()) : std::nullopt;
        if (!mode) rd.fail({"mode"}, "mode must be one of solve, validate, converge, oracle-compare");
        cfg.mode = *mode;
    }

    cfg.coefficient = read_coefficient(rd, rd.require(root, {}, "coefficient"));

    const Path cut_path{"cut"};
    const json& cut = rd.require(root, {}, "cut");
    rd.only_keys(cut, cut_path, {"base", "truncation_height", "step"});
    cfg.base = rd.complex(rd.require(cut, cut_path, "base"), {"cut", "base"});
    cfg.truncation_height = rd.number(rd.require(cut, cut_path, "truncation_height"), {"cut", "truncation_height"});
    cfg.step = rd.positive(rd.require(cut, cut_path, "step"), {"cut", "step"});
    if (!(cfg.truncation_height > cfg.base.imag())) {
        rd.fail({"cut", "truncation_height"}, "must exceed the imaginary part of the base point");
    }
    try {
        (void)cfg.mesh();
    } catch (const Error& e) {
        rd.fail({"cut", "step"}, e.what());
    }

    const Path ev_path{"evaluation"};
    const json& ev = rd.require(root, {}, "evaluation");
    rd.only_keys(ev, ev_path, {"points", "line"});
    if (ev.contains("points")) {
        const json& pts = ev.at("points");
        if (!pts.is_array()) rd.fail({"evaluation", "points"}, "expected a list of [re, im] points");
        for (const auto& p : pts) cfg.points.push_back(rd.complex(p, {"evaluation", "points"}));
    }
    if (ev.contains("line")) {
        const Path lp{"evaluation", "line"};
        const json& l = ev.at("line");
        rd.only_keys(l, lp, {"im", "re_min", "re_max", "count"});
        LineSpec spec;
        spec.im = rd.number(rd.require(l, lp, "im"), {"evaluation", "line", "im"});
        if (l.contains("re_min")) spec.re_min = rd.number(l.at("re_min"), {"evaluation", "line", "re_min"});
        if (l.contains("re_max")) spec.re_max = rd.number(l.at("re_max"), {"evaluation", "line", "re_max"});
        if (l.contains("count")) spec.count = rd.count(l.at("count"), {"evaluation", "line", "count"});
        if (spec.count < 1) rd.fail({"evaluation", "line", "count"}, "must be at least 1");
        if (spec.count > 1 && !(spec.re_max > spec.re_min)) rd.fail({"evaluation", "line", "re_max"}, "must exceed re_min");
        cfg.line = spec;
        for (std::size_t k = 0; k < spec.count; ++k) {
            const double frac = spec.count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(spec.count - 1);
            cfg.points.emplace_back(spec.re_min + frac * (spec.re_max - spec.re_min), spec.im);
        }
    }
    if (cfg.points.empty()) rd.fail(ev_path, "no evaluation points given (use 'points' or 'line')");
    const ContourMesh mesh = cfg.mesh();
    for (const auto& z : cfg.points) {
        if (mesh.distance_to_segment(z) <= 0.5 * cfg.step) {
            rd.fail(ev_path, "evaluation point (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                                 ") lies on the cut");
        }
    }

    if (root.contains("tolerances")) {
        const Path tp{"tolerances"};
        const json& t = root.at("tolerances");
        rd.only_keys(t, tp, {"jump", "determinant", "concat", "exact_r", "oracle_max", "oracle_mean"});
        auto read = [&](const char* key, double& dst) {
            if (t.contains(key)) dst = rd.positive(t.at(key), {"tolerances", key});
        };
        read("jump", cfg.tolerances.jump);
        read("determinant", cfg.tolerances.determinant);
        read("concat", cfg.tolerances.concat);
        read("exact_r", cfg.tolerances.exact_r);
        read("oracle_max", cfg.tolerances.oracle_max);
        read("oracle_mean", cfg.tolerances.oracle_mean);
    }

    if (root.contains("solver")) {
        const Path sp{"solver"};
        const json& s = root.at("solver");
        rd.only_keys(s, sp, {"corrector", "blowup_cap", "workers", "eps_det", "eps_param", "eps_spec"});
        if (s.contains("corrector")) {
            if (!s.at("corrector").is_boolean()) rd.fail({"solver", "corrector"}, "expected true or false");
            cfg.solver.corrector = s.at("corrector").get<bool>();
        }
        if (s.contains("blowup_cap")) cfg.solver.blowup_cap = rd.positive(s.at("blowup_cap"), {"solver", "blowup_cap"});
        if (s.contains("workers")) cfg.workers = rd.count(s.at("workers"), {"solver", "workers"});
        if (s.contains("eps_det")) cfg.solver.tol.det = rd.positive(s.at("eps_det"), {"solver", "eps_det"});
        if (s.contains("eps_param")) cfg.solver.tol.param = rd.positive(s.at("eps_param"), {"solver", "eps_param"});
        if (s.contains("eps_spec")) cfg.solver.tol.spectrum = rd.positive(s.at("eps_spec"), {"solver", "eps_spec"});
    }

    if (root.contains("validation")) {
        const Path vp{"validation"};
        const json& v = root.at("validation");
        rd.only_keys(v, vp, {"jump_points", "jump_offset"});
        if (v.contains("jump_points")) cfg.jump_points = rd.count(v.at("jump_points"), {"validation", "jump_points"});
        if (v.contains("jump_offset")) cfg.jump_offset = rd.positive(v.at("jump_offset"), {"validation", "jump_offset"});
    }

    if (root.contains("output")) {
        const Path op{"output"};
        const json& o = root.at("output");
        rd.only_keys(o, op, {"csv", "report"});
        for (const char* key : {"csv", "report"}) {
            if (!o.contains(key)) continue;
            if (!o.at(key).is_string()) rd.fail({"output", key}, "expected a path string");
            (std::string_view(key) == "csv" ? cfg.csv_path : cfg.report_path) = o.at(key).get<std::string>();
        }
    }

    if (root.contains("cache")) {
        if (!root.at("cache").is_string()) rd.fail({"cache"}, "expected a path string");
        cfg.cache_path = root.at("cache").get<std::string>();
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

CoefficientBundle make_coefficient(const RunConfig& config, const ContourMesh& mesh) {
    const CoefficientSpec& spec = config.coefficient;
    CoefficientBundle out;
    if (spec.family == "paper-test") {
        out.khrapkov = make_paper_test_matrix();
        out.jump = std::make_shared<KhrapkovCoefficient>(*out.khrapkov);
    } else if (spec.family == "khrapkov") {
        out.khrapkov = KhrapkovCoefficient(spec.c, spec.p, spec.l, spec.m, spec.n);
        out.jump = std::make_shared<KhrapkovCoefficient>(*out.khrapkov);
    } else if (spec.family == "scalar") {
        ScalarFunction fn;
        if (spec.scalar.form == "exp") {
            const Complex a = spec.scalar.amplitude;
            const double k = spec.scalar.wavenumber;
            fn = [a, k](Complex z) { return 1.0 + a * std::exp(kI * k * z); };
        } else {
            const Rational ratio = spec.scalar.ratio;
            fn = [ratio](Complex z) { return ratio(z); };
        }
        out.jump = std::make_shared<ScalarCoefficient>(lift_scalar(fn, mesh));
        out.scalar = fn;
    } else if (spec.family == "constant") {
        out.jump = std::make_shared<ConstantCoefficient>(spec.constant);
    } else if (spec.family == "rational") {
        auto r = std::make_shared<RationalCoefficient>(spec.entries[0], spec.entries[1], spec.entries[2], spec.entries[3]);
        r->check_denominators(mesh);
        out.jump = r;
    } else {
        throw Error(ErrorKind::UnsupportedFamily, "unknown family '" + spec.family + "'");
    }
    return out;
}

std::string family_hash(const RunConfig& config) {
    // stage-1 options change r as well, so they take part in the hash
    const auto& s = config.solver;
    return fnv1a_hex(config.coefficient.canonical + "|corrector=" + (s.corrector ? "1" : "0") + "|cap=" +
                     format_real(s.blowup_cap) + "|eps=" + format_real(s.tol.det) + "," + format_real(s.tol.param) +
                     "," + format_real(s.tol.spectrum));
}

} // namespace rhode::harness
