#include <catch_amalgamated.hpp>

#include <random>

#include <rhode/linalg.hpp>

#include "reference.hpp"

using namespace rhode;
using Catch::Matchers::WithinAbs;

namespace {

void require_error(ErrorKind kind, auto&& fn) {
    try {
        fn();
        FAIL("expected " << to_string(kind));
    } catch (const Error& e) {
        REQUIRE(e.kind() == kind);
    }
}

constexpr double kTight = 1e-14;

} // namespace

TEST_CASE("mat_mul basics", "[linalg]") {
    const Mat2 a{1.0, Complex{2, 1}, Complex{0, -3}, 4.0};
    REQUIRE(mat_mul(Mat2::identity(), a) == a);
    const Mat2 swap{0.0, 1.0, 1.0, 0.0};
    REQUIRE(mat_mul(swap, swap) == Mat2::identity());
}

TEST_CASE("mat_mul agrees with the written-out product", "[linalg][property]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat2 a = ref::random_mat(rng, 3.0), b = ref::random_mat(rng, 3.0);
        REQUIRE((mat_mul(a, b) - ref::product(a, b)).norm() <= 1e-14 * 36.0);
    }
}

TEST_CASE("mat_inv examples", "[linalg]") {
    REQUIRE(mat_inv(Mat2::identity()) == Mat2::identity());
    const Mat2 d = mat_inv(Mat2::diag(2.0, 4.0));
    REQUIRE((d - Mat2::diag(0.5, 0.25)).norm() <= kTight);
    const Mat2 u = mat_inv(Mat2{1.0, 1.0, 0.0, 1.0});
    REQUIRE((u - Mat2{1.0, -1.0, 0.0, 1.0}).norm() <= kTight);
    REQUIRE(distance_from_identity(Mat2{1.0, 1.0, 0.0, 1.0} * u) <= kTight);
}

TEST_CASE("mat_inv rejects singular input", "[linalg]") {
    require_error(ErrorKind::SingularMatrix, [] { mat_inv(Mat2{1.0, 2.0, 2.0, 4.0}); });
    require_error(ErrorKind::SingularMatrix, [] { mat_inv(Mat2::zero()); });
}

TEST_CASE("mat_inv residual bound", "[linalg][property]") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const Mat2 a = ref::random_mat(rng, 2.0);
        if (std::abs(a.det()) <= 1e-6) continue;
        const Mat2 inv = mat_inv(a);
        const double bound = 10.0 * kMachineEps * a.norm() * inv.norm() * 2.0;
        REQUIRE(distance_from_identity(a * inv) <= bound);
        ++checked;
    }
    REQUIRE(checked > 400);
}

TEST_CASE("eig2 on the exchange matrix", "[linalg]") {
    const EigenPair e = eig2(Mat2{0.0, 1.0, 1.0, 0.0});
    // equal distance from 1 would tie; accept either order but keep pairs consistent
    const bool first_plus = std::abs(e.lambda1 - 1.0) < 0.5;
    const Complex lp = first_plus ? e.lambda1 : e.lambda2, lm = first_plus ? e.lambda2 : e.lambda1;
    const Complex tp = first_plus ? e.t1 : e.t2, tm = first_plus ? e.t2 : e.t1;
    REQUIRE(std::abs(lp - 1.0) <= kTight);
    REQUIRE(std::abs(lm + 1.0) <= kTight);
    REQUIRE(std::abs(tp - 1.0) <= kTight);
    REQUIRE(std::abs(tm + 1.0) <= kTight);
}

TEST_CASE("eig2 on the test matrix at 2i (hand-computed roots)", "[linalg]") {
    // characteristic polynomial lambda^2 - 2 lambda + 11/16: roots 1 +- sqrt(5)/4,
    // t = (lambda - 3/4)/(-i/2) = i (1 +- sqrt 5)/2
    const Mat2 m{0.75, Complex{0, -0.5}, Complex{0, 0.5}, 1.25};
    const EigenPair e = eig2(m);
    const double s5 = std::sqrt(5.0);
    const Complex want_l1 = 1.0 + s5 / 4.0, want_l2 = 1.0 - s5 / 4.0;
    const Complex want_t1 = kI * (1.0 + s5) / 2.0, want_t2 = kI * (1.0 - s5) / 2.0;
    // both roots are sqrt(5)/4 away from 1; match by value
    const bool straight = std::abs(e.lambda1 - want_l1) < 0.1;
    REQUIRE(std::abs((straight ? e.lambda1 : e.lambda2) - want_l1) <= kTight);
    REQUIRE(std::abs((straight ? e.lambda2 : e.lambda1) - want_l2) <= kTight);
    REQUIRE(std::abs((straight ? e.t1 : e.t2) - want_t1) <= kTight);
    REQUIRE(std::abs((straight ? e.t2 : e.t1) - want_t2) <= kTight);
}

TEST_CASE("eig2 orders the root farther from 1 first", "[linalg]") {
    const EigenPair e = eig2(Mat2{1.1, 0.2, 0.3, 2.0});
    REQUIRE(std::abs(e.lambda1 - 1.0) >= std::abs(e.lambda2 - 1.0));
}

TEST_CASE("eig2 failure modes", "[linalg]") {
    require_error(ErrorKind::ParametrizationBreakdown, [] { eig2(Mat2::diag(1.0, 2.0)); });
    require_error(ErrorKind::DegenerateSpectrum, [] { eig2(Mat2::identity()); });
    require_error(ErrorKind::DegenerateSpectrum, [] { eig2(Mat2{1.0, 1.0, 0.0, 1.0}); });
}

TEST_CASE("eig2 residuals, trace and determinant", "[linalg][property]") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        // mostly near-identity matrices, the common regime, plus generic ones
        const double scale = trial % 2 ? 1e-3 : 1.0;
        const Mat2 m = Mat2::identity() + ref::random_mat(rng, scale);
        const EigenPair e = eig2(m);
        const double tol = 100.0 * kMachineEps * m.norm();
        for (auto [l, t] : {std::pair{e.lambda1, e.t1}, std::pair{e.lambda2, e.t2}}) {
            const Complex r1 = m.m11 + m.m12 * t - l;
            const Complex r2 = m.m21 + m.m22 * t - l * t;
            REQUIRE(std::max(std::abs(r1), std::abs(r2)) <= tol * std::max(1.0, std::abs(t)));
        }
        REQUIRE(std::abs(e.lambda1 + e.lambda2 - m.trace()) <= tol);
        REQUIRE(std::abs(e.lambda1 * e.lambda2 - m.det()) <= tol * m.norm());
    }
}

TEST_CASE("unwrap_log examples", "[linalg]") {
    const auto zeros = unwrap_log({1.0, 1.0, 1.0});
    for (Complex v : zeros) REQUIRE(v == Complex{});

    std::vector<Complex> turns;
    for (int k = 0; k <= 3; ++k) turns.push_back(std::polar(1.0, 2.0 * kPi * k / 3.0));
    const auto logs = unwrap_log(turns);
    for (int k = 0; k <= 3; ++k) {
        REQUIRE_THAT(logs[k].real(), WithinAbs(0.0, 1e-15));
        REQUIRE_THAT(logs[k].imag(), WithinAbs(2.0 * kPi * k / 3.0, 1e-14));
    }
}

TEST_CASE("unwrap_log rejects a half-turn step and zero", "[linalg]") {
    REQUIRE_NOTHROW(unwrap_log({1.0, kI, -1.0, -kI, 1.0}));
    try {
        unwrap_log({1.0, std::polar(1.0, 0.5), std::polar(1.0, 1.0), std::polar(1.0, 1.0 + kPi)});
        FAIL("expected BranchJumpTooLarge");
    } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::BranchJumpTooLarge);
        REQUIRE(e.node() == std::optional<std::size_t>(3));
    }
    require_error(ErrorKind::BranchJumpTooLarge, [] { unwrap_log({1.0, -1.0}); });
    require_error(ErrorKind::ZeroArgument, [] { unwrap_log({1.0, 0.0}); });
}

TEST_CASE("unwrap_log honours the anchor", "[linalg]") {
    const auto logs = unwrap_log({1.0, kI}, Complex{0.0, 2.0 * kPi});
    REQUIRE_THAT(logs[0].imag(), WithinAbs(2.0 * kPi, 1e-14));
    REQUIRE_THAT(logs[1].imag(), WithinAbs(2.5 * kPi, 1e-14));
}

TEST_CASE("unwrap_log exponentiates back", "[linalg][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dphase(-2.5, 2.5), dmod(0.1, 10.0);
    std::vector<Complex> values;
    double phase = 0.0;
    for (int k = 0; k < 2000; ++k) {
        phase += dphase(rng);
        values.push_back(std::polar(dmod(rng), phase));
    }
    const auto logs = unwrap_log(values);
    for (std::size_t k = 0; k < values.size(); ++k) {
        REQUIRE(std::abs(std::exp(logs[k]) - values[k]) <= 100.0 * kMachineEps * std::abs(values[k]) * std::max(1.0, std::abs(logs[k].imag())));
    }
    // the accumulated phase is kept, not wrapped
    REQUIRE_THAT(logs.back().imag(), WithinAbs(phase, 1e-9));
}

TEST_CASE("continued_log follows the previous branch", "[linalg]") {
    const Complex prev{0.0, 2.0 * kPi};
    const Complex got = continued_log(Complex{1.0, 0.1}, prev);
    REQUIRE_THAT(got.imag(), WithinAbs(2.0 * kPi + std::atan(0.1), 1e-14));
    require_error(ErrorKind::LogBranchFailure, [] { continued_log(-1.0, Complex{}); });
}
