#include <catch_amalgamated.hpp>

#include <rhode/oracles.hpp>

#include "reference.hpp"

using namespace rhode;

namespace {

// (i/4pi) ln(71/81) and (i/(4 pi sqrt 10)) ln((1 - sqrt10/9)/(1 + sqrt10/9)),
// evaluated by hand and frozen
constexpr Complex kXi3i{0.0, -0.010485865941320796};
constexpr Complex kEta3i{0.0, -0.018470781991070064};

Complex wave(Complex z) { return 1.0 + 0.5 * std::exp(kI * z); }

KhrapkovCoefficient scalar_khrapkov() {
    // p = 0, c = 1 + 1/z: M = c I
    return KhrapkovCoefficient(Rational{Polynomial{1.0, 1.0}, Polynomial::monomial(1)}, Rational::of(Polynomial{0.0}),
                               Polynomial{1.0}, Polynomial::monomial(1), Polynomial::monomial(1, -1.0));
}

const ContourMesh& mesh() {
    static const ContourMesh m = build_mesh({Complex{0, 2}}, 80.0, 0.02);
    return m;
}

const KhrapkovSolution& test_solution() {
    static const KhrapkovSolution sol(make_paper_test_matrix(), mesh());
    return sol;
}

} // namespace

TEST_CASE("xi and eta at 3i", "[oracles]") {
    XiEtaContext fresh;
    const auto [xi, eta] = khrapkov_xi_eta(make_paper_test_matrix(), Complex{0, 3}, fresh);
    REQUIRE(std::abs(xi - kXi3i) <= 1e-15);
    REQUIRE(std::abs(eta - kEta3i) <= 1e-15);

    // same values when reached by continuation down the cut
    const KhrapkovSolution sol(make_paper_test_matrix(), build_mesh({Complex{0, 3}}, 80.0, 0.02));
    REQUIRE(std::abs(sol.xi().back() - kXi3i) <= 1e-14);
    REQUIRE(std::abs(sol.eta().back() - kEta3i) <= 1e-14);
}

TEST_CASE("p = 0 gives eta = 0 and xi = (i/2pi) log c", "[oracles]") {
    const auto coef = scalar_khrapkov();
    XiEtaContext ctx;
    for (double y : {50.0, 10.0, 2.5}) {
        const Complex tau{0, y};
        const auto [xi, eta] = khrapkov_xi_eta(coef, tau, ctx);
        REQUIRE(eta == Complex{});
        REQUIRE(std::abs(xi - kI / (2.0 * kPi) * std::log(1.0 + 1.0 / tau)) <= 1e-15);
    }
}

TEST_CASE("xi and eta vanish toward the truncation point", "[oracles]") {
    const auto& sol = test_solution();
    // c^2 - f p^2 = 1 + 1/B^2 + O(B^-4): |xi(B)| ~ 1 / (4 pi 6400)
    REQUIRE(std::abs(std::abs(sol.xi().front()) - 1.0 / (4.0 * kPi * 6400.0)) < 1e-8);
    REQUIRE(std::abs(sol.eta().front()) < 1e-3);
    REQUIRE(std::abs(sol.eta().front()) < std::abs(sol.eta().back()));
}

TEST_CASE("trivial Khrapkov data gives the identity", "[oracles]") {
    const KhrapkovCoefficient one(Rational::of(Polynomial{1.0}), Rational::of(Polynomial{0.0}), Polynomial{1.0},
                                  Polynomial{0.0}, Polynomial{0.0});
    const KhrapkovSolution sol(one, build_mesh({Complex{0, 2}}, 20.0, 0.1));
    REQUIRE(khrapkov_solve(sol, Complex{1, 1.8}) == Mat2::identity());
    REQUIRE(khrapkov_canonical_correction(sol, Complex{1e3, 1.8}) == Mat2::identity());
}

TEST_CASE("eta = 0 reduces to the scalar oracle", "[oracles]") {
    const auto coef = scalar_khrapkov();
    const ContourMesh m = build_mesh({Complex{0, 2}}, 40.0, 0.05);
    const KhrapkovSolution sol(coef, m);
    const ScalarCauchyOracle scalar([&](Complex z) { return coef.c(z); }, m);
    for (Complex z : {Complex{1, 1.8}, Complex{-4, 7}, Complex{0, 60}}) {
        const Mat2 u = khrapkov_solve(sol, z);
        REQUIRE(std::abs(u.m11 - scalar(z)) <= 1e-13);
        REQUIRE(std::abs(u.m22 - scalar(z)) <= 1e-13);
        REQUIRE(u.m12 == Complex{});
    }
}

TEST_CASE("Khrapkov solution commutes with L and has det exp(2 xi_bar)", "[oracles][property]") {
    const auto& sol = test_solution();
    const auto& coef = sol.coefficient();
    for (int k = -10; k <= 10; ++k) {
        const Complex z{static_cast<double>(k), 1.8};
        const Mat2 u = khrapkov_solve(sol, z);
        const Mat2 l = coef.L(z);
        REQUIRE((l * u - u * l).norm() <= 1e-10 * l.norm() * u.norm());
        const Complex xi_bar = -cauchy_quadrature(sol.xi(), sol.mesh(), z);
        REQUIRE(std::abs(u.det() - std::exp(2.0 * xi_bar)) <= 1e-10 * std::abs(std::exp(2.0 * xi_bar)));
    }
}

TEST_CASE("small sqrt f is handled by the series", "[oracles]") {
    // f = 1 - z^2 vanishes at z = 1
    const auto& sol = test_solution();
    const Mat2 at = khrapkov_solve(sol, Complex{1.0, 0.0});
    const Mat2 near = khrapkov_solve(sol, Complex{1.0 + 1e-7, 0.0});
    const Mat2 further = khrapkov_solve(sol, Complex{1.0 + 1e-3, 0.0});
    REQUIRE(at.finite());
    REQUIRE((at - near).norm() < 1e-5);
    REQUIRE((at - further).norm() < 1e-1);
}

TEST_CASE("U_inf differs from I and is stable in the far point", "[oracles]") {
    const auto& sol = test_solution();
    const Mat2 far3 = khrapkov_canonical_correction(sol, Complex{1e3, 1.8});
    const Mat2 far4 = khrapkov_canonical_correction(sol, Complex{1e4, 1.8});
    REQUIRE(distance_from_identity(far3) > 1e-3);
    REQUIRE((far3 - far4).norm() <= 1e-3);

    const CorrectedKhrapkov corrected(sol, default_far_point(mesh().base(), 1.8));
    REQUIRE(default_far_point(mesh().base(), 1.8) == Complex(2e3, 1.8));
    REQUIRE((corrected.u_inf() - far4).norm() < (far3 - far4).norm());
    REQUIRE(distance_from_identity(corrected(Complex{5e4, 1.8})) < 1e-3);
}

TEST_CASE("left correction keeps the jump condition", "[oracles]") {
    const auto& sol = test_solution();
    const CorrectedKhrapkov corrected(sol, default_far_point(mesh().base(), 1.8));
    const auto& coef = sol.coefficient();
    for (double y : {10.0, 40.0}) {
        const Complex tau{0, y};
        const Mat2 m = eval_jump(coef, tau);
        const double raw = (khrapkov_solve(sol, tau + 0.2) - khrapkov_solve(sol, tau - 0.2) * m).norm() / m.norm();
        const double fixed = (corrected(tau + 0.2) - corrected(tau - 0.2) * m).norm() / m.norm();
        REQUIRE(fixed <= 1e-2);
        REQUIRE(fixed <= 2.0 * raw + 1e-12);
    }
}

TEST_CASE("scalar oracle basics", "[oracles]") {
    const ContourMesh m = build_mesh({Complex{0, 2}}, 40.0, 0.02);
    REQUIRE(scalar_cauchy_solve([](Complex) { return Complex{1.0}; }, m, Complex{1, 1}) == Complex{1.0});

    const ScalarCauchyOracle u(wave, m);
    double previous = std::abs(u(Complex{1, 100}) - 1.0);
    for (double r : {1e3, 1e4}) {
        const double d = std::abs(u(Complex{r, 1}) - 1.0);
        REQUIRE(d < previous);
        previous = d;
    }
    REQUIRE(std::abs(u(Complex{1, 1e3}) - 1.0) <= 1e-2);
}

TEST_CASE("scalar oracle matches Gauss quadrature of the Cauchy integral", "[oracles]") {
    const ContourMesh m = build_mesh({Complex{0, 2}}, 40.0, 0.02);
    const ScalarCauchyOracle u(wave, m);
    auto logm = [](Complex t) { return std::log(wave(t)); };
    for (Complex z : {Complex{1, 1}, Complex{-2, 5}, Complex{0.5, 30}}) {
        const Complex want = std::exp(ref::cauchy(logm, m.base(), m.truncation(), z) / (2.0 * kPi * kI));
        REQUIRE(std::abs(u(z) - want) <= 1e-4);
    }
}

TEST_CASE("scalar oracle reproduces the jump", "[oracles]") {
    double previous = 1.0;
    for (double step : {0.04, 0.02, 0.01}) {
        const ContourMesh m = build_mesh({Complex{0, 2}}, 40.0, step);
        const ScalarCauchyOracle u(wave, m);
        const Complex tau{0, 6};
        const double delta = 10.0 * step;
        const double res = std::abs(u(tau + delta) / u(tau - delta) - wave(tau)) / std::abs(wave(tau));
        REQUIRE(res < previous);
        previous = res;
    }
    REQUIRE(previous < 1e-2);
}
