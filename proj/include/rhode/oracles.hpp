#pragma once

// Closed-form reference solutions used to validate the ODE solver:
// the scalar Cauchy-integral solution and the commutative Khrapkov
// factorization with its constant correction to canonical normalization.

#include <cstddef>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "jump.hpp"
#include "linalg.hpp"
#include "mesh.hpp"

namespace rhode {

/// Scalar problem u+ = u- m on the truncated cut:
///   log u(z) = -(1 / 2 pi i) integral_b^B log m(xi) / (xi - z) d xi.
/// log m is sampled once and kept continuous from B downward.
class ScalarCauchyOracle {
public:
    ScalarCauchyOracle(const ScalarFunction& m, const ContourMesh& mesh) : mesh_(mesh) {
        std::vector<Complex> samples(mesh.size());
        for (std::size_t k = 0; k < mesh.size(); ++k) samples[k] = m(mesh[k]);
        log_m_ = unwrap_log(samples);
    }

    Complex operator()(Complex z) const { return std::exp(cauchy_quadrature(log_m_, mesh_, z) / (2.0 * kPi * kI)); }

    const ContourMesh& mesh() const noexcept { return mesh_; }

private:
    ContourMesh mesh_;
    std::vector<Complex> log_m_;
};

inline Complex scalar_cauchy_solve(const ScalarFunction& m, const ContourMesh& mesh, Complex z) {
    return ScalarCauchyOracle(m, mesh)(z);
}

/// Branch state carried from one cut sample to the next.
struct XiEtaContext {
    std::optional<Complex> log_det;
    std::optional<Complex> log_ratio;
    std::optional<Complex> sqrt_f;
};

/// |sqrt f| below which the even/odd series replaces the closed forms.
inline constexpr double kSqrtFSeriesThreshold = 1e-4;

/// xi = (i / 4 pi) log(c^2 - f p^2),
/// eta = (i / (4 pi sqrt f)) log((c + p sqrt f) / (c - p sqrt f)),
/// with every branch continued from the values in `ctx`, which is updated.
inline std::pair<Complex, Complex> khrapkov_xi_eta(const KhrapkovCoefficient& coef, Complex tau, XiEtaContext& ctx) {
    const Complex c = coef.c(tau);
    const Complex p = coef.p(tau);
    const Complex f = coef.f(tau);
    Complex s = std::sqrt(f);
    if (ctx.sqrt_f && std::abs(s + *ctx.sqrt_f) < std::abs(s - *ctx.sqrt_f)) s = -s;

    const Complex det = c * c - f * p * p;
    if (det == Complex{}) throw Error(ErrorKind::ZeroArgument, "c^2 - f p^2 vanishes");
    const Complex log_det = continued_log(det, ctx.log_det);
    const Complex xi = kI / (4.0 * kPi) * log_det;

    const Complex plus = c + p * s;
    const Complex minus = c - p * s;
    if (plus == Complex{} || minus == Complex{}) throw Error(ErrorKind::ZeroArgument, "c +/- p sqrt f vanishes");
    const Complex log_ratio = continued_log(plus / minus, ctx.log_ratio);
    Complex eta;
    if (std::abs(s) < kSqrtFSeriesThreshold) {
        // log((1 + x) / (1 - x)) / s = (2 p / c)(1 + x^2 / 3 + ...), x = p s / c
        const Complex x = p * s / c;
        eta = kI / (4.0 * kPi) * (2.0 * p / c) * (1.0 + x * x / 3.0);
    } else {
        eta = kI / (4.0 * kPi * s) * log_ratio;
    }

    ctx.log_det = log_det;
    ctx.log_ratio = log_ratio;
    ctx.sqrt_f = s;
    return {xi, eta};
}

/// xi and eta sampled along the mesh, marching from B down to b.
class KhrapkovSolution {
public:
    KhrapkovSolution(KhrapkovCoefficient coef, const ContourMesh& mesh)
        : coef_(std::move(coef)), mesh_(mesh), xi_(mesh.size()), eta_(mesh.size()) {
        XiEtaContext ctx;
        for (std::size_t k = 0; k < mesh.size(); ++k) {
            try {
                std::tie(xi_[k], eta_[k]) = khrapkov_xi_eta(coef_, mesh[k], ctx);
            } catch (const Error& err) {
                throw err.at_node(k);
            }
        }
    }

    const KhrapkovCoefficient& coefficient() const noexcept { return coef_; }
    const ContourMesh& mesh() const noexcept { return mesh_; }
    const std::vector<Complex>& xi() const noexcept { return xi_; }
    const std::vector<Complex>& eta() const noexcept { return eta_; }

private:
    KhrapkovCoefficient coef_;
    ContourMesh mesh_;
    std::vector<Complex> xi_, eta_;
};

/// U_kh(z) = exp(xi_bar) (cosh(sqrt f eta_bar) I + sinh(sqrt f eta_bar) L(z) / sqrt f)
/// with xi_bar, eta_bar = -integral_b^B (xi, eta)(tau) / (z - tau) d tau.
/// Both terms are even in sqrt f, so its branch at z does not matter.
inline Mat2 khrapkov_solve(const KhrapkovSolution& sol, Complex z) {
    const Complex xi_bar = -cauchy_quadrature(sol.xi(), sol.mesh(), z);
    const Complex eta_bar = -cauchy_quadrature(sol.eta(), sol.mesh(), z);
    const KhrapkovCoefficient& coef = sol.coefficient();
    const Complex s = std::sqrt(coef.f(z));
    const Complex arg = s * eta_bar;
    const Complex even = std::cosh(arg);
    const Complex odd = std::abs(s) < kSqrtFSeriesThreshold ? eta_bar * (1.0 + arg * arg / 6.0) : std::sinh(arg) / s;
    return (Mat2::identity() * even + coef.L(z) * odd) * std::exp(xi_bar);
}

/// Estimate of U_inf = lim U_kh(z) as |z| -> infinity, taken at `far_point`.
inline Mat2 khrapkov_canonical_correction(const KhrapkovSolution& sol, Complex far_point) {
    return khrapkov_solve(sol, far_point);
}

/// Default far point: on the horizontal line Im z = `line_im`, at real part
/// 10^3 |b| (10^3 when b = 0).
inline Complex default_far_point(Complex base, double line_im) {
    const double scale = std::abs(base) > 0.0 ? std::abs(base) : 1.0;
    return {1e3 * scale, line_im};
}

/// U_inf from far points w and 2w with the O(1/|z|) term eliminated:
/// 2 U_kh(2w) - U_kh(w).
inline Mat2 khrapkov_canonical_correction_extrapolated(const KhrapkovSolution& sol, Complex far_point) {
    const Complex twice{2.0 * far_point.real(), far_point.imag()};
    return khrapkov_solve(sol, twice) * 2.0 - khrapkov_solve(sol, far_point);
}

/// Canonically normalized Khrapkov solution U_inf^{-1} U_kh(z), U_inf from
/// the extrapolated far-point estimate.
class CorrectedKhrapkov {
public:
    CorrectedKhrapkov(KhrapkovSolution sol, Complex far_point)
        : sol_(std::move(sol)), u_inf_(khrapkov_canonical_correction_extrapolated(sol_, far_point)),
          u_inf_inv_(mat_inv(u_inf_)) {}

    Mat2 operator()(Complex z) const { return u_inf_inv_ * khrapkov_solve(sol_, z); }

    const Mat2& u_inf() const noexcept { return u_inf_; }
    const KhrapkovSolution& solution() const noexcept { return sol_; }

private:
    KhrapkovSolution sol_;
    Mat2 u_inf_;
    Mat2 u_inf_inv_;
};

} // namespace rhode
