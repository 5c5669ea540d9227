#pragma once

// Complex scalars and 2x2 complex matrices: products, inverses, the
// unit-first-component eigen-parametrization and branch-continuous logarithms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"

namespace rhode {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

inline bool is_finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Row-major 2x2 complex matrix.
struct Mat2 {
    Complex m11{}, m12{}, m21{}, m22{};

    static constexpr Mat2 identity() noexcept { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() noexcept { return {}; }
    static constexpr Mat2 diag(Complex a, Complex d) noexcept { return {a, 0.0, 0.0, d}; }

    Complex trace() const noexcept { return m11 + m22; }
    Complex det() const noexcept { return m11 * m22 - m12 * m21; }

    /// Largest entry modulus.
    double norm() const noexcept {
        return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
    }

    bool finite() const noexcept { return is_finite(m11) && is_finite(m12) && is_finite(m21) && is_finite(m22); }

    Mat2& operator+=(const Mat2& o) noexcept {
        m11 += o.m11; m12 += o.m12; m21 += o.m21; m22 += o.m22;
        return *this;
    }
    Mat2& operator-=(const Mat2& o) noexcept {
        m11 -= o.m11; m12 -= o.m12; m21 -= o.m21; m22 -= o.m22;
        return *this;
    }
    Mat2& operator*=(Complex s) noexcept {
        m11 *= s; m12 *= s; m21 *= s; m22 *= s;
        return *this;
    }

    friend bool operator==(const Mat2&, const Mat2&) = default;
};

inline Mat2 operator+(Mat2 a, const Mat2& b) noexcept { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) noexcept { return a -= b; }
inline Mat2 operator*(Mat2 a, Complex s) noexcept { return a *= s; }
inline Mat2 operator*(Complex s, Mat2 a) noexcept { return a *= s; }

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) noexcept {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

inline Mat2 operator*(const Mat2& a, const Mat2& b) noexcept { return mat_mul(a, b); }

/// Thresholds guarding the distinct-eigenvalue and invertibility hypotheses.
/// Each is relative to the norm of the matrix being examined.
struct Tolerances {
    double det = 1e-12;
    double param = 1e-12;
    double spectrum = 1e-12;
};

inline Mat2 mat_inv(const Mat2& a, const Tolerances& tol = {}) {
    const Complex d = a.det();
    const double scale = std::max(a.norm() * a.norm(), std::numeric_limits<double>::min());
    if (!(std::abs(d) > tol.det * scale)) {
        throw Error(ErrorKind::SingularMatrix, "determinant modulus " + std::to_string(std::abs(d)) +
                                                   " below threshold");
    }
    const Complex inv = 1.0 / d;
    return {a.m22 * inv, -a.m12 * inv, -a.m21 * inv, a.m11 * inv};
}

/// Eigenvalues with eigenvectors parametrized as (1, t_i)^T.
struct EigenPair {
    Complex lambda1, lambda2;
    Complex t1, t2;
};

/// Eigen-decomposition M = T diag(lambda) T^{-1}, T = [[1, 1], [t1, t2]].
///
/// Roots are obtained from the shifted matrix M - I with the cancellation-free
/// quadratic formula, so eigenvalues near 1 keep full relative accuracy in
/// lambda - 1. The root with larger |lambda - 1| comes first.
inline EigenPair eig2(const Mat2& m, const Tolerances& tol = {}) {
    const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
    const Complex a11 = m.m11 - 1.0;
    const Complex a22 = m.m22 - 1.0;
    const Complex half_tr = 0.5 * (a11 + a22);
    const Complex half_diff = 0.5 * (a11 - a22);
    // disc = (tr/2)^2 - det(A), written without subtracting nearly equal terms
    const Complex root = std::sqrt(half_diff * half_diff + m.m12 * m.m21);

    if (std::abs(2.0 * root) <= tol.spectrum * scale) {
        throw Error(ErrorKind::DegenerateSpectrum, "eigenvalues coincide to within tolerance");
    }
    if (std::abs(m.m12) <= tol.param * scale) {
        throw Error(ErrorKind::ParametrizationBreakdown, "m12 vanishes; unit-first-component eigenvectors undefined");
    }

    const Complex big = std::real(std::conj(half_tr) * root) >= 0.0 ? half_tr + root : half_tr - root;
    const Complex det_shift = a11 * a22 - m.m12 * m.m21;
    const Complex small = big != Complex{} ? det_shift / big : Complex{};

    EigenPair out;
    out.lambda1 = 1.0 + big;
    out.lambda2 = 1.0 + small;
    out.t1 = (big - a11) / m.m12;
    out.t2 = (small - a11) / m.m12;
    return out;
}

/// Logarithm of each value with the branch continuous along the sequence.
///
/// The first value takes the branch nearest `anchor`; every later value the
/// branch nearest its predecessor. Imaginary parts are rebuilt from the
/// principal argument plus a multiple of 2*pi, so no phase error accumulates.
inline std::vector<Complex> unwrap_log(std::span<const Complex> values, Complex anchor = 0.0) {
    constexpr double two_pi = 2.0 * kPi;
    std::vector<Complex> out;
    out.reserve(values.size());
    double prev_phase = anchor.imag();
    for (std::size_t k = 0; k < values.size(); ++k) {
        const Complex v = values[k];
        if (v == Complex{} || !is_finite(v)) {
            throw Error(ErrorKind::ZeroArgument, "logarithm of zero or non-finite value", k);
        }
        const double arg = std::arg(v);
        double target = prev_phase;
        if (k > 0) {
            const double step = std::arg(v / values[k - 1]);
            if (std::abs(step) >= kPi * (1.0 - 1e-12)) {
                throw Error(ErrorKind::BranchJumpTooLarge, "phase step of " + std::to_string(step) +
                                                               " rad reaches pi; mesh under-resolved", k);
            }
            target = prev_phase + step;
        }
        const double phase = arg + two_pi * std::round((target - arg) / two_pi);
        if (k == 0 && std::abs(phase - anchor.imag()) > kPi) {
            throw Error(ErrorKind::BranchJumpTooLarge, "first value is not within pi of the anchor", k);
        }
        out.emplace_back(std::log(std::abs(v)), phase);
        prev_phase = phase;
    }
    return out;
}

inline std::vector<Complex> unwrap_log(std::initializer_list<Complex> values, Complex anchor = 0.0) {
    return unwrap_log(std::span<const Complex>(values.begin(), values.size()), anchor);
}

/// log v on the branch nearest `previous` (principal branch when absent).
/// Throws LogBranchFailure when the phase moved by pi or more.
inline Complex continued_log(Complex v, std::optional<Complex> previous = std::nullopt) {
    if (v == Complex{} || !is_finite(v)) throw Error(ErrorKind::ZeroArgument, "logarithm of zero or non-finite value");
    const Complex principal = std::log(v);
    if (!previous) return principal;
    constexpr double two_pi = 2.0 * kPi;
    const double phase = principal.imag() + two_pi * std::round((previous->imag() - principal.imag()) / two_pi);
    if (std::abs(phase - previous->imag()) >= kPi * (1.0 - 1e-12)) {
        throw Error(ErrorKind::LogBranchFailure, "phase moved by pi or more between consecutive samples");
    }
    return {principal.real(), phase};
}

/// Max-norm distance from the identity.
inline double distance_from_identity(const Mat2& m) noexcept { return (m - Mat2::identity()).norm(); }

} // namespace rhode
