#pragma once

// Jump coefficients M(z): anything that can produce the 2x2 jump matrix at a
// point of the strip around the cut.

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "mesh.hpp"
#include "polynomial.hpp"

namespace rhode {

class JumpCoefficient {
public:
    virtual ~JumpCoefficient() = default;

    virtual Mat2 operator()(Complex z) const = 0;
    virtual std::string_view family() const noexcept = 0;
};

inline Mat2 eval_jump(const JumpCoefficient& coef, Complex z) {
    Mat2 m = coef(z);
    if (!m.finite()) {
        throw Error(ErrorKind::EvaluationFailure, "jump coefficient is not finite at (" + std::to_string(z.real()) +
                                                      ", " + std::to_string(z.imag()) + ")");
    }
    return m;
}

class ConstantCoefficient final : public JumpCoefficient {
public:
    explicit ConstantCoefficient(Mat2 value) : value_(value) {}

    Mat2 operator()(Complex) const override { return value_; }
    std::string_view family() const noexcept override { return "constant"; }
    const Mat2& value() const noexcept { return value_; }

private:
    Mat2 value_;
};

/// M(z) = c(z) I + p(z) L(z), L = [[l, m], [n, -l]], with f = l^2 + m n of
/// degree at most two.
class KhrapkovCoefficient final : public JumpCoefficient {
public:
    KhrapkovCoefficient(Rational c, Rational p, Polynomial l, Polynomial m, Polynomial n)
        : c_(std::move(c)), p_(std::move(p)), l_(std::move(l)), m_(std::move(m)), n_(std::move(n)),
          f_(l_ * l_ + m_ * n_) {
        if (f_.degree(1e-12) > 2) {
            throw Error(ErrorKind::InvalidCoefficient,
                        "l^2 + m n has degree " + std::to_string(f_.degree(1e-12)) + "; at most 2 is allowed");
        }
    }

    Mat2 operator()(Complex z) const override {
        const Mat2 ell = L(z);
        return Mat2::identity() * c(z) + ell * p(z);
    }
    std::string_view family() const noexcept override { return "khrapkov"; }

    Complex c(Complex z) const { return c_(z); }
    Complex p(Complex z) const { return p_(z); }
    Complex f(Complex z) const { return f_(z); }
    Mat2 L(Complex z) const {
        const Complex lz = l_(z);
        return {lz, m_(z), n_(z), -lz};
    }
    const Polynomial& f_polynomial() const noexcept { return f_; }

private:
    Rational c_, p_;
    Polynomial l_, m_, n_;
    Polynomial f_;
};

inline Complex khrapkov_f(const KhrapkovCoefficient& coef, Complex z) { return coef.f(z); }

/// The test matrix M(z) = I + z^{-2} [[1, z], [-z, -1]].
inline KhrapkovCoefficient make_paper_test_matrix() {
    return KhrapkovCoefficient(Rational::of(Polynomial{1.0}),
                               Rational{Polynomial{1.0}, Polynomial::monomial(2)},
                               Polynomial{1.0}, Polynomial::monomial(1), Polynomial::monomial(1, -1.0));
}

using ScalarFunction = std::function<Complex(Complex)>;

/// Scalar jump m(z) lifted to diag(m(z), 1).
class ScalarCoefficient final : public JumpCoefficient {
public:
    explicit ScalarCoefficient(ScalarFunction m) : m_(std::move(m)) {}

    Mat2 operator()(Complex z) const override { return Mat2::diag(m_(z), 1.0); }
    std::string_view family() const noexcept override { return "scalar"; }
    Complex scalar(Complex z) const { return m_(z); }
    const ScalarFunction& function() const noexcept { return m_; }

private:
    ScalarFunction m_;
};

/// Lifts a scalar jump; rejects m that vanishes on the mesh or whose phase
/// cannot be tracked continuously along it.
inline ScalarCoefficient lift_scalar(ScalarFunction m, const ContourMesh& mesh) {
    std::vector<Complex> samples;
    samples.reserve(mesh.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < mesh.size(); ++k) {
        samples.push_back(m(mesh[k]));
        scale = std::max(scale, std::abs(samples.back()));
    }
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!is_finite(samples[k]) || std::abs(samples[k]) <= 1e-12 * scale) {
            throw Error(ErrorKind::InvalidCoefficient, "scalar jump vanishes on the cut", k);
        }
    }
    try {
        (void)unwrap_log(samples);
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidCoefficient, std::string("scalar jump phase not trackable: ") + e.what(), e.node());
    }
    return ScalarCoefficient(std::move(m));
}

/// Four rational entries supplied by the user.
class RationalCoefficient final : public JumpCoefficient {
public:
    RationalCoefficient(Rational m11, Rational m12, Rational m21, Rational m22)
        : entries_{std::move(m11), std::move(m12), std::move(m21), std::move(m22)} {}

    Mat2 operator()(Complex z) const override {
        return {entries_[0](z), entries_[1](z), entries_[2](z), entries_[3](z)};
    }
    std::string_view family() const noexcept override { return "rational"; }

    /// Samples every denominator at the nodes; throws EvaluationFailure at the
    /// first node where one nearly vanishes relative to its coefficients.
    void check_denominators(const ContourMesh& mesh) const {
        for (const auto& e : entries_) {
            double scale = 0.0;
            for (const auto& c : e.denominator.coefficients()) scale = std::max(scale, std::abs(c));
            for (std::size_t k = 0; k < mesh.size(); ++k) {
                const Complex tau = mesh[k];
                const double mag = std::max(1.0, std::pow(std::abs(tau), std::max(0, e.denominator.degree())));
                if (std::abs(e.denominator(tau)) <= 1e-12 * scale * mag) {
                    throw Error(ErrorKind::EvaluationFailure, "denominator vanishes on the cut", k);
                }
            }
        }
    }

private:
    std::array<Rational, 4> entries_;
};

} // namespace rhode
