#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace rhode {

/// Polynomial with complex coefficients stored in ascending powers.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {}
    Polynomial(std::initializer_list<Complex> coeffs) : coeffs_(coeffs) {}

    static Polynomial constant(Complex c) { return Polynomial{c}; }
    static Polynomial monomial(std::size_t power, Complex c = 1.0) {
        std::vector<Complex> out(power + 1, Complex{});
        out.back() = c;
        return Polynomial(std::move(out));
    }

    const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

    /// Horner evaluation.
    Complex operator()(Complex z) const noexcept {
        Complex acc{};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    /// Index of the highest coefficient whose modulus exceeds `rel_tol` times
    /// the largest modulus; -1 for the zero polynomial.
    int degree(double rel_tol = 0.0) const noexcept {
        double largest = 0.0;
        for (const auto& c : coeffs_) largest = std::max(largest, std::abs(c));
        if (largest == 0.0) return -1;
        for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k) {
            if (std::abs(coeffs_[static_cast<std::size_t>(k)]) > rel_tol * largest) return k;
        }
        return -1;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.coeffs_.empty() || b.coeffs_.empty()) return {};
        std::vector<Complex> out(a.coeffs_.size() + b.coeffs_.size() - 1, Complex{});
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(out));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Complex> out(std::max(a.coeffs_.size(), b.coeffs_.size()), Complex{});
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
        return Polynomial(std::move(out));
    }

    friend Polynomial operator-(const Polynomial& a) {
        std::vector<Complex> out = a.coeffs_;
        for (auto& c : out) c = -c;
        return Polynomial(std::move(out));
    }

private:
    std::vector<Complex> coeffs_;
};

/// Ratio of two polynomials.
struct Rational {
    Polynomial numerator{Complex{0.0}};
    Polynomial denominator{Complex{1.0}};

    static Rational of(Polynomial p) { return {std::move(p), Polynomial{Complex{1.0}}}; }

    /// Throws EvaluationFailure at a pole.
    Complex operator()(Complex z) const {
        const Complex den = denominator(z);
        if (std::abs(den) <= 1e-300 || !is_finite(den)) {
            throw Error(ErrorKind::EvaluationFailure, "rational entry has a pole at (" + std::to_string(z.real()) +
                                                          ", " + std::to_string(z.imag()) + ")");
        }
        return numerator(z) / den;
    }
};

} // namespace rhode
