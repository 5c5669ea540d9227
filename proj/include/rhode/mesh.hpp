#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace rhode {

/// Vertical half-line from `base` to base + i*infinity.
struct HalfLineCut {
    Complex base{};
};

/// Uniform mesh of the cut truncated at B.
///
/// Nodes are stored in the marching order: index 0 is the truncation point B,
/// the last index is the branch point b. Node k (k < N-1) is B - k*step*i;
/// the last node is b itself.
class ContourMesh {
public:
    ContourMesh(HalfLineCut cut, double truncation_height, double step)
        : cut_(cut), height_(truncation_height), step_(step) {
        const double base_im = cut.base.imag();
        if (!(step > 0.0) || !std::isfinite(step)) {
            throw Error(ErrorKind::BadMeshSpec, "step must be positive and finite");
        }
        if (!(truncation_height > base_im) || !std::isfinite(truncation_height) || !is_finite(cut.base)) {
            throw Error(ErrorKind::BadMeshSpec, "truncation height must lie above the branch point");
        }
        const double span = truncation_height - base_im;
        const double ratio = span / step;
        const double nearest = std::round(ratio);
        const double intervals = std::abs(ratio - nearest) <= 1e-6 * std::max(1.0, nearest) ? nearest : std::ceil(ratio);
        if (intervals < 2.0) {
            throw Error(ErrorKind::BadMeshSpec, "step too large: the mesh needs at least three nodes");
        }
        const auto n_intervals = static_cast<std::size_t>(intervals);

        nodes_.reserve(n_intervals + 1);
        const double re = cut.base.real();
        for (std::size_t k = 0; k < n_intervals; ++k) {
            const double im = truncation_height - static_cast<double>(k) * step;
            nodes_.emplace_back(re, std::max(im, base_im));
        }
        nodes_.push_back(cut.base);
    }

    const HalfLineCut& cut() const noexcept { return cut_; }
    Complex base() const noexcept { return cut_.base; }
    Complex truncation() const noexcept { return nodes_.front(); }
    double truncation_height() const noexcept { return height_; }
    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    Complex operator[](std::size_t k) const noexcept { return nodes_[k]; }
    std::span<const Complex> nodes() const noexcept { return nodes_; }

    /// Midpoint of the interval (k, k+1).
    Complex midpoint(std::size_t k) const noexcept { return 0.5 * (nodes_[k] + nodes_[k + 1]); }

    /// Distance from z to the closed segment [b, B].
    double distance_to_segment(Complex z) const noexcept {
        const double lo = cut_.base.imag();
        const double hi = nodes_.front().imag();
        const double dy = z.imag() < lo ? lo - z.imag() : (z.imag() > hi ? z.imag() - hi : 0.0);
        return std::hypot(z.real() - cut_.base.real(), dy);
    }

    /// Throws PoleTooClose when z is within half a step of the segment.
    void require_off_cut(Complex z) const {
        if (distance_to_segment(z) <= 0.5 * step_) {
            throw Error(ErrorKind::PoleTooClose, "point (" + std::to_string(z.real()) + ", " +
                                                     std::to_string(z.imag()) + ") lies within step/2 of the cut");
        }
    }

private:
    HalfLineCut cut_;
    double height_;
    double step_;
    std::vector<Complex> nodes_;
};

inline ContourMesh build_mesh(HalfLineCut cut, double truncation_height, double step) {
    return ContourMesh(cut, truncation_height, step);
}

/// Composite trapezoid approximation of the integral of f(tau)/(z - tau)
/// along the truncated cut, oriented from b up to B.
inline Complex cauchy_quadrature(std::span<const Complex> samples, const ContourMesh& mesh, Complex z) {
    if (samples.size() != mesh.size()) {
        throw Error(ErrorKind::BadMeshSpec, "sample count does not match node count");
    }
    mesh.require_off_cut(z);
    Complex sum{};
    for (std::size_t k = mesh.size() - 1; k > 0; --k) {
        const Complex lower = mesh[k];
        const Complex upper = mesh[k - 1];
        sum += 0.5 * (upper - lower) * (samples[k] / (z - lower) + samples[k - 1] / (z - upper));
    }
    return sum;
}

} // namespace rhode
