#pragma once

// Ordered exponentials: the fundamental solution of dY/dtau = B(tau) Y along
// the mesh, one classical RK4 step per mesh interval.

#include <cstddef>
#include <optional>
#include <span>

#include "linalg.hpp"
#include "mesh.hpp"

namespace rhode {

/// Node-sampled coefficient B(tau). With a kernel pole z the field is
/// values(tau) / (z - tau): the Cauchy factor is evaluated exactly at every
/// RK4 abscissa and only `values` is interpolated. Off-node values are the
/// average of the two adjacent nodes.
///
/// Non-owning: the mesh and the value array must outlive the field.
class SampledField {
public:
    SampledField(const ContourMesh& mesh, std::span<const Mat2> values, std::optional<Complex> pole = std::nullopt)
        : mesh_(&mesh), values_(values), pole_(pole) {
        if (values.size() != mesh.size()) {
            throw Error(ErrorKind::BadMeshSpec, "field has " + std::to_string(values.size()) + " samples for " +
                                                    std::to_string(mesh.size()) + " nodes");
        }
    }

    const ContourMesh& mesh() const noexcept { return *mesh_; }
    std::span<const Mat2> values() const noexcept { return values_; }
    std::optional<Complex> pole() const noexcept { return pole_; }

    Mat2 at_node(std::size_t k) const { return weighted(values_[k], (*mesh_)[k]); }

    /// Value at the midpoint of the interval between nodes k and k+1.
    Mat2 at_midpoint(std::size_t k) const {
        return weighted(0.5 * (values_[k] + values_[k + 1]), mesh_->midpoint(k));
    }

private:
    Mat2 weighted(const Mat2& v, Complex tau) const { return pole_ ? v * (1.0 / (*pole_ - tau)) : v; }

    const ContourMesh* mesh_;
    std::span<const Mat2> values_;
    std::optional<Complex> pole_;
};

namespace detail {

inline Mat2 rk4_step(const Mat2& y, Complex dt, const Mat2& b0, const Mat2& bm, const Mat2& b1) {
    const Mat2 k1 = b0 * y;
    const Mat2 k2 = bm * (y + k1 * (0.5 * dt));
    const Mat2 k3 = bm * (y + k2 * (0.5 * dt));
    const Mat2 k4 = b1 * (y + k3 * dt);
    return y + (k1 + k4 + (k2 + k3) * 2.0) * (dt / 6.0);
}

} // namespace detail

/// Integrates from node `from` to node `to` (either direction) starting at
/// `initial`. Successive calls that hand over the result at a shared node
/// reproduce a single call bitwise.
inline Mat2 ordered_exp(const SampledField& field, std::size_t from, std::size_t to,
                        const Mat2& initial = Mat2::identity()) {
    const ContourMesh& mesh = field.mesh();
    if (from >= mesh.size() || to >= mesh.size()) {
        throw Error(ErrorKind::BadMeshSpec, "node index out of range");
    }
    Mat2 y = initial;
    if (from < to) {
        for (std::size_t k = from; k < to; ++k) {
            y = detail::rk4_step(y, mesh[k + 1] - mesh[k], field.at_node(k), field.at_midpoint(k), field.at_node(k + 1));
        }
    } else {
        for (std::size_t k = from; k > to; --k) {
            y = detail::rk4_step(y, mesh[k - 1] - mesh[k], field.at_node(k), field.at_midpoint(k - 1),
                                 field.at_node(k - 1));
        }
    }
    return y;
}

/// ||OE(i->k) - OE(j->k) OE(i->j)||
inline double oe_concat_check(const SampledField& field, std::size_t i, std::size_t j, std::size_t k) {
    const Mat2 whole = ordered_exp(field, i, k);
    const Mat2 split = ordered_exp(field, j, k) * ordered_exp(field, i, j);
    return (whole - split).norm();
}

/// ||OE(i->j) OE(j->i) - I||; only O(step^4) for the discrete scheme.
inline double oe_inverse_check(const SampledField& field, std::size_t i, std::size_t j) {
    return distance_from_identity(ordered_exp(field, i, j) * ordered_exp(field, j, i));
}

} // namespace rhode
