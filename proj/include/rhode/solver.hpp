#pragma once

// Two-stage solver for the half-line 2x2 Riemann-Hilbert problem
// U+(z) = U-(z) M(z) on the cut (b, b + i inf), U -> I at infinity.
//
// Stage 1 reconstructs the auxiliary coefficient r(tau) on the mesh,
//   r = H diag(zeta1, zeta2) H^{-1},  H = [[1, 1], [h1, h2]],
//   zeta_i = (i / 2 pi) log lambda_i(M),
// by marching the Riccati equations for q_{1,2}(beta; z) node by node.
// Stage 2 evaluates U(z) as the ordered exponential of r(tau) / (z - tau)
// started at B with the identity and integrated down to b.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jump.hpp"
#include "linalg.hpp"
#include "mesh.hpp"
#include "oe.hpp"

namespace rhode {

/// Per-node parametrization of M and of the unknown r. h1/h2 stay empty until
/// stage 1 fills them; t1/t2 are empty for the diagonal fast path.
struct EigenFrame {
    std::vector<Complex> lambda1, lambda2;
    std::vector<Complex> t1, t2;
    std::vector<Complex> zeta1, zeta2;
    std::vector<Complex> h1, h2;

    std::size_t size() const noexcept { return lambda1.size(); }
};

/// Eigenvalues and eigenvector parameters of M at every node, with the two
/// eigenvalue tracks kept continuous along the mesh and zeta on the branch
/// that starts at log 1 = 0 at the truncation point.
inline EigenFrame build_frame(const JumpCoefficient& coef, const ContourMesh& mesh, const Tolerances& tol = {}) {
    const std::size_t n = mesh.size();
    EigenFrame frame;
    frame.lambda1.resize(n);
    frame.lambda2.resize(n);
    frame.t1.resize(n);
    frame.t2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        EigenPair e;
        try {
            e = eig2(eval_jump(coef, mesh[k]), tol);
        } catch (const Error& err) {
            throw err.at_node(k);
        }
        if (k > 0 && std::abs(e.lambda2 - frame.lambda1[k - 1]) < std::abs(e.lambda1 - frame.lambda1[k - 1])) {
            std::swap(e.lambda1, e.lambda2);
            std::swap(e.t1, e.t2);
        }
        frame.lambda1[k] = e.lambda1;
        frame.lambda2[k] = e.lambda2;
        frame.t1[k] = e.t1;
        frame.t2[k] = e.t2;
    }
    const Complex to_zeta = kI / (2.0 * kPi);
    for (auto [track, zeta] : {std::pair{&frame.lambda1, &frame.zeta1}, std::pair{&frame.lambda2, &frame.zeta2}}) {
        auto logs = unwrap_log(*track);
        zeta->resize(n);
        for (std::size_t k = 0; k < n; ++k) (*zeta)[k] = to_zeta * logs[k];
    }
    return frame;
}

/// Frame data at one abscissa of the Riccati integration.
struct FramePoint {
    Complex zeta1, zeta2, h1, h2;
};

/// Right-hand side of the Riccati equation for q_{1,2}(beta; z):
///   -(zeta1 - zeta2)(q - h1)(q - h2) / ((z - beta)(h1 - h2)).
inline Complex riccati_rhs(Complex q, Complex beta, Complex z, const FramePoint& at, double eps = 1e-14) {
    const Complex split = at.h1 - at.h2;
    if (std::abs(split) <= eps * std::max({1.0, std::abs(at.h1), std::abs(at.h2)})) {
        throw Error(ErrorKind::DegenerateFrame, "h1 and h2 coincide");
    }
    if (std::abs(z - beta) <= eps * std::max(1.0, std::abs(z))) {
        throw Error(ErrorKind::PoleHit, "beta coincides with z");
    }
    return -(at.zeta1 - at.zeta2) * (q - at.h1) * (q - at.h2) / ((z - beta) * split);
}

struct ReconstructOptions {
    Tolerances tol{};
    /// |q| above this during marching is reported as RiccatiBlowup.
    double blowup_cap = 1e8;
    /// Replace the final explicit Euler step by Euler-predict + midpoint-correct.
    bool corrector = false;
    /// max ||M(tau_j) - I|| at or below this selects the identity special case.
    double identity_tol = 1e-12;
    /// ||M(B) - I|| above this produces a warning.
    double truncation_warn = 1e-3;
};

namespace detail {

/// Riccati data with the cross-ratio factor -(zeta1 - zeta2) / (h1 - h2)
/// folded into one coefficient, at nodes and interval midpoints.
struct RiccatiPoint {
    Complex h1, h2, gain;
};

class RiccatiMarcher {
public:
    RiccatiMarcher(const EigenFrame& frame, const ContourMesh& mesh, const ReconstructOptions& opts)
        : frame_(frame), mesh_(mesh), opts_(opts) {
        nodes_.reserve(mesh.size());
        mids_.reserve(mesh.size());
    }

    /// Registers node k, whose h values must already be in the frame.
    void extend(std::size_t k) {
        nodes_.push_back(make_point({frame_.zeta1[k], frame_.zeta2[k], frame_.h1[k], frame_.h2[k]}, k));
        if (k > 0) mids_.push_back(make_point(midpoint(k - 1, frame_.h1[k], frame_.h2[k]), k));
    }

    /// q_{1,2} at node j: RK4 from the truncation point down to node j-1
    /// starting at t_{1,2}(tau_j), then one step onto tau_j.
    std::pair<Complex, Complex> march(std::size_t j) const {
        const Complex z = mesh_[j];
        Complex q[2] = {frame_.t1[j], frame_.t2[j]};
        for (std::size_t i = 0; i + 1 < j; ++i) {
            const Complex dt = mesh_[i + 1] - mesh_[i];
            const Complex w0 = 1.0 / (z - mesh_[i]);
            const Complex wm = 1.0 / (z - mesh_.midpoint(i));
            const Complex w1 = 1.0 / (z - mesh_[i + 1]);
            const RiccatiPoint& p0 = nodes_[i];
            const RiccatiPoint& pm = mids_[i];
            const RiccatiPoint& p1 = nodes_[i + 1];
            for (int b = 0; b < 2; ++b) {
                const Complex k1 = rhs(q[b], p0, w0);
                const Complex k2 = rhs(q[b] + 0.5 * dt * k1, pm, wm);
                const Complex k3 = rhs(q[b] + 0.5 * dt * k2, pm, wm);
                const Complex k4 = rhs(q[b] + dt * k3, p1, w1);
                q[b] += dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
                guard(q[b], j, b);
            }
        }

        const std::size_t last = j - 1;
        const Complex dt = z - mesh_[last];
        const Complex w0 = 1.0 / (z - mesh_[last]);
        Complex k1[2];
        Complex pred[2];
        for (int b = 0; b < 2; ++b) {
            k1[b] = rhs(q[b], nodes_[last], w0);
            pred[b] = q[b] + dt * k1[b];
            guard(pred[b], j, b);
        }
        if (!opts_.corrector) return {pred[0], pred[1]};

        const RiccatiPoint pm = make_point(midpoint(last, pred[0], pred[1]), j);
        const Complex wm = 1.0 / (z - mesh_.midpoint(last));
        Complex out[2];
        for (int b = 0; b < 2; ++b) {
            out[b] = q[b] + dt * rhs(q[b] + 0.5 * dt * k1[b], pm, wm);
            guard(out[b], j, b);
        }
        return {out[0], out[1]};
    }

private:
    static Complex rhs(Complex q, const RiccatiPoint& p, Complex weight) noexcept {
        return p.gain * (q - p.h1) * (q - p.h2) * weight;
    }

    FramePoint midpoint(std::size_t k, Complex h1_next, Complex h2_next) const {
        return {0.5 * (frame_.zeta1[k] + frame_.zeta1[k + 1]), 0.5 * (frame_.zeta2[k] + frame_.zeta2[k + 1]),
                0.5 * (frame_.h1[k] + h1_next), 0.5 * (frame_.h2[k] + h2_next)};
    }

    static RiccatiPoint make_point(const FramePoint& f, std::size_t node) {
        const Complex split = f.h1 - f.h2;
        if (std::abs(split) <= 1e-14 * std::max({1.0, std::abs(f.h1), std::abs(f.h2)})) {
            throw Error(ErrorKind::DegenerateFrame, "h1 and h2 coincide", node);
        }
        return {f.h1, f.h2, -(f.zeta1 - f.zeta2) / split};
    }

    void guard(Complex q, std::size_t j, int branch) const {
        if (!is_finite(q) || std::abs(q) > opts_.blowup_cap) {
            throw Error(ErrorKind::RiccatiBlowup,
                        "q" + std::to_string(branch + 1) + " left the admissible range while marching", j);
        }
    }

    const EigenFrame& frame_;
    const ContourMesh& mesh_;
    const ReconstructOptions& opts_;
    std::vector<RiccatiPoint> nodes_;
    std::vector<RiccatiPoint> mids_;
};

} // namespace detail

/// Re-runs the marching step for node j >= 1 against a frame whose h values
/// are known at nodes 0..j-1. Returns (q1, q2) at tau_j.
inline std::pair<Complex, Complex> riccati_march(const EigenFrame& frame, const ContourMesh& mesh, std::size_t j,
                                                 const ReconstructOptions& opts = {}) {
    if (j == 0 || j >= mesh.size()) throw Error(ErrorKind::BadMeshSpec, "marching target must be in 1..N-1");
    detail::RiccatiMarcher marcher(frame, mesh, opts);
    for (std::size_t k = 0; k < j; ++k) marcher.extend(k);
    return marcher.march(j);
}

enum class CoefficientKind { General, Diagonal, Identity };

struct ReconstructedCoefficient {
    ContourMesh mesh;
    CoefficientKind kind = CoefficientKind::General;
    EigenFrame frame;
    std::vector<Mat2> r;
    double truncation_deviation = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline Mat2 assemble_r(Complex h1, Complex h2, Complex zeta1, Complex zeta2, const Tolerances& tol) {
    const Mat2 h{1.0, 1.0, h1, h2};
    return h * Mat2::diag(zeta1, zeta2) * mat_inv(h, tol);
}

} // namespace detail

/// Stage 1: r(tau_j) at every node.
inline ReconstructedCoefficient reconstruct(const JumpCoefficient& coef, const ContourMesh& mesh,
                                            const ReconstructOptions& opts = {}) {
    const std::size_t n = mesh.size();
    std::vector<Mat2> samples(n);
    double off_identity = 0.0;
    bool diagonal = true;
    for (std::size_t k = 0; k < n; ++k) {
        try {
            samples[k] = eval_jump(coef, mesh[k]);
        } catch (const Error& err) {
            throw err.at_node(k);
        }
        off_identity = std::max(off_identity, distance_from_identity(samples[k]));
        const double scale = std::max(samples[k].norm(), std::numeric_limits<double>::min());
        if (std::abs(samples[k].m12) > opts.tol.param * scale || std::abs(samples[k].m21) > opts.tol.param * scale) {
            diagonal = false;
        }
    }

    ReconstructedCoefficient rc{mesh, CoefficientKind::General, {}, {}, distance_from_identity(samples.front()), {}};
    if (rc.truncation_deviation > opts.truncation_warn) {
        rc.warnings.push_back("||M(B) - I|| = " + std::to_string(rc.truncation_deviation) +
                              " exceeds " + std::to_string(opts.truncation_warn) + "; consider a larger truncation height");
    }

    if (off_identity <= opts.identity_tol) {
        rc.kind = CoefficientKind::Identity;
        rc.r.assign(n, Mat2::zero());
        return rc;
    }

    const Complex to_zeta = kI / (2.0 * kPi);
    if (diagonal) {
        // r = diag(-log m11, -log m22) / (2 pi i), logs continuous from B
        rc.kind = CoefficientKind::Diagonal;
        auto& f = rc.frame;
        f.lambda1.resize(n);
        f.lambda2.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            f.lambda1[k] = samples[k].m11;
            f.lambda2[k] = samples[k].m22;
        }
        const auto log1 = unwrap_log(f.lambda1);
        const auto log2 = unwrap_log(f.lambda2);
        f.zeta1.resize(n);
        f.zeta2.resize(n);
        rc.r.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            f.zeta1[k] = to_zeta * log1[k];
            f.zeta2[k] = to_zeta * log2[k];
            rc.r[k] = Mat2::diag(f.zeta1[k], f.zeta2[k]);
        }
        return rc;
    }

    rc.frame = build_frame(coef, mesh, opts.tol);
    EigenFrame& frame = rc.frame;
    frame.h1.assign(n, Complex{});
    frame.h2.assign(n, Complex{});
    frame.h1[0] = frame.t1[0];
    frame.h2[0] = frame.t2[0];

    detail::RiccatiMarcher marcher(frame, mesh, opts);
    marcher.extend(0);
    for (std::size_t j = 1; j < n; ++j) {
        const auto [q1, q2] = marcher.march(j);
        frame.h1[j] = q1;
        frame.h2[j] = q2;
        marcher.extend(j);
    }

    rc.r.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        try {
            rc.r[k] = detail::assemble_r(frame.h1[k], frame.h2[k], frame.zeta1[k], frame.zeta2[k], opts.tol);
        } catch (const Error& err) {
            throw Error(ErrorKind::DegenerateFrame, err.what(), k);
        }
    }
    return rc;
}

/// Stage 2: U(z), the ordered exponential of r(tau)/(z - tau) from B down to b.
inline Mat2 evaluate_U(const ReconstructedCoefficient& rc, Complex z) {
    rc.mesh.require_off_cut(z);
    if (rc.kind == CoefficientKind::Identity) return Mat2::identity();
    const SampledField field(rc.mesh, rc.r, z);
    return ordered_exp(field, 0, rc.mesh.size() - 1);
}

/// Relative mismatch of the jump condition at a cut point, using U at
/// z +/- offset (real direction) as proxies for the right/left edge values.
inline double jump_residual(const ReconstructedCoefficient& rc, const JumpCoefficient& coef, Complex z_on_cut,
                            double offset) {
    const double lo = rc.mesh.base().imag();
    const double hi = rc.mesh.truncation().imag();
    if (!(z_on_cut.imag() > lo && z_on_cut.imag() < hi) || !(offset > 0.0)) {
        throw Error(ErrorKind::BadMeshSpec, "jump residual needs a point strictly inside the cut and offset > 0");
    }
    const Complex on_cut{rc.mesh.base().real(), z_on_cut.imag()};
    const Mat2 right = evaluate_U(rc, on_cut + offset);
    const Mat2 left = evaluate_U(rc, on_cut - offset);
    const Mat2 m = eval_jump(coef, on_cut);
    return (right - left * m).norm() / m.norm();
}

/// det U(z) solves the scalar problem with jump det M = lambda1 lambda2, whose
/// solution is exp(-integral of trace r / (z - tau)). Returns the relative
/// mismatch between the two, the quadrature done by the trapezoid rule.
inline double determinant_residual(const ReconstructedCoefficient& rc, Complex z) {
    std::vector<Complex> traces(rc.r.size());
    for (std::size_t k = 0; k < traces.size(); ++k) traces[k] = rc.r[k].trace();
    const Complex expected = std::exp(-cauchy_quadrature(traces, rc.mesh, z));
    return std::abs(evaluate_U(rc, z).det() - expected) / std::abs(expected);
}

/// max_j ||T exp(-2 pi i diag(zeta)) T^{-1} - M(tau_j)|| / ||M(tau_j)||, with T
/// the eigenvector frame of M (the identity for diagonal coefficients). The
/// small-loop limit of the ordered exponential must give back the jump, so
/// this isolates the eigenvalue/branch plumbing from the marching.
/// Empty when the frame is not available (cache-loaded coefficients).
inline std::optional<double> loop_identity_residual(const ReconstructedCoefficient& rc, const JumpCoefficient& coef) {
    if (rc.kind == CoefficientKind::Identity) return 0.0;
    const EigenFrame& f = rc.frame;
    if (f.zeta1.size() != rc.mesh.size()) return std::nullopt;
    const bool diagonal = rc.kind == CoefficientKind::Diagonal;
    double worst = 0.0;
    for (std::size_t k = 0; k < rc.mesh.size(); ++k) {
        const Mat2 loop = Mat2::diag(std::exp(-2.0 * kPi * kI * f.zeta1[k]), std::exp(-2.0 * kPi * kI * f.zeta2[k]));
        Mat2 rebuilt = loop;
        if (!diagonal) {
            const Mat2 t{1.0, 1.0, f.t1[k], f.t2[k]};
            rebuilt = t * loop * mat_inv(t);
        }
        const Mat2 m = eval_jump(coef, rc.mesh[k]);
        worst = std::max(worst, (rebuilt - m).norm() / m.norm());
    }
    return worst;
}

} // namespace rhode
