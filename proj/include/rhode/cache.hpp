#pragma once

// Text serialization of stage-1 results so stage 2 can be re-run without
// repeating the O(N^2) marching.
//
//   rhode-stage1 <Re b> <Im b> <Im B> <step> <family hash> <kind>
//   <Im tau> <Re r11> <Im r11> <Re r12> <Im r12> <Re r21> <Im r21> <Re r22> <Im r22>
//   ...                                    (one line per node, B first)
//
// Reals are written with 17 significant digits and read back exactly.

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "solver.hpp"

namespace rhode {

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string_view to_string(CoefficientKind kind) noexcept {
    switch (kind) {
    case CoefficientKind::General: return "general";
    case CoefficientKind::Diagonal: return "diagonal";
    case CoefficientKind::Identity: return "identity";
    }
    return "general";
}

inline void write_cache(std::ostream& out, const ReconstructedCoefficient& rc, std::string_view family_hash) {
    const ContourMesh& mesh = rc.mesh;
    out << "rhode-stage1 " << format_real(mesh.base().real()) << ' ' << format_real(mesh.base().imag()) << ' '
        << format_real(mesh.truncation_height()) << ' ' << format_real(mesh.step()) << ' ' << family_hash << ' '
        << to_string(rc.kind) << '\n';
    for (std::size_t k = 0; k < mesh.size(); ++k) {
        const Mat2& r = rc.r[k];
        out << format_real(mesh[k].imag());
        for (Complex e : {r.m11, r.m12, r.m21, r.m22}) out << ' ' << format_real(e.real()) << ' ' << format_real(e.imag());
        out << '\n';
    }
}

/// Loads a cache written for `mesh` and `family_hash`; any mismatch in the
/// header or node abscissae raises CacheMismatch. The frame is not stored.
inline ReconstructedCoefficient read_cache(std::istream& in, const ContourMesh& mesh, std::string_view family_hash) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::CacheMismatch, "empty cache file");
    std::istringstream header(line);
    std::string magic, hash, kind;
    double b_re = 0, b_im = 0, height = 0, step = 0;
    if (!(header >> magic >> b_re >> b_im >> height >> step >> hash >> kind) || magic != "rhode-stage1") {
        throw Error(ErrorKind::CacheMismatch, "malformed cache header");
    }
    if (b_re != mesh.base().real() || b_im != mesh.base().imag() || height != mesh.truncation_height() ||
        step != mesh.step() || hash != family_hash) {
        throw Error(ErrorKind::CacheMismatch, "cache was written for a different problem or mesh");
    }

    ReconstructedCoefficient rc{mesh, CoefficientKind::General, {}, {}, 0.0, {}};
    if (kind == "identity") rc.kind = CoefficientKind::Identity;
    else if (kind == "diagonal") rc.kind = CoefficientKind::Diagonal;
    else if (kind != "general") throw Error(ErrorKind::CacheMismatch, "unknown coefficient kind '" + kind + "'");

    rc.r.resize(mesh.size());
    for (std::size_t k = 0; k < mesh.size(); ++k) {
        if (!std::getline(in, line)) throw Error(ErrorKind::CacheMismatch, "cache ends early", k);
        std::istringstream row(line);
        double im_tau = 0;
        double v[8];
        if (!(row >> im_tau >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5] >> v[6] >> v[7])) {
            throw Error(ErrorKind::CacheMismatch, "malformed cache row", k);
        }
        if (im_tau != mesh[k].imag()) throw Error(ErrorKind::CacheMismatch, "node abscissa differs", k);
        rc.r[k] = {{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}};
    }
    return rc;
}

} // namespace rhode
