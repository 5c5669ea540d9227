#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rhode {

enum class ErrorKind {
    SingularMatrix,
    ParametrizationBreakdown,
    DegenerateSpectrum,
    BranchJumpTooLarge,
    BadMeshSpec,
    PoleTooClose,
    EvaluationFailure,
    RiccatiBlowup,
    DegenerateFrame,
    PoleHit,
    LogBranchFailure,
    ZeroArgument,
    UnsupportedFamily,
    InvalidCoefficient,
    CacheMismatch,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::ParametrizationBreakdown: return "ParametrizationBreakdown";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::BranchJumpTooLarge: return "BranchJumpTooLarge";
    case ErrorKind::BadMeshSpec: return "BadMeshSpec";
    case ErrorKind::PoleTooClose: return "PoleTooClose";
    case ErrorKind::EvaluationFailure: return "EvaluationFailure";
    case ErrorKind::RiccatiBlowup: return "RiccatiBlowup";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::LogBranchFailure: return "LogBranchFailure";
    case ErrorKind::ZeroArgument: return "ZeroArgument";
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::InvalidCoefficient: return "InvalidCoefficient";
    case ErrorKind::CacheMismatch: return "CacheMismatch";
    }
    return "Unknown";
}

/// Every failure raised by the library. `node()` carries the 0-based mesh
/// index (0 is the truncation point B) when the failure is tied to one.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> node = std::nullopt)
        : std::runtime_error(compose(kind, what, node)), kind_(kind), node_(node), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> node() const noexcept { return node_; }

    /// Copy of this error annotated with a node index.
    Error at_node(std::size_t node) const { return Error(kind_, detail_, node); }

private:
    static std::string compose(ErrorKind kind, const std::string& what, std::optional<std::size_t> node) {
        std::string out(to_string(kind));
        if (node) out += " at node " + std::to_string(*node);
        out += ": ";
        out += what;
        return out;
    }

    ErrorKind kind_;
    std::optional<std::size_t> node_;
    std::string detail_;
};

} // namespace rhode
