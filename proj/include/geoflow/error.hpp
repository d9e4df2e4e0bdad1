#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace geoflow {

enum class ErrorCode {
    DegenerateGradient,
    NonTangentInput,
    OutsideTube,
    NewtonDivergence,
    TooFewPoints,
    OffManifold,
    MismatchedResolution,
    StabilityGuard,
    InvalidParameter,
    ProjectionFailure,
    UnsupportedManifold,
    EmptyCatalog,
    InvalidSweepout,
    Config,
    Io,
    Format,
};

inline const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Slice index for failures raised while tightening a sweepout.
    std::optional<std::size_t> slice() const noexcept { return slice_; }

    Error with_slice(std::size_t index) const {
        Error tagged(code_, "slice " + std::to_string(index) + ": " + what());
        tagged.slice_ = index;
        return tagged;
    }

    /// True for errors produced by the numerics (as opposed to bad input files or configs).
    bool is_numerical() const noexcept {
        switch (code_) {
            case ErrorCode::Config:
            case ErrorCode::Io:
            case ErrorCode::Format:
                return false;
            default:
                return true;
        }
    }

private:
    ErrorCode code_;
    std::optional<std::size_t> slice_;
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateGradient: return "degenerate-gradient";
        case ErrorCode::NonTangentInput: return "non-tangent-input";
        case ErrorCode::OutsideTube: return "outside-tube";
        case ErrorCode::NewtonDivergence: return "newton-divergence";
        case ErrorCode::TooFewPoints: return "too-few-points";
        case ErrorCode::OffManifold: return "off-manifold";
        case ErrorCode::MismatchedResolution: return "mismatched-resolution";
        case ErrorCode::StabilityGuard: return "stability-guard";
        case ErrorCode::InvalidParameter: return "invalid-parameter";
        case ErrorCode::ProjectionFailure: return "projection-failure";
        case ErrorCode::UnsupportedManifold: return "unsupported-manifold";
        case ErrorCode::EmptyCatalog: return "empty-catalog";
        case ErrorCode::InvalidSweepout: return "invalid-sweepout";
        case ErrorCode::Config: return "config";
        case ErrorCode::Io: return "io";
        case ErrorCode::Format: return "format";
    }
    return "unknown";
}

}  // namespace geoflow
