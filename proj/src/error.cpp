#include "reduxion/error.hpp"

namespace reduxion {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DuplicateModeLabel: return "DuplicateModeLabel";
    case ErrorKind::InvalidMode: return "InvalidMode";
    case ErrorKind::SystemMismatch: return "SystemMismatch";
    case ErrorKind::ZeroState: return "ZeroState";
    case ErrorKind::InvalidBipartition: return "InvalidBipartition";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NonPositiveTau: return "NonPositiveTau";
    case ErrorKind::NonPositiveBeta: return "NonPositiveBeta";
    case ErrorKind::BadDistribution: return "BadDistribution";
    case ErrorKind::NoEntanglement: return "NoEntanglement";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::UnsupportedEnsembleSize: return "UnsupportedEnsembleSize";
    case ErrorKind::StageOverflow: return "StageOverflow";
    case ErrorKind::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

} // namespace reduxion
