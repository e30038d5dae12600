#pragma once

#include <stdexcept>
#include <string>

namespace reduxion {

enum class ErrorKind {
    DuplicateModeLabel,
    InvalidMode,
    SystemMismatch,
    ZeroState,
    InvalidBipartition,
    NotNormalized,
    NonPositiveTau,
    NonPositiveBeta,
    BadDistribution,
    NoEntanglement,
    NonConvergent,
    UnsupportedEnsembleSize,
    StageOverflow,
    CutoffTooSmall,
    InvalidParameter,
    ConfigInvalid,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace reduxion
