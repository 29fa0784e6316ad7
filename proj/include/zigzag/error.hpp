#pragma once

#include <stdexcept>
#include <string>

namespace zz {

enum class ErrorKind {
    Validation,
    NoEdgeState,
    DegenerateFiber,
    OnEssentialSpectrum,
    PoleAtZero,
    DiracDegeneracy,
    NearDiracPoint,
    NoBoundState,
    GridTooLarge,
    NonConvergence,
    Io,
};

const char* to_string(ErrorKind k);

/// Every library failure carries a kind so the CLI can map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace zz
