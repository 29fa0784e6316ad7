#include "zigzag/error.hpp"

namespace zz {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::Validation: return "ValidationError";
        case ErrorKind::NoEdgeState: return "NoEdgeState";
        case ErrorKind::DegenerateFiber: return "DegenerateFiber";
        case ErrorKind::OnEssentialSpectrum: return "OnEssentialSpectrum";
        case ErrorKind::PoleAtZero: return "PoleAtZero";
        case ErrorKind::DiracDegeneracy: return "DiracDegeneracy";
        case ErrorKind::NearDiracPoint: return "NearDiracPoint";
        case ErrorKind::NoBoundState: return "NoBoundState";
        case ErrorKind::GridTooLarge: return "GridTooLarge";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

}  // namespace zz
