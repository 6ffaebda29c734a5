// Error taxonomy shared by every module. Each failure mode carries a stable
// machine-readable code so the CLI can map exceptions to JSON error objects
// without string matching.
#pragma once

#include <stdexcept>
#include <string>

namespace srblab {

enum class Err {
    TailTruncated,
    OutOfDomain,
    OutOfImage,
    ContractionViolated,
    NotConverged,
    EmptyCylinder,
    DegenerateCylinder,
    InsufficientPast,
    AllSeedsEscaped,
    MassLeak,
    ItineraryMismatch,
    UnderSampled,
    StripsOverlap,
    ConeEscape,
    Diverging,
    ConfigInvalid,
    InvalidArgument,
};

inline const char* err_code(Err e) {
    switch (e) {
    case Err::TailTruncated:       return "tail_truncated";
    case Err::OutOfDomain:         return "out_of_domain";
    case Err::OutOfImage:          return "out_of_image";
    case Err::ContractionViolated: return "contraction_violated";
    case Err::NotConverged:        return "not_converged";
    case Err::EmptyCylinder:       return "empty_cylinder";
    case Err::DegenerateCylinder:  return "degenerate_cylinder";
    case Err::InsufficientPast:    return "insufficient_past";
    case Err::AllSeedsEscaped:     return "all_seeds_escaped";
    case Err::MassLeak:            return "mass_leak";
    case Err::ItineraryMismatch:   return "itinerary_mismatch";
    case Err::UnderSampled:        return "under_sampled";
    case Err::StripsOverlap:       return "strips_overlap";
    case Err::ConeEscape:          return "cone_escape";
    case Err::Diverging:           return "diverging";
    case Err::ConfigInvalid:       return "config_invalid";
    case Err::InvalidArgument:     return "invalid_argument";
    }
    return "unknown";
}

class SrbError : public std::runtime_error {
public:
    SrbError(Err code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Err code() const noexcept { return code_; }
    const char* code_str() const noexcept { return err_code(code_); }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
    throw SrbError(code, what);
}

} // namespace srblab
