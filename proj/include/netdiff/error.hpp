#pragma once

#include <stdexcept>
#include <string>

namespace netdiff {

enum class ErrorKind {
    UnknownNode,
    InvalidNetwork,
    InvalidInput,
    ArityExceeded,
    NotMonotone,
    EndpointViolation,
    NotBipartite,
    OutOfRegion,
    TooLarge,
    NotStrict,
    UnsupportedBase,
    NotSingleParity,
    BlocksMixed,
    NoStoring,
    NotInFamily,
    RichnessViolated,
    StarOverlap,
    TargetTooLarge,
    InvalidTrajectory,
    NotFrontier,
    Internal,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace netdiff
