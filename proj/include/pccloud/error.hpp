#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pccloud {

/// Failure classes shared by every module. The CLI maps them onto exit
/// codes and the service onto HTTP statuses.
enum class ErrorKind {
    Parameter,      // caller passed an out-of-contract argument
    Io,             // filesystem failure
    Parse,          // malformed JSON or payload
    Validation,     // well-formed data that breaks a corpus invariant
    NotFound,       // unknown id / provider 404
    Configuration,  // missing setup, e.g. a reviewer without external ids
    CacheMiss,      // offline fetch with no cached response
    Provider,       // provider answered with an unexpected HTTP status
    RateLimited,    // provider kept answering 429
    Network,        // transport-level failure
};

std::string_view toString(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, int httpStatus = 0)
        : std::runtime_error(message), kind_(kind), httpStatus_(httpStatus)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

    /// Status code reported by a bibliographic provider, 0 when not applicable.
    int httpStatus() const noexcept { return httpStatus_; }

private:
    ErrorKind kind_;
    int httpStatus_;
};

}  // namespace pccloud
