#include "pccloud/error.hpp"

namespace pccloud {

std::string_view toString(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::NotFound: return "notFound";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::CacheMiss: return "cacheMiss";
    case ErrorKind::Provider: return "providerError";
    case ErrorKind::RateLimited: return "rateLimited";
    case ErrorKind::Network: return "network";
    }
    return "unknown";
}

}  // namespace pccloud
