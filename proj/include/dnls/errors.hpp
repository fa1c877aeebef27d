#pragma once

#include <stdexcept>
#include <string>

namespace dnls {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowMismatch : Error { using Error::Error; };
struct PreconditionViolation : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };
struct NonpositiveOmega : Error { using Error::Error; };

struct NoConvergence : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct ClosureDominant : Error { using Error::Error; };
struct WeightTooLarge : Error { using Error::Error; };

struct SupportOverflow : Error { using Error::Error; };
struct BandEdge : Error { using Error::Error; };
struct NonOddInput : Error { using Error::Error; };

struct NonFinite : Error { using Error::Error; };
struct DegenerateProfile : Error { using Error::Error; };
struct NearSingularA : Error { using Error::Error; };
struct ProfileFailure : Error { using Error::Error; };

// Carries the offending key so the CLI can name it.
struct ConfigError : Error {
    std::string key;
    ConfigError(std::string k, const std::string& msg)
        : Error("config error at '" + k + "': " + msg), key(std::move(k)) {}
};

} // namespace dnls
