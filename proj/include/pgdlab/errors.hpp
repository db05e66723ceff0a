#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pgdlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad parameter value or mismatched dimension.
struct InvalidArgument : Error {
    using Error::Error;
};

/// An operation was called outside its stated precondition (e.g. a point outside the domain).
struct PreconditionError : Error {
    using Error::Error;
};

/// The requested accuracy cannot be met by a feasible hard instance.
struct InfeasiblePrecision : Error {
    using Error::Error;
};

/// A construction would not satisfy its own certificate.
struct CertificateViolation : Error {
    using Error::Error;
};

/// The operation needs information the objective does not carry (e.g. an unknown minimum).
struct Refused : Error {
    using Error::Error;
};

/// Every violated field of a configuration, one message each.
struct ConfigError : Error {
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations(std::move(violations))
    {
    }

    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out = "invalid configuration:";
        for (const auto& s : v) out += "\n  " + s;
        return out;
    }
};

} // namespace pgdlab
