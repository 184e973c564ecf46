#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arbor {

using Index = std::int64_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// tree_core
struct InvalidDegreeSequence : Error { using Error::Error; };

// walk_codec
struct NotAnExcursion : Error { using Error::Error; };
struct NotADownwardSkipFreeBridge : Error { using Error::Error; };
struct InvalidJumpSequence : Error { using Error::Error; };

// samplers
struct InvalidDistribution : Error { using Error::Error; };
struct InvalidDegreeSum : Error { using Error::Error; };
struct AttemptsExhausted : Error { using Error::Error; };
struct UnreachableSize : Error { using Error::Error; };
struct NoTiltProvided : Error { using Error::Error; };
struct ZeroPartitionFunction : Error { using Error::Error; };

// transforms
struct NotALeaf : Error { using Error::Error; };
struct AncestorViolation : Error { using Error::Error; };
struct InvalidMarkedPair : Error { using Error::Error; };

// enumeration
struct SizeCapExceeded : Error { using Error::Error; };
struct EmptyConditioning : Error { using Error::Error; };

// experiments / io
struct IoFailure : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace arbor
