#pragma once

#include <stdexcept>

namespace hoistream {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateRotation : Error { using Error::Error; };
struct DegenerateHeading : Error { using Error::Error; };
struct SequenceTooShort : Error { using Error::Error; };
struct InvalidT : Error { using Error::Error; };
struct WidthMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct InvalidContextCount : Error { using Error::Error; };
struct BufferNotReady : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };

}  // namespace hoistream
