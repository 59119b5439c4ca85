#pragma once

#include <stdexcept>
#include <string>

namespace wingbeat {

// Base for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInput : Error { using Error::Error; };
struct EmptyBand : Error { using Error::Error; };
struct BinMismatch : Error { using Error::Error; };
struct NoPeak : Error { using Error::Error; };
struct NotEnoughBackground : Error { using Error::Error; };
struct InvalidTemplate : Error { using Error::Error; };
struct UnknownClass : Error { using Error::Error; };
struct DegeneratePosterior : Error { using Error::Error; };
struct NotEnoughData : Error { using Error::Error; };
struct NotEnoughVariance : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct InvalidTask : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace wingbeat
