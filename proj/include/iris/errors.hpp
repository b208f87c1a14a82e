#pragma once

#include <stdexcept>
#include <string>

namespace iris {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// I/O and container errors
struct FileNotFound : Error { using Error::Error; };
struct MalformedImage : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// geometry / segmentation errors
struct InvalidPupil : Error { using Error::Error; };
struct NoPupilFound : Error { using Error::Error; };
struct BoundaryNotFound : Error { using Error::Error; };
struct BandTooThin : Error { using Error::Error; };

// matching errors
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyOverlap : Error { using Error::Error; };

// sigset errors
struct MalformedSigSet : Error { using Error::Error; };
struct DanglingReference : Error { using Error::Error; };
struct DuplicateComparison : Error { using Error::Error; };

// evaluation errors
struct EmptyInput : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };

} // namespace iris
