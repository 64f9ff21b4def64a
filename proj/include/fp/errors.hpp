#pragma once

#include <stdexcept>
#include <string>

namespace fp {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raster / shape problems
struct ShapeMismatch : Error { using Error::Error; };
struct KernelTooLarge : Error { using Error::Error; };
struct InvalidKernel : Error { using Error::Error; };
struct InvalidFactor : Error { using Error::Error; };
struct OutOfBounds : Error { using Error::Error; };

// Domain problems
struct DegenerateImage : Error { using Error::Error; };
struct AngleOutOfRange : Error { using Error::Error; };
struct UnsupportedSpan : Error { using Error::Error; };
struct EmptyMinutiae : Error { using Error::Error; };
struct EmptyRoi : Error { using Error::Error; };

// Files and configuration
struct IoError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Raised by the pipeline driver; carries the name of the failing stage.
struct PipelineError : Error {
    std::string stage;
    PipelineError(std::string stage_, const std::string& what_)
        : Error("stage '" + stage_ + "': " + what_), stage(std::move(stage_)) {}
};

} // namespace fp
