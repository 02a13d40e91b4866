#pragma once

#include <stdexcept>
#include <string>

namespace signet {

/// Invalid configuration value or incompatible option combination (CLI exit 3).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Referenced input file or directory does not exist (CLI exit 2).
struct MissingArtifact : std::runtime_error {
    explicit MissingArtifact(const std::string& path)
        : std::runtime_error("missing artifact: " + path), path(path) {}
    std::string path;
};

/// Malformed on-disk data: bad magic, truncated payload, unparseable document.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tensor shape mismatch between operands.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Data fails a documented invariant (e.g. start_frame > end_frame).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Index outside the valid range of a clip or tensor.
struct BoundsError : std::runtime_error {
    explicit BoundsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unrecoverable runtime failure, e.g. NaN loss during training (CLI exit 4).
struct RuntimeFailure : std::runtime_error {
    explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace signet
