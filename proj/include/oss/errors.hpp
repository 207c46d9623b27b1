#pragma once

#include <stdexcept>
#include <string>

namespace oss {

/// Invalid scene/array/config content. CLI exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Unparseable or truncated file. CLI exit code 1.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// EPEP database no longer matches the current scene/config. CLI exit code 2.
struct StaleDatabaseError : std::runtime_error {
    explicit StaleDatabaseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace oss
