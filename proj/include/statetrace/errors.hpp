#pragma once

#include <stdexcept>
#include <string>

namespace statetrace {

/// File exists but does not parse as the expected format.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// File parsed but carries an unsupported format_version.
class VersionedFormatError : public std::runtime_error {
public:
    explicit VersionedFormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Detection produced no change points, so nearest-distance metrics are undefined.
class NoDetectionsError : public std::runtime_error {
public:
    explicit NoDetectionsError(const std::string& what) : std::runtime_error(what) {}
};

/// Fewer than two usable segments; segment-wise statistics are undefined.
class DegenerateSegmentationError : public std::runtime_error {
public:
    explicit DegenerateSegmentationError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

}  // namespace detail
}  // namespace statetrace
