#pragma once

#include <stdexcept>

namespace vfiqa {

// Raised for file/stream level failures: unreadable paths, truncated
// payloads, bad container signatures. Argument and dimension problems use
// std::invalid_argument instead, so callers can map the two classes to
// distinct exit codes.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vfiqa
