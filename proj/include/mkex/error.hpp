#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mkex {

// All failures carry a short stable code ("shape", "io", "protocol", ...)
// next to the human-readable message. Tests and the CLI exit-code mapping
// dispatch on the code, never on the message text.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace mkex
