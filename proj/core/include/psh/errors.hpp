#pragma once

#include <stdexcept>
#include <string>

namespace psh {

// All engine errors carry a stable machine-readable category so the CLI can
// map them to exit codes without string matching on messages.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const { return category_; }

private:
    std::string category_;
};

inline Error make_error(const std::string& category, const std::string& message) {
    return Error(category, category + ": " + message);
}

}  // namespace psh
