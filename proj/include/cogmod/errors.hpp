#pragma once

#include <stdexcept>
#include <string>

namespace cogmod {

/// Base error for every rejected operation and malformed input.
/// Messages always name the offending file, flag, or value.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Parse failure in a text input; the message carries file and line.
class parse_error : public error {
public:
    parse_error(const std::string& file, int line, const std::string& what)
        : error(file + ":" + std::to_string(line) + ": " + what) {}
    explicit parse_error(const std::string& what) : error(what) {}
};

} // namespace cogmod
