#pragma once

#include <stdexcept>
#include <string>

namespace emrsim {

/// Malformed or semantically invalid configuration input.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
    ConfigError(const std::string& source, int line, const std::string& msg)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg) {
    }
};

/// Filesystem / stream failure.
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed repository content discovered while summarizing.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
    DataError(const std::string& file, std::uint64_t line,
              const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg) {}
};

}  // namespace emrsim
