#pragma once

#include <stdexcept>
#include <string>

namespace tabmax {

// Why an on-disk file could not be turned into a BinaryImage.
enum class LoadErrorKind {
    NotAnExecutable,   // magic bytes are neither MZ/PE nor ELF
    TruncatedHeaders,  // a declared header or table extends past the file
    UnsupportedFormat, // recognized container but unsupported machine/class
    FileTooLarge,      // exceeds the configured size cap
    MalformedImage,    // structurally inconsistent (e.g. overlapping sections)
    IoError,           // could not open or read the file
};

class BinaryLoadError : public std::runtime_error {
public:
    BinaryLoadError(LoadErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    LoadErrorKind kind() const { return kind_; }

private:
    LoadErrorKind kind_;
};

// Thrown when a frequency table is requested over zero printable characters.
class EmptyCorpusError : public std::runtime_error {
public:
    explicit EmptyCorpusError(std::string message)
        : std::runtime_error(std::move(message)) {}
};

// Config or baseline file problems (bad syntax, wrong row count, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string message)
        : std::runtime_error(std::move(message)) {}
};

}  // namespace tabmax
