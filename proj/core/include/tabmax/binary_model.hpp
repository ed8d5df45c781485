#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tabmax/errors.hpp"

namespace tabmax {

enum class BinaryFormat { PE64, PE32, ELF64 };

const char* format_name(BinaryFormat f);

struct Section {
    std::string name;
    std::uint64_t file_offset = 0;
    std::uint64_t file_size = 0;
    std::uint64_t virtual_address = 0;
    std::uint64_t virtual_size = 0;
    bool executable = false;
    bool readable = false;

    bool contains_va(std::uint64_t va) const {
        return va >= virtual_address && va - virtual_address < file_size;
    }
};

struct ImportEntry {
    std::string dll_name;     // empty for ELF (no per-symbol library mapping)
    std::string symbol_name;  // "#N" for import-by-ordinal
    std::uint64_t thunk_va = 0;
};

struct LoadOptions {
    std::uint64_t max_file_size = 256ull * 1024 * 1024;
};

// Immutable in-memory model of one executable. Safe to share across threads
// once loaded.
struct BinaryImage {
    std::string path;
    BinaryFormat format = BinaryFormat::PE64;
    std::uint64_t image_base = 0;
    std::uint64_t entry_point_va = 0;  // 0 when the format declares none
    std::vector<Section> sections;
    std::vector<ImportEntry> imports;
    std::vector<std::uint8_t> raw;
    std::string sha256;  // 64 hex chars over raw

    bool is_64bit() const { return format != BinaryFormat::PE32; }
};

/// Parse headers, section table and import table of a PE32/PE64/ELF64 file.
/// Throws BinaryLoadError; see LoadErrorKind for the failure classes.
BinaryImage load_binary(const std::string& path, const LoadOptions& opts = {});

/// Same parser over an in-memory buffer ("path" is used for reporting only).
BinaryImage load_binary_bytes(std::vector<std::uint8_t> bytes, const std::string& path = "<memory>",
                              const LoadOptions& opts = {});

/// Case-sensitive exact match on symbol_name; absence is a value.
std::optional<ImportEntry> resolve_import(const BinaryImage& image, const std::string& symbol);

/// Map a virtual address through its containing section; none when unmapped
/// or when the address lies in a virtual-only (zero-backed) tail.
std::optional<std::uint64_t> va_to_offset(const BinaryImage& image, std::uint64_t va);

/// Inverse of va_to_offset for file offsets that fall inside a section.
std::optional<std::uint64_t> offset_to_va(const BinaryImage& image, std::uint64_t offset);

}  // namespace tabmax
