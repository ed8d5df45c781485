#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabmax/binary_model.hpp"

namespace tabmax {

enum class StringEncoding { ASCII, UTF16LE };

enum class StringLabel : std::uint8_t {
    SQL = 1 << 0,
    POWERSHELL = 1 << 1,
    BASE64 = 1 << 2,
    KEYWORD = 1 << 3,
    CONTENT_TYPE = 1 << 4,
};

// Small flag set over StringLabel.
struct LabelSet {
    std::uint8_t bits = 0;

    bool has(StringLabel l) const { return bits & static_cast<std::uint8_t>(l); }
    void set(StringLabel l) { bits |= static_cast<std::uint8_t>(l); }
    bool empty() const { return bits == 0; }
    bool operator==(const LabelSet&) const = default;

    // "a superset of b"
    bool contains(const LabelSet& other) const { return (bits & other.bits) == other.bits; }
};

struct ExtractedString {
    std::string text;  // decoded to single-byte printable ASCII
    StringEncoding encoding = StringEncoding::ASCII;
    std::uint64_t file_offset = 0;
    std::size_t char_length = 0;
    LabelSet labels;

    std::size_t bytes_per_char() const { return encoding == StringEncoding::UTF16LE ? 2 : 1; }
};

struct IndicatorConfig {
    std::set<std::string> sql_keywords;
    std::set<std::string> ps_keywords;
    std::set<std::string> suspicious_keywords;
    std::set<std::string> suspicious_apis;
    std::set<std::string> content_types;
    std::vector<std::pair<std::string, std::uint64_t>> known_constants;  // name -> immediate
    std::size_t min_string_len = 3;
    std::size_t min_base64_len = 16;
    // Optional baseline CSVs; explicit CLI flags take precedence, the
    // embedded tables remain the fallback.
    std::string sql_baseline_path;
    std::string ps1_baseline_path;

    static IndicatorConfig defaults();

    /// Stable digest over a canonical serialization, for report provenance.
    std::string digest() const;
};

/// Plain-text config: "[section]" headers, one entry per line, '#' comments.
/// Sections: sql_keywords, ps_keywords, suspicious_keywords, suspicious_apis,
/// content_types, constants (name=hexvalue), options (key=value).
/// Unlisted sections keep their built-in defaults.
IndicatorConfig load_indicator_config(const std::string& path);

enum class HitClass { KEYWORD, API };

struct KeywordHit {
    std::string keyword;
    std::uint64_t file_offset = 0;
    HitClass hit_class = HitClass::KEYWORD;
};

struct Base64Hit {
    std::uint64_t file_offset = 0;   // of the matched substring
    std::size_t decoded_length = 0;
};

struct ContentTypeHit {
    std::string value;  // the configured content-type that matched
    std::uint64_t file_offset = 0;
};

struct IndicatorHits {
    std::size_t sql_string_count = 0;
    std::size_t ps_string_count = 0;
    std::vector<KeywordHit> keyword_hits;
    std::vector<Base64Hit> base64_hits;
    std::vector<ContentTypeHit> content_type_hits;

    std::size_t keyword_occurrences() const;
    std::size_t api_occurrences() const;
    std::size_t distinct_keywords() const;  // distinct keyword/API names hit
};

/// All maximal printable runs (0x20..0x7E) of at least min_len characters,
/// scanned as single-byte ASCII and as UTF-16LE, offsets ascending.
std::vector<ExtractedString> extract_strings(const BinaryImage& image, std::size_t min_len);

/// Same scan over an arbitrary buffer.
std::vector<ExtractedString> extract_strings_from_bytes(std::span<const std::uint8_t> raw,
                                                        std::size_t min_len);

/// SQL / POWERSHELL labels by keyword matching. Word keywords match as whole
/// tokens ([A-Za-z0-9_] neighbours break a match); keywords whose edge
/// characters are themselves separators ("sp_", "Invoke-", "$", ".ps1") skip
/// the boundary check on that side. Labels are independent.
LabelSet classify_string(const std::string& text, const IndicatorConfig& cfg);

struct Base64Match {
    std::vector<std::uint8_t> decoded;
    std::string matched;     // the exact substring that decoded
    std::size_t position = 0;  // char index within the containing text
};

/// Longest substring over [A-Za-z0-9+/] with optional '=' padding that is
/// 4-aligned, at least min_b64_len chars, and decodes canonically.
std::optional<Base64Match> detect_base64(const std::string& text, std::size_t min_b64_len);

/// Labels every string (SQL/POWERSHELL/BASE64/KEYWORD/CONTENT_TYPE) and
/// aggregates per-class hits. Keyword/API and content-type matching is
/// case-insensitive substring search.
IndicatorHits match_indicators(std::vector<ExtractedString>& strings, const IndicatorConfig& cfg);

}  // namespace tabmax
