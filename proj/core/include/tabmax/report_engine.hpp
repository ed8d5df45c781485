#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tabmax/code_analysis.hpp"
#include "tabmax/obfuscation_index.hpp"
#include "tabmax/string_analysis.hpp"

namespace tabmax {

enum class ReportFormat { TABLE, CSV, JSON };

// One per-file indicator row. Indicator values only, never verdicts.
struct ScanRow {
    std::string file_name;
    std::string sha256;
    std::uint64_t sql_string_count = 0;
    std::uint64_t ps_string_count = 0;
    std::uint64_t keyword_api_count = 0;  // total keyword + API occurrences
    std::uint64_t keyword_occurrences = 0;
    std::uint64_t api_occurrences = 0;
    std::uint64_t distinct_keyword_count = 0;
    std::uint64_t base64_count = 0;
    double obf_index_sql = 0.0;
    double obf_index_ps1 = 0.0;
    std::uint64_t cmp_count = 0;
    std::uint64_t strstr_count = 0;
    std::uint64_t comparestringa_count = 0;
    std::uint64_t comparestringw_count = 0;
    bool command_sequence_found = false;  // == !command_tokens.empty()
    std::vector<std::string> command_tokens;
    std::vector<std::string> constant_fingerprints;  // "name@0xVA"
    std::string notes;  // advisory follow-up hints
    std::string error;  // non-empty when the file failed to scan

    bool operator==(const ScanRow&) const = default;
};

struct ScanReport {
    std::vector<ScanRow> rows;  // sorted by file_name
    std::string config_digest;
    std::string sql_baseline_id;
    std::string ps1_baseline_id;
    std::string tool_version;

    bool operator==(const ScanReport&) const = default;
};

ScanRow assemble_row(const std::string& file_path, const std::string& sha256,
                     const IndicatorHits& hits, const ObfuscationIndices& idx,
                     const CodeIndicators& code);

/// Add rows and keep the report's by-file-name ordering.
void insert_row(ScanReport& report, ScanRow row);

/// Byte-deterministic rendering. TABLE prints the string/obfuscation block
/// and the assembly block; CSV is RFC-4180; JSON carries full precision.
std::string render(const ScanReport& report, ReportFormat format);

/// Inverse of render(report, JSON).
ScanReport parse_report_json(const std::string& json_text);

}  // namespace tabmax
