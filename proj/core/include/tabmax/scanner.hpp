#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tabmax/obfuscation_index.hpp"
#include "tabmax/report_engine.hpp"
#include "tabmax/string_analysis.hpp"

namespace tabmax {

struct ScanOptions {
    IndicatorConfig config = IndicatorConfig::defaults();
    FrequencyTable sql_baseline;  // empty source_id -> builtin
    FrequencyTable ps1_baseline;
    bool cmp_strict = false;
    std::size_t jobs = 1;

    ScanOptions();
};

/// Full pipeline for one file: load, extract, classify, indices, disassemble,
/// count, assemble. Load/parse failures are reported through ScanRow::error.
ScanRow scan_file(const std::string& path, const ScanOptions& opts);

/// Batch scan; a malformed file never affects another file's row. Rows are
/// merged by file name into a deterministic report.
ScanReport scan_files(const std::vector<std::string>& paths, const ScanOptions& opts);

}  // namespace tabmax
