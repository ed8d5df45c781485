#include "tabmax/scanner.hpp"

#include <atomic>
#include <filesystem>
#include <thread>

#include "tabmax/binary_model.hpp"
#include "tabmax/code_analysis.hpp"
#include "tabmax/version.hpp"

namespace tabmax {

ScanOptions::ScanOptions()
    : sql_baseline(builtin_sql_baseline()), ps1_baseline(builtin_ps1_baseline()) {}

ScanRow scan_file(const std::string& path, const ScanOptions& opts) {
    ScanRow row;
    row.file_name = std::filesystem::path(path).filename().string();
    if (row.file_name.empty()) row.file_name = path;
    try {
        BinaryImage image = load_binary(path);
        row.sha256 = image.sha256;

        std::vector<ExtractedString> strings = extract_strings(image, opts.config.min_string_len);
        IndicatorHits hits = match_indicators(strings, opts.config);
        ObfuscationIndices idx = obfuscation_indices(strings, opts.sql_baseline, opts.ps1_baseline);

        std::vector<FunctionRegion> functions = disassemble(image);
        std::vector<ExtractedString> anchors;
        for (const ExtractedString& s : strings) {
            if (s.labels.has(StringLabel::CONTENT_TYPE)) anchors.push_back(s);
        }
        find_string_xrefs(image, functions, anchors);
        CodeAnalysisOptions code_opts{opts.cmp_strict};
        CodeIndicators code = count_compare_indicators(image, functions, opts.config, code_opts);

        return assemble_row(row.file_name, image.sha256, hits, idx, code);
    } catch (const BinaryLoadError& e) {
        row.error = e.what();
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

ScanReport scan_files(const std::vector<std::string>& paths, const ScanOptions& opts) {
    ScanReport report;
    report.tool_version = kToolVersion;
    report.config_digest = opts.config.digest();
    report.sql_baseline_id = opts.sql_baseline.source_id;
    report.ps1_baseline_id = opts.ps1_baseline.source_id;

    std::vector<ScanRow> rows(paths.size());
    std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
    if (jobs <= 1 || paths.size() <= 1) {
        for (std::size_t i = 0; i < paths.size(); ++i) rows[i] = scan_file(paths[i], opts);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= paths.size()) return;
                rows[i] = scan_file(paths[i], opts);
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(jobs, paths.size()); ++t) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) t.join();
    }
    for (ScanRow& row : rows) insert_row(report, std::move(row));
    return report;
}

}  // namespace tabmax
