#include "tabmax/report_engine.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace tabmax {

namespace {

std::string three_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

struct Column {
    std::string header;
    std::vector<std::string> cells;
};

std::string render_block(const std::string& title, std::vector<Column> columns) {
    std::ostringstream os;
    os << title << '\n';
    std::vector<std::size_t> widths(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        widths[c] = columns[c].header.size();
        for (const std::string& cell : columns[c].cells) {
            widths[c] = std::max(widths[c], cell.size());
        }
    }
    auto line = [&](auto get) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            std::string cell = get(c);
            if (c + 1 < columns.size()) {
                os << cell << std::string(widths[c] - cell.size(), ' ') << "  ";
            } else {
                os << cell;
            }
        }
        os << '\n';
    };
    line([&](std::size_t c) { return columns[c].header; });
    std::size_t total = 0;
    for (std::size_t w : widths) total += w;
    os << std::string(total + 2 * (columns.size() - 1), '-') << '\n';
    std::size_t rows = columns.empty() ? 0 : columns[0].cells.size();
    for (std::size_t r = 0; r < rows; ++r) {
        line([&](std::size_t c) { return columns[c].cells[r]; });
    }
    return os.str();
}

std::string render_table(const ScanReport& report) {
    std::ostringstream os;
    std::vector<Column> strings_block = {
        {"Native Module Filename", {}}, {"No. of SQL strings", {}},
        {"No. of ps1 strings", {}},     {"No. of Interesting strings/keywords and API", {}},
        {"No. of Base64 encoded strings", {}}, {"Obfuscation index SQL", {}},
        {"Obfuscation index ps1", {}},
    };
    std::vector<Column> assembly_block = {
        {"Native Module Filename", {}}, {"No. of CMP", {}}, {"No. of StrStr", {}},
        {"No. of Calling CompareStringA", {}}, {"No. of Calling CompareStringW", {}},
        {"Identified Character Sequence and Command", {}},
    };
    for (const ScanRow& r : report.rows) {
        strings_block[0].cells.push_back(r.file_name);
        strings_block[1].cells.push_back(std::to_string(r.sql_string_count));
        strings_block[2].cells.push_back(std::to_string(r.ps_string_count));
        strings_block[3].cells.push_back(std::to_string(r.keyword_api_count));
        strings_block[4].cells.push_back(std::to_string(r.base64_count));
        strings_block[5].cells.push_back(three_decimals(r.obf_index_sql));
        strings_block[6].cells.push_back(three_decimals(r.obf_index_ps1));
        assembly_block[0].cells.push_back(r.file_name);
        assembly_block[1].cells.push_back(std::to_string(r.cmp_count));
        assembly_block[2].cells.push_back(std::to_string(r.strstr_count));
        assembly_block[3].cells.push_back(std::to_string(r.comparestringa_count));
        assembly_block[4].cells.push_back(std::to_string(r.comparestringw_count));
        assembly_block[5].cells.push_back(r.command_sequence_found ? "Yes" : "No");
    }
    os << render_block("String and Obfuscation Detection", std::move(strings_block));
    os << '\n';
    os << render_block("Assembly Instruction-based Detection", std::move(assembly_block));

    bool any_extra = false;
    for (const ScanRow& r : report.rows) {
        if (!r.error.empty() || !r.notes.empty() || !r.command_tokens.empty() ||
            !r.constant_fingerprints.empty()) {
            any_extra = true;
        }
    }
    if (any_extra) {
        os << '\n';
        for (const ScanRow& r : report.rows) {
            if (!r.error.empty()) os << r.file_name << ": error: " << r.error << '\n';
            if (!r.command_tokens.empty()) {
                os << r.file_name << ": command tokens: " << join(r.command_tokens, ", ") << '\n';
            }
            if (!r.constant_fingerprints.empty()) {
                os << r.file_name << ": constants: " << join(r.constant_fingerprints, ", ") << '\n';
            }
            if (!r.notes.empty()) os << r.file_name << ": note: " << r.notes << '\n';
        }
    }
    return os.str();
}

std::string render_csv(const ScanReport& report) {
    std::ostringstream os;
    os << "file_name,sha256,sql_strings,ps1_strings,keywords_and_apis,base64_strings,"
          "obfuscation_index_sql,obfuscation_index_ps1,cmp_ascii,strstr_calls,"
          "comparestringa_calls,comparestringw_calls,command_sequence,command_tokens,"
          "constant_fingerprints,notes\r\n";
    for (const ScanRow& r : report.rows) {
        std::string notes = r.notes;
        if (!r.error.empty()) {
            notes = "ERROR: " + r.error + (notes.empty() ? "" : "; " + notes);
        }
        os << csv_quote(r.file_name) << ',' << r.sha256 << ',' << r.sql_string_count << ','
           << r.ps_string_count << ',' << r.keyword_api_count << ',' << r.base64_count << ','
           << three_decimals(r.obf_index_sql) << ',' << three_decimals(r.obf_index_ps1) << ','
           << r.cmp_count << ',' << r.strstr_count << ',' << r.comparestringa_count << ','
           << r.comparestringw_count << ',' << (r.command_sequence_found ? "Yes" : "No") << ','
           << csv_quote(join(r.command_tokens, ";")) << ','
           << csv_quote(join(r.constant_fingerprints, ";")) << ',' << csv_quote(notes) << "\r\n";
    }
    return os.str();
}

nlohmann::ordered_json row_to_json(const ScanRow& r) {
    nlohmann::ordered_json j;
    j["file_name"] = r.file_name;
    j["sha256"] = r.sha256;
    if (!r.error.empty()) j["error"] = r.error;
    j["sql_strings"] = r.sql_string_count;
    j["ps1_strings"] = r.ps_string_count;
    j["keywords_and_apis"] = r.keyword_api_count;
    j["keyword_occurrences"] = r.keyword_occurrences;
    j["api_occurrences"] = r.api_occurrences;
    j["keywords_distinct"] = r.distinct_keyword_count;
    j["base64_strings"] = r.base64_count;
    j["obfuscation_index_sql"] = r.obf_index_sql;
    j["obfuscation_index_ps1"] = r.obf_index_ps1;
    j["cmp_ascii"] = r.cmp_count;
    j["strstr_calls"] = r.strstr_count;
    j["comparestringa_calls"] = r.comparestringa_count;
    j["comparestringw_calls"] = r.comparestringw_count;
    j["command_sequence"] = r.command_sequence_found;
    j["command_tokens"] = r.command_tokens;
    j["constant_fingerprints"] = r.constant_fingerprints;
    j["notes"] = r.notes;
    return j;
}

ScanRow row_from_json(const nlohmann::ordered_json& j) {
    ScanRow r;
    r.file_name = j.at("file_name").get<std::string>();
    r.sha256 = j.at("sha256").get<std::string>();
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    r.sql_string_count = j.at("sql_strings").get<std::uint64_t>();
    r.ps_string_count = j.at("ps1_strings").get<std::uint64_t>();
    r.keyword_api_count = j.at("keywords_and_apis").get<std::uint64_t>();
    r.keyword_occurrences = j.at("keyword_occurrences").get<std::uint64_t>();
    r.api_occurrences = j.at("api_occurrences").get<std::uint64_t>();
    r.distinct_keyword_count = j.at("keywords_distinct").get<std::uint64_t>();
    r.base64_count = j.at("base64_strings").get<std::uint64_t>();
    r.obf_index_sql = j.at("obfuscation_index_sql").get<double>();
    r.obf_index_ps1 = j.at("obfuscation_index_ps1").get<double>();
    r.cmp_count = j.at("cmp_ascii").get<std::uint64_t>();
    r.strstr_count = j.at("strstr_calls").get<std::uint64_t>();
    r.comparestringa_count = j.at("comparestringa_calls").get<std::uint64_t>();
    r.comparestringw_count = j.at("comparestringw_calls").get<std::uint64_t>();
    r.command_sequence_found = j.at("command_sequence").get<bool>();
    r.command_tokens = j.at("command_tokens").get<std::vector<std::string>>();
    r.constant_fingerprints = j.at("constant_fingerprints").get<std::vector<std::string>>();
    r.notes = j.at("notes").get<std::string>();
    return r;
}

std::string render_json(const ScanReport& report) {
    nlohmann::ordered_json j;
    j["tool_version"] = report.tool_version;
    j["config_digest"] = report.config_digest;
    j["baselines"] = {{"sql", report.sql_baseline_id}, {"ps1", report.ps1_baseline_id}};
    j["rows"] = nlohmann::ordered_json::array();
    for (const ScanRow& r : report.rows) j["rows"].push_back(row_to_json(r));
    return j.dump(2) + "\n";
}

}  // namespace

ScanRow assemble_row(const std::string& file_path, const std::string& sha256,
                     const IndicatorHits& hits, const ObfuscationIndices& idx,
                     const CodeIndicators& code) {
    ScanRow row;
    row.file_name = file_path;
    row.sha256 = sha256;
    row.sql_string_count = hits.sql_string_count;
    row.ps_string_count = hits.ps_string_count;
    row.keyword_api_count = hits.keyword_hits.size();
    row.keyword_occurrences = hits.keyword_occurrences();
    row.api_occurrences = hits.api_occurrences();
    row.distinct_keyword_count = hits.distinct_keywords();
    row.base64_count = hits.base64_hits.size();
    row.obf_index_sql = idx.sql_index;
    row.obf_index_ps1 = idx.ps1_index;
    row.cmp_count = code.cmp_ascii_count;
    row.strstr_count = code.strstr_call_count;
    row.comparestringa_count = code.comparestringa_call_count;
    row.comparestringw_count = code.comparestringw_call_count;
    row.command_tokens = code.command_tokens;
    row.command_sequence_found = !row.command_tokens.empty();
    for (const ConstantFingerprint& fp : code.constant_fingerprints) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s@0x%llx", fp.name.c_str(),
                      static_cast<unsigned long long>(fp.va));
        row.constant_fingerprints.push_back(buf);
    }

    // Advisory notes only; indicator interpretation stays with the analyst.
    bool string_side = hits.sql_string_count || hits.ps_string_count || !hits.base64_hits.empty();
    bool code_side = code.cmp_ascii_count || code.strstr_call_count ||
                     code.comparestringa_call_count || code.comparestringw_call_count;
    if (string_side && !code_side) {
        row.notes = "string indicators without compare-dispatch code; "
                    "verify module signature and hash";
    } else if (row.command_sequence_found) {
        row.notes = "command dispatch tokens recovered near compare sites";
    }
    return row;
}

void insert_row(ScanReport& report, ScanRow row) {
    auto it = std::lower_bound(report.rows.begin(), report.rows.end(), row,
                               [](const ScanRow& a, const ScanRow& b) {
                                   return a.file_name < b.file_name;
                               });
    report.rows.insert(it, std::move(row));
}

std::string render(const ScanReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::TABLE: return render_table(report);
        case ReportFormat::CSV: return render_csv(report);
        case ReportFormat::JSON: return render_json(report);
    }
    return {};
}

ScanReport parse_report_json(const std::string& json_text) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(json_text);
    ScanReport report;
    report.tool_version = j.at("tool_version").get<std::string>();
    report.config_digest = j.at("config_digest").get<std::string>();
    report.sql_baseline_id = j.at("baselines").at("sql").get<std::string>();
    report.ps1_baseline_id = j.at("baselines").at("ps1").get<std::string>();
    for (const auto& row : j.at("rows")) report.rows.push_back(row_from_json(row));
    return report;
}

}  // namespace tabmax
