#include "tabmax/obfuscation_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tabmax/errors.hpp"

namespace tabmax {

namespace {

inline bool printable(unsigned char b) { return b >= 0x20 && b <= 0x7e; }

FrequencyTable normalize_counts(const std::array<std::uint64_t, kPrintableDims>& counts,
                                TableProvenance prov, const std::string& source_id) {
    FrequencyTable t;
    t.provenance = prov;
    t.source_id = source_id;
    for (std::uint64_t c : counts) t.total_chars += c;
    if (t.total_chars > 0) {
        for (std::size_t i = 0; i < kPrintableDims; ++i) {
            t.values[i] = double(counts[i]) / double(t.total_chars);
        }
    }
    return t;
}

void count_text(const std::string& text, std::array<std::uint64_t, kPrintableDims>& counts) {
    for (unsigned char c : text) {
        if (printable(c)) ++counts[c - kPrintableFirst];
    }
}

struct BaselineEntry {
    char ch;
    double freq;
};

// 30 highest-frequency characters measured over reference script corpora;
// the remaining 65 printable codes share the residual mass uniformly.
constexpr BaselineEntry kSqlTop30[] = {
    {'0', 0.087421}, {' ', 0.075127}, {'e', 0.047623}, {'a', 0.034788}, {'3', 0.034726},
    {'6', 0.034533}, {'C', 0.033376}, {'4', 0.033155}, {',', 0.032057}, {'9', 0.032014},
    {'t', 0.031492}, {'1', 0.025061}, {'i', 0.024927}, {'r', 0.022208}, {'o', 0.021458},
    {'n', 0.021324}, {'5', 0.019975}, {'\'', 0.019325}, {'c', 0.019143}, {'d', 0.017487},
    {'D', 0.017420}, {'7', 0.016492}, {'2', 0.016190}, {'F', 0.015992}, {'E', 0.013884},
    {'8', 0.013748}, {'m', 0.012664}, {'l', 0.010761}, {'T', 0.010660}, {'S', 0.010444},
};

constexpr BaselineEntry kPs1Top30[] = {
    {' ', 0.168742}, {'e', 0.085947}, {'t', 0.056438}, {'r', 0.055300}, {'o', 0.052609},
    {'a', 0.048058}, {'i', 0.038527}, {'s', 0.036009}, {'n', 0.035964}, {'c', 0.030310},
    {'-', 0.025493}, {'u', 0.025067}, {'m', 0.020010}, {'p', 0.019976}, {'l', 0.019949},
    {'$', 0.018316}, {'d', 0.016633}, {'g', 0.013452}, {'"', 0.012247}, {'N', 0.011838},
    {'S', 0.010192}, {'A', 0.010040}, {'h', 0.009941}, {'.', 0.008611}, {'y', 0.007967},
    {'b', 0.007843}, {'f', 0.007659}, {'I', 0.007238}, {'P', 0.006948}, {'R', 0.006778},
};

FrequencyTable reconstruct_baseline(std::span<const BaselineEntry> top30,
                                    const std::string& source_id) {
    FrequencyTable t;
    t.provenance = TableProvenance::CORPUS;
    t.source_id = source_id;
    t.total_chars = 0;  // reconstructed, not counted from a corpus
    std::array<bool, kPrintableDims> published{};
    double mass = 0.0;
    for (const BaselineEntry& e : top30) {
        std::size_t idx = static_cast<unsigned char>(e.ch) - kPrintableFirst;
        t.values[idx] = e.freq;
        published[idx] = true;
        mass += e.freq;
    }
    double residual = std::max(0.0, 1.0 - mass);
    double share = residual / double(kPrintableDims - top30.size());
    for (std::size_t i = 0; i < kPrintableDims; ++i) {
        if (!published[i]) t.values[i] = share;
    }
    return t;
}

}  // namespace

FrequencyTable build_frequency_table(const std::vector<std::string>& texts,
                                     const std::string& source_id) {
    std::array<std::uint64_t, kPrintableDims> counts{};
    for (const std::string& text : texts) count_text(text, counts);
    FrequencyTable t = normalize_counts(counts, TableProvenance::CORPUS, source_id);
    if (t.total_chars == 0) {
        throw EmptyCorpusError("corpus '" + source_id + "' contains no printable characters");
    }
    return t;
}

FrequencyTable target_frequency(const std::vector<ExtractedString>& strings, StringLabel label) {
    std::array<std::uint64_t, kPrintableDims> counts{};
    for (const ExtractedString& s : strings) {
        if (s.labels.has(label)) count_text(s.text, counts);
    }
    const char* id = (label == StringLabel::SQL) ? "target:sql" : "target:ps1";
    return normalize_counts(counts, TableProvenance::TARGET, id);
}

double cosine_similarity(const FrequencyTable& a, const FrequencyTable& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < kPrintableDims; ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    double sim = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(sim, 0.0, 1.0);
}

ObfuscationIndices obfuscation_indices(const std::vector<ExtractedString>& strings,
                                       const FrequencyTable& sql_baseline,
                                       const FrequencyTable& ps_baseline) {
    ObfuscationIndices out;
    FrequencyTable sql_target = target_frequency(strings, StringLabel::SQL);
    FrequencyTable ps_target = target_frequency(strings, StringLabel::POWERSHELL);
    out.sql_char_total = sql_target.total_chars;
    out.ps1_char_total = ps_target.total_chars;
    out.sql_index = (sql_target.total_chars == 0) ? 0.0 : cosine_similarity(sql_target, sql_baseline);
    out.ps1_index = (ps_target.total_chars == 0) ? 0.0 : cosine_similarity(ps_target, ps_baseline);
    return out;
}

const FrequencyTable& builtin_sql_baseline() {
    static const FrequencyTable t = reconstruct_baseline(kSqlTop30, "builtin:sql-top30");
    return t;
}

const FrequencyTable& builtin_ps1_baseline() {
    static const FrequencyTable t = reconstruct_baseline(kPs1Top30, "builtin:ps1-top30");
    return t;
}

void write_frequency_csv(std::ostream& out, const FrequencyTable& table) {
    out << "char_code,frequency\n";
    char buf[40];
    for (std::size_t i = 0; i < kPrintableDims; ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12f\n", i + kPrintableFirst, table.values[i]);
        out << buf;
    }
}

void write_frequency_csv_file(const std::string& path, const FrequencyTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path + ": cannot write frequency table");
    write_frequency_csv(out, table);
}

FrequencyTable read_frequency_csv(std::istream& in, const std::string& source_id) {
    FrequencyTable t;
    t.provenance = TableProvenance::CORPUS;
    t.source_id = source_id;
    std::string line;
    if (!std::getline(in, line) || line.rfind("char_code,frequency", 0) != 0) {
        throw ConfigError(source_id + ": missing 'char_code,frequency' header");
    }
    std::size_t rows = 0;
    std::array<bool, kPrintableDims> seen{};
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError(source_id + ": malformed row '" + line + "'");
        }
        unsigned code;
        double freq;
        try {
            code = std::stoul(line.substr(0, comma));
            freq = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ConfigError(source_id + ": malformed row '" + line + "'");
        }
        if (code < kPrintableFirst || code >= kPrintableFirst + kPrintableDims) {
            throw ConfigError(source_id + ": char_code " + std::to_string(code) +
                              " outside printable range");
        }
        if (seen[code - kPrintableFirst]) {
            throw ConfigError(source_id + ": duplicate row for char_code " + std::to_string(code));
        }
        seen[code - kPrintableFirst] = true;
        if (freq < 0.0) throw ConfigError(source_id + ": negative frequency");
        t.values[code - kPrintableFirst] = freq;
        ++rows;
    }
    if (rows != kPrintableDims) {
        throw ConfigError(source_id + ": expected " + std::to_string(kPrintableDims) +
                          " rows, found " + std::to_string(rows));
    }
    return t;
}

FrequencyTable read_frequency_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open frequency table");
    return read_frequency_csv(in, path);
}

FrequencyTable build_corpus_table(const std::string& root, const std::string& extension,
                                  CorpusStats* stats) {
    namespace fs = std::filesystem;
    std::array<std::uint64_t, kPrintableDims> counts{};
    std::size_t files = 0;
    std::vector<fs::path> paths;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(root, ec), end; it != end && !ec; it.increment(ec)) {
        if (!it->is_regular_file()) continue;
        std::string ext = it->path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return char(std::tolower(c)); });
        if (ext == extension) paths.push_back(it->path());
    }
    if (ec) throw ConfigError(root + ": " + ec.message());
    std::sort(paths.begin(), paths.end());
    for (const fs::path& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) continue;
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        count_text(content, counts);
        ++files;
    }
    FrequencyTable t =
        normalize_counts(counts, TableProvenance::CORPUS, root + " (*" + extension + ")");
    if (stats) {
        stats->file_count = files;
        stats->char_count = t.total_chars;
    }
    if (t.total_chars == 0) {
        throw EmptyCorpusError("no printable characters in *" + extension + " files under " + root);
    }
    return t;
}

}  // namespace tabmax
