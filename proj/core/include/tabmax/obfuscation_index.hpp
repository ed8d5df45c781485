#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tabmax/string_analysis.hpp"

namespace tabmax {

inline constexpr std::size_t kPrintableDims = 95;  // ASCII 0x20..0x7E
inline constexpr char kPrintableFirst = 0x20;

enum class TableProvenance { CORPUS, TARGET };

// Normalized character distribution over the 95 printable ASCII codes.
struct FrequencyTable {
    std::array<double, kPrintableDims> values{};
    TableProvenance provenance = TableProvenance::CORPUS;
    std::string source_id;
    std::uint64_t total_chars = 0;

    double at(char c) const {
        unsigned idx = static_cast<unsigned char>(c) - kPrintableFirst;
        return idx < kPrintableDims ? values[idx] : 0.0;
    }
};

struct ObfuscationIndices {
    double sql_index = 0.0;
    double ps1_index = 0.0;
    std::uint64_t sql_char_total = 0;
    std::uint64_t ps1_char_total = 0;
};

/// Count printable characters over all texts and normalize. Non-printable
/// bytes are ignored. Throws EmptyCorpusError when nothing printable exists.
FrequencyTable build_frequency_table(const std::vector<std::string>& texts,
                                     const std::string& source_id);

/// Distribution over the concatenation of all strings carrying the label.
/// Zero matching strings yields the all-zero table (total_chars == 0).
FrequencyTable target_frequency(const std::vector<ExtractedString>& strings, StringLabel label);

/// dot(a,b) / (|a|*|b|), 0 when either norm is 0, clamped to [0,1].
double cosine_similarity(const FrequencyTable& a, const FrequencyTable& b);

ObfuscationIndices obfuscation_indices(const std::vector<ExtractedString>& strings,
                                       const FrequencyTable& sql_baseline,
                                       const FrequencyTable& ps_baseline);

/// Bundled corpus baselines: the 30 most frequent characters carry measured
/// reference-corpus values, the remaining 65 dims share the residual mass
/// uniformly. Rebuild from a real corpus with build-corpus for rigorous use.
const FrequencyTable& builtin_sql_baseline();
const FrequencyTable& builtin_ps1_baseline();

/// CSV with header "char_code,frequency", one row per printable code.
void write_frequency_csv(std::ostream& out, const FrequencyTable& table);
void write_frequency_csv_file(const std::string& path, const FrequencyTable& table);
FrequencyTable read_frequency_csv(std::istream& in, const std::string& source_id);
FrequencyTable read_frequency_csv_file(const std::string& path);

struct CorpusStats {
    std::size_t file_count = 0;
    std::uint64_t char_count = 0;
};

/// Recursively reads files with the given extension (".sql" / ".ps1") under
/// root and builds their character distribution.
FrequencyTable build_corpus_table(const std::string& root, const std::string& extension,
                                  CorpusStats* stats = nullptr);

}  // namespace tabmax
