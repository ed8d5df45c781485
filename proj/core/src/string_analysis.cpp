#include "tabmax/string_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "tabmax/base64.hpp"
#include "tabmax/sha256.hpp"

namespace tabmax {

namespace {

inline bool printable(std::uint8_t b) { return b >= 0x20 && b <= 0x7e; }

inline bool word_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool letter_digit(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

inline char lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }

std::string to_lower(const std::string& s) {
    std::string out(s.size(), '\0');
    std::transform(s.begin(), s.end(), out.begin(), lower);
    return out;
}

// Case-insensitive occurrences of needle in haystack (both pre-lowercased).
std::vector<std::size_t> find_all(const std::string& hay_lower, const std::string& needle_lower) {
    std::vector<std::size_t> hits;
    if (needle_lower.empty() || needle_lower.size() > hay_lower.size()) return hits;
    std::size_t pos = 0;
    while ((pos = hay_lower.find(needle_lower, pos)) != std::string::npos) {
        hits.push_back(pos);
        ++pos;
    }
    return hits;
}

// Keyword match with boundary rules. A neighbour in [A-Za-z0-9_] breaks a
// token match, but a keyword edge that is itself a separator ("sp_",
// "Invoke-", "$", ".ps1") needs no boundary on that side.
bool keyword_matches(const std::string& text_lower, const std::string& kw_lower) {
    for (std::size_t pos : find_all(text_lower, kw_lower)) {
        bool left_ok = !letter_digit(kw_lower.front()) || pos == 0 || !word_char(text_lower[pos - 1]);
        std::size_t end = pos + kw_lower.size();
        bool right_ok = !letter_digit(kw_lower.back()) || end == text_lower.size() ||
                        !word_char(text_lower[end]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

struct LoweredSet {
    std::vector<std::string> entries;
    explicit LoweredSet(const std::set<std::string>& src) {
        entries.reserve(src.size());
        for (const std::string& s : src) entries.push_back(to_lower(s));
    }
};

LabelSet classify_lowered(const std::string& lower_text, const LoweredSet& sql,
                          const LoweredSet& ps) {
    LabelSet labels;
    for (const std::string& kw : sql.entries) {
        if (keyword_matches(lower_text, kw)) {
            labels.set(StringLabel::SQL);
            break;
        }
    }
    for (const std::string& kw : ps.entries) {
        if (keyword_matches(lower_text, kw)) {
            labels.set(StringLabel::POWERSHELL);
            break;
        }
    }
    return labels;
}

}  // namespace

IndicatorConfig IndicatorConfig::defaults() {
    IndicatorConfig cfg;
    cfg.sql_keywords = {"SELECT",  "INSERT",  "UPDATE",   "DELETE", "FROM",
                        "WHERE",   "EXEC",    "EXECUTE",  "DECLARE", "CURSOR",
                        "xp_cmdshell", "sp_", "tempdb",   "sysobjects", "OPENROWSET"};
    cfg.ps_keywords = {"Invoke-", "Get-", "Set-", "New-Object", "DownloadString",
                       "IEX", "-ExecutionPolicy", "-EncodedCommand", "$", ".ps1"};
    cfg.suspicious_keywords = {"DownloadString", "upload", "download",
                               "httpmodule", "encode", "decode"};
    cfg.suspicious_apis = {"CreateProcess", "WinExec", "ShellExecute", "VirtualAllocEx",
                           "WriteProcessMemory", "CreateRemoteThread", "URLDownloadToFile",
                           "InternetOpenUrl", "WSASocket", "CreatePipe", "AdjustTokenPrivileges"};
    cfg.content_types = {"text/plain", "text/html", "application/json",
                         "application/octet-stream", "application/x-www-form-urlencoded",
                         "image/png", "image/jpeg"};
    cfg.known_constants = {{"adler32", 0xFFF1}, {"adler32", 0x15B0}};
    return cfg;
}

std::string IndicatorConfig::digest() const {
    std::ostringstream os;
    auto dump = [&os](const char* name, const std::set<std::string>& set) {
        os << '[' << name << "]\n";
        for (const std::string& s : set) os << s << '\n';
    };
    dump("sql_keywords", sql_keywords);
    dump("ps_keywords", ps_keywords);
    dump("suspicious_keywords", suspicious_keywords);
    dump("suspicious_apis", suspicious_apis);
    dump("content_types", content_types);
    os << "[constants]\n";
    for (const auto& [name, value] : known_constants) os << name << '=' << value << '\n';
    os << "[options]\nmin_string_len=" << min_string_len
       << "\nmin_base64_len=" << min_base64_len << '\n';
    if (!sql_baseline_path.empty()) os << "sql_baseline=" << sql_baseline_path << '\n';
    if (!ps1_baseline_path.empty()) os << "ps1_baseline=" << ps1_baseline_path << '\n';
    return sha256_hex(os.str());
}

std::size_t IndicatorHits::keyword_occurrences() const {
    return std::count_if(keyword_hits.begin(), keyword_hits.end(),
                         [](const KeywordHit& h) { return h.hit_class == HitClass::KEYWORD; });
}

std::size_t IndicatorHits::api_occurrences() const {
    return keyword_hits.size() - keyword_occurrences();
}

std::size_t IndicatorHits::distinct_keywords() const {
    std::set<std::string> names;
    for (const KeywordHit& h : keyword_hits) names.insert(h.keyword);
    return names.size();
}

std::vector<ExtractedString> extract_strings_from_bytes(std::span<const std::uint8_t> raw,
                                                        std::size_t min_len) {
    std::vector<ExtractedString> out;
    if (min_len == 0) min_len = 1;

    // Single-byte ASCII runs.
    std::size_t i = 0;
    while (i < raw.size()) {
        if (!printable(raw[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < raw.size() && printable(raw[i])) ++i;
        if (i - start >= min_len) {
            ExtractedString s;
            s.text.assign(reinterpret_cast<const char*>(raw.data() + start), i - start);
            s.encoding = StringEncoding::ASCII;
            s.file_offset = start;
            s.char_length = i - start;
            out.push_back(std::move(s));
        }
    }

    // UTF-16LE runs: printable low byte followed by 0x00, repeated.
    i = 0;
    while (i + 1 < raw.size()) {
        if (!(printable(raw[i]) && raw[i + 1] == 0)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        std::string text;
        while (i + 1 < raw.size() && printable(raw[i]) && raw[i + 1] == 0) {
            text.push_back(char(raw[i]));
            i += 2;
        }
        if (text.size() >= min_len) {
            ExtractedString s;
            s.text = std::move(text);
            s.encoding = StringEncoding::UTF16LE;
            s.file_offset = start;
            s.char_length = s.text.size();
            out.push_back(std::move(s));
        } else {
            i = start + 1;  // too short; do not skip potential later runs
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const ExtractedString& a, const ExtractedString& b) {
        if (a.file_offset != b.file_offset) return a.file_offset < b.file_offset;
        return a.encoding < b.encoding;
    });
    return out;
}

std::vector<ExtractedString> extract_strings(const BinaryImage& image, std::size_t min_len) {
    return extract_strings_from_bytes(std::span<const std::uint8_t>(image.raw), min_len);
}

LabelSet classify_string(const std::string& text, const IndicatorConfig& cfg) {
    LoweredSet sql(cfg.sql_keywords), ps(cfg.ps_keywords);
    return classify_lowered(to_lower(text), sql, ps);
}

std::optional<Base64Match> detect_base64(const std::string& text, std::size_t min_b64_len) {
    std::optional<Base64Match> best;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_base64_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && is_base64_char(text[i])) ++i;
        std::size_t run_len = i - start;
        std::size_t pad = 0;
        while (i < text.size() && text[i] == '=' && pad < 2) {
            ++i;
            ++pad;
        }

        // Candidates inside this run, longest first: the pad-terminated form,
        // then the longest 4-aligned unpadded window at each start phase.
        std::vector<std::pair<std::size_t, std::size_t>> candidates;  // (pos, len)
        if (pad > 0 && (run_len + pad) % 4 == 0) candidates.emplace_back(start, run_len + pad);
        for (std::size_t phase = 0; phase < 4 && phase < run_len; ++phase) {
            std::size_t aligned = (run_len - phase) / 4 * 4;
            if (aligned > 0) candidates.emplace_back(start + phase, aligned);
        }
        for (const auto& [pos, len] : candidates) {
            if (len < min_b64_len) continue;
            if (best && best->matched.size() >= len) continue;
            std::string candidate = text.substr(pos, len);
            auto decoded = base64_decode_strict(candidate);
            if (!decoded) continue;
            best = Base64Match{std::move(*decoded), std::move(candidate), pos};
        }
    }
    return best;
}

IndicatorHits match_indicators(std::vector<ExtractedString>& strings, const IndicatorConfig& cfg) {
    IndicatorHits hits;
    LoweredSet sql(cfg.sql_keywords);
    LoweredSet ps(cfg.ps_keywords);
    LoweredSet keywords(cfg.suspicious_keywords);
    LoweredSet apis(cfg.suspicious_apis);
    LoweredSet content_types(cfg.content_types);
    std::vector<std::string> content_type_values(cfg.content_types.begin(), cfg.content_types.end());
    std::vector<std::string> keyword_values(cfg.suspicious_keywords.begin(),
                                            cfg.suspicious_keywords.end());
    std::vector<std::string> api_values(cfg.suspicious_apis.begin(), cfg.suspicious_apis.end());

    for (ExtractedString& s : strings) {
        std::string lower_for_classify = to_lower(s.text);
        s.labels = classify_lowered(lower_for_classify, sql, ps);
        if (s.labels.has(StringLabel::SQL)) ++hits.sql_string_count;
        if (s.labels.has(StringLabel::POWERSHELL)) ++hits.ps_string_count;

        const std::string& lower_text = lower_for_classify;
        std::size_t char_bytes = s.bytes_per_char();

        for (std::size_t k = 0; k < keywords.entries.size(); ++k) {
            for (std::size_t pos : find_all(lower_text, keywords.entries[k])) {
                hits.keyword_hits.push_back(
                    {keyword_values[k], s.file_offset + pos * char_bytes, HitClass::KEYWORD});
                s.labels.set(StringLabel::KEYWORD);
            }
        }
        for (std::size_t k = 0; k < apis.entries.size(); ++k) {
            for (std::size_t pos : find_all(lower_text, apis.entries[k])) {
                hits.keyword_hits.push_back(
                    {api_values[k], s.file_offset + pos * char_bytes, HitClass::API});
                s.labels.set(StringLabel::KEYWORD);
            }
        }
        for (std::size_t k = 0; k < content_types.entries.size(); ++k) {
            for (std::size_t pos : find_all(lower_text, content_types.entries[k])) {
                hits.content_type_hits.push_back(
                    {content_type_values[k], s.file_offset + pos * char_bytes});
                s.labels.set(StringLabel::CONTENT_TYPE);
            }
        }
        if (auto b64 = detect_base64(s.text, cfg.min_base64_len)) {
            hits.base64_hits.push_back(
                {s.file_offset + b64->position * char_bytes, b64->decoded.size()});
            s.labels.set(StringLabel::BASE64);
        }
    }
    return hits;
}

}  // namespace tabmax
