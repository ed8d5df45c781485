// tabmax - static indicator scanner for web-server native modules.
//
// Subcommands: scan, build-corpus, compare, explain.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "tabmax/binary_model.hpp"
#include "tabmax/code_analysis.hpp"
#include "tabmax/errors.hpp"
#include "tabmax/obfuscation_index.hpp"
#include "tabmax/scanner.hpp"
#include "tabmax/similarity.hpp"
#include "tabmax/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScanFailure = 2;
constexpr int kExitUsage = 64;
constexpr int kExitEmptyCorpus = 65;
constexpr int kExitMissingInput = 66;

struct CliOptions {
    std::vector<std::string> inputs;
    std::string format = "table";
    std::string config_path;
    std::string sql_baseline_path;
    std::string ps1_baseline_path;
    std::size_t min_string_len = 3;
    bool min_string_len_given = false;
    std::size_t jobs = 1;
    bool cmp_strict = false;
    // build-corpus
    std::string sql_out = "sql_baseline.csv";
    std::string ps1_out = "ps1_baseline.csv";
    // compare
    double threshold = 0.80;
    std::size_t min_instructions = 10;
    std::string dump_digests;
    // explain
    std::string indicator;
};

tabmax::ReportFormat parse_format(const std::string& f) {
    if (f == "csv") return tabmax::ReportFormat::CSV;
    if (f == "json") return tabmax::ReportFormat::JSON;
    return tabmax::ReportFormat::TABLE;
}

// Baselines resolve: explicit flag, then config file, then builtin defaults.
int build_scan_options(const CliOptions& cli, tabmax::ScanOptions& opts) {
    std::string config_path = cli.config_path;
    if (config_path.empty()) {
        if (const char* env = std::getenv("TABMAX_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) {
        if (!std::filesystem::exists(config_path)) {
            std::cerr << "tabmax: config file not found: " << config_path << "\n";
            return kExitMissingInput;
        }
        try {
            opts.config = tabmax::load_indicator_config(config_path);
        } catch (const tabmax::ConfigError& e) {
            std::cerr << "tabmax: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    if (cli.min_string_len_given) opts.config.min_string_len = cli.min_string_len;
    opts.cmp_strict = cli.cmp_strict;
    opts.jobs = cli.jobs;

    // Baselines: explicit flag, then config file, then the embedded tables.
    std::string sql_path =
        !cli.sql_baseline_path.empty() ? cli.sql_baseline_path : opts.config.sql_baseline_path;
    std::string ps1_path =
        !cli.ps1_baseline_path.empty() ? cli.ps1_baseline_path : opts.config.ps1_baseline_path;
    try {
        if (!sql_path.empty()) {
            if (!std::filesystem::exists(sql_path)) {
                std::cerr << "tabmax: baseline file not found: " << sql_path << "\n";
                return kExitMissingInput;
            }
            opts.sql_baseline = tabmax::read_frequency_csv_file(sql_path);
        }
        if (!ps1_path.empty()) {
            if (!std::filesystem::exists(ps1_path)) {
                std::cerr << "tabmax: baseline file not found: " << ps1_path << "\n";
                return kExitMissingInput;
            }
            opts.ps1_baseline = tabmax::read_frequency_csv_file(ps1_path);
        }
    } catch (const tabmax::ConfigError& e) {
        std::cerr << "tabmax: " << e.what() << "\n";
        return kExitMissingInput;
    }
    return kExitOk;
}

int run_scan(const CliOptions& cli) {
    tabmax::ScanOptions opts;
    if (int rc = build_scan_options(cli, opts); rc != kExitOk) return rc;

    tabmax::ScanReport report = tabmax::scan_files(cli.inputs, opts);
    std::cout << tabmax::render(report, parse_format(cli.format));

    bool any_failed = false;
    for (const tabmax::ScanRow& row : report.rows) {
        if (!row.error.empty()) {
            std::cerr << "tabmax: " << row.file_name << ": " << row.error << "\n";
            any_failed = true;
        }
    }
    return any_failed ? kExitScanFailure : kExitOk;
}

int run_build_corpus(const CliOptions& cli) {
    const std::string& root = cli.inputs.front();
    if (!std::filesystem::is_directory(root)) {
        std::cerr << "tabmax: not a directory: " << root << "\n";
        return kExitMissingInput;
    }
    struct Lang {
        const char* name;
        const char* ext;
        const std::string* out;
    };
    for (Lang lang : {Lang{"sql", ".sql", &cli.sql_out}, Lang{"ps1", ".ps1", &cli.ps1_out}}) {
        tabmax::CorpusStats stats;
        try {
            tabmax::FrequencyTable table = tabmax::build_corpus_table(root, lang.ext, &stats);
            tabmax::write_frequency_csv_file(*lang.out, table);
        } catch (const tabmax::EmptyCorpusError&) {
            std::cerr << "tabmax: empty corpus for language " << lang.name << " (*" << lang.ext
                      << " under " << root << ")\n";
            return kExitEmptyCorpus;
        } catch (const tabmax::ConfigError& e) {
            std::cerr << "tabmax: " << e.what() << "\n";
            return kExitMissingInput;
        }
        std::cout << lang.name << ": " << stats.file_count << " files, " << stats.char_count
                  << " printable chars -> " << *lang.out << "\n";
    }
    return kExitOk;
}

int run_compare(const CliOptions& cli) {
    auto digest_side = [&](const std::string& path,
                           std::vector<tabmax::FunctionDigest>& out) -> int {
        if (path.size() > 8 && path.substr(path.size() - 8) == ".digests") {
            std::ifstream in(path);
            if (!in) {
                std::cerr << "tabmax: cannot open digest file: " << path << "\n";
                return kExitMissingInput;
            }
            out = tabmax::read_digests(in);
            return kExitOk;
        }
        try {
            tabmax::BinaryImage image = tabmax::load_binary(path);
            std::vector<tabmax::FunctionRegion> functions = tabmax::disassemble(image);
            out = tabmax::digest_binary(image, functions);
            return kExitOk;
        } catch (const tabmax::BinaryLoadError& e) {
            std::cerr << "tabmax: " << path << ": " << e.what() << "\n";
            return kExitScanFailure;
        }
    };

    std::vector<tabmax::FunctionDigest> left, right;
    if (int rc = digest_side(cli.inputs[0], left); rc != kExitOk) return rc;
    if (int rc = digest_side(cli.inputs[1], right); rc != kExitOk) return rc;

    if (!cli.dump_digests.empty()) {
        std::ofstream out(cli.dump_digests, std::ios::binary);
        if (!out) {
            std::cerr << "tabmax: cannot write " << cli.dump_digests << "\n";
            return kExitMissingInput;
        }
        tabmax::write_digests(out, left);
        tabmax::write_digests(out, right);
    }

    std::vector<tabmax::MatchRecord> matches =
        tabmax::match_binaries(left, right, cli.threshold, cli.min_instructions);
    for (const tabmax::MatchRecord& m : matches) {
        std::cout << tabmax::render_match(m) << "\n";
    }
    std::cerr << matches.size() << " match(es), threshold " << cli.threshold
              << ", min instructions " << cli.min_instructions << "\n";
    return kExitOk;
}

int run_explain(const CliOptions& cli) {
    static const std::map<std::string, std::string> kTopics = {
        {"sql_strings",
         "Number of extracted printable strings containing at least one SQL keyword as a\n"
         "whole token (SELECT, FROM, EXEC, xp_cmdshell, ...). Web-server native modules\n"
         "rarely embed raw query text; a high count suggests built-in database access."},
        {"ps1_strings",
         "Number of extracted strings matching PowerShell keywords (Invoke-, $ variables,\n"
         "IEX, -EncodedCommand, ...). Scripting fragments inside a native module point at\n"
         "command execution plumbing."},
        {"keywords",
         "Total occurrences of configured suspicious keywords (upload, download, encode,\n"
         "decode, httpmodule, DownloadString, ...) and API names, matched case-insensitively\n"
         "as substrings across all extracted strings."},
        {"base64",
         "Count of extracted strings containing a canonical base64 run of at least the\n"
         "configured minimum length (default 16) that decodes cleanly. Encoded blobs often\n"
         "carry payloads or staged commands."},
        {"obf_index_sql",
         "Cosine similarity between the character distribution of this file's SQL-labeled\n"
         "strings and a reference SQL corpus distribution. Values near 1 mean the strings\n"
         "are statistically close to real query text; typical benign modules sit lower."},
        {"obf_index_ps1",
         "Cosine similarity between the character distribution of PowerShell-labeled\n"
         "strings and a reference PowerShell corpus distribution; read like obf_index_sql."},
        {"cmp",
         "Count of cmp-family instructions (cmp, plus test-with-immediate unless\n"
         "--cmp-strict) whose immediate decomposes into printable ASCII bytes, e.g.\n"
         "cmp eax, 0x504D44 ('DMP'). Character-literal compares implement command parsing."},
        {"strstr",
         "Call sites resolving to the strstr import. Request-buffer substring probes are\n"
         "how native-module backdoors route attacker commands."},
        {"comparestringa",
         "Call sites resolving to the CompareStringA import (CompareStringW is reported\n"
         "separately). Clusters of string-compare calls near short literals indicate a\n"
         "command dispatch table."},
        {"commands",
         "Command tokens recovered near compare sites: string literals referenced by an\n"
         "address load within the five preceding instructions, or printable cmp immediate\n"
         "bytes. Example tokens: \"CMD|\", \"PIN|\", \"INJ|\", \"DMP|\"."},
        {"constants",
         "Functions containing known algorithm constants as immediates (e.g. the Adler-32\n"
         "modulus 0xFFF1 or its 0x15B0 block bound) - fingerprints statically linked\n"
         "checksum/compression code useful for cross-sample attribution."},
        {"simhash",
         "128-bit locality-sensitive hash over 3-grams of normalized mnemonics with\n"
         "operands abstracted to REG/MEM/IMM. Hamming-close digests mark near-duplicate\n"
         "functions across binaries; see the compare subcommand."},
    };
    auto it = kTopics.find(cli.indicator);
    if (it == kTopics.end()) {
        std::cerr << "tabmax: unknown indicator '" << cli.indicator << "'. Available:\n";
        for (const auto& [name, _] : kTopics) std::cerr << "  " << name << "\n";
        return kExitUsage;
    }
    std::cout << it->first << "\n\n" << it->second << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"static indicator scanner for web-server native modules"};
    app.set_version_flag("--version", tabmax::kToolVersion);
    app.require_subcommand(1);

    CliOptions cli;

    CLI::App* scan = app.add_subcommand("scan", "scan binaries and emit the indicator matrix");
    scan->add_option("inputs", cli.inputs, "files to scan")->required()->expected(-1);
    scan->add_option("--format", cli.format, "output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->default_val("table");
    scan->add_option("--config", cli.config_path, "indicator config file");
    scan->add_option("--sql-baseline", cli.sql_baseline_path, "SQL frequency baseline CSV");
    scan->add_option("--ps1-baseline", cli.ps1_baseline_path, "PowerShell frequency baseline CSV");
    auto* msl = scan->add_option("--min-string-len", cli.min_string_len,
                                 "minimum extracted string length (default 3)")
                    ->check(CLI::PositiveNumber);
    scan->add_option("--jobs", cli.jobs, "scan files concurrently")->default_val(1);
    scan->add_flag("--cmp-strict", cli.cmp_strict, "count only cmp opcodes (exclude test)");

    CLI::App* corpus = app.add_subcommand(
        "build-corpus", "build frequency baselines from .sql/.ps1 script trees");
    corpus->add_option("inputs", cli.inputs, "corpus directory")->required()->expected(1);
    corpus->add_option("--sql-out", cli.sql_out, "output CSV for the SQL table")
        ->default_val("sql_baseline.csv");
    corpus->add_option("--ps1-out", cli.ps1_out, "output CSV for the PowerShell table")
        ->default_val("ps1_baseline.csv");

    CLI::App* compare = app.add_subcommand("compare", "simhash function matching of two binaries");
    compare->add_option("inputs", cli.inputs, "two binaries (or .digests files)")
        ->required()
        ->expected(2);
    compare->add_option("--threshold", cli.threshold, "minimum match score")->default_val(0.80);
    compare->add_option("--min-instructions", cli.min_instructions,
                        "skip functions smaller than this")
        ->default_val(10);
    compare->add_option("--dump-digests", cli.dump_digests, "write both sides' digests to a file");

    CLI::App* explain = app.add_subcommand("explain", "describe one indicator");
    explain->add_option("indicator", cli.indicator, "indicator name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    cli.min_string_len_given = msl->count() > 0;

    if (scan->parsed()) return run_scan(cli);
    if (corpus->parsed()) return run_build_corpus(cli);
    if (compare->parsed()) return run_compare(cli);
    if (explain->parsed()) return run_explain(cli);
    return kExitUsage;
}
