#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tabmax/code_analysis.hpp"

namespace tabmax {

struct Simhash128 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    bool operator==(const Simhash128&) const = default;
};

unsigned hamming_distance(const Simhash128& a, const Simhash128& b);
std::string simhash_hex(const Simhash128& h);  // 32 hex chars, hi then lo

struct FunctionDigest {
    std::string binary_id;  // 16-hex-char sha256 prefix
    std::uint64_t entry_va = 0;
    Simhash128 simhash;
    std::size_t instruction_count = 0;
    std::size_t branching_node_count = 0;  // conditional branches
};

struct MatchRecord {
    double score = 0.0;  // 1 - hamming/128
    FunctionDigest left;
    FunctionDigest right;
};

/// 128-bit simhash over overlapping 3-grams of normalized mnemonics with
/// operands abstracted to REG/MEM/IMM classes; streams shorter than 3
/// instructions fall back to a single whole-stream gram.
FunctionDigest function_digest(const std::string& binary_id, const FunctionRegion& region);

std::vector<FunctionDigest> digest_binary(const BinaryImage& image,
                                          const std::vector<FunctionRegion>& functions);

/// 1 - popcount(a XOR b)/128; rendered with 6 decimals in reports.
double simhash_similarity(const FunctionDigest& a, const FunctionDigest& b);

/// Best-scoring right-side match for every left function of at least
/// min_instructions, kept when score >= threshold, sorted descending.
std::vector<MatchRecord> match_binaries(const std::vector<FunctionDigest>& left,
                                        const std::vector<FunctionDigest>& right,
                                        double threshold, std::size_t min_instructions);

/// "SCORE: left_id.entry matches right_id.entry (L/R - N branching nodes)"
std::string render_match(const MatchRecord& m);

/// Line-oriented digest exchange:
/// binary_id entry_va_hex simhash_hex instruction_count branching_node_count
void write_digests(std::ostream& out, const std::vector<FunctionDigest>& digests);
std::vector<FunctionDigest> read_digests(std::istream& in);

}  // namespace tabmax
