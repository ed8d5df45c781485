#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tabmax/binary_model.hpp"
#include "tabmax/string_analysis.hpp"
#include "tabmax/x86_decoder.hpp"

namespace tabmax {

struct FunctionRegion {
    std::uint64_t entry_va = 0;
    std::vector<InstructionRecord> instructions;
    std::size_t basic_block_count = 1;
    std::vector<std::uint64_t> string_refs;  // VAs of referenced target strings
};

struct ConstantFingerprint {
    std::string name;
    std::uint64_t va = 0;  // entry of the flagged function
};

struct CodeIndicators {
    std::size_t cmp_ascii_count = 0;
    std::size_t strstr_call_count = 0;
    std::size_t comparestringa_call_count = 0;
    std::size_t comparestringw_call_count = 0;  // reported separately
    std::size_t anchored_function_count = 0;
    std::vector<std::string> command_tokens;
    std::vector<ConstantFingerprint> constant_fingerprints;
};

struct CodeAnalysisOptions {
    // When set, only cmp-family opcodes count toward cmp_ascii_count;
    // otherwise test-with-immediate also counts.
    bool cmp_strict = false;
};

/// Linear-sweep disassembly of every executable section, partitioned into
/// function regions at call targets, the module entry point, and standard
/// prologue patterns. Throws BinaryLoadError(UnsupportedFormat) for non-x86
/// machine types (cannot happen for images produced by load_binary).
std::vector<FunctionRegion> disassemble(const BinaryImage& image);

/// Per-section sweep statistics, exposed for the decode-progress property.
std::vector<SweepResult> sweep_executable_sections(const BinaryImage& image);

/// Subset of functions containing an instruction whose memory or immediate
/// operand resolves to a target string's VA; matches are appended to each
/// region's string_refs.
std::vector<FunctionRegion*> find_string_xrefs(const BinaryImage& image,
                                               std::vector<FunctionRegion>& functions,
                                               const std::vector<ExtractedString>& targets);

/// cmp-with-printable-immediate count, strstr / CompareStringA / -W call-site
/// counts, anchored-function count (string_refs filled by find_string_xrefs),
/// plus command tokens and known-constant fingerprints.
CodeIndicators count_compare_indicators(const BinaryImage& image,
                                        const std::vector<FunctionRegion>& functions,
                                        const IndicatorConfig& cfg,
                                        const CodeAnalysisOptions& opts = {});

/// Literal comparands near compare sites: a string referenced by an address
/// load within the 5 instructions before a compare/call site, or the
/// printable bytes of the cmp immediate. Deduplicated, first-appearance order.
std::vector<std::string> extract_command_tokens(const BinaryImage& image,
                                                const std::vector<FunctionRegion>& functions,
                                                const CodeAnalysisOptions& opts = {});

/// Functions containing a known algorithm constant as an immediate.
std::vector<ConstantFingerprint> detect_known_constants(const BinaryImage& image,
                                                        const std::vector<FunctionRegion>& functions,
                                                        const IndicatorConfig& cfg);

/// Printable little-endian byte decomposition of an immediate (high-order
/// zero bytes stripped); empty when any remaining byte is non-printable.
std::string printable_immediate_bytes(std::uint64_t imm_value, std::uint8_t imm_size);

}  // namespace tabmax
