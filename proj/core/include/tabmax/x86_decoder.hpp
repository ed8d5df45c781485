#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tabmax {

enum class OperandKind { REG, MEM, IMM };

struct Operand {
    OperandKind kind = OperandKind::REG;
    // REG: register id; MEM: statically resolved absolute address (0 when
    // not computable); IMM: zero-extended encoded immediate.
    std::uint64_t value = 0;
};

struct InstructionRecord {
    std::uint64_t va = 0;
    std::uint8_t length = 0;
    std::string mnemonic;  // normalized, lower-case
    std::vector<Operand> operands;
    bool is_call = false;
    std::optional<std::uint64_t> call_target;  // direct calls only

    // Immediate detail, when the encoding carries one.
    bool has_immediate = false;
    std::uint64_t imm_value = 0;      // zero-extended from the encoded bytes
    std::int64_t imm_signed = 0;      // sign-extended from the encoded bytes
    std::uint8_t imm_size = 0;        // encoded size in bytes

    // Memory operand detail.
    bool has_mem_operand = false;
    std::uint64_t mem_abs_target = 0;  // RIP-relative / absolute disp, else 0

    bool is_cond_branch = false;
    std::optional<std::uint64_t> branch_target;  // rel8/rel32 branches
};

// One linear-sweep pass over a byte range.
struct SweepResult {
    std::vector<InstructionRecord> instructions;
    std::uint64_t decoded_bytes = 0;
    std::uint64_t skipped_bytes = 0;  // undecodable, resynchronized byte-wise
};

/// Decode a single instruction at va. Returns std::nullopt for undecodable
/// or truncated byte sequences.
std::optional<InstructionRecord> decode_instruction(std::span<const std::uint8_t> code,
                                                    std::uint64_t va, bool mode64);

/// Linear sweep with byte-wise resynchronization after undecodable input.
/// Always terminates; decoded_bytes + skipped_bytes == code.size().
SweepResult linear_sweep(std::span<const std::uint8_t> code, std::uint64_t va, bool mode64);

}  // namespace tabmax
