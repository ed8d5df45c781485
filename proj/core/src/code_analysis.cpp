#include "tabmax/code_analysis.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>

namespace tabmax {

namespace {

inline bool printable(std::uint8_t b) { return b >= 0x20 && b <= 0x7e; }

struct SectionSweep {
    const Section* section;
    SweepResult sweep;
};

std::vector<SectionSweep> sweep_sections(const BinaryImage& image) {
    std::vector<SectionSweep> out;
    bool mode64 = image.is_64bit();
    for (const Section& s : image.sections) {
        if (!s.executable || s.file_size == 0) continue;
        std::span<const std::uint8_t> code(image.raw.data() + s.file_offset, s.file_size);
        out.push_back({&s, linear_sweep(code, s.virtual_address, mode64)});
    }
    return out;
}

constexpr std::uint64_t kRegSp = 4;
constexpr std::uint64_t kRegBp = 5;

bool is_prologue_pair(const InstructionRecord& a, const InstructionRecord* b) {
    // push rbp/ebp; mov rbp,rsp (either mov direction encoding).
    if (a.mnemonic != "push" || a.length > 2) return false;
    if (a.operands.size() != 1 || a.operands[0].value != kRegBp) return false;
    if (!b || b->mnemonic != "mov" || b->has_immediate || b->has_mem_operand) return false;
    if (b->operands.size() != 2) return false;
    std::uint64_t r0 = b->operands[0].value, r1 = b->operands[1].value;
    return (r0 == kRegSp && r1 == kRegBp) || (r0 == kRegBp && r1 == kRegSp);
}

bool is_sub_rsp(const InstructionRecord& inst) {
    return inst.mnemonic == "sub" && inst.has_immediate && !inst.has_mem_operand;
}

bool is_terminator(const InstructionRecord& inst) {
    return inst.mnemonic == "ret" || inst.mnemonic == "retf" || inst.mnemonic == "int3" ||
           inst.mnemonic == "jmp" || inst.mnemonic == "nop" || inst.mnemonic == "hlt";
}

std::size_t count_basic_blocks(const std::vector<InstructionRecord>& insts) {
    if (insts.empty()) return 1;
    std::set<std::uint64_t> present;
    for (const InstructionRecord& i : insts) present.insert(i.va);
    std::uint64_t lo = insts.front().va;
    std::uint64_t hi = insts.back().va + insts.back().length;

    std::set<std::uint64_t> leaders{insts.front().va};
    for (std::size_t k = 0; k < insts.size(); ++k) {
        const InstructionRecord& i = insts[k];
        bool is_branch = i.branch_target.has_value() || i.mnemonic == "jmp" ||
                         i.mnemonic == "ret" || i.mnemonic == "retf";
        if (i.branch_target && *i.branch_target >= lo && *i.branch_target < hi &&
            present.count(*i.branch_target)) {
            leaders.insert(*i.branch_target);
        }
        if (is_branch && k + 1 < insts.size()) leaders.insert(insts[k + 1].va);
    }
    return leaders.size();
}

// Call-site -> imported symbol, following one jump-thunk hop for direct calls.
const ImportEntry* resolve_call_import(const BinaryImage& image,
                                       const InstructionRecord& call) {
    auto find_by_slot = [&image](std::uint64_t slot_va) -> const ImportEntry* {
        for (const ImportEntry& e : image.imports) {
            if (e.thunk_va == slot_va) return &e;
        }
        return nullptr;
    };

    if (call.has_mem_operand && call.mem_abs_target != 0) {
        return find_by_slot(call.mem_abs_target);
    }
    if (call.call_target) {
        // Direct call to an import thunk / PLT stub: scan a few instructions
        // at the target for jmp [slot].
        auto off = va_to_offset(image, *call.call_target);
        if (!off) return nullptr;
        std::uint64_t va = *call.call_target;
        std::size_t pos = *off;
        bool mode64 = image.is_64bit();
        for (int hops = 0; hops < 3 && pos < image.raw.size(); ++hops) {
            std::span<const std::uint8_t> bytes(image.raw.data() + pos,
                                                std::min<std::size_t>(16, image.raw.size() - pos));
            auto inst = decode_instruction(bytes, va, mode64);
            if (!inst) return nullptr;
            if (inst->mnemonic == "jmp" && inst->has_mem_operand && inst->mem_abs_target != 0) {
                return find_by_slot(inst->mem_abs_target);
            }
            if (inst->mnemonic != "nop" && inst->mnemonic != "fence") return nullptr;
            pos += inst->length;
            va += inst->length;
        }
    }
    return nullptr;
}

bool is_cmp_family(const InstructionRecord& inst, bool cmp_strict) {
    if (!inst.has_immediate) return false;
    if (inst.mnemonic == "cmp") return true;
    return !cmp_strict && inst.mnemonic == "test";
}

// Reads a printable literal (ASCII or UTF-16LE) starting at va; the longer
// consistent interpretation wins.
std::string read_string_at(const BinaryImage& image, std::uint64_t va, std::size_t max_len = 256) {
    auto off = va_to_offset(image, va);
    if (!off) return {};
    std::size_t pos = *off;
    std::string ascii;
    while (pos < image.raw.size() && ascii.size() < max_len && printable(image.raw[pos])) {
        ascii.push_back(char(image.raw[pos]));
        ++pos;
    }
    std::size_t p = *off;
    std::string wide;
    while (p + 1 < image.raw.size() && wide.size() < max_len && printable(image.raw[p]) &&
           image.raw[p + 1] == 0) {
        wide.push_back(char(image.raw[p]));
        p += 2;
    }
    if (wide.size() >= 2 && wide.size() >= ascii.size()) return wide;
    return ascii;
}

// Address-load instructions that could materialize a string pointer.
std::uint64_t address_load_target(const InstructionRecord& inst) {
    if (inst.mnemonic == "lea" && inst.has_mem_operand) return inst.mem_abs_target;
    if (inst.mnemonic == "mov" && inst.has_immediate && inst.imm_size >= 4) return inst.imm_value;
    if (inst.mnemonic == "push" && inst.has_immediate && inst.imm_size == 4) return inst.imm_value;
    return 0;
}

}  // namespace

std::string printable_immediate_bytes(std::uint64_t imm_value, std::uint8_t imm_size) {
    if (imm_size == 0) return {};
    // Strip high-order zero bytes, then every remaining byte must print.
    unsigned significant = imm_size;
    while (significant > 1 && ((imm_value >> (8 * (significant - 1))) & 0xFF) == 0) --significant;
    if (imm_value == 0) return {};
    std::string out;
    for (unsigned i = 0; i < significant; ++i) {
        std::uint8_t b = (imm_value >> (8 * i)) & 0xFF;
        if (!printable(b)) return {};
        out.push_back(char(b));
    }
    return out;
}

std::vector<SweepResult> sweep_executable_sections(const BinaryImage& image) {
    std::vector<SweepResult> out;
    for (SectionSweep& s : sweep_sections(image)) out.push_back(std::move(s.sweep));
    return out;
}

std::vector<FunctionRegion> disassemble(const BinaryImage& image) {
    std::vector<SectionSweep> sweeps = sweep_sections(image);

    // Boundary set: direct call targets anywhere, the entry point, and
    // prologue patterns.
    std::set<std::uint64_t> boundaries;
    for (const SectionSweep& ss : sweeps) {
        for (const InstructionRecord& inst : ss.sweep.instructions) {
            if (inst.is_call && inst.call_target) boundaries.insert(*inst.call_target);
        }
    }
    if (image.entry_point_va) boundaries.insert(image.entry_point_va);

    for (const SectionSweep& ss : sweeps) {
        const auto& insts = ss.sweep.instructions;
        for (std::size_t i = 0; i < insts.size(); ++i) {
            const InstructionRecord* next = (i + 1 < insts.size()) ? &insts[i + 1] : nullptr;
            if (is_prologue_pair(insts[i], next)) {
                boundaries.insert(insts[i].va);
            } else if (is_sub_rsp(insts[i]) && i > 0 && is_terminator(insts[i - 1])) {
                boundaries.insert(insts[i].va);
            }
        }
    }

    std::vector<FunctionRegion> regions;
    for (const SectionSweep& ss : sweeps) {
        const auto& insts = ss.sweep.instructions;
        std::uint64_t section_end = ss.section->virtual_address + ss.section->file_size;

        // Boundaries that fall inside this section, in order.
        std::vector<std::uint64_t> local;
        for (std::uint64_t b : boundaries) {
            if (b >= ss.section->virtual_address && b < section_end) local.push_back(b);
        }
        if (local.empty()) continue;

        std::size_t next_inst = 0;
        for (std::size_t bi = 0; bi < local.size(); ++bi) {
            std::uint64_t start = local[bi];
            std::uint64_t end = (bi + 1 < local.size()) ? local[bi + 1] : section_end;
            while (next_inst < insts.size() && insts[next_inst].va < start) ++next_inst;
            FunctionRegion region;
            while (next_inst < insts.size() && insts[next_inst].va < end) {
                region.instructions.push_back(insts[next_inst]);
                ++next_inst;
            }
            // Trailing alignment padding belongs to no function.
            while (!region.instructions.empty() &&
                   (region.instructions.back().mnemonic == "int3" ||
                    region.instructions.back().mnemonic == "nop")) {
                region.instructions.pop_back();
            }
            if (region.instructions.empty()) continue;
            region.entry_va = region.instructions.front().va;
            region.basic_block_count = count_basic_blocks(region.instructions);
            regions.push_back(std::move(region));
        }
    }
    std::sort(regions.begin(), regions.end(),
              [](const FunctionRegion& a, const FunctionRegion& b) { return a.entry_va < b.entry_va; });
    return regions;
}

std::vector<FunctionRegion*> find_string_xrefs(const BinaryImage& image,
                                               std::vector<FunctionRegion>& functions,
                                               const std::vector<ExtractedString>& targets) {
    // Map each target string's file offset to its virtual address.
    std::set<std::uint64_t> target_vas;
    for (const ExtractedString& s : targets) {
        if (auto va = offset_to_va(image, s.file_offset)) target_vas.insert(*va);
    }

    std::vector<FunctionRegion*> matched;
    if (target_vas.empty()) return matched;

    for (FunctionRegion& f : functions) {
        bool hit = false;
        for (const InstructionRecord& inst : f.instructions) {
            if (inst.has_mem_operand && inst.mem_abs_target != 0 &&
                target_vas.count(inst.mem_abs_target)) {
                f.string_refs.push_back(inst.mem_abs_target);
                hit = true;
            }
            if (inst.has_immediate && inst.imm_size >= 4 && target_vas.count(inst.imm_value)) {
                f.string_refs.push_back(inst.imm_value);
                hit = true;
            }
        }
        if (hit) matched.push_back(&f);
    }
    return matched;
}

CodeIndicators count_compare_indicators(const BinaryImage& image,
                                        const std::vector<FunctionRegion>& functions,
                                        const IndicatorConfig& cfg,
                                        const CodeAnalysisOptions& opts) {
    CodeIndicators out;
    for (const FunctionRegion& f : functions) {
        if (!f.string_refs.empty()) ++out.anchored_function_count;
        for (const InstructionRecord& inst : f.instructions) {
            if (is_cmp_family(inst, opts.cmp_strict) &&
                !printable_immediate_bytes(inst.imm_value, inst.imm_size).empty()) {
                ++out.cmp_ascii_count;
            }
            if (inst.is_call) {
                if (const ImportEntry* imp = resolve_call_import(image, inst)) {
                    if (imp->symbol_name == "strstr") ++out.strstr_call_count;
                    else if (imp->symbol_name == "CompareStringA") ++out.comparestringa_call_count;
                    else if (imp->symbol_name == "CompareStringW") ++out.comparestringw_call_count;
                }
            }
        }
    }
    out.command_tokens = extract_command_tokens(image, functions, opts);
    out.constant_fingerprints = detect_known_constants(image, functions, cfg);
    return out;
}

std::vector<std::string> extract_command_tokens(const BinaryImage& image,
                                                const std::vector<FunctionRegion>& functions,
                                                const CodeAnalysisOptions& opts) {
    std::vector<std::string> tokens;
    std::set<std::string> seen;
    auto add = [&](std::string tok) {
        if (tok.size() < 2) return;
        if (seen.insert(tok).second) tokens.push_back(std::move(tok));
    };

    for (const FunctionRegion& f : functions) {
        const auto& insts = f.instructions;
        for (std::size_t i = 0; i < insts.size(); ++i) {
            const InstructionRecord& inst = insts[i];
            bool compare_call = false;
            if (inst.is_call) {
                if (const ImportEntry* imp = resolve_call_import(image, inst)) {
                    compare_call = imp->symbol_name == "strstr" ||
                                   imp->symbol_name == "CompareStringA" ||
                                   imp->symbol_name == "CompareStringW";
                }
            }
            bool cmp_site = is_cmp_family(inst, opts.cmp_strict) &&
                            !printable_immediate_bytes(inst.imm_value, inst.imm_size).empty();
            if (!compare_call && !cmp_site) continue;

            // Address loads within the five preceding instructions.
            bool found_load = false;
            std::size_t first = (i >= 5) ? i - 5 : 0;
            for (std::size_t k = first; k < i; ++k) {
                std::uint64_t target = address_load_target(insts[k]);
                if (!target) continue;
                std::string literal = read_string_at(image, target);
                if (literal.size() >= 2) {
                    add(literal);
                    found_load = true;
                }
            }
            if (cmp_site && !found_load) {
                add(printable_immediate_bytes(inst.imm_value, inst.imm_size));
            }
        }
    }
    return tokens;
}

std::vector<ConstantFingerprint> detect_known_constants(const BinaryImage& image,
                                                        const std::vector<FunctionRegion>& functions,
                                                        const IndicatorConfig& cfg) {
    (void)image;
    std::vector<ConstantFingerprint> out;
    for (const FunctionRegion& f : functions) {
        std::set<std::string> flagged;
        for (const InstructionRecord& inst : f.instructions) {
            if (!inst.has_immediate) continue;
            for (const auto& [name, value] : cfg.known_constants) {
                if (flagged.count(name)) continue;
                if (inst.imm_value == value ||
                    (inst.imm_signed >= 0 && std::uint64_t(inst.imm_signed) == value)) {
                    flagged.insert(name);
                    out.push_back({name, f.entry_va});
                }
            }
        }
    }
    return out;
}

}  // namespace tabmax
