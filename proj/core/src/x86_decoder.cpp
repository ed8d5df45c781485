#include "tabmax/x86_decoder.hpp"

#include <array>
#include <cstring>

namespace tabmax {

namespace {

enum : std::uint16_t {
    F_MODRM = 1 << 0,
    F_IMM8 = 1 << 1,
    F_IMM16 = 1 << 2,
    F_IMMZ = 1 << 3,   // 2 or 4 bytes by operand size
    F_IMMV = 1 << 4,   // 2/4/8 bytes by operand size
    F_REL8 = 1 << 5,
    F_RELZ = 1 << 6,
    F_MOFFS = 1 << 7,  // absolute address, address-size wide
    F_INV64 = 1 << 8,
    F_IMM_GRP3 = 1 << 9,  // F6/F7: immediate present iff modrm.reg <= 1
    F_ENTER = 1 << 10,    // imm16 + imm8
    F_FAR = 1 << 11,      // ptr16:16/32 immediate (32-bit mode only)
    F_UNDEF = 1 << 12,
};

struct OpSpec {
    const char* name = nullptr;          // nullptr with group: take group[reg]
    const char* const* group = nullptr;  // 8 entries; nullptr entry = undefined
    std::uint16_t flags = F_UNDEF;
};

const char* const kGrp1[8] = {"add", "or", "adc", "sbb", "and", "sub", "xor", "cmp"};
const char* const kGrp2[8] = {"rol", "ror", "rcl", "rcr", "shl", "shr", "sal", "sar"};
const char* const kGrp3[8] = {"test", "test", "not", "neg", "mul", "imul", "div", "idiv"};
const char* const kGrp4[8] = {"inc", "dec", nullptr, nullptr, nullptr, nullptr, nullptr, nullptr};
const char* const kGrp5[8] = {"inc", "dec", "call", "call", "jmp", "jmp", "push", nullptr};
const char* const kGrp6[8] = {"sldt", "str", "lldt", "ltr", "verr", "verw", nullptr, nullptr};
const char* const kGrp7[8] = {"sgdt", "sidt", "lgdt", "lidt", "smsw", nullptr, "lmsw", "invlpg"};
const char* const kGrp8[8] = {nullptr, nullptr, nullptr, nullptr, "bt", "bts", "btr", "btc"};
const char* const kGrpShift[8] = {"psrl", "psrl", "psrl", "psrl", "psra", "psra", "psll", "psll"};

const char* const kCc[16] = {"o", "no", "b", "ae", "e",  "ne", "be", "a",
                             "s", "ns", "p", "np", "l",  "ge", "le", "g"};

std::array<const char*, 16> make_cc_names(const char* stem) {
    std::array<const char*, 16> out{};
    for (int i = 0; i < 16; ++i) {
        auto* s = new std::string(std::string(stem) + kCc[i]);  // static-lifetime names
        out[i] = s->c_str();
    }
    return out;
}

struct Tables {
    std::array<OpSpec, 256> map1{};
    std::array<OpSpec, 256> map2{};
    std::array<const char*, 16> jcc;
    std::array<const char*, 16> setcc;
    std::array<const char*, 16> cmovcc;

    Tables() {
        jcc = make_cc_names("j");
        setcc = make_cc_names("set");
        cmovcc = make_cc_names("cmov");

        auto op = [this](int code, const char* name, std::uint16_t flags) {
            map1[code] = {name, nullptr, flags};
        };
        auto grp = [this](int code, const char* const* group, std::uint16_t flags) {
            map1[code] = {nullptr, group, std::uint16_t(flags | F_MODRM)};
        };

        // ALU blocks: op, op, op, op, AL+imm8, eAX+immz.
        struct Alu { int base; const char* name; };
        for (Alu a : {Alu{0x00, "add"}, Alu{0x08, "or"}, Alu{0x10, "adc"}, Alu{0x18, "sbb"},
                      Alu{0x20, "and"}, Alu{0x28, "sub"}, Alu{0x30, "xor"}, Alu{0x38, "cmp"}}) {
            for (int i = 0; i < 4; ++i) op(a.base + i, a.name, F_MODRM);
            op(a.base + 4, a.name, F_IMM8);
            op(a.base + 5, a.name, F_IMMZ);
        }
        for (int c : {0x06, 0x0E, 0x16, 0x1E}) op(c, "push", F_INV64);
        for (int c : {0x07, 0x17, 0x1F}) op(c, "pop", F_INV64);
        op(0x27, "daa", F_INV64);
        op(0x2F, "das", F_INV64);
        op(0x37, "aaa", F_INV64);
        op(0x3F, "aas", F_INV64);
        // 40-4F: inc/dec in 32-bit mode; REX prefixes in 64-bit (handled before lookup).
        for (int c = 0x40; c <= 0x47; ++c) op(c, "inc", 0);
        for (int c = 0x48; c <= 0x4F; ++c) op(c, "dec", 0);
        for (int c = 0x50; c <= 0x57; ++c) op(c, "push", 0);
        for (int c = 0x58; c <= 0x5F; ++c) op(c, "pop", 0);
        op(0x60, "pusha", F_INV64);
        op(0x61, "popa", F_INV64);
        op(0x62, "bound", F_MODRM | F_INV64);  // EVEX in 64-bit, special-cased
        op(0x63, "movsxd", F_MODRM);           // arpl in 32-bit; same shape
        op(0x68, "push", F_IMMZ);
        op(0x69, "imul", F_MODRM | F_IMMZ);
        op(0x6A, "push", F_IMM8);
        op(0x6B, "imul", F_MODRM | F_IMM8);
        op(0x6C, "insb", 0);
        op(0x6D, "insd", 0);
        op(0x6E, "outsb", 0);
        op(0x6F, "outsd", 0);
        for (int c = 0x70; c <= 0x7F; ++c) op(c, jcc[c - 0x70], F_REL8);
        grp(0x80, kGrp1, F_IMM8);
        grp(0x81, kGrp1, F_IMMZ);
        grp(0x82, kGrp1, F_IMM8 | F_INV64);
        grp(0x83, kGrp1, F_IMM8);
        op(0x84, "test", F_MODRM);
        op(0x85, "test", F_MODRM);
        op(0x86, "xchg", F_MODRM);
        op(0x87, "xchg", F_MODRM);
        for (int c = 0x88; c <= 0x8C; ++c) op(c, "mov", F_MODRM);
        op(0x8D, "lea", F_MODRM);
        op(0x8E, "mov", F_MODRM);
        op(0x8F, "pop", F_MODRM);
        op(0x90, "nop", 0);
        for (int c = 0x91; c <= 0x97; ++c) op(c, "xchg", 0);
        op(0x98, "cwde", 0);
        op(0x99, "cdq", 0);
        op(0x9A, "callf", F_FAR | F_INV64);
        op(0x9B, "fwait", 0);
        op(0x9C, "pushf", 0);
        op(0x9D, "popf", 0);
        op(0x9E, "sahf", 0);
        op(0x9F, "lahf", 0);
        for (int c = 0xA0; c <= 0xA3; ++c) op(c, "mov", F_MOFFS);
        op(0xA4, "movsb", 0);
        op(0xA5, "movsd", 0);
        op(0xA6, "cmpsb", 0);
        op(0xA7, "cmpsd", 0);
        op(0xA8, "test", F_IMM8);
        op(0xA9, "test", F_IMMZ);
        op(0xAA, "stosb", 0);
        op(0xAB, "stosd", 0);
        op(0xAC, "lodsb", 0);
        op(0xAD, "lodsd", 0);
        op(0xAE, "scasb", 0);
        op(0xAF, "scasd", 0);
        for (int c = 0xB0; c <= 0xB7; ++c) op(c, "mov", F_IMM8);
        for (int c = 0xB8; c <= 0xBF; ++c) op(c, "mov", F_IMMV);
        grp(0xC0, kGrp2, F_IMM8);
        grp(0xC1, kGrp2, F_IMM8);
        op(0xC2, "ret", F_IMM16);
        op(0xC3, "ret", 0);
        op(0xC4, "les", F_MODRM | F_INV64);  // VEX, special-cased
        op(0xC5, "lds", F_MODRM | F_INV64);  // VEX, special-cased
        op(0xC6, "mov", F_MODRM | F_IMM8);
        op(0xC7, "mov", F_MODRM | F_IMMZ);
        op(0xC8, "enter", F_ENTER);
        op(0xC9, "leave", 0);
        op(0xCA, "retf", F_IMM16);
        op(0xCB, "retf", 0);
        op(0xCC, "int3", 0);
        op(0xCD, "int", F_IMM8);
        op(0xCE, "into", F_INV64);
        op(0xCF, "iret", 0);
        for (int c = 0xD0; c <= 0xD3; ++c) grp(c, kGrp2, 0);
        op(0xD4, "aam", F_IMM8 | F_INV64);
        op(0xD5, "aad", F_IMM8 | F_INV64);
        op(0xD6, "salc", F_INV64);
        op(0xD7, "xlat", 0);
        for (int c = 0xD8; c <= 0xDF; ++c) op(c, "x87", F_MODRM);
        op(0xE0, "loopne", F_REL8);
        op(0xE1, "loope", F_REL8);
        op(0xE2, "loop", F_REL8);
        op(0xE3, "jrcxz", F_REL8);
        op(0xE4, "in", F_IMM8);
        op(0xE5, "in", F_IMM8);
        op(0xE6, "out", F_IMM8);
        op(0xE7, "out", F_IMM8);
        op(0xE8, "call", F_RELZ);
        op(0xE9, "jmp", F_RELZ);
        op(0xEA, "jmpf", F_FAR | F_INV64);
        op(0xEB, "jmp", F_REL8);
        op(0xEC, "in", 0);
        op(0xED, "in", 0);
        op(0xEE, "out", 0);
        op(0xEF, "out", 0);
        op(0xF1, "int1", 0);
        op(0xF4, "hlt", 0);
        op(0xF5, "cmc", 0);
        grp(0xF6, kGrp3, F_IMM_GRP3 | F_IMM8);
        grp(0xF7, kGrp3, F_IMM_GRP3 | F_IMMZ);
        op(0xF8, "clc", 0);
        op(0xF9, "stc", 0);
        op(0xFA, "cli", 0);
        op(0xFB, "sti", 0);
        op(0xFC, "cld", 0);
        op(0xFD, "std", 0);
        grp(0xFE, kGrp4, 0);
        grp(0xFF, kGrp5, 0);

        // ------- two-byte map (0F xx) -------
        auto op2 = [this](int code, const char* name, std::uint16_t flags) {
            map2[code] = {name, nullptr, flags};
        };
        auto grp2f = [this](int code, const char* const* group, std::uint16_t flags) {
            map2[code] = {nullptr, group, std::uint16_t(flags | F_MODRM)};
        };
        grp2f(0x00, kGrp6, 0);
        grp2f(0x01, kGrp7, 0);
        op2(0x02, "lar", F_MODRM);
        op2(0x03, "lsl", F_MODRM);
        op2(0x05, "syscall", 0);
        op2(0x06, "clts", 0);
        op2(0x07, "sysret", 0);
        op2(0x08, "invd", 0);
        op2(0x09, "wbinvd", 0);
        op2(0x0B, "ud2", 0);
        op2(0x0D, "prefetch", F_MODRM);
        static const char* const kRow1[8] = {"movups", "movups", "movlps", "movlps",
                                             "unpcklps", "unpckhps", "movhps", "movhps"};
        for (int c = 0x10; c <= 0x17; ++c) op2(c, kRow1[c - 0x10], F_MODRM);
        for (int c = 0x18; c <= 0x1F; ++c) op2(c, "nop", F_MODRM);
        for (int c = 0x20; c <= 0x23; ++c) op2(c, "mov", F_MODRM);
        static const char* const kRow2[8] = {"movaps", "movaps", "cvtpi2ps", "movntps",
                                             "cvttps2pi", "cvtps2pi", "ucomiss", "comiss"};
        for (int c = 0x28; c <= 0x2F; ++c) op2(c, kRow2[c - 0x28], F_MODRM);
        op2(0x30, "wrmsr", 0);
        op2(0x31, "rdtsc", 0);
        op2(0x32, "rdmsr", 0);
        op2(0x33, "rdpmc", 0);
        op2(0x34, "sysenter", 0);
        op2(0x35, "sysexit", 0);
        op2(0x37, "getsec", 0);
        // 0x38 / 0x3A: three-byte escapes, special-cased.
        for (int c = 0x40; c <= 0x4F; ++c) op2(c, cmovcc[c - 0x40], F_MODRM);
        static const char* const kRow5[16] = {"movmskps", "sqrtps", "rsqrtps", "rcpps",
                                              "andps", "andnps", "orps", "xorps",
                                              "addps", "mulps", "cvtps2pd", "cvtdq2ps",
                                              "subps", "minps", "divps", "maxps"};
        for (int c = 0x50; c <= 0x5F; ++c) op2(c, kRow5[c - 0x50], F_MODRM);
        static const char* const kRow6[16] = {"punpcklbw", "punpcklwd", "punpckldq", "packsswb",
                                              "pcmpgtb", "pcmpgtw", "pcmpgtd", "packuswb",
                                              "punpckhbw", "punpckhwd", "punpckhdq", "packssdw",
                                              "punpcklqdq", "punpckhqdq", "movd", "movdqa"};
        for (int c = 0x60; c <= 0x6F; ++c) op2(c, kRow6[c - 0x60], F_MODRM);
        op2(0x70, "pshufd", F_MODRM | F_IMM8);
        grp2f(0x71, kGrpShift, F_IMM8);
        grp2f(0x72, kGrpShift, F_IMM8);
        grp2f(0x73, kGrpShift, F_IMM8);
        op2(0x74, "pcmpeqb", F_MODRM);
        op2(0x75, "pcmpeqw", F_MODRM);
        op2(0x76, "pcmpeqd", F_MODRM);
        op2(0x77, "emms", 0);
        op2(0x78, "vmread", F_MODRM);
        op2(0x79, "vmwrite", F_MODRM);
        op2(0x7C, "haddps", F_MODRM);
        op2(0x7D, "hsubps", F_MODRM);
        op2(0x7E, "movd", F_MODRM);
        op2(0x7F, "movdqa", F_MODRM);
        for (int c = 0x80; c <= 0x8F; ++c) op2(c, jcc[c - 0x80], F_RELZ);
        for (int c = 0x90; c <= 0x9F; ++c) op2(c, setcc[c - 0x90], F_MODRM);
        op2(0xA0, "push", 0);
        op2(0xA1, "pop", 0);
        op2(0xA2, "cpuid", 0);
        op2(0xA3, "bt", F_MODRM);
        op2(0xA4, "shld", F_MODRM | F_IMM8);
        op2(0xA5, "shld", F_MODRM);
        op2(0xA8, "push", 0);
        op2(0xA9, "pop", 0);
        op2(0xAA, "rsm", 0);
        op2(0xAB, "bts", F_MODRM);
        op2(0xAC, "shrd", F_MODRM | F_IMM8);
        op2(0xAD, "shrd", F_MODRM);
        op2(0xAE, "fence", F_MODRM);
        op2(0xAF, "imul", F_MODRM);
        op2(0xB0, "cmpxchg", F_MODRM);
        op2(0xB1, "cmpxchg", F_MODRM);
        op2(0xB2, "lss", F_MODRM);
        op2(0xB3, "btr", F_MODRM);
        op2(0xB4, "lfs", F_MODRM);
        op2(0xB5, "lgs", F_MODRM);
        op2(0xB6, "movzx", F_MODRM);
        op2(0xB7, "movzx", F_MODRM);
        op2(0xB8, "popcnt", F_MODRM);
        grp2f(0xBA, kGrp8, F_IMM8);
        op2(0xBB, "btc", F_MODRM);
        op2(0xBC, "bsf", F_MODRM);
        op2(0xBD, "bsr", F_MODRM);
        op2(0xBE, "movsx", F_MODRM);
        op2(0xBF, "movsx", F_MODRM);
        op2(0xC0, "xadd", F_MODRM);
        op2(0xC1, "xadd", F_MODRM);
        op2(0xC2, "cmpps", F_MODRM | F_IMM8);
        op2(0xC3, "movnti", F_MODRM);
        op2(0xC4, "pinsrw", F_MODRM | F_IMM8);
        op2(0xC5, "pextrw", F_MODRM | F_IMM8);
        op2(0xC6, "shufps", F_MODRM | F_IMM8);
        op2(0xC7, "cmpxchg8b", F_MODRM);
        for (int c = 0xC8; c <= 0xCF; ++c) op2(c, "bswap", 0);
        static const char* const kRowD[16] = {"addsubps", "psrlw", "psrld", "psrlq",
                                              "paddq", "pmullw", "movq", "pmovmskb",
                                              "psubusb", "psubusw", "pminub", "pand",
                                              "paddusb", "paddusw", "pmaxub", "pandn"};
        for (int c = 0xD0; c <= 0xDF; ++c) op2(c, kRowD[c - 0xD0], F_MODRM);
        static const char* const kRowE[16] = {"pavgb", "psraw", "psrad", "pavgw",
                                              "pmulhuw", "pmulhw", "cvtpd2dq", "movntdq",
                                              "psubsb", "psubsw", "pminsw", "por",
                                              "paddsb", "paddsw", "pmaxsw", "pxor"};
        for (int c = 0xE0; c <= 0xEF; ++c) op2(c, kRowE[c - 0xE0], F_MODRM);
        static const char* const kRowF[16] = {"lddqu", "psllw", "pslld", "psllq",
                                              "pmuludq", "pmaddwd", "psadbw", "maskmovdqu",
                                              "psubb", "psubw", "psubd", "psubq",
                                              "paddb", "paddw", "paddd", nullptr};
        for (int c = 0xF0; c <= 0xFE; ++c) op2(c, kRowF[c - 0xF0], F_MODRM);
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

struct Cursor {
    std::span<const std::uint8_t> code;
    std::size_t pos = 0;

    bool has(std::size_t n) const { return pos + n <= code.size(); }
    std::uint8_t peek() const { return code[pos]; }
    std::uint8_t take() { return code[pos++]; }

    std::uint64_t take_le(unsigned n) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < n; ++i) v |= std::uint64_t(take()) << (8 * i);
        return v;
    }
};

inline bool is_legacy_prefix(std::uint8_t b) {
    switch (b) {
        case 0xF0: case 0xF2: case 0xF3:
        case 0x2E: case 0x36: case 0x3E: case 0x26:
        case 0x64: case 0x65: case 0x66: case 0x67:
            return true;
        default:
            return false;
    }
}

inline std::int64_t sign_extend(std::uint64_t v, unsigned bytes) {
    if (bytes >= 8) return std::int64_t(v);
    std::uint64_t sign = 1ull << (bytes * 8 - 1);
    std::uint64_t mask = (1ull << (bytes * 8)) - 1;
    v &= mask;
    return std::int64_t((v ^ sign) - sign);
}

const char* const kGenericOp38 = "op38";
const char* const kGenericOp3a = "op3a";

}  // namespace

std::optional<InstructionRecord> decode_instruction(std::span<const std::uint8_t> code,
                                                    std::uint64_t va, bool mode64) {
    const Tables& t = tables();
    Cursor cur{code};
    if (!cur.has(1)) return std::nullopt;

    bool osize16 = false;
    bool asize_override = false;
    std::uint8_t rex = 0;
    int prefix_budget = 14;
    while (prefix_budget-- > 0 && cur.has(1)) {
        std::uint8_t b = cur.peek();
        if (is_legacy_prefix(b)) {
            if (b == 0x66) osize16 = true;
            if (b == 0x67) asize_override = true;
            cur.take();
            if (mode64) rex = 0;  // a legacy prefix after REX voids it
            continue;
        }
        if (mode64 && b >= 0x40 && b <= 0x4F) {
            rex = cur.take();
            continue;
        }
        break;
    }
    if (prefix_budget < 0 || !cur.has(1)) return std::nullopt;

    bool rex_w = (rex & 0x08) != 0;
    unsigned osize = rex_w ? 64 : (osize16 ? 16 : 32);

    const OpSpec* spec = nullptr;
    const char* mnemonic = nullptr;
    std::uint8_t opcode = cur.take();

    if (opcode == 0x0F) {
        if (!cur.has(1)) return std::nullopt;
        std::uint8_t op2 = cur.take();
        if (op2 == 0x38 || op2 == 0x3A) {
            if (!cur.has(1)) return std::nullopt;
            cur.take();  // third opcode byte; treated uniformly per map
            static const OpSpec spec38{kGenericOp38, nullptr, F_MODRM};
            static const OpSpec spec3a{kGenericOp3a, nullptr, F_MODRM | F_IMM8};
            spec = (op2 == 0x38) ? &spec38 : &spec3a;
        } else {
            spec = &t.map2[op2];
        }
    } else if (mode64 && (opcode == 0xC4 || opcode == 0xC5)) {
        // VEX. Map select comes from the first payload byte (C4 only).
        unsigned mm = 1;
        if (opcode == 0xC4) {
            if (!cur.has(2)) return std::nullopt;
            mm = cur.take() & 0x1F;
            cur.take();
        } else {
            if (!cur.has(1)) return std::nullopt;
            cur.take();
        }
        if (!cur.has(1)) return std::nullopt;
        std::uint8_t vop = cur.take();
        if (mm == 1) {
            spec = &t.map2[vop];
            if (spec->flags & F_UNDEF) return std::nullopt;
        } else if (mm == 2) {
            static const OpSpec spec38{kGenericOp38, nullptr, F_MODRM};
            spec = &spec38;
        } else if (mm == 3) {
            static const OpSpec spec3a{kGenericOp3a, nullptr, F_MODRM | F_IMM8};
            spec = &spec3a;
        } else {
            return std::nullopt;
        }
    } else if (mode64 && opcode == 0x62) {
        // EVEX: three payload bytes, then opcode from the selected map.
        if (!cur.has(4)) return std::nullopt;
        unsigned mm = cur.take() & 0x07;
        cur.take();
        cur.take();
        std::uint8_t vop = cur.take();
        if (mm == 1) {
            spec = &t.map2[vop];
            if (spec->flags & F_UNDEF) return std::nullopt;
        } else if (mm == 2) {
            static const OpSpec spec38{kGenericOp38, nullptr, F_MODRM};
            spec = &spec38;
        } else if (mm == 3) {
            static const OpSpec spec3a{kGenericOp3a, nullptr, F_MODRM | F_IMM8};
            spec = &spec3a;
        } else {
            return std::nullopt;
        }
    } else {
        spec = &t.map1[opcode];
    }

    if (spec->flags & F_UNDEF) return std::nullopt;
    if (mode64 && (spec->flags & F_INV64)) return std::nullopt;
    if (!spec->name && !spec->group) return std::nullopt;

    bool rex_r = (rex & 0x04) != 0;
    bool rex_b = (rex & 0x01) != 0;

    InstructionRecord rec;
    rec.va = va;

    // Register encoded in the low opcode bits (push/pop/xchg r, mov r imm).
    bool opcode_reg = (opcode >= 0x50 && opcode <= 0x5F) || (opcode >= 0x91 && opcode <= 0x97) ||
                      (opcode >= 0xB0 && opcode <= 0xBF);
    if (opcode_reg) {
        rec.operands.push_back(
            {OperandKind::REG, std::uint64_t((opcode & 7) | (rex_b ? 8 : 0))});
    }

    // ModRM / SIB / displacement.
    std::uint8_t modrm = 0;
    bool rip_relative = false;
    bool mem_operand = false;
    std::uint64_t mem_abs = 0;
    std::int32_t rip_disp = 0;
    if (spec->flags & F_MODRM) {
        if (!cur.has(1)) return std::nullopt;
        modrm = cur.take();
        std::uint8_t mod = modrm >> 6;
        std::uint8_t rm = modrm & 7;
        if (mod != 3) {
            mem_operand = true;
            unsigned disp_size = 0;
            bool sib_base_disp32 = false;
            if (rm == 4) {
                if (!cur.has(1)) return std::nullopt;
                std::uint8_t sib = cur.take();
                if ((sib & 7) == 5 && mod == 0) sib_base_disp32 = true;
            }
            if (mod == 1) disp_size = 1;
            else if (mod == 2) disp_size = 4;
            else if (mod == 0 && rm == 5) disp_size = 4;
            else if (sib_base_disp32) disp_size = 4;

            if (disp_size) {
                if (!cur.has(disp_size)) return std::nullopt;
                std::uint64_t disp = cur.take_le(disp_size);
                if (mod == 0 && rm == 5) {
                    if (mode64) {
                        rip_relative = true;  // resolved once total length is known
                        rip_disp = std::int32_t(std::uint32_t(disp));
                    } else {
                        mem_abs = disp;  // 32-bit absolute
                    }
                }
            }
        }
    }

    // Mnemonic resolution (group ops take it from modrm.reg).
    std::uint8_t reg = (modrm >> 3) & 7;
    if (spec->group) {
        mnemonic = spec->group[reg];
        if (!mnemonic) return std::nullopt;
    } else {
        mnemonic = spec->name;
    }
    if (!mode64 && opcode == 0x63) mnemonic = "arpl";

    // Immediates.
    unsigned imm_size = 0;
    if (spec->flags & F_IMM8) imm_size = 1;
    if (spec->flags & F_IMM16) imm_size = 2;
    if (spec->flags & F_IMMZ) imm_size = (osize == 16) ? 2 : 4;
    if (spec->flags & F_IMMV) imm_size = (osize == 16) ? 2 : (osize == 64 ? 8 : 4);
    if ((spec->flags & F_IMM_GRP3) && reg > 1) imm_size = 0;
    if (spec->flags & F_ENTER) imm_size = 2;  // imm16, plus one extra byte below
    if (spec->flags & F_FAR) imm_size = (osize == 16 ? 2 : 4) + 2;

    std::uint64_t rel_target = 0;
    bool have_rel = false;
    if (spec->flags & F_REL8) {
        if (!cur.has(1)) return std::nullopt;
        std::int64_t rel = sign_extend(cur.take_le(1), 1);
        rel_target = va + cur.pos + std::uint64_t(rel);
        have_rel = true;
    } else if (spec->flags & F_RELZ) {
        unsigned rel_size = (!mode64 && osize == 16) ? 2 : 4;
        if (!cur.has(rel_size)) return std::nullopt;
        std::int64_t rel = sign_extend(cur.take_le(rel_size), rel_size);
        rel_target = va + cur.pos + std::uint64_t(rel);
        have_rel = true;
    } else if (spec->flags & F_MOFFS) {
        unsigned moffs_size = mode64 ? (asize_override ? 4 : 8) : (asize_override ? 2 : 4);
        if (!cur.has(moffs_size)) return std::nullopt;
        mem_abs = cur.take_le(moffs_size);
        mem_operand = true;
    } else if (imm_size) {
        if (!cur.has(imm_size)) return std::nullopt;
        rec.imm_value = cur.take_le(imm_size);
        rec.imm_signed = sign_extend(rec.imm_value, imm_size);
        rec.imm_size = std::uint8_t(imm_size);
        rec.has_immediate = true;
        if (spec->flags & F_ENTER) {
            if (!cur.has(1)) return std::nullopt;
            cur.take();
        }
    }

    if (cur.pos > 15) return std::nullopt;
    rec.length = std::uint8_t(cur.pos);
    rec.mnemonic = mnemonic;

    if (rip_relative) {
        mem_abs = va + rec.length + std::uint64_t(std::int64_t(rip_disp));
    }

    // Operand list: modrm reg + rm, then any immediate. For group opcodes the
    // reg field is an opcode extension, not an operand.
    if (spec->flags & F_MODRM) {
        if (!spec->group) {
            rec.operands.push_back({OperandKind::REG, std::uint64_t(reg | (rex_r ? 8 : 0))});
        }
        if (mem_operand) {
            rec.operands.push_back({OperandKind::MEM, mem_abs});
        } else {
            rec.operands.push_back(
                {OperandKind::REG, std::uint64_t((modrm & 7) | (rex_b ? 8 : 0))});
        }
    } else if (spec->flags & F_MOFFS) {
        rec.operands.push_back({OperandKind::MEM, mem_abs});
    }
    if (rec.has_immediate) {
        rec.operands.push_back({OperandKind::IMM, rec.imm_value});
    }
    if (mem_operand) {
        rec.has_mem_operand = true;
        rec.mem_abs_target = mem_abs;
    }

    // Control flow classification.
    bool is_call_mnemonic = std::strcmp(mnemonic, "call") == 0;
    rec.is_call = is_call_mnemonic || std::strcmp(mnemonic, "callf") == 0;
    if (is_call_mnemonic && have_rel) rec.call_target = rel_target;
    if (have_rel && !rec.is_call) rec.branch_target = rel_target;
    if (have_rel && opcode != 0xE8 && opcode != 0xE9 && opcode != 0xEB &&
        std::strcmp(mnemonic, "jmp") != 0) {
        rec.is_cond_branch = true;  // jcc / loop / jrcxz
    }

    return rec;
}

SweepResult linear_sweep(std::span<const std::uint8_t> code, std::uint64_t va, bool mode64) {
    SweepResult result;
    std::size_t pos = 0;
    while (pos < code.size()) {
        auto inst = decode_instruction(code.subspan(pos), va + pos, mode64);
        if (inst) {
            result.decoded_bytes += inst->length;
            pos += inst->length;
            result.instructions.push_back(std::move(*inst));
        } else {
            ++result.skipped_bytes;
            ++pos;
        }
    }
    return result;
}

}  // namespace tabmax
