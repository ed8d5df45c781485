#include "fixture_builder.hpp"

#include <cassert>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace testsupport {

namespace {

void put_u16(Bytes& b, std::size_t off, std::uint16_t v) {
    b[off] = v & 0xFF;
    b[off + 1] = (v >> 8) & 0xFF;
}

void put_u32(Bytes& b, std::size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b[off + i] = (v >> (8 * i)) & 0xFF;
}

void put_u64(Bytes& b, std::size_t off, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b[off + i] = (v >> (8 * i)) & 0xFF;
}

void push_u32(Bytes& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}

void push_u64(Bytes& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}

std::uint64_t align_up(std::uint64_t v, std::uint64_t a) { return (v + a - 1) / a * a; }

}  // namespace

// ------------------------------------------------------------- CodeBuffer --

void CodeBuffer::emit(std::initializer_list<std::uint8_t> bs) { buf_.insert(buf_.end(), bs); }
void CodeBuffer::raw(const Bytes& bs) { buf_.insert(buf_.end(), bs.begin(), bs.end()); }

std::uint64_t CodeBuffer::here() {
    std::uint64_t id = next_label_++;
    labels_[id] = buf_.size();
    return id;
}

std::uint64_t CodeBuffer::new_label() { return next_label_++; }

void CodeBuffer::bind(std::uint64_t label) { labels_[label] = buf_.size(); }

void CodeBuffer::push_rbp() { emit({0x55}); }
void CodeBuffer::mov_rbp_rsp() {
    if (mode64_) emit({0x48, 0x89, 0xE5});
    else emit({0x89, 0xE5});
}
void CodeBuffer::pop_rbp() { emit({0x5D}); }
void CodeBuffer::ret() { emit({0xC3}); }
void CodeBuffer::int3() { emit({0xCC}); }
void CodeBuffer::nop() { emit({0x90}); }
void CodeBuffer::leave() { emit({0xC9}); }
void CodeBuffer::sub_rsp_imm8(std::uint8_t v) { emit({0x48, 0x83, 0xEC, v}); }
void CodeBuffer::add_rsp_imm8(std::uint8_t v) { emit({0x48, 0x83, 0xC4, v}); }

void CodeBuffer::mov_reg_imm32(int reg, std::uint32_t v) {
    buf_.push_back(std::uint8_t(0xB8 + (reg & 7)));
    push_u32(buf_, v);
}
void CodeBuffer::mov_rax_imm64(std::uint64_t v) {
    emit({0x48, 0xB8});
    push_u64(buf_, v);
}
void CodeBuffer::xor_eax_eax() { emit({0x31, 0xC0}); }
void CodeBuffer::xor_ecx_ecx() { emit({0x31, 0xC9}); }
void CodeBuffer::xor_edx_edx() { emit({0x31, 0xD2}); }
void CodeBuffer::xor_r8d_r8d() { emit({0x45, 0x31, 0xC0}); }
void CodeBuffer::xor_r9d_r9d() { emit({0x45, 0x31, 0xC9}); }
void CodeBuffer::add_eax_imm8(std::uint8_t v) { emit({0x83, 0xC0, v}); }
void CodeBuffer::sub_eax_imm8(std::uint8_t v) { emit({0x83, 0xE8, v}); }
void CodeBuffer::and_eax_imm8(std::uint8_t v) { emit({0x83, 0xE0, v}); }
void CodeBuffer::or_eax_imm8(std::uint8_t v) { emit({0x83, 0xC8, v}); }
void CodeBuffer::inc_eax() { emit({0xFF, 0xC0}); }
void CodeBuffer::dec_eax() { emit({0xFF, 0xC8}); }
void CodeBuffer::mov_ecx_eax() { emit({0x89, 0xC1}); }
void CodeBuffer::mov_edx_eax() { emit({0x89, 0xC2}); }
void CodeBuffer::add_eax_ecx() { emit({0x01, 0xC8}); }
void CodeBuffer::sub_eax_ecx() { emit({0x29, 0xC8}); }
void CodeBuffer::imul_eax_ecx() { emit({0x0F, 0xAF, 0xC1}); }
void CodeBuffer::shr_eax_imm8(std::uint8_t v) { emit({0xC1, 0xE8, v}); }
void CodeBuffer::movzx_eax_al() { emit({0x0F, 0xB6, 0xC0}); }

void CodeBuffer::cmp_al_imm8(std::uint8_t v) { emit({0x3C, v}); }
void CodeBuffer::cmp_eax_imm32(std::uint32_t v) {
    buf_.push_back(0x3D);
    push_u32(buf_, v);
}
void CodeBuffer::cmp_cl_imm8(std::uint8_t v) { emit({0x80, 0xF9, v}); }
void CodeBuffer::cmp_ecx_imm32(std::uint32_t v) {
    emit({0x81, 0xF9});
    push_u32(buf_, v);
}
void CodeBuffer::cmp_edx_imm32(std::uint32_t v) {
    emit({0x81, 0xFA});
    push_u32(buf_, v);
}
void CodeBuffer::cmp_eax_imm8sx(std::uint8_t v) { emit({0x83, 0xF8, v}); }
void CodeBuffer::test_eax_imm32(std::uint32_t v) {
    buf_.push_back(0xA9);
    push_u32(buf_, v);
}
void CodeBuffer::test_cl_imm8(std::uint8_t v) { emit({0xF6, 0xC1, v}); }
void CodeBuffer::je_rel8(std::int8_t d) { emit({0x74, std::uint8_t(d)}); }
void CodeBuffer::jne_rel8(std::int8_t d) { emit({0x75, std::uint8_t(d)}); }
void CodeBuffer::jmp_rel8(std::int8_t d) { emit({0xEB, std::uint8_t(d)}); }

void CodeBuffer::fix_pcrel(Sym s) {
    fixups_.push_back({Fixup::Kind::PcRel32, buf_.size(), buf_.size() + 4, std::move(s)});
    push_u32(buf_, 0);
}
void CodeBuffer::fix_abs(Sym s) {
    fixups_.push_back({Fixup::Kind::Abs32, buf_.size(), buf_.size() + 4, std::move(s)});
    push_u32(buf_, 0);
}

void CodeBuffer::lea_rax_rip(Sym s) {
    emit({0x48, 0x8D, 0x05});
    fix_pcrel(std::move(s));
}
void CodeBuffer::lea_rcx_rip(Sym s) {
    emit({0x48, 0x8D, 0x0D});
    fix_pcrel(std::move(s));
}
void CodeBuffer::lea_rdx_rip(Sym s) {
    emit({0x48, 0x8D, 0x15});
    fix_pcrel(std::move(s));
}
void CodeBuffer::lea_r8_rip(Sym s) {
    emit({0x4C, 0x8D, 0x05});
    fix_pcrel(std::move(s));
}
void CodeBuffer::call_rip_mem(Sym s) {
    emit({0xFF, 0x15});
    if (mode64_) fix_pcrel(std::move(s));
    else fix_abs(std::move(s));
}
void CodeBuffer::call_rel32(Sym s) {
    emit({0xE8});
    fix_pcrel(std::move(s));
}
void CodeBuffer::push_abs32(Sym s) {
    emit({0x68});
    fix_abs(std::move(s));
}
void CodeBuffer::mov_eax_abs32(Sym s) {
    emit({0xB8});
    fix_abs(std::move(s));
}
void CodeBuffer::call_abs_mem32(Sym s) {
    emit({0xFF, 0x15});
    fix_abs(std::move(s));
}

// -------------------------------------------------------------- PeBuilder --

PeBuilder::PeBuilder(bool is64)
    : is64_(is64), image_base_(is64 ? 0x180000000ull : 0x10000000ull) {}

void PeBuilder::add_import(const std::string& dll, const std::string& symbol) {
    imports_.push_back({dll, symbol});
}
void PeBuilder::set_text(CodeBuffer code) { code_ = std::move(code); }
void PeBuilder::set_rdata(Bytes data) { rdata_ = std::move(data); }
void PeBuilder::add_extra_text(CodeBuffer code) {
    extra_code_ = std::move(code);
    has_extra_ = true;
}

std::uint64_t PeBuilder::iat_va(const std::string& symbol) const {
    auto it = iat_vas_.find(symbol);
    if (it == iat_vas_.end()) throw std::runtime_error("fixture: unknown import " + symbol);
    return it->second;
}

void PeBuilder::resolve(CodeBuffer& code, Bytes& text, std::uint64_t text_va) {
    for (const CodeBuffer::Fixup& f : code.fixups()) {
        std::uint64_t target = 0;
        switch (f.target.kind) {
            case Sym::Kind::IatSlot: target = iat_va(f.target.import_name); break;
            case Sym::Kind::Rdata: target = rdata_va_ + f.target.offset; break;
            case Sym::Kind::Label: target = text_va + code.labels().at(f.target.offset); break;
            case Sym::Kind::None: throw std::runtime_error("fixture: unresolved fixup");
        }
        std::uint64_t value;
        if (f.kind == CodeBuffer::Fixup::Kind::PcRel32) {
            value = target - (text_va + f.instr_end);
        } else {
            value = target;
        }
        put_u32(text, f.disp_pos, std::uint32_t(value));
    }
}

Bytes PeBuilder::build() {
    constexpr std::uint32_t kFileAlign = 0x200;
    constexpr std::uint32_t kSectAlign = 0x1000;
    const std::uint32_t thunk_size = is64_ ? 8 : 4;

    // Group imports by DLL, preserving first-appearance order.
    std::vector<std::string> dll_order;
    std::map<std::string, std::vector<std::string>> by_dll;
    for (const Import& imp : imports_) {
        if (!by_dll.count(imp.dll)) dll_order.push_back(imp.dll);
        by_dll[imp.dll].push_back(imp.symbol);
    }

    // ---- .idata content (rvas relative to the section start) ----
    struct DllLayout {
        std::uint32_t ilt_off, iat_off;
        std::vector<std::uint32_t> name_offs;  // hint/name entry per symbol, 0 for ordinals
        std::uint32_t dllname_off;
    };
    std::map<std::string, DllLayout> layouts;
    std::uint32_t cursor = std::uint32_t((dll_order.size() + 1) * 20);
    for (const std::string& dll : dll_order) {
        DllLayout lay{};
        std::uint32_t nsym = std::uint32_t(by_dll[dll].size());
        lay.ilt_off = cursor;
        cursor += (nsym + 1) * thunk_size;
        lay.iat_off = cursor;
        cursor += (nsym + 1) * thunk_size;
        layouts[dll] = lay;
    }
    Bytes names;
    for (const std::string& dll : dll_order) {
        DllLayout& lay = layouts[dll];
        for (const std::string& sym : by_dll[dll]) {
            if (!sym.empty() && sym[0] == '#') {
                lay.name_offs.push_back(0);
                continue;
            }
            lay.name_offs.push_back(cursor + std::uint32_t(names.size()));
            names.push_back(0);  // hint
            names.push_back(0);
            names.insert(names.end(), sym.begin(), sym.end());
            names.push_back(0);
        }
        lay.dllname_off = cursor + std::uint32_t(names.size());
        names.insert(names.end(), dll.begin(), dll.end());
        names.push_back(0);
    }
    std::uint32_t idata_size = cursor + std::uint32_t(names.size());
    if (imports_.empty()) idata_size = 0;

    // ---- section layout ----
    struct Sect {
        const char* name;
        std::uint32_t rva, vsize, raw_off, raw_size;
        std::uint32_t chars;
    };
    std::vector<Sect> sects;
    std::uint32_t rva = kSectAlign;
    std::uint32_t file_off = kFileAlign;  // headers occupy [0, 0x200)
    auto place = [&](const char* name, std::uint32_t content_size, std::uint32_t chars) {
        Sect s{name, rva, content_size, file_off,
               std::uint32_t(align_up(std::max<std::uint32_t>(content_size, 1), kFileAlign)),
               chars};
        sects.push_back(s);
        rva = std::uint32_t(align_up(rva + std::max<std::uint32_t>(content_size, 1), kSectAlign));
        file_off += s.raw_size;
    };
    constexpr std::uint32_t kCode = 0x60000020;
    constexpr std::uint32_t kData = 0x40000040;
    place(".text", std::uint32_t(code_.size()), kCode);
    text_va_ = image_base_ + sects[0].rva;
    int rdata_idx = -1;
    if (!rdata_.empty()) {
        place(".rdata", std::uint32_t(rdata_.size()), kData);
        rdata_idx = int(sects.size()) - 1;
        rdata_va_ = image_base_ + sects.back().rva;
    }
    int extra_idx = -1;
    if (has_extra_) {
        place(".text2", std::uint32_t(extra_code_.size()), kCode);
        extra_idx = int(sects.size()) - 1;
        extra_va_ = image_base_ + sects.back().rva;
    }
    int idata_idx = -1;
    if (idata_size) {
        place(".idata", idata_size, kData);
        idata_idx = int(sects.size()) - 1;
    }

    // IAT slot addresses.
    if (idata_idx >= 0) {
        std::uint32_t idata_rva = sects[idata_idx].rva;
        for (const std::string& dll : dll_order) {
            const DllLayout& lay = layouts[dll];
            const auto& syms = by_dll[dll];
            for (std::size_t i = 0; i < syms.size(); ++i) {
                iat_vas_[syms[i]] =
                    image_base_ + idata_rva + lay.iat_off + std::uint32_t(i) * thunk_size;
            }
        }
    }

    // ---- resolve code fixups ----
    Bytes text(code_.bytes());
    resolve(code_, text, text_va_);
    Bytes extra;
    if (has_extra_) {
        extra = extra_code_.bytes();
        resolve(extra_code_, extra, extra_va_);
    }

    // ---- emit ----
    std::uint32_t opt_size = is64_ ? 0xF0 : 0xE0;
    Bytes out(file_off, 0);
    out[0] = 'M';
    out[1] = 'Z';
    put_u32(out, 0x3C, 0x40);
    std::size_t pe = 0x40;
    out[pe] = 'P';
    out[pe + 1] = 'E';
    put_u16(out, pe + 4, is64_ ? 0x8664 : 0x014C);
    put_u16(out, pe + 6, std::uint16_t(sects.size()));
    put_u16(out, pe + 20, std::uint16_t(opt_size));
    put_u16(out, pe + 22, is64_ ? 0x2022 : 0x2102);  // EXEC | DLL (| LAA / 32BIT)

    std::size_t opt = pe + 24;
    put_u16(out, opt, is64_ ? 0x20B : 0x10B);
    put_u32(out, opt + 4, sects[0].raw_size);                       // SizeOfCode
    put_u32(out, opt + 16, sects[0].rva + std::uint32_t(entry_text_offset_));
    put_u32(out, opt + 20, sects[0].rva);                           // BaseOfCode
    if (is64_) {
        put_u64(out, opt + 24, image_base_);
    } else {
        put_u32(out, opt + 28, std::uint32_t(image_base_));
    }
    put_u32(out, opt + 32, kSectAlign);
    put_u32(out, opt + 36, kFileAlign);
    put_u16(out, opt + 48, 6);                                      // subsystem version
    put_u32(out, opt + 56, rva);                                    // SizeOfImage
    put_u32(out, opt + 60, kFileAlign);                             // SizeOfHeaders
    put_u16(out, opt + 68, 3);                                      // console subsystem
    std::size_t ndirs_off = opt + (is64_ ? 108 : 92);
    std::size_t dirs = opt + (is64_ ? 112 : 96);
    put_u32(out, ndirs_off, 16);
    if (idata_idx >= 0) {
        put_u32(out, dirs + 8, sects[idata_idx].rva);
        put_u32(out, dirs + 12, idata_size);
    }

    std::size_t sh = opt + opt_size;
    for (const Sect& s : sects) {
        std::memcpy(&out[sh], s.name, std::min<std::size_t>(8, std::strlen(s.name)));
        put_u32(out, sh + 8, s.vsize);
        put_u32(out, sh + 12, s.rva);
        put_u32(out, sh + 16, s.raw_size);
        put_u32(out, sh + 20, s.raw_off);
        put_u32(out, sh + 36, s.chars);
        sh += 40;
    }

    auto blit = [&out](std::uint32_t off, const Bytes& content) {
        if (!content.empty()) std::memcpy(&out[off], content.data(), content.size());
    };
    auto pad_code = [&out](const Sect& s, std::size_t content_size) {
        for (std::size_t i = s.raw_off + content_size; i < s.raw_off + s.raw_size; ++i) {
            out[i] = 0xCC;  // alignment padding, toolchain style
        }
    };
    blit(sects[0].raw_off, text);
    pad_code(sects[0], text.size());
    if (rdata_idx >= 0) blit(sects[rdata_idx].raw_off, rdata_);
    if (extra_idx >= 0) {
        blit(sects[extra_idx].raw_off, extra);
        pad_code(sects[extra_idx], extra.size());
    }

    if (idata_idx >= 0) {
        Bytes idata(idata_size, 0);
        std::uint32_t idata_rva = sects[idata_idx].rva;
        std::size_t desc = 0;
        for (const std::string& dll : dll_order) {
            const DllLayout& lay = layouts[dll];
            put_u32(idata, desc + 0, idata_rva + lay.ilt_off);
            put_u32(idata, desc + 12, idata_rva + lay.dllname_off);
            put_u32(idata, desc + 16, idata_rva + lay.iat_off);
            desc += 20;

            const auto& syms = by_dll[dll];
            for (std::size_t i = 0; i < syms.size(); ++i) {
                std::uint64_t thunk;
                if (!syms[i].empty() && syms[i][0] == '#') {
                    std::uint64_t ord = std::stoull(syms[i].substr(1));
                    thunk = ord | (is64_ ? (1ull << 63) : (1ull << 31));
                } else {
                    thunk = idata_rva + lay.name_offs[i];
                }
                std::size_t ilt = lay.ilt_off + i * thunk_size;
                std::size_t iat = lay.iat_off + i * thunk_size;
                if (is64_) {
                    put_u64(idata, ilt, thunk);
                    put_u64(idata, iat, thunk);
                } else {
                    put_u32(idata, ilt, std::uint32_t(thunk));
                    put_u32(idata, iat, std::uint32_t(thunk));
                }
            }
        }
        std::memcpy(&idata[cursor], names.data(), names.size());
        blit(sects[idata_idx].raw_off, idata);
    }
    return out;
}

// -------------------------------------------------------------- PeFixture --

Sym PeFixture::add_string(const std::string& text) {
    rdata_.push_back(0);  // separator so extraction sees an isolated literal
    Sym s = Sym::rdata(rdata_.size());
    rdata_.insert(rdata_.end(), text.begin(), text.end());
    rdata_.push_back(0);
    return s;
}

Sym PeFixture::add_utf16_string(const std::string& text) {
    rdata_.push_back(0);
    rdata_.push_back(0);
    Sym s = Sym::rdata(rdata_.size());
    for (char c : text) {
        rdata_.push_back(std::uint8_t(c));
        rdata_.push_back(0);
    }
    rdata_.push_back(0);
    rdata_.push_back(0);
    return s;
}

void PeFixture::add_rdata_bytes(const Bytes& bytes) {
    rdata_.push_back(0);
    rdata_.insert(rdata_.end(), bytes.begin(), bytes.end());
    rdata_.push_back(0);
}

Bytes PeFixture::build() {
    pe_.set_text(std::move(code_));
    pe_.set_rdata(std::move(rdata_));
    return pe_.build();
}

// -------------------------------------------------------------- ElfBuilder --

Bytes ElfBuilder::build() {
    bool with_import = !import_symbol_.empty();
    if (text_.size() > 0x2000) throw std::runtime_error("fixture: .text too large");
    if (rodata_.size() > 0x1000) throw std::runtime_error("fixture: .rodata too large");

    // Fixed layout: text@0x1000, rodata@0x3000, dynstr@0x4000, dynsym@0x4100,
    // rela.plt@0x4200, got.plt@0x5000, shstrtab@0x6000, shdrs@0x7000.
    const std::uint64_t shoff = 0x7000;
    std::string shstr;
    shstr.push_back('\0');
    auto name_off = [&shstr](const char* n) {
        std::uint32_t off = std::uint32_t(shstr.size());
        shstr += n;
        shstr.push_back('\0');
        return off;
    };

    struct Shdr {
        std::uint32_t name, type;
        std::uint64_t flags, addr, offset, size;
        std::uint32_t link, info;
        std::uint64_t align, entsize;
    };
    std::vector<Shdr> shdrs;
    shdrs.push_back({});  // SHT_NULL

    shdrs.push_back({name_off(".text"), 1, 0x6, kTextVa, 0x1000, text_.size(), 0, 0, 16, 0});
    shdrs.push_back({name_off(".rodata"), 1, 0x2, kRodataVa, 0x3000,
                     rodata_.empty() ? 1 : rodata_.size(), 0, 0, 8, 0});

    Bytes dynstr, dynsym, rela;
    if (with_import) {
        dynstr.push_back(0);
        std::uint32_t sym_name = std::uint32_t(dynstr.size());
        dynstr.insert(dynstr.end(), import_symbol_.begin(), import_symbol_.end());
        dynstr.push_back(0);

        dynsym.assign(24, 0);  // null symbol
        Bytes sym(24, 0);
        put_u32(sym, 0, sym_name);
        sym[4] = 0x12;  // GLOBAL | FUNC
        put_u16(sym, 6, 0);  // SHN_UNDEF
        dynsym.insert(dynsym.end(), sym.begin(), sym.end());

        rela.assign(24, 0);
        put_u64(rela, 0, kGotVa + 0x10);            // r_offset: third GOT slot
        put_u64(rela, 8, (1ull << 32) | 7);         // sym 1, R_X86_64_JUMP_SLOT

        std::uint32_t dynstr_idx = std::uint32_t(shdrs.size() + 1);
        shdrs.push_back({name_off(".dynsym"), 11, 0x2, 0x4100, 0x4100, dynsym.size(),
                         dynstr_idx, 1, 8, 24});
        std::uint32_t dynsym_idx = std::uint32_t(shdrs.size() - 1);
        shdrs.push_back({name_off(".dynstr"), 3, 0x2, 0x4000, 0x4000, dynstr.size(), 0, 0, 1, 0});
        shdrs.push_back({name_off(".rela.plt"), 4, 0x2, 0x4200, 0x4200, rela.size(),
                         dynsym_idx, 0, 8, 24});
        shdrs.push_back({name_off(".got.plt"), 1, 0x3, kGotVa, 0x5000, 0x18, 0, 0, 8, 8});
    }
    std::uint32_t shstr_name = name_off(".shstrtab");
    shdrs.push_back({shstr_name, 3, 0, 0, 0x6000, shstr.size(), 0, 0, 1, 0});

    Bytes out(shoff + shdrs.size() * 64, 0);
    out[0] = 0x7F;
    out[1] = 'E';
    out[2] = 'L';
    out[3] = 'F';
    out[4] = 2;  // ELFCLASS64
    out[5] = 1;  // little endian
    out[6] = 1;
    put_u16(out, 16, 3);   // ET_DYN
    put_u16(out, 18, 62);  // EM_X86_64
    put_u32(out, 20, 1);
    put_u64(out, 24, text_.empty() ? 0 : kTextVa);  // e_entry
    put_u64(out, 40, shoff);
    put_u16(out, 52, 64);
    put_u16(out, 58, 64);
    put_u16(out, 60, std::uint16_t(shdrs.size()));
    put_u16(out, 62, std::uint16_t(shdrs.size() - 1));

    auto blit = [&out](std::uint64_t off, const Bytes& content) {
        if (!content.empty()) std::memcpy(&out[off], content.data(), content.size());
    };
    blit(0x1000, text_);
    blit(0x3000, rodata_);
    if (with_import) {
        blit(0x4000, dynstr);
        blit(0x4100, dynsym);
        blit(0x4200, rela);
    }
    std::memcpy(&out[0x6000], shstr.data(), shstr.size());

    std::size_t off = shoff;
    for (const Shdr& s : shdrs) {
        put_u32(out, off + 0, s.name);
        put_u32(out, off + 4, s.type);
        put_u64(out, off + 8, s.flags);
        put_u64(out, off + 16, s.addr);
        put_u64(out, off + 24, s.offset);
        put_u64(out, off + 32, s.size);
        put_u32(out, off + 40, s.link);
        put_u32(out, off + 44, s.info);
        put_u64(out, off + 48, s.align);
        put_u64(out, off + 56, s.entsize);
        off += 64;
    }
    return out;
}

void write_file(const std::string& path, const Bytes& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write fixture file " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace testsupport
