#include "tabmax/binary_model.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <filesystem>

#include "tabmax/sha256.hpp"

namespace tabmax {

namespace {

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    bool in_range(std::uint64_t off, std::uint64_t len) const {
        return off <= bytes_.size() && len <= bytes_.size() - off;
    }

    std::uint8_t u8(std::uint64_t off) const { return require(off, 1), bytes_[off]; }

    std::uint16_t u16(std::uint64_t off) const {
        require(off, 2);
        return std::uint16_t(bytes_[off]) | (std::uint16_t(bytes_[off + 1]) << 8);
    }

    std::uint32_t u32(std::uint64_t off) const {
        require(off, 4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[off + i];
        return v;
    }

    std::uint64_t u64(std::uint64_t off) const {
        require(off, 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[off + i];
        return v;
    }

    std::string cstr(std::uint64_t off, std::size_t max_len = 4096) const {
        std::string out;
        for (std::size_t i = 0; i < max_len && in_range(off + i, 1); ++i) {
            char c = char(bytes_[off + i]);
            if (c == '\0') return out;
            out.push_back(c);
        }
        if (out.empty() || !in_range(off + out.size(), 1)) {
            throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "unterminated name string");
        }
        return out;  // hit max_len; treat what we saw as the name
    }

private:
    void require(std::uint64_t off, std::uint64_t len) const {
        if (!in_range(off, len)) {
            throw BinaryLoadError(LoadErrorKind::TruncatedHeaders,
                                  "declared structure extends past end of file");
        }
    }

    const std::vector<std::uint8_t>& bytes_;
};

void check_section_invariants(BinaryImage& image) {
    // Sections must not overlap in file-offset space; executable sections
    // must be file-backed.
    std::vector<const Section*> backed;
    for (const Section& s : image.sections) {
        if (s.executable && s.file_size == 0) {
            throw BinaryLoadError(LoadErrorKind::MalformedImage,
                                  "executable section '" + s.name + "' has no file data");
        }
        if (s.file_size > 0) backed.push_back(&s);
    }
    std::sort(backed.begin(), backed.end(),
              [](const Section* a, const Section* b) { return a->file_offset < b->file_offset; });
    for (std::size_t i = 1; i < backed.size(); ++i) {
        if (backed[i]->file_offset < backed[i - 1]->file_offset + backed[i - 1]->file_size) {
            throw BinaryLoadError(LoadErrorKind::MalformedImage,
                                  "sections '" + backed[i - 1]->name + "' and '" + backed[i]->name +
                                      "' overlap in file space");
        }
    }
}

std::optional<std::uint64_t> rva_to_offset(const BinaryImage& image, std::uint64_t rva) {
    return va_to_offset(image, image.image_base + rva);
}

// ---------------------------------------------------------------- PE ------

constexpr std::uint16_t kMachineI386 = 0x014c;
constexpr std::uint16_t kMachineAmd64 = 0x8664;

void parse_pe(ByteReader& r, BinaryImage& image) {
    std::uint32_t e_lfanew = r.u32(0x3c);
    if (!r.in_range(e_lfanew, 4) || r.u8(e_lfanew) != 'P' || r.u8(e_lfanew + 1) != 'E' ||
        r.u8(e_lfanew + 2) != 0 || r.u8(e_lfanew + 3) != 0) {
        throw BinaryLoadError(LoadErrorKind::NotAnExecutable, "missing PE signature");
    }
    std::uint64_t coff = e_lfanew + 4;
    std::uint16_t machine = r.u16(coff);
    std::uint16_t num_sections = r.u16(coff + 2);
    std::uint16_t opt_size = r.u16(coff + 16);
    std::uint64_t opt = coff + 20;
    if (opt_size < 2) {
        throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "optional header missing");
    }
    if (!r.in_range(opt, opt_size)) {
        throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "optional header exceeds file");
    }

    std::uint16_t magic = r.u16(opt);
    bool pe_plus = (magic == 0x20b);
    if (magic != 0x10b && magic != 0x20b) {
        throw BinaryLoadError(LoadErrorKind::UnsupportedFormat,
                              "unknown optional-header magic 0x" + std::to_string(magic));
    }
    if (machine == kMachineAmd64 && pe_plus) {
        image.format = BinaryFormat::PE64;
    } else if (machine == kMachineI386 && !pe_plus) {
        image.format = BinaryFormat::PE32;
    } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "unsupported PE machine type 0x%04x", machine);
        throw BinaryLoadError(LoadErrorKind::UnsupportedFormat, buf);
    }

    std::uint32_t entry_rva = r.u32(opt + 16);
    image.image_base = pe_plus ? r.u64(opt + 24) : r.u32(opt + 28);
    image.entry_point_va = entry_rva ? image.image_base + entry_rva : 0;

    std::uint32_t num_dirs = pe_plus ? r.u32(opt + 108) : r.u32(opt + 92);
    std::uint64_t dirs = opt + (pe_plus ? 112 : 96);
    std::uint32_t import_rva = 0;
    if (num_dirs > 1 && r.in_range(dirs + 8, 8)) {
        import_rva = r.u32(dirs + 8);
    }

    std::uint64_t sect_table = opt + opt_size;
    if (!r.in_range(sect_table, std::uint64_t(num_sections) * 40)) {
        throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "section table exceeds file");
    }
    for (std::uint32_t i = 0; i < num_sections; ++i) {
        std::uint64_t sh = sect_table + std::uint64_t(i) * 40;
        Section s;
        char name[9] = {0};
        for (int k = 0; k < 8; ++k) name[k] = char(r.u8(sh + k));
        s.name = name;
        s.virtual_size = r.u32(sh + 8);
        s.virtual_address = image.image_base + r.u32(sh + 12);
        std::uint32_t raw_size = r.u32(sh + 16);
        s.file_offset = r.u32(sh + 20);
        std::uint32_t chars = r.u32(sh + 36);
        s.executable = (chars & 0x20000000u) || (chars & 0x00000020u);  // MEM_EXECUTE | CNT_CODE
        s.readable = (chars & 0x40000000u) != 0;
        if (raw_size > 0 && s.file_offset >= image.raw.size()) {
            throw BinaryLoadError(LoadErrorKind::TruncatedHeaders,
                                  "section '" + s.name + "' starts past end of file");
        }
        // Loaders clamp the declared raw size to what the file provides.
        s.file_size = std::min<std::uint64_t>(raw_size, image.raw.size() - s.file_offset);
        if (s.virtual_size == 0) s.virtual_size = s.file_size;
        image.sections.push_back(std::move(s));
    }
    check_section_invariants(image);

    if (import_rva == 0) return;

    std::uint64_t thunk_size = pe_plus ? 8 : 4;
    std::uint64_t ordinal_flag = pe_plus ? (1ull << 63) : (1ull << 31);
    for (std::uint32_t d = 0;; ++d) {
        auto desc_off = rva_to_offset(image, import_rva + std::uint64_t(d) * 20);
        if (!desc_off) {
            throw BinaryLoadError(LoadErrorKind::TruncatedHeaders,
                                  "import descriptor table outside mapped sections");
        }
        std::uint32_t ilt_rva = r.u32(*desc_off);
        std::uint32_t name_rva = r.u32(*desc_off + 12);
        std::uint32_t iat_rva = r.u32(*desc_off + 16);
        if (ilt_rva == 0 && name_rva == 0 && iat_rva == 0) break;
        if (d > 4096) {
            throw BinaryLoadError(LoadErrorKind::MalformedImage, "unterminated import table");
        }

        auto dll_off = rva_to_offset(image, name_rva);
        if (!dll_off) {
            throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "import DLL name unmapped");
        }
        std::string dll = r.cstr(*dll_off);

        std::uint32_t lookup_rva = ilt_rva ? ilt_rva : iat_rva;
        for (std::uint32_t idx = 0;; ++idx) {
            auto th_off = rva_to_offset(image, lookup_rva + idx * thunk_size);
            if (!th_off) {
                throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "import thunk unmapped");
            }
            std::uint64_t thunk = pe_plus ? r.u64(*th_off) : r.u32(*th_off);
            if (thunk == 0) break;
            if (idx > 65536) {
                throw BinaryLoadError(LoadErrorKind::MalformedImage, "unterminated thunk array");
            }
            ImportEntry entry;
            entry.dll_name = dll;
            entry.thunk_va = image.image_base + iat_rva + std::uint64_t(idx) * thunk_size;
            if (thunk & ordinal_flag) {
                entry.symbol_name = "#" + std::to_string(thunk & 0xFFFF);
            } else {
                auto hint_off = rva_to_offset(image, thunk & 0x7FFFFFFF);
                if (!hint_off) {
                    throw BinaryLoadError(LoadErrorKind::TruncatedHeaders,
                                          "import hint/name entry unmapped");
                }
                entry.symbol_name = r.cstr(*hint_off + 2);
            }
            image.imports.push_back(std::move(entry));
        }
    }
}

// --------------------------------------------------------------- ELF ------

constexpr std::uint16_t kElfMachineX86_64 = 62;

void parse_elf(ByteReader& r, BinaryImage& image) {
    std::uint8_t ei_class = r.u8(4);
    std::uint8_t ei_data = r.u8(5);
    if (ei_data != 1) {
        throw BinaryLoadError(LoadErrorKind::UnsupportedFormat, "big-endian ELF unsupported");
    }
    if (ei_class != 2) {
        throw BinaryLoadError(LoadErrorKind::UnsupportedFormat,
                              "ELF class " + std::to_string(ei_class) + " unsupported (ELF64 only)");
    }
    std::uint16_t machine = r.u16(18);
    if (machine != kElfMachineX86_64) {
        throw BinaryLoadError(LoadErrorKind::UnsupportedFormat,
                              "unsupported ELF machine type " + std::to_string(machine));
    }
    image.format = BinaryFormat::ELF64;
    image.entry_point_va = r.u64(24);

    std::uint64_t shoff = r.u64(40);
    std::uint16_t shentsize = r.u16(58);
    std::uint16_t shnum = r.u16(60);
    std::uint16_t shstrndx = r.u16(62);
    if (shnum == 0 || shentsize < 64) {
        throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "missing ELF section table");
    }
    if (!r.in_range(shoff, std::uint64_t(shnum) * shentsize)) {
        throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "ELF section table exceeds file");
    }

    struct RawShdr {
        std::uint32_t name_off;
        std::uint32_t type;
        std::uint64_t flags, addr, offset, size;
        std::uint32_t link;
        std::uint64_t entsize;
    };
    std::vector<RawShdr> shdrs(shnum);
    for (std::uint16_t i = 0; i < shnum; ++i) {
        std::uint64_t sh = shoff + std::uint64_t(i) * shentsize;
        shdrs[i] = {r.u32(sh), r.u32(sh + 4), r.u64(sh + 8),  r.u64(sh + 16),
                    r.u64(sh + 24), r.u64(sh + 32), r.u32(sh + 40), r.u64(sh + 56)};
    }
    if (shstrndx >= shnum) {
        throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "bad section-name string table index");
    }
    std::uint64_t shstr = shdrs[shstrndx].offset;

    constexpr std::uint64_t kShfAlloc = 0x2, kShfExec = 0x4;
    constexpr std::uint32_t kShtNobits = 8;
    std::uint64_t min_vaddr = UINT64_MAX;
    for (std::uint16_t i = 0; i < shnum; ++i) {
        const RawShdr& h = shdrs[i];
        if (!(h.flags & kShfAlloc)) continue;
        Section s;
        s.name = r.cstr(shstr + h.name_off, 128);
        s.virtual_address = h.addr;
        s.virtual_size = h.size;
        s.file_offset = h.offset;
        s.file_size = (h.type == kShtNobits) ? 0 : h.size;
        if (s.file_size > 0 && !r.in_range(s.file_offset, s.file_size)) {
            throw BinaryLoadError(LoadErrorKind::TruncatedHeaders,
                                  "section '" + s.name + "' exceeds file");
        }
        s.executable = (h.flags & kShfExec) != 0;
        s.readable = true;
        min_vaddr = std::min(min_vaddr, s.virtual_address);
        image.sections.push_back(std::move(s));
    }
    image.image_base = (min_vaddr == UINT64_MAX) ? 0 : min_vaddr;
    check_section_invariants(image);

    // Imports: undefined dynamic symbols bound through relocation slots.
    constexpr std::uint32_t kShtRela = 4, kShtDynsym = 11;
    int dynsym = -1;
    for (std::uint16_t i = 0; i < shnum; ++i) {
        if (shdrs[i].type == kShtDynsym) dynsym = i;
    }
    if (dynsym < 0) return;
    const RawShdr& sym_h = shdrs[dynsym];
    if (sym_h.link >= shnum || sym_h.entsize < 24) return;
    std::uint64_t strtab = shdrs[sym_h.link].offset;
    std::uint64_t sym_count = sym_h.entsize ? sym_h.size / sym_h.entsize : 0;

    auto symbol_name = [&](std::uint64_t idx) -> std::string {
        if (idx >= sym_count) return {};
        std::uint64_t sym = sym_h.offset + idx * sym_h.entsize;
        std::uint32_t name_off = r.u32(sym);
        std::uint16_t shndx = r.u16(sym + 6);
        if (name_off == 0 || shndx != 0) return {};  // defined or unnamed
        return r.cstr(strtab + name_off, 512);
    };

    for (std::uint16_t i = 0; i < shnum; ++i) {
        if (shdrs[i].type != kShtRela || shdrs[i].entsize < 24) continue;
        std::uint64_t count = shdrs[i].size / shdrs[i].entsize;
        for (std::uint64_t k = 0; k < count; ++k) {
            std::uint64_t rel = shdrs[i].offset + k * shdrs[i].entsize;
            std::uint64_t r_offset = r.u64(rel);
            std::uint64_t r_info = r.u64(rel + 8);
            std::string name = symbol_name(r_info >> 32);
            if (name.empty()) continue;
            bool mapped = false;
            for (const Section& s : image.sections) {
                if (r_offset >= s.virtual_address && r_offset < s.virtual_address + s.virtual_size) {
                    mapped = true;
                    break;
                }
            }
            if (!mapped) continue;
            image.imports.push_back(ImportEntry{"", std::move(name), r_offset});
        }
    }
}

}  // namespace

const char* format_name(BinaryFormat f) {
    switch (f) {
        case BinaryFormat::PE64: return "PE64";
        case BinaryFormat::PE32: return "PE32";
        case BinaryFormat::ELF64: return "ELF64";
    }
    return "?";
}

BinaryImage load_binary_bytes(std::vector<std::uint8_t> bytes, const std::string& path,
                              const LoadOptions& opts) {
    if (bytes.size() > opts.max_file_size) {
        throw BinaryLoadError(LoadErrorKind::FileTooLarge,
                              path + ": exceeds size cap of " +
                                  std::to_string(opts.max_file_size) + " bytes");
    }
    BinaryImage image;
    image.path = path;
    image.raw = std::move(bytes);
    image.sha256 = sha256_hex(std::span<const std::uint8_t>(image.raw));

    ByteReader r(image.raw);
    if (image.raw.size() >= 4 && image.raw[0] == 0x7f && image.raw[1] == 'E' &&
        image.raw[2] == 'L' && image.raw[3] == 'F') {
        if (image.raw.size() < 64) {
            throw BinaryLoadError(LoadErrorKind::TruncatedHeaders, "ELF header truncated");
        }
        parse_elf(r, image);
    } else if (image.raw.size() >= 2 && image.raw[0] == 'M' && image.raw[1] == 'Z') {
        parse_pe(r, image);
    } else {
        throw BinaryLoadError(LoadErrorKind::NotAnExecutable,
                              path + ": no MZ or ELF magic");
    }
    return image;
}

BinaryImage load_binary(const std::string& path, const LoadOptions& opts) {
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) {
        throw BinaryLoadError(LoadErrorKind::IoError, path + ": is a directory");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw BinaryLoadError(LoadErrorKind::IoError, path + ": cannot open");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw BinaryLoadError(LoadErrorKind::IoError, path + ": read failure");
    }
    return load_binary_bytes(std::move(bytes), path, opts);
}

std::optional<ImportEntry> resolve_import(const BinaryImage& image, const std::string& symbol) {
    for (const ImportEntry& e : image.imports) {
        if (e.symbol_name == symbol) return e;
    }
    return std::nullopt;
}

std::optional<std::uint64_t> va_to_offset(const BinaryImage& image, std::uint64_t va) {
    for (const Section& s : image.sections) {
        if (s.contains_va(va)) return s.file_offset + (va - s.virtual_address);
    }
    return std::nullopt;
}

std::optional<std::uint64_t> offset_to_va(const BinaryImage& image, std::uint64_t offset) {
    for (const Section& s : image.sections) {
        if (offset >= s.file_offset && offset - s.file_offset < s.file_size) {
            return s.virtual_address + (offset - s.file_offset);
        }
    }
    return std::nullopt;
}

}  // namespace tabmax
