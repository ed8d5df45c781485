#include "fixtures.hpp"

#include <random>
#include <stdexcept>

#include "tabmax/base64.hpp"

namespace testsupport {

namespace {

const char* const kSqlStrings[] = {
    "SELECT id, name FROM users WHERE uid = 7",
    "INSERT INTO audit_log VALUES ('x', 1)",
    "DELETE FROM sessions WHERE expiry < 100",
    "UPDATE accounts SET balance = 0 WHERE flag = 1",
    "EXEC sp_configure 'show advanced options', 1",
    "DECLARE @cnt INT",
    "SELECT name FROM sysobjects WHERE xtype = 'U'",
    "EXEC xp_cmdshell 'whoami'",
    "SELECT * FROM tempdb..transactions",
    "OPENROWSET('SQLNCLI', 'server=.;', 'SELECT 1')",
};

const char* const kPsStrings[] = {
    "Invoke-WebRequest -Uri $endpoint",
    "Get-ChildItem C:\\temp | Sort-Object",
    "$payload = New-Object Net.Sockets.TcpClient",
    "Set-ItemProperty -Path $reg -Name run",
    "IEX $cmdline",
    "powershell -ExecutionPolicy Bypass -File run.ps1",
    "Get-Process | Out-Null; $flag = 4",
};

const char* const kKeywordStrings[] = {
    "upload handler ready",
    "fetch: download queue",
    "register httpmodule hook",
};

const char* const kBase64Payloads[] = {
    "collect credential rows",
    "stage two helper binary",
    "session token refresh blob",
    "archive of query results",
    "remote task queue state",
};

const char* const kCommandTokens[] = {"CMD|", "PIN|", "INJ|", "DMP|"};

void plant_prologue(CodeBuffer& c) {
    c.push_rbp();
    c.mov_rbp_rsp();
}

// Six compares whose immediates decompose to printable ASCII, plus
// non-printable decoys that must not count.
void plant_cmp_block(CodeBuffer& c) {
    c.cmp_al_imm8(0x41);           // 'A'
    c.je_rel8(0);
    c.cmp_eax_imm32(0x504D44);     // "DMP"
    c.jne_rel8(0);
    c.cmp_cl_imm8(0x58);           // 'X'
    c.cmp_edx_imm32(0x41424344);   // "DCBA"
    c.je_rel8(0);
    c.cmp_eax_imm8sx(0x7A);        // 'z'
    c.cmp_eax_imm32(0x21212121);   // "!!!!"
    c.jne_rel8(0);
    // decoys: non-printable immediates
    c.cmp_eax_imm32(1);
    c.cmp_eax_imm8sx(0);
    c.cmp_ecx_imm32(0x80000001);
}

}  // namespace

Bytes make_planted_pe() {
    PeFixture fx(true);
    fx.import_symbol("KERNEL32.dll", "CompareStringA");
    fx.import_symbol("msvcrt.dll", "strstr");

    for (const char* s : kSqlStrings) fx.add_string(s);
    for (const char* s : kPsStrings) fx.add_string(s);
    for (const char* s : kKeywordStrings) fx.add_string(s);
    for (const char* payload : kBase64Payloads) {
        std::string text(payload);
        std::string blob = tabmax::base64_encode(
            std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                          text.size()));
        if (blob.size() < 16) throw std::logic_error("fixture blob too short");
        fx.add_string(blob);
    }

    Sym haystack = fx.add_string("request buffer text");
    Sym needle1 = fx.add_string("probe one");
    Sym needle2 = fx.add_string("probe two");
    Sym toks[4];
    for (int i = 0; i < 4; ++i) toks[i] = fx.add_string(kCommandTokens[i]);

    CodeBuffer& c = fx.code();
    plant_prologue(c);
    plant_cmp_block(c);

    // two strstr call sites
    c.lea_rcx_rip(haystack);
    c.lea_rdx_rip(needle1);
    c.call_rip_mem(Sym::iat("strstr"));
    c.cmp_eax_imm8sx(0);
    c.lea_rcx_rip(haystack);
    c.lea_rdx_rip(needle2);
    c.call_rip_mem(Sym::iat("strstr"));
    c.cmp_eax_imm8sx(0);

    // four CompareStringA call sites
    for (int i = 0; i < 4; ++i) {
        c.lea_rdx_rip(toks[i]);
        c.mov_reg_imm32(1, 0x409);  // ecx: locale id
        c.call_rip_mem(Sym::iat("CompareStringA"));
        c.cmp_eax_imm8sx(2);
        c.jne_rel8(3);
        c.xor_eax_eax();
        c.nop();
    }
    c.pop_rbp();
    c.ret();

    // second function reached through a call edge
    std::uint64_t helper = c.here();
    plant_prologue(c);
    c.xor_eax_eax();
    c.add_eax_imm8(9);
    c.pop_rbp();
    c.ret();
    (void)helper;

    return fx.build();
}

Bytes make_iis_raid_style_pe() {
    PeFixture fx(true);
    fx.import_symbol("KERNEL32.dll", "CompareStringA");
    fx.import_symbol("KERNEL32.dll", "GetLastError");

    Sym toks[4];
    for (int i = 0; i < 4; ++i) toks[i] = fx.add_string(kCommandTokens[i]);
    fx.add_string("X-Password");
    fx.add_string("application error");

    CodeBuffer& c = fx.code();
    plant_prologue(c);
    c.sub_rsp_imm8(0x20);
    for (int i = 0; i < 4; ++i) {
        c.lea_rdx_rip(toks[i]);
        c.mov_reg_imm32(1, 0x409);
        c.call_rip_mem(Sym::iat("CompareStringA"));
        c.cmp_eax_imm8sx(2);  // CSTR_EQUAL; non-printable immediate
        c.jne_rel8(3);
        c.xor_eax_eax();
        c.nop();
    }
    c.add_rsp_imm8(0x20);
    c.pop_rbp();
    c.ret();
    return fx.build();
}

Bytes make_benign_pe() {
    PeFixture fx(true);
    fx.import_symbol("KERNEL32.dll", "GetLastError");
    fx.add_string("ModuleEntry");
    fx.add_string("version 1.2.3");
    fx.add_string("configuration loaded");

    CodeBuffer& c = fx.code();
    plant_prologue(c);
    c.xor_eax_eax();
    c.add_eax_imm8(1);
    c.cmp_eax_imm32(1);       // non-printable immediate
    c.jne_rel8(0);
    c.cmp_eax_imm8sx(0x10);   // non-printable
    c.call_rip_mem(Sym::iat("GetLastError"));
    c.pop_rbp();
    c.ret();
    return fx.build();
}

Bytes make_backdoor_pe() {
    PeFixture fx(true);
    fx.import_symbol("KERNEL32.dll", "CompareStringA");
    fx.import_symbol("msvcrt.dll", "strstr");

    for (int i = 0; i < 5; ++i) fx.add_string(kSqlStrings[i]);
    for (int i = 0; i < 4; ++i) fx.add_string(kPsStrings[i]);
    fx.add_string(kKeywordStrings[0]);
    fx.add_string(kKeywordStrings[1]);
    for (int i = 0; i < 2; ++i) {
        std::string text(kBase64Payloads[i]);
        fx.add_string(tabmax::base64_encode(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(text.data()), text.size())));
    }
    Sym content_type = fx.add_string("text/plain");
    Sym tok0 = fx.add_string(kCommandTokens[0]);
    Sym tok1 = fx.add_string(kCommandTokens[3]);
    Sym needle = fx.add_string("probe one");

    CodeBuffer& c = fx.code();
    plant_prologue(c);
    c.lea_rax_rip(content_type);  // anchors this function to "text/plain"
    c.cmp_al_imm8(0x43);          // 'C'
    c.cmp_eax_imm32(0x504D44);    // "DMP"
    c.cmp_cl_imm8(0x7C);          // '|'
    c.lea_rcx_rip(needle);
    c.lea_rdx_rip(needle);
    c.call_rip_mem(Sym::iat("strstr"));
    for (Sym tok : {tok0, tok1}) {
        c.lea_rdx_rip(tok);
        c.mov_reg_imm32(1, 0x409);
        c.call_rip_mem(Sym::iat("CompareStringA"));
        c.cmp_eax_imm8sx(2);
        c.jne_rel8(3);
        c.xor_eax_eax();
        c.nop();
    }
    c.pop_rbp();
    c.ret();
    return fx.build();
}

Bytes make_min_pe64() {
    PeBuilder pe(true);
    CodeBuffer c(true);
    plant_prologue(c);
    c.xor_eax_eax();
    c.pop_rbp();
    c.ret();
    pe.set_text(std::move(c));
    return pe.build();
}

Bytes make_min_pe32() {
    PeBuilder pe(false);
    CodeBuffer c(false);
    c.push_rbp();
    c.mov_rbp_rsp();
    c.xor_eax_eax();
    c.pop_rbp();
    c.ret();
    pe.set_text(std::move(c));
    return pe.build();
}

Bytes make_min_elf64() {
    ElfBuilder elf;
    CodeBuffer c(true);
    plant_prologue(c);
    c.xor_eax_eax();
    c.pop_rbp();
    c.ret();
    elf.set_text(c.bytes());
    elf.set_rodata({'h', 'i', 0});
    return elf.build();
}

namespace {

// One deterministic filler instruction; the ten choices all produce distinct
// feature atoms (mnemonic + operand classes).
void emit_choice(CodeBuffer& c, int choice, int slot) {
    switch (choice % 10) {
        case 0: c.mov_reg_imm32(slot % 8, std::uint32_t(0x1000 + slot)); break;
        case 1: c.add_eax_imm8(std::uint8_t(2 + slot % 3)); break;
        case 2: c.xor_ecx_ecx(); break;
        case 3: c.mov_ecx_eax(); break;
        case 4: c.imul_eax_ecx(); break;
        case 5: c.shr_eax_imm8(std::uint8_t(1 + slot % 5)); break;
        case 6: c.jne_rel8(0); break;
        case 7: c.sub_eax_ecx(); break;
        case 8: c.movzx_eax_al(); break;
        case 9: c.add_eax_ecx(); break;
    }
}

// Emits a body of `count` instructions driven by a seeded choice stream.
void emit_stream_body(CodeBuffer& c, int count, std::uint32_t seed, int mutate_slot) {
    std::mt19937 rng(seed);
    std::vector<int> choices(count);
    for (int& ch : choices) ch = int(rng() % 10);
    if (mutate_slot >= 0) {
        if (mutate_slot >= count) throw std::logic_error("mutate slot out of range");
        choices[mutate_slot] = (choices[mutate_slot] + 3) % 10;
    }
    for (int i = 0; i < count; ++i) emit_choice(c, choices[i], i);
}

}  // namespace

Bytes make_stream_pe(int n, int mutate_index) {
    if (n < 8) throw std::logic_error("stream fixture needs >= 8 instructions");
    PeFixture fx(true);
    fx.add_string("stream fixture");
    CodeBuffer& c = fx.code();
    plant_prologue(c);  // 2 instructions, + ret below
    emit_stream_body(c, n - 3, 0xBEEF, mutate_index);
    c.ret();
    return fx.build();
}

Bytes make_shared_pair_pe(bool second) {
    PeFixture fx(true);
    fx.add_string(second ? "variant two" : "variant one");
    CodeBuffer& c = fx.code();

    auto shared_function = [&c]() {
        plant_prologue(c);
        emit_stream_body(c, 96, 0x5EED, -1);
        c.pop_rbp();
        c.ret();
    };
    auto unique_function = [&c](std::uint32_t seed, int count) {
        plant_prologue(c);
        emit_stream_body(c, count, seed, -1);
        c.pop_rbp();
        c.ret();
    };

    if (second) {
        unique_function(0xAAAA, 64);
        c.int3();
        shared_function();
    } else {
        shared_function();
        c.int3();
        unique_function(0xBBBB, 80);
    }
    return fx.build();
}

}  // namespace testsupport
