#pragma once

// Canonical planted-indicator fixtures shared between unit tests and the
// acceptance suite. Planted counts are the oracle: the builders construct
// each indicator the exact number of times stated here.

#include "fixture_builder.hpp"

namespace testsupport {

// Planted totals for make_planted_pe(): 10 SQL strings, 7 PowerShell strings,
// 5 base64 blobs (>=16 chars), 3 suspicious keywords, 6 cmp instructions with
// printable immediates, 2 strstr call sites, 4 CompareStringA call sites.
struct PlantedCounts {
    static constexpr int kSql = 10;
    static constexpr int kPs = 7;
    static constexpr int kKeywords = 3;
    static constexpr int kBase64 = 5;
    static constexpr int kCmpAscii = 6;
    static constexpr int kStrstr = 2;
    static constexpr int kCompareStringA = 4;
};

Bytes make_planted_pe();

// Dispatch loop with four CompareStringA sites guarded by "CMD|", "PIN|",
// "INJ|", "DMP|" literals; no printable cmp immediates, no strstr.
Bytes make_iis_raid_style_pe();

// Plain module: neutral strings, non-printable compares, no suspicious
// imports.
Bytes make_benign_pe();

// Synthetic backdoor-like module: SQL + PowerShell + base64 + keywords +
// "text/plain" anchor + CompareStringA dispatch + printable compares.
Bytes make_backdoor_pe();

// Smallest loadable images for format tests.
Bytes make_min_pe64();
Bytes make_min_pe32();
Bytes make_min_elf64();

// A single function of n deterministic instructions (n >= 8). mutate_index
// >= 0 swaps one add for a sub at that instruction slot.
Bytes make_stream_pe(int n, int mutate_index = -1);

// Two binaries sharing one byte-identical function among distinct others.
Bytes make_shared_pair_pe(bool second);

}  // namespace testsupport
