#include "tabmax/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace tabmax {

namespace {

// MurmurHash3 x64 128-bit (Austin Appleby, public domain), seed 0.
inline std::uint64_t rotl64(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

inline std::uint64_t fmix64(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

Simhash128 murmur3_x64_128(const void* key, std::size_t len, std::uint32_t seed) {
    const std::uint8_t* data = static_cast<const std::uint8_t*>(key);
    const std::size_t nblocks = len / 16;

    std::uint64_t h1 = seed;
    std::uint64_t h2 = seed;
    const std::uint64_t c1 = 0x87c37b91114253d5ULL;
    const std::uint64_t c2 = 0x4cf5ad432745937fULL;

    for (std::size_t i = 0; i < nblocks; ++i) {
        std::uint64_t k1, k2;
        std::memcpy(&k1, data + i * 16, 8);
        std::memcpy(&k2, data + i * 16 + 8, 8);

        k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
        h1 = rotl64(h1, 27); h1 += h2; h1 = h1 * 5 + 0x52dce729;
        k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
        h2 = rotl64(h2, 31); h2 += h1; h2 = h2 * 5 + 0x38495ab5;
    }

    const std::uint8_t* tail = data + nblocks * 16;
    std::uint64_t k1 = 0, k2 = 0;
    switch (len & 15) {
        case 15: k2 ^= std::uint64_t(tail[14]) << 48; [[fallthrough]];
        case 14: k2 ^= std::uint64_t(tail[13]) << 40; [[fallthrough]];
        case 13: k2 ^= std::uint64_t(tail[12]) << 32; [[fallthrough]];
        case 12: k2 ^= std::uint64_t(tail[11]) << 24; [[fallthrough]];
        case 11: k2 ^= std::uint64_t(tail[10]) << 16; [[fallthrough]];
        case 10: k2 ^= std::uint64_t(tail[9]) << 8; [[fallthrough]];
        case 9:  k2 ^= std::uint64_t(tail[8]);
                 k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2; [[fallthrough]];
        case 8:  k1 ^= std::uint64_t(tail[7]) << 56; [[fallthrough]];
        case 7:  k1 ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
        case 6:  k1 ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
        case 5:  k1 ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
        case 4:  k1 ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
        case 3:  k1 ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
        case 2:  k1 ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
        case 1:  k1 ^= std::uint64_t(tail[0]);
                 k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
    }

    h1 ^= std::uint64_t(len);
    h2 ^= std::uint64_t(len);
    h1 += h2;
    h2 += h1;
    h1 = fmix64(h1);
    h2 = fmix64(h2);
    h1 += h2;
    h2 += h1;
    return {h1, h2};
}

char operand_class_char(OperandKind k) {
    switch (k) {
        case OperandKind::REG: return 'R';
        case OperandKind::MEM: return 'M';
        case OperandKind::IMM: return 'I';
    }
    return '?';
}

// "mnemonic(RMI)" with operand values abstracted away.
void append_feature_atom(std::string& out, const InstructionRecord& inst) {
    out += inst.mnemonic;
    out.push_back('(');
    for (const Operand& op : inst.operands) out.push_back(operand_class_char(op.kind));
    out.push_back(')');
}

}  // namespace

unsigned hamming_distance(const Simhash128& a, const Simhash128& b) {
    return unsigned(std::popcount(a.lo ^ b.lo) + std::popcount(a.hi ^ b.hi));
}

std::string simhash_hex(const Simhash128& h) {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(h.hi), static_cast<unsigned long long>(h.lo));
    return buf;
}

FunctionDigest function_digest(const std::string& binary_id, const FunctionRegion& region) {
    FunctionDigest d;
    d.binary_id = binary_id;
    d.entry_va = region.entry_va;
    d.instruction_count = region.instructions.size();
    for (const InstructionRecord& inst : region.instructions) {
        if (inst.is_cond_branch) ++d.branching_node_count;
    }

    const std::size_t n = region.instructions.size();
    int votes[128] = {0};
    auto vote = [&votes](const Simhash128& h) {
        for (int b = 0; b < 64; ++b) votes[b] += (h.lo >> b) & 1 ? 1 : -1;
        for (int b = 0; b < 64; ++b) votes[64 + b] += (h.hi >> b) & 1 ? 1 : -1;
    };

    std::string feature;
    if (n < 3) {
        // Degenerate stream: one whole-stream gram.
        for (std::size_t i = 0; i < n; ++i) {
            if (i) feature.push_back('|');
            append_feature_atom(feature, region.instructions[i]);
        }
        vote(murmur3_x64_128(feature.data(), feature.size(), 0));
    } else {
        for (std::size_t i = 0; i + 3 <= n; ++i) {
            feature.clear();
            for (std::size_t k = 0; k < 3; ++k) {
                if (k) feature.push_back('|');
                append_feature_atom(feature, region.instructions[i + k]);
            }
            vote(murmur3_x64_128(feature.data(), feature.size(), 0));
        }
    }

    for (int b = 0; b < 64; ++b) {
        if (votes[b] > 0) d.simhash.lo |= (1ull << b);
    }
    for (int b = 0; b < 64; ++b) {
        if (votes[64 + b] > 0) d.simhash.hi |= (1ull << b);
    }
    return d;
}

std::vector<FunctionDigest> digest_binary(const BinaryImage& image,
                                          const std::vector<FunctionRegion>& functions) {
    std::string id = image.sha256.substr(0, 16);
    std::vector<FunctionDigest> out;
    out.reserve(functions.size());
    for (const FunctionRegion& f : functions) {
        if (f.instructions.empty()) continue;
        out.push_back(function_digest(id, f));
    }
    return out;
}

double simhash_similarity(const FunctionDigest& a, const FunctionDigest& b) {
    return 1.0 - double(hamming_distance(a.simhash, b.simhash)) / 128.0;
}

std::vector<MatchRecord> match_binaries(const std::vector<FunctionDigest>& left,
                                        const std::vector<FunctionDigest>& right,
                                        double threshold, std::size_t min_instructions) {
    std::vector<MatchRecord> out;
    for (const FunctionDigest& l : left) {
        if (l.instruction_count < min_instructions) continue;
        const FunctionDigest* best = nullptr;
        double best_score = -1.0;
        for (const FunctionDigest& r : right) {
            double score = simhash_similarity(l, r);
            if (score > best_score) {
                best_score = score;
                best = &r;
            }
        }
        if (best && best_score >= threshold) {
            out.push_back({best_score, l, *best});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const MatchRecord& a, const MatchRecord& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.left.entry_va < b.left.entry_va;
    });
    return out;
}

std::string render_match(const MatchRecord& m) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.6f: %s.%llx matches %s.%llx (%zu/%zu - %zu branching nodes)",
                  m.score, m.left.binary_id.c_str(),
                  static_cast<unsigned long long>(m.left.entry_va), m.right.binary_id.c_str(),
                  static_cast<unsigned long long>(m.right.entry_va), m.left.instruction_count,
                  m.right.instruction_count, m.left.branching_node_count);
    return buf;
}

void write_digests(std::ostream& out, const std::vector<FunctionDigest>& digests) {
    for (const FunctionDigest& d : digests) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s %llx %s %zu %zu\n", d.binary_id.c_str(),
                      static_cast<unsigned long long>(d.entry_va), simhash_hex(d.simhash).c_str(),
                      d.instruction_count, d.branching_node_count);
        out << buf;
    }
}

std::vector<FunctionDigest> read_digests(std::istream& in) {
    std::vector<FunctionDigest> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id, va_hex, hash_hex;
        std::size_t icount = 0, bcount = 0;
        if (!(ls >> id >> va_hex >> hash_hex >> icount >> bcount)) continue;
        if (hash_hex.size() != 32) continue;
        FunctionDigest d;
        d.binary_id = id;
        d.entry_va = std::stoull(va_hex, nullptr, 16);
        d.simhash.hi = std::stoull(hash_hex.substr(0, 16), nullptr, 16);
        d.simhash.lo = std::stoull(hash_hex.substr(16), nullptr, 16);
        d.instruction_count = icount;
        d.branching_node_count = bcount;
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace tabmax
