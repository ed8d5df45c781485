#include <benchmark/benchmark.h>

#include <random>

#include "tabmax/obfuscation_index.hpp"
#include "tabmax/similarity.hpp"
#include "tabmax/string_analysis.hpp"
#include "tabmax/x86_decoder.hpp"

namespace {

std::vector<std::uint8_t> mixed_buffer(std::size_t size) {
    std::mt19937 rng(7);
    std::vector<std::uint8_t> buf;
    buf.reserve(size);
    const char* words[] = {"SELECT a FROM b", "Invoke-Item $p", "text/plain",
                           "upload", "Y29tbWFuZCBzdHJlYW0=", "plain filler words"};
    while (buf.size() < size) {
        if (rng() % 3 == 0) {
            const char* w = words[rng() % std::size(words)];
            while (*w) buf.push_back(std::uint8_t(*w++));
            buf.push_back(0);
        } else {
            buf.push_back(std::uint8_t(rng()));
        }
    }
    return buf;
}

std::vector<std::uint8_t> code_buffer(std::size_t size) {
    std::mt19937 rng(11);
    std::vector<std::uint8_t> buf;
    buf.reserve(size + 16);
    while (buf.size() < size) {
        switch (rng() % 5) {
            case 0:  // mov eax, imm32
                buf.push_back(0xB8);
                for (int i = 0; i < 4; ++i) buf.push_back(std::uint8_t(rng()));
                break;
            case 1:  // cmp eax, imm32
                buf.push_back(0x3D);
                for (int i = 0; i < 4; ++i) buf.push_back(std::uint8_t(rng()));
                break;
            case 2:  // mov ecx, eax
                buf.push_back(0x89);
                buf.push_back(0xC1);
                break;
            case 3:  // jne +0
                buf.push_back(0x75);
                buf.push_back(0x00);
                break;
            default:  // lea rax, [rip+disp]
                buf.push_back(0x48);
                buf.push_back(0x8D);
                buf.push_back(0x05);
                for (int i = 0; i < 4; ++i) buf.push_back(std::uint8_t(rng()));
                break;
        }
    }
    return buf;
}

void BM_ExtractStrings(benchmark::State& state) {
    auto buf = mixed_buffer(std::size_t(state.range(0)));
    for (auto _ : state) {
        auto strings = tabmax::extract_strings_from_bytes(buf, 3);
        benchmark::DoNotOptimize(strings);
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_ExtractStrings)->Range(64 << 10, 4 << 20);

void BM_MatchIndicators(benchmark::State& state) {
    auto buf = mixed_buffer(std::size_t(state.range(0)));
    auto cfg = tabmax::IndicatorConfig::defaults();
    auto strings = tabmax::extract_strings_from_bytes(buf, 3);
    for (auto _ : state) {
        auto copy = strings;
        auto hits = tabmax::match_indicators(copy, cfg);
        benchmark::DoNotOptimize(hits);
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_MatchIndicators)->Range(64 << 10, 1 << 20);

void BM_LinearSweep(benchmark::State& state) {
    auto buf = code_buffer(std::size_t(state.range(0)));
    for (auto _ : state) {
        auto sweep = tabmax::linear_sweep(buf, 0x140001000ull, true);
        benchmark::DoNotOptimize(sweep);
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_LinearSweep)->Range(64 << 10, 4 << 20);

void BM_LinearSweepRandom(benchmark::State& state) {
    std::mt19937 rng(3);
    std::vector<std::uint8_t> buf(std::size_t(state.range(0)));
    for (auto& b : buf) b = std::uint8_t(rng());
    for (auto _ : state) {
        auto sweep = tabmax::linear_sweep(buf, 0x140001000ull, true);
        benchmark::DoNotOptimize(sweep);
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_LinearSweepRandom)->Range(64 << 10, 1 << 20);

void BM_CosineSimilarity(benchmark::State& state) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    tabmax::FrequencyTable a, b;
    for (double& v : a.values) v = dist(rng);
    for (double& v : b.values) v = dist(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tabmax::cosine_similarity(a, b));
    }
}
BENCHMARK(BM_CosineSimilarity);

void BM_FunctionDigest(benchmark::State& state) {
    auto buf = code_buffer(16 * 1024);
    auto sweep = tabmax::linear_sweep(buf, 0x1000, true);
    tabmax::FunctionRegion region;
    region.entry_va = 0x1000;
    region.instructions = sweep.instructions;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tabmax::function_digest("bench", region));
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(region.instructions.size()));
}
BENCHMARK(BM_FunctionDigest);

}  // namespace

BENCHMARK_MAIN();
