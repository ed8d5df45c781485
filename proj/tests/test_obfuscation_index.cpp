#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tabmax/errors.hpp"
#include "tabmax/obfuscation_index.hpp"
#include "tabmax/tolerances.hpp"

#include "support/corpus_gen.hpp"
#include "support/test_util.hpp"

using namespace tabmax;

namespace {

ExtractedString labeled(const std::string& text, StringLabel label) {
    ExtractedString s;
    s.text = text;
    s.char_length = text.size();
    s.labels.set(label);
    return s;
}

FrequencyTable random_table(std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    FrequencyTable t;
    t.total_chars = 1;
    double sum = 0;
    for (double& v : t.values) {
        v = dist(rng);
        sum += v;
    }
    for (double& v : t.values) v /= sum;
    return t;
}

}  // namespace

TEST_CASE("frequency table from a tiny corpus") {
    FrequencyTable t = build_frequency_table({"aa b"}, "tiny");
    CHECK(t.at('a') == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.at(' ') == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(t.at('b') == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(t.at('z') == 0.0);
    CHECK(t.total_chars == 4);
    CHECK(t.provenance == TableProvenance::CORPUS);
}

TEST_CASE("empty corpus throws") {
    CHECK_THROWS_AS(build_frequency_table({""}, "empty"), EmptyCorpusError);
    CHECK_THROWS_AS(build_frequency_table({"\x01\x02"}, "nonprintable"), EmptyCorpusError);
}

TEST_CASE("non-printable characters are ignored") {
    FrequencyTable t = build_frequency_table({std::string("a\x01\x02" "a", 4)}, "mixed");
    CHECK(t.total_chars == 2);
    CHECK(t.at('a') == doctest::Approx(1.0));
}

TEST_CASE("builtin baselines reproduce published top-30 values exactly") {
    const FrequencyTable& sql = builtin_sql_baseline();
    CHECK(sql.at('0') == 0.087421);
    CHECK(sql.at(' ') == 0.075127);
    CHECK(sql.at('e') == 0.047623);
    CHECK(sql.at('S') == 0.010444);

    const FrequencyTable& ps = builtin_ps1_baseline();
    CHECK(ps.at(' ') == 0.168742);
    CHECK(ps.at('e') == 0.085947);
    CHECK(ps.at('$') == 0.018316);
    CHECK(ps.at('R') == 0.006778);

    double sql_sum = 0, ps_sum = 0;
    for (double v : sql.values) sql_sum += v;
    for (double v : ps.values) ps_sum += v;
    CHECK(std::abs(sql_sum - 1.0) < kDistributionSumTolerance);
    CHECK(std::abs(ps_sum - 1.0) < kDistributionSumTolerance);
}

TEST_CASE("target frequency over labeled strings") {
    std::vector<ExtractedString> one = {labeled("aa", StringLabel::SQL)};
    FrequencyTable t = target_frequency(one, StringLabel::SQL);
    CHECK(t.at('a') == doctest::Approx(1.0));
    CHECK(t.provenance == TableProvenance::TARGET);

    FrequencyTable none = target_frequency(one, StringLabel::POWERSHELL);
    CHECK(none.total_chars == 0);
    for (double v : none.values) CHECK(v == 0.0);

    std::vector<ExtractedString> two = {labeled("ab", StringLabel::SQL),
                                        labeled("b ", StringLabel::SQL)};
    FrequencyTable t2 = target_frequency(two, StringLabel::SQL);
    CHECK(t2.at('a') == doctest::Approx(0.25));
    CHECK(t2.at('b') == doctest::Approx(0.5));
    CHECK(t2.at(' ') == doctest::Approx(0.25));
}

TEST_CASE("cosine similarity examples") {
    FrequencyTable a = build_frequency_table({"abcabc"}, "a");
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-9));

    FrequencyTable l = build_frequency_table({"aaaa"}, "l");
    FrequencyTable r = build_frequency_table({"bbbb"}, "r");
    CHECK(cosine_similarity(l, r) == 0.0);

    FrequencyTable half = build_frequency_table({"ab"}, "half");
    CHECK(cosine_similarity(l, half) == doctest::Approx(0.70710678).epsilon(kExampleCheckTolerance));
}

TEST_CASE("cosine properties over randomized tables") {
    std::mt19937 rng(42);
    for (int i = 0; i < 300; ++i) {
        FrequencyTable a = random_table(rng);
        FrequencyTable b = random_table(rng);
        double ab = cosine_similarity(a, b);
        double ba = cosine_similarity(b, a);
        CHECK(ab == ba);  // exact
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-9));
    }
    FrequencyTable zero;
    FrequencyTable a = random_table(rng);
    CHECK(cosine_similarity(zero, a) == 0.0);
    CHECK(cosine_similarity(zero, zero) == 0.0);
}

TEST_CASE("scale invariance of normalization") {
    std::vector<std::string> once = {"REPEATED sample text 123"};
    std::vector<std::string> thrice = {once[0], once[0], once[0]};
    FrequencyTable t1 = build_frequency_table(once, "x1");
    FrequencyTable t3 = build_frequency_table(thrice, "x3");
    for (std::size_t i = 0; i < kPrintableDims; ++i) {
        CHECK(std::abs(t1.values[i] - t3.values[i]) < kScaleInvarianceTolerance);
    }
}

TEST_CASE("obfuscation indices: corpus-sampled strings score high") {
    // Strings drawn verbatim from one half of a corpus, baseline from all of it.
    std::vector<std::string> all_texts, half_texts;
    for (int i = 0; i < 40; ++i) {
        std::string t = testsupport::synth_sql_file(std::uint32_t(i));
        all_texts.push_back(t);
        if (i % 2 == 0) half_texts.push_back(t);
    }
    FrequencyTable baseline = build_frequency_table(all_texts, "full");

    std::vector<ExtractedString> strings;
    for (const std::string& t : half_texts) strings.push_back(labeled(t, StringLabel::SQL));
    ObfuscationIndices idx = obfuscation_indices(strings, baseline, builtin_ps1_baseline());
    CHECK(idx.sql_index >= 0.95);
    CHECK(idx.ps1_index == 0.0);  // no PowerShell-labeled strings
    CHECK(idx.ps1_char_total == 0);
    CHECK(idx.sql_char_total > 0);
}

TEST_CASE("frequency CSV round trip") {
    FrequencyTable t = build_frequency_table({"SELECT x FROM y WHERE z = 1;"}, "csv-test");
    std::ostringstream out;
    write_frequency_csv(out, t);

    std::istringstream in(out.str());
    FrequencyTable back = read_frequency_csv(in, "csv-test");
    double sum = 0;
    for (std::size_t i = 0; i < kPrintableDims; ++i) {
        CHECK(std::abs(t.values[i] - back.values[i]) < 1e-10);
        sum += back.values[i];
    }
    CHECK(std::abs(sum - 1.0) < kDistributionSumTolerance);

    // header row + 95 data rows
    int lines = 0;
    for (char c : out.str()) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 96);
}

TEST_CASE("frequency CSV rejects malformed input") {
    std::istringstream missing_header("1,2\n");
    CHECK_THROWS_AS(read_frequency_csv(missing_header, "x"), ConfigError);

    std::istringstream short_table("char_code,frequency\n32,0.5\n");
    CHECK_THROWS_AS(read_frequency_csv(short_table, "x"), ConfigError);

    // a duplicate row must not satisfy the 95-row requirement
    std::ostringstream dup;
    dup << "char_code,frequency\n";
    for (std::size_t i = 0; i < kPrintableDims - 1; ++i) {
        dup << (i + kPrintableFirst) << ",0.01\n";
    }
    dup << "32,0.01\n";
    std::istringstream dup_in(dup.str());
    CHECK_THROWS_AS(read_frequency_csv(dup_in, "x"), ConfigError);

    std::istringstream negative("char_code,frequency\n32,-0.5\n");
    CHECK_THROWS_AS(read_frequency_csv(negative, "x"), ConfigError);
}

TEST_CASE("corpus builder walks a directory tree") {
    testsupport::TempDir dir;
    testsupport::write_corpus_tree(dir.path().string(), 10);
    CorpusStats stats;
    FrequencyTable sql = build_corpus_table(dir.path().string(), ".sql", &stats);
    CHECK(stats.file_count == 10);
    CHECK(stats.char_count > 0);
    double sum = 0;
    for (double v : sql.values) sum += v;
    CHECK(std::abs(sum - 1.0) < kDistributionSumTolerance);

    CHECK_THROWS_AS(build_corpus_table(dir.path().string(), ".xyz", nullptr), EmptyCorpusError);
}
