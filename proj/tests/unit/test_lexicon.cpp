#include <doctest.h>

#include <cmath>
#include <random>

#include "clir/error.hpp"
#include "clir/lexicon.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace clir;

namespace {

SentencePairCorpus corpus_of(const std::vector<std::pair<std::string, std::string>>& lines)
{
    SentencePairCorpus c;
    c.name = "test";
    for (const auto& [s, t] : lines) {
        c.pairs.push_back({tokenize(s), tokenize(t)});
    }
    return c;
}

std::vector<std::pair<oracle::Words, oracle::Words>> oracle_corpus(const SentencePairCorpus& c)
{
    std::vector<std::pair<oracle::Words, oracle::Words>> out;
    for (const auto& p : c.pairs) {
        out.emplace_back(p.source.tokens, p.target.tokens);
    }
    return out;
}

}  // namespace

TEST_CASE("Model 1 one iteration by hand")
{
    const auto c = corpus_of({{"a b", "x y"}, {"a", "x"}});
    const auto lex = train_model1(c, {.iterations = 1, .use_null = false});
    CHECK(lex.prob("a", "x") == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(lex.prob("a", "y") == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(lex.prob("b", "x") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lex.find(kNullWord) == nullptr);
}

TEST_CASE("Model 1 converges on the toy corpus")
{
    const auto c = corpus_of({{"a b", "x y"}, {"a", "x"}});
    const auto lex = train_model1(c, {.iterations = 20, .use_null = false});
    CHECK(lex.prob("a", "x") > 0.99);
}

TEST_CASE("Model 1 single pair is forced")
{
    const auto lex = train_model1(corpus_of({{"a", "x"}}), {.iterations = 3, .use_null = false});
    CHECK(lex.prob("a", "x") == 1.0);
}

TEST_CASE("Model 1 matches the reference EM with and without NULL")
{
    std::mt19937 rng(5);
    for (bool use_null : {false, true}) {
        for (int trial = 0; trial < 5; ++trial) {
            std::uniform_int_distribution<int> len(1, 5);
            std::uniform_int_distribution<int> word(0, 6);
            std::vector<std::pair<std::string, std::string>> lines;
            for (int k = 0; k < 12; ++k) {
                std::string s;
                std::string t;
                for (int i = len(rng); i > 0; --i) {
                    s += "s" + std::to_string(word(rng)) + " ";
                }
                for (int i = len(rng); i > 0; --i) {
                    t += "t" + std::to_string(word(rng)) + " ";
                }
                lines.emplace_back(s, t);
            }
            const auto c = corpus_of(lines);
            Model1Trace trace;
            const auto lex = train_model1(c, {.iterations = 6, .use_null = use_null}, &trace);
            const auto ref = oracle::model1(oracle_corpus(c), 6, use_null);
            std::size_t entries = 0;
            for (const auto& [s, row] : ref.table) {
                for (const auto& [t, p] : row) {
                    CHECK(std::abs(lex.prob(s, t) - p) <= 1e-9);
                    ++entries;
                }
            }
            std::size_t lex_entries = 0;
            for (const auto& [s, row] : lex.table()) {
                lex_entries += row.size();
                double total = 0.0;
                for (const auto& tr : row) {
                    total += tr.prob;
                }
                CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
            }
            CHECK(lex_entries == entries);
            REQUIRE(trace.log_likelihood.size() == ref.log_likelihood.size());
            for (std::size_t i = 0; i < ref.log_likelihood.size(); ++i) {
                CHECK(trace.log_likelihood[i] == doctest::Approx(ref.log_likelihood[i]).epsilon(1e-12));
                if (i > 0) {
                    CHECK(trace.log_likelihood[i] >= trace.log_likelihood[i - 1]);
                }
            }
        }
    }
}

TEST_CASE("Model 1 rejects an empty corpus")
{
    SentencePairCorpus c;
    CHECK_THROWS_AS((void)train_model1(c, {}), DataError);
}

TEST_CASE("swap_sides trains the reverse direction")
{
    const auto c = corpus_of({{"a b", "x y"}, {"a", "x"}});
    const auto rev = train_model1(swap_sides(c), {.iterations = 1, .use_null = false});
    CHECK(rev.find("x") != nullptr);
    CHECK(rev.find("a") == nullptr);
}

TEST_CASE("viterbi_align")
{
    Lexicon lex("t", Direction::SourceToTarget);
    lex.set_row("a", {{"x", 0.9}});
    lex.set_row("b", {{"x", 0.1}, {"y", 0.9}});
    const SentencePair pair{tokenize("a b"), tokenize("x y z")};
    SUBCASE("dominant probability wins")
    {
        const auto al = viterbi_align(pair, 0, lex, false);
        REQUIRE(al.links.size() == 3);
        CHECK(al.links[0] == std::optional<std::size_t>(0));
        CHECK(al.links[1] == std::optional<std::size_t>(1));
        // Unknown target: every source at the floor, leftmost wins.
        CHECK(al.links[2] == std::optional<std::size_t>(0));
    }
    SUBCASE("unknown target links to NULL when enabled")
    {
        const auto al = viterbi_align(pair, 0, lex, true);
        CHECK_FALSE(al.links[2].has_value());
        CHECK(al.links[0] == std::optional<std::size_t>(0));
    }
    SUBCASE("ties go to the leftmost source")
    {
        Lexicon tie("t", Direction::SourceToTarget);
        tie.set_row("a", {{"x", 0.5}});
        tie.set_row("b", {{"x", 0.5}});
        const auto al = viterbi_align({tokenize("b a"), tokenize("x")}, 0, tie, false);
        CHECK(al.links[0] == std::optional<std::size_t>(0));
    }
}

TEST_CASE("viterbi_align on the cup sentence")
{
    const auto c = corpus_of({{"brazil hosts football world cup", "برزیل میزبان جام جهانی فوتبال است"},
                              {"world cup", "جام جهانی"},
                              {"cup", "جام"},
                              {"world", "جهانی"},
                              {"football", "فوتبال"},
                              {"brazil", "برزیل"},
                              {"hosts", "میزبان است"}});
    const auto lex = train_model1(c, {.iterations = 10, .use_null = true});
    const auto al = viterbi_align(c.pairs[0], 0, lex, true);
    const auto& tgt = c.pairs[0].target;
    const auto& src = c.pairs[0].source;
    for (std::size_t j = 0; j < tgt.size(); ++j) {
        if (tgt[j] == "جام") {
            REQUIRE(al.links[j].has_value());
            CHECK(src[*al.links[j]] == "cup");
        }
    }
}

TEST_CASE("extract_comparable_lexicon")
{
    ComparableCorpus c;
    SUBCASE("one alignment")
    {
        c.src_docs = {{"d", tokenize("a")}};
        c.tgt_docs = {{"e", tokenize("x")}};
        c.alignments = {{"d", "e", 1.0}};
        CHECK(extract_comparable_lexicon(c, 10).prob("a", "x") == 1.0);
    }
    SUBCASE("two targets share evenly")
    {
        c.src_docs = {{"d1", tokenize("a")}, {"d2", tokenize("a")}};
        c.tgt_docs = {{"e1", tokenize("x")}, {"e2", tokenize("y")}};
        c.alignments = {{"d1", "e1", 1.0}, {"d2", "e2", 1.0}};
        const auto lex = extract_comparable_lexicon(c, 10);
        CHECK(lex.prob("a", "x") == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(lex.prob("a", "y") == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("alignment scores weight the sum")
    {
        c.src_docs = {{"d1", tokenize("a")}, {"d2", tokenize("a")}};
        c.tgt_docs = {{"e1", tokenize("x")}, {"e2", tokenize("y")}};
        c.alignments = {{"d1", "e1", 0.8}, {"d2", "e2", 0.2}};
        const auto lex = extract_comparable_lexicon(c, 10);
        CHECK(lex.prob("a", "x") == doctest::Approx(0.8).epsilon(1e-12));
        const auto rev = extract_comparable_lexicon(c, 10, Direction::TargetToSource);
        CHECK(rev.prob("x", "a") == 1.0);
    }
    SUBCASE("equal scores reduce to plain co-occurrence")
    {
        c.src_docs = {{"d1", tokenize("a b")}, {"d2", tokenize("a")}};
        c.tgt_docs = {{"e1", tokenize("x y")}, {"e2", tokenize("x")}};
        c.alignments = {{"d1", "e1", 0.3}, {"d2", "e2", 0.3}};
        const auto lex = extract_comparable_lexicon(c, 10);
        // a co-occurs with x twice and y once.
        CHECK(lex.prob("a", "x") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(lex.prob("a", "y") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("dictionary_lexicon")
{
    BilingualDictionary d;
    d.entries["cup"] = {"فنجان", "پیاله", "جام", "ساغر"};
    d.entries["one"] = {"یک"};
    const auto lex = dictionary_lexicon(d);
    for (const auto* t : {"فنجان", "پیاله", "جام", "ساغر"}) {
        CHECK(lex.prob("cup", t) == 0.25);
    }
    CHECK(lex.prob("one", "یک") == 1.0);

    BilingualDictionary inv;
    inv.entries["a"] = {"x"};
    inv.entries["b"] = {"x"};
    const auto rev = dictionary_lexicon(inv, Direction::TargetToSource);
    CHECK(rev.prob("x", "a") == 0.5);
    CHECK(rev.prob("x", "b") == 0.5);
}

TEST_CASE("prune_lexicon keeps original probabilities")
{
    Lexicon lex("t", Direction::SourceToTarget);
    lex.set_row("s", {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
    auto probs = [](const Lexicon& l) {
        std::vector<double> out;
        for (const auto& t : *l.find("s")) {
            out.push_back(t.prob);
        }
        return out;
    };
    CHECK(probs(prune_lexicon(lex, 2, 0.0)) == std::vector<double>{0.5, 0.3});
    CHECK(probs(prune_lexicon(lex, 10, 0.25)) == std::vector<double>{0.5, 0.3});
    CHECK(prune_lexicon(lex, 10, 0.0) == lex);
}

TEST_CASE("Lexicon rows sort by probability then word")
{
    Lexicon lex("t", Direction::SourceToTarget);
    lex.set_row("s", {{"b", 0.25}, {"a", 0.25}, {"c", 0.5}, {"z", 0.0}});
    const auto* row = lex.find("s");
    REQUIRE(row != nullptr);
    REQUIRE(row->size() == 3);
    CHECK((*row)[0].word == "c");
    CHECK((*row)[1].word == "a");
    CHECK(lex.rank("s", "b") == 3);
    CHECK(lex.rank("s", "z") == 0);
    CHECK(lex.prob("q", "a") == 0.0);
}

TEST_CASE("lexicon file round trip")
{
    fixture::TempDir dir;
    Lexicon lex("par", Direction::SourceToTarget);
    lex.set_row("cup", {{"فنجان", 0.46}, {"جام", 0.4}, {"x", 1.0 / 3.0}});
    lex.set_row("world", {{"جهان", 0.3}});
    write_lexicon(lex, dir / "l.lex");
    const auto back = read_lexicon(dir / "l.lex");
    CHECK(back == lex);
}
