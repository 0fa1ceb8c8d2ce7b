#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "clir/error.hpp"
#include "clir/features.hpp"
#include "oracles.hpp"

using namespace clir;

namespace {

std::vector<TokenizedText> docs_of(const std::vector<std::vector<std::string>>& raw)
{
    std::vector<TokenizedText> out;
    for (const auto& d : raw) {
        out.push_back({d});
    }
    return out;
}

/// `n` documents: `both` hold w1 and w2, `only1`/`only2` hold one of them, the rest filler.
std::vector<TokenizedText> pmi_docs(int n, int both, int only1, int only2)
{
    std::vector<std::vector<std::string>> raw;
    for (int i = 0; i < both; ++i) {
        raw.push_back({"w1", "w2"});
    }
    for (int i = 0; i < only1; ++i) {
        raw.push_back({"w1"});
    }
    for (int i = 0; i < only2; ++i) {
        raw.push_back({"w2"});
    }
    while (static_cast<int>(raw.size()) < n) {
        raw.push_back({"filler"});
    }
    return docs_of(raw);
}

Resource parallel_resource(std::string id, const SentencePairCorpus& corpus)
{
    Resource r;
    r.id = std::move(id);
    r.kind = ResourceKind::Parallel;
    r.forward = with_resource_id(train_model1(corpus, {.iterations = 5, .use_null = false}), r.id);
    r.reverse = with_resource_id(train_model1(swap_sides(corpus), {.iterations = 5, .use_null = false}), r.id);
    std::vector<TokenizedText> src;
    std::vector<TokenizedText> tgt;
    for (const auto& p : corpus.pairs) {
        src.push_back(p.source);
        tgt.push_back(p.target);
    }
    r.source_stats = compute_stats(src);
    r.target_stats = compute_stats(tgt);
    r.cross = AlignmentStats::build(corpus);
    return r;
}

Resource lexicon_resource(std::string id, std::map<std::string, Lexicon::Row> rows)
{
    Resource r;
    r.id = std::move(id);
    r.kind = ResourceKind::Dictionary;
    r.forward = Lexicon(r.id, Direction::SourceToTarget);
    r.reverse = Lexicon(r.id, Direction::TargetToSource);
    std::map<std::string, Lexicon::Row> inverse;
    for (auto& [s, row] : rows) {
        for (const auto& t : row) {
            inverse[t.word].push_back({s, t.prob});
        }
        r.forward.set_row(s, row);
    }
    for (auto& [t, row] : inverse) {
        r.reverse.set_row(t, row);
    }
    return r;
}

double slot(const FeatureVector& v, const FeatureSchema& schema, std::string_view name, std::string_view res)
{
    const auto i = schema.index_of(name, res);
    REQUIRE(i.has_value());
    return v.values[*i];
}

}  // namespace

TEST_CASE("pmi arithmetic")
{
    CHECK(std::abs(pmi(compute_stats(pmi_docs(10, 2, 3, 2)), "w1", "w2")) <= 1e-12);
    CHECK(pmi(compute_stats(pmi_docs(10, 0, 3, 2)), "w1", "w2") == 0.0);
    CHECK(pmi(compute_stats(pmi_docs(4, 2, 0, 0)), "w1", "w2") == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(pmi(compute_stats(pmi_docs(4, 2, 0, 0)), "w1", "unseen") == 0.0);
}

TEST_CASE("context_score sums pmi over other distinct words")
{
    const auto stats = compute_stats(pmi_docs(4, 2, 0, 0));
    CHECK(context_score(stats, "w1", {{"w1"}}) == 0.0);
    CHECK(context_score(stats, "w1", {{"w1", "w2"}}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // Repeats count once.
    CHECK(context_score(stats, "w1", {{"w2", "w2", "w1"}}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("clpmi arithmetic")
{
    ComparableCorpus c;
    c.src_docs = {{"s1", {{"ws"}}}, {"s2", {{"ws"}}}, {"s3", {{"o"}}}, {"s4", {{"o"}}}};
    c.tgt_docs = {{"t1", {{"wt"}}}, {"t2", {{"o"}}}, {"t3", {{"wt"}}}, {"t4", {{"o"}}}};
    c.alignments = {{"s1", "t1", 1.0}, {"s2", "t2", 1.0}, {"s3", "t3", 1.0}, {"s4", "t4", 1.0}};
    const auto stats = AlignmentStats::build(c);
    CHECK(std::abs(clpmi(stats, "ws", "wt")) <= 1e-12);
    CHECK(clpmi(stats, "ws", "absent") == 0.0);

    ComparableCorpus single;
    single.src_docs = {{"s", {{"a"}}}};
    single.tgt_docs = {{"t", {{"x"}}}};
    single.alignments = {{"s", "t", 1.0}};
    CHECK(clpmi(AlignmentStats::build(single), "a", "x") == 0.0);
}

TEST_CASE("cross_context_score edge cases")
{
    SentencePairCorpus corpus;
    corpus.pairs = {{{{"a"}}, {{"x"}}}, {{{"b"}}, {{"y"}}}};
    const auto stats = AlignmentStats::build(corpus);
    CHECK(cross_context_score(stats, "a", TokenizedText{}) == 0.0);
    CHECK(cross_context_score(stats, "a", {{"x"}}) == clpmi(stats, "a", "x"));
}

TEST_CASE("pmi, clpmi and context sums match brute-force counting")
{
    std::mt19937 rng(17);
    const std::vector<std::string> src_vocab{"a", "b", "c", "d", "e"};
    const std::vector<std::string> tgt_vocab{"x", "y", "z", "u", "v"};
    std::uniform_int_distribution<std::size_t> pick(0, 4);
    std::uniform_int_distribution<std::size_t> len(1, 4);
    std::uniform_int_distribution<std::size_t> ndocs(5, 50);
    for (int trial = 0; trial < 10; ++trial) {
        SentencePairCorpus corpus;
        std::vector<std::pair<oracle::Words, oracle::Words>> raw;
        const auto n = ndocs(rng);
        for (std::size_t d = 0; d < n; ++d) {
            oracle::Words s;
            oracle::Words t;
            for (auto k = len(rng); k > 0; --k) {
                s.push_back(src_vocab[pick(rng)]);
            }
            for (auto k = len(rng); k > 0; --k) {
                t.push_back(tgt_vocab[pick(rng)]);
            }
            corpus.pairs.push_back({{s}, {t}});
            raw.emplace_back(s, t);
        }
        std::vector<TokenizedText> src_docs;
        std::vector<oracle::Words> src_raw;
        for (const auto& p : corpus.pairs) {
            src_docs.push_back(p.source);
            src_raw.push_back(p.source.tokens);
        }
        const auto stats = compute_stats(src_docs);
        const auto cross = AlignmentStats::build(corpus);
        for (const auto& w1 : src_vocab) {
            for (const auto& w2 : src_vocab) {
                CHECK(std::abs(pmi(stats, w1, w2) - oracle::pmi(src_raw, w1, w2)) <= 1e-9);
            }
            for (const auto& t : tgt_vocab) {
                CHECK(std::abs(clpmi(cross, w1, t) - oracle::clpmi(raw, w1, t)) <= 1e-9);
            }
        }
        const TokenizedText sentence{{"a", "b", "c", "a"}};
        double expected = 0.0;
        for (const auto* w : {"b", "c"}) {
            expected += oracle::pmi(src_raw, "a", w);
        }
        CHECK(std::abs(context_score(stats, "a", sentence) - expected) <= 1e-9);

        const TokenizedText target{{"x", "y", "z", "u"}};
        double cross_expected = 0.0;
        for (const auto& t : target) {
            cross_expected += oracle::clpmi(raw, "a", t);
        }
        CHECK(std::abs(cross_context_score(cross, "a", target) - cross_expected) <= 1e-9);
        double reverse_expected = 0.0;
        for (const auto* s : {"a", "b", "c"}) {
            reverse_expected += oracle::clpmi(raw, s, "x");
        }
        CHECK(std::abs(reverse_cross_context_score(cross, "x", sentence) - reverse_expected) <= 1e-9);
    }
}

TEST_CASE("entropy of target words")
{
    auto r = lexicon_resource("d", {{"s1", {{"t", 0.5}, {"u", 0.5}}}, {"s2", {{"t", 0.5}, {"v", 0.5}}}});
    const ResourceSet set({r});
    CHECK(set.target_entropy(0, "t") == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(std::abs(set.target_entropy(0, "t") - std::log(2.0)) <= 1e-9);
    // Single source with p = 0.5: -0.5 log 0.5.
    CHECK(set.target_entropy(0, "u") == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(set.target_entropy(0, "none") == 0.0);
}

TEST_CASE("entropy is log k for k equal sources")
{
    for (int k = 1; k <= 6; ++k) {
        std::map<std::string, Lexicon::Row> rows;
        for (int i = 0; i < k; ++i) {
            rows["s" + std::to_string(i)] = {{"t", 1.0 / k}, {"pad" + std::to_string(i), 1.0 - 1.0 / k}};
        }
        const ResourceSet set({lexicon_resource("d", rows)});
        // -sum_s p log p with p = 1/k over k sources.
        CHECK(std::abs(set.target_entropy(0, "t") - std::log(static_cast<double>(k))) <= 1e-9);
    }
}

TEST_CASE("schema layout")
{
    SentencePairCorpus corpus;
    corpus.pairs = {{tokenize("aa bb"), tokenize("xx yy")}};
    const ResourceSet set({parallel_resource("par", corpus), lexicon_resource("dict", {{"aa", {{"xx", 1.0}}}})});
    const auto& schema = set.schema();
    CHECK(schema.version() == kSchemaVersion);
    CHECK(schema.size() == 16 + 8 + 1);
    CHECK(schema.label(0) == "present@par");
    CHECK(schema.slots().back() == FeatureSchema::Slot{"n_relevant", std::string(kAllResources)});
    CHECK(schema.index_of("pmi_src", "dict") == std::nullopt);
    const auto round = FeatureSchema::from_manifest(schema.manifest());
    CHECK(round == schema);
    CHECK(round.slots() == schema.slots());
}

TEST_CASE("extract_vector translation relation features")
{
    auto r = lexicon_resource("20m", {{"cup", {{"فنجان", 0.46}, {"جام", 0.4}, {"پیاله", 0.14}}}});
    const ResourceSet set({r});
    const auto& schema = set.schema();
    const ContextSpec ctx{tokenize("world cup"), tokenize("جام جهانی")};
    const auto v = extract_vector("cup", "جام", ctx, set, schema);
    CHECK(slot(v, schema, "present", "20m") == 1.0);
    CHECK(slot(v, schema, "prob", "20m") == 0.4);
    CHECK(slot(v, schema, "rank", "20m") == 2.0);
    CHECK(slot(v, schema, "probdiff", "20m") == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(slot(v, schema, "revprob", "20m") == 0.4);
    CHECK(slot(v, schema, "n_relevant", "20m") == 1.0);
    CHECK(slot(v, schema, "n_relevant", kAllResources) == 1.0);

    const auto top = extract_vector("cup", "فنجان", ctx, set, schema);
    CHECK(slot(top, schema, "rank", "20m") == 1.0);
    CHECK(slot(top, schema, "probdiff", "20m") == 0.0);

    const auto absent = extract_vector("cup", "دنيا", ctx, set, schema);
    CHECK(slot(absent, schema, "present", "20m") == 0.0);
    CHECK(slot(absent, schema, "prob", "20m") == 0.0);
    CHECK(slot(absent, schema, "rank", "20m") == 0.0);
    CHECK(slot(absent, schema, "probdiff", "20m") == 0.0);
}

TEST_CASE("extract_vector context features and finiteness")
{
    SentencePairCorpus corpus;
    corpus.pairs = {{tokenize("world cup final"), tokenize("جام جهانی فینال")},
                    {tokenize("cup of tea"), tokenize("فنجان چای")},
                    {tokenize("world news"), tokenize("اخبار جهان")},
                    {tokenize("football world cup"), tokenize("جام جهانی فوتبال")}};
    const ResourceSet set({parallel_resource("par", corpus), lexicon_resource("dict", {{"cup", {{"جام", 0.5}, {"فنجان", 0.5}}}})});
    const auto& schema = set.schema();
    const ContextSpec ctx{tokenize("world cup"), tokenize("جام جهانی جهان")};
    const auto& res = set.get("par");
    for (const auto* cand : {"جام", "فنجان", "چای", "ناشناخته"}) {
        const auto v = extract_vector("cup", cand, ctx, set, schema);
        REQUIRE(v.values.size() == schema.size());
        for (double x : v.values) {
            CHECK(std::isfinite(x));
        }
        CHECK(slot(v, schema, "pmi_src", "par") == context_score(*res.source_stats, "cup", ctx.source_sentence));
        CHECK(slot(v, schema, "pmi_tgt", "par") == context_score(*res.target_stats, cand, ctx.target_sentence));
        CHECK(slot(v, schema, "clpmi_s2t", "par") == cross_context_score(*res.cross, "cup", ctx.target_sentence));
        CHECK(slot(v, schema, "clpmi_t2s", "par")
              == reverse_cross_context_score(*res.cross, cand, ctx.source_sentence));
        CHECK(slot(v, schema, "tf_tgt", "par") == static_cast<double>(res.target_stats->tf(cand)));
    }
    const auto v = extract_vector("cup", "جام", ctx, set, schema);
    CHECK(slot(v, schema, "tf_src", "par") == 3.0);
    CHECK(slot(v, schema, "idf_src", "par") == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
    CHECK(slot(extract_vector("cup", "ناشناخته", ctx, set, schema), schema, "idf_tgt", "par") == 0.0);
}

TEST_CASE("extract_vector rejects a foreign schema")
{
    const ResourceSet a({lexicon_resource("a", {{"s", {{"t", 1.0}}}})});
    const ResourceSet b({lexicon_resource("b", {{"s", {{"t", 1.0}}}})});
    CHECK_THROWS_AS((void)extract_vector("s", "t", {}, a, b.schema()), DataError);
}

TEST_CASE("rank and probdiff agree with prob")
{
    auto r = lexicon_resource("d", {{"s", {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}}}});
    const ResourceSet set({r});
    const auto& schema = set.schema();
    double best = -1.0;
    for (const auto* c : {"a", "b", "c"}) {
        const auto v = extract_vector("s", c, {}, set, schema);
        best = std::max(best, slot(v, schema, "prob", "d"));
        if (slot(v, schema, "prob", "d") == 0.5) {
            CHECK(slot(v, schema, "rank", "d") == 1.0);
            CHECK(slot(v, schema, "probdiff", "d") == 0.0);
        } else {
            CHECK(slot(v, schema, "probdiff", "d") == doctest::Approx(0.5 - slot(v, schema, "prob", "d")));
        }
    }
    CHECK(best == 0.5);
}

TEST_CASE("normalize_list")
{
    auto fv = [](std::vector<double> values) { return FeatureVector{std::move(values), "v"}; };
    const auto out = normalize_list({fv({2, 3}), fv({4, 3}), fv({6, 3})});
    CHECK(out[0].values == std::vector<double>{0.0, 0.0});
    CHECK(out[1].values == std::vector<double>{0.5, 0.0});
    CHECK(out[2].values == std::vector<double>{1.0, 0.0});
    CHECK(normalize_list({fv({7, -1})})[0].values == std::vector<double>{0.0, 0.0});

    std::mt19937 rng(3);
    std::normal_distribution<double> noise(0.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<FeatureVector> list;
        for (int i = 0; i < 6; ++i) {
            list.push_back(fv({noise(rng), noise(rng), 1.0}));
        }
        const auto once = normalize_list(list);
        const auto twice = normalize_list(once);
        for (std::size_t i = 0; i < list.size(); ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(once[i].values[j] >= 0.0);
                CHECK(once[i].values[j] <= 1.0);
                CHECK(twice[i].values[j] == doctest::Approx(once[i].values[j]).epsilon(1e-12));
                for (std::size_t k = 0; k < list.size(); ++k) {
                    if (list[i].values[j] < list[k].values[j]) {
                        CHECK(once[i].values[j] <= once[k].values[j]);
                    }
                }
            }
        }
    }
}

TEST_CASE("query_context builds the target sentence from top translations")
{
    Lexicon ctx("ctx", Direction::SourceToTarget);
    ctx.set_row("world", {{"جهان", 0.5}, {"جهانی", 0.3}, {"دنيا", 0.1}, {"عالم", 0.05}, {"گیتی", 0.03}, {"کره", 0.02}});
    ctx.set_row("cup", {{"فنجان", 0.46}, {"جام", 0.4}});
    const auto spec = query_context(tokenize("2002 world cup"), ctx, 5);
    CHECK(spec.source_sentence == tokenize("2002 world cup"));
    CHECK(spec.target_sentence.size() == 7);
    CHECK(std::find(spec.target_sentence.begin(), spec.target_sentence.end(), "کره") == spec.target_sentence.end());
    CHECK(std::find(spec.target_sentence.begin(), spec.target_sentence.end(), "جام") != spec.target_sentence.end());
}

TEST_CASE("extract_lists is independent of the thread count")
{
    SentencePairCorpus corpus;
    corpus.pairs = {{tokenize("aa bb"), tokenize("xx yy")}, {tokenize("aa cc"), tokenize("xx zz")}};
    const ResourceSet set({parallel_resource("par", corpus)});
    std::vector<TrainingInstance> inst;
    for (int q = 1; q <= 9; ++q) {
        TrainingInstance i;
        i.query_id = q;
        i.source_word = q % 2 == 0 ? "aa" : "cc";
        i.source_sentence = corpus.pairs[q % 2].source;
        i.target_sentence = corpus.pairs[q % 2].target;
        i.candidates = {{"xx", 1}, {"zz", 0}, {"yy", 0}};
        inst.push_back(i);
    }
    const auto one = extract_lists(inst, set, 1);
    const auto four = extract_lists(inst, set, 4);
    CHECK(one == four);
    REQUIRE(one.size() == inst.size());
    CHECK(one[0].qid == 1);
    CHECK(one[0].candidates.size() == 3);
}
