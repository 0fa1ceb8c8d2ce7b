#include <doctest.h>

#include <cmath>
#include <random>

#include "clir/error.hpp"
#include "clir/pipeline.hpp"

using namespace clir;

namespace {

Lexicon lexicon(std::string id, std::map<std::string, Lexicon::Row> rows)
{
    Lexicon lex(std::move(id), Direction::SourceToTarget);
    for (auto& [s, row] : rows) {
        lex.set_row(s, std::move(row));
    }
    return lex;
}

Resource dictionary_resource(std::string id, std::map<std::string, Lexicon::Row> rows)
{
    Resource r;
    r.id = id;
    r.kind = ResourceKind::Dictionary;
    r.reverse = Lexicon(id, Direction::TargetToSource);
    std::map<std::string, Lexicon::Row> inverse;
    for (const auto& [s, row] : rows) {
        for (const auto& t : row) {
            inverse[t.word].push_back({s, t.prob});
        }
    }
    for (auto& [t, row] : inverse) {
        r.reverse.set_row(t, std::move(row));
    }
    r.forward = lexicon(std::move(id), std::move(rows));
    return r;
}

// Cup probabilities in the style of a published translation table.
const std::map<std::string, Lexicon::Row> kParallel{{"cup", {{"فنجان", 0.46}, {"جام", 0.4}, {"کاپ", 0.14}}},
                                                    {"world", {{"جهان", 0.5}, {"جهانی", 0.5}}}};
const std::map<std::string, Lexicon::Row> kTep{{"cup", {{"فنجان", 0.9}, {"کاپ", 0.1}}}};
const std::map<std::string, Lexicon::Row> kComparable{{"cup", {{"فنجان", 0.5}, {"جام", 0.22}, {"کاپ", 0.28}}}};
const std::map<std::string, Lexicon::Row> kDictionary{
    {"cup", {{"فنجان", 0.25}, {"پیاله", 0.25}, {"جام", 0.25}, {"ساغر", 0.25}}}};

struct SmallWorld {
    InvertedIndex index;
    RetrievalSetup setup;

    SmallWorld()
    {
        std::vector<Document> docs;
        const std::vector<std::pair<std::string, std::string>> raw{
            {"d1", "جام جهانی فوتبال"}, {"d2", "فنجان چای"},  {"d3", "جام جهانی برزیل"},
            {"d4", "جهان بزرگ"},        {"d5", "کاپ قهرمانی"}, {"d6", "پیاله ساغر"}};
        for (const auto& [id, text] : raw) {
            docs.push_back({id, tokenize(text)});
        }
        index = build_index(docs);
        setup.index = &index;
        setup.topics = {{"1", "world cup"}, {"2", "cup"}, {"3", "unknown"}};
        setup.qrels["1"]["d1"] = 1;
        setup.qrels["1"]["d3"] = 1;
        setup.qrels["2"]["d2"] = 1;
        setup.qrels["3"]["d4"] = 1;
    }
};

}  // namespace

TEST_CASE("linear_combine mixes probabilities")
{
    const auto par = lexicon("par", kParallel);
    const auto tep = lexicon("tep", kTep);
    const auto comp = lexicon("comp", kComparable);
    const auto dict = lexicon("dict", kDictionary);
    SUBCASE("four resources")
    {
        const auto mixed = linear_combine({&par, &tep, &comp, &dict},
                                          {{{"par", 0.7}, {"tep", 0.2}, {"comp", 0.1}, {"dict", 0.0}}});
        CHECK(std::abs(mixed.prob("cup", "جام") - 0.302) <= 1e-12);
        CHECK(mixed.prob("cup", "پیاله") == 0.0);
        CHECK(mixed.resource_id() == "linear");
        // Rows stay sorted by probability.
        const auto* row = mixed.find("cup");
        REQUIRE(row != nullptr);
        for (std::size_t i = 1; i < row->size(); ++i) {
            CHECK((*row)[i - 1].prob >= (*row)[i].prob);
        }
    }
    SUBCASE("agreeing lexicons")
    {
        const auto a = lexicon("a", {{"s", {{"t", 0.5}, {"u", 0.5}}}});
        const auto b = lexicon("b", {{"s", {{"t", 0.5}, {"v", 0.5}}}});
        CHECK(linear_combine({&a, &b}, {{{"a", 0.5}, {"b", 0.5}}}).prob("s", "t") == 0.5);
    }
    SUBCASE("invalid weights")
    {
        CHECK_THROWS_AS((void)linear_combine({&par, &tep}, {{{"par", 0.7}, {"tep", 0.2}}}), DataError);
        CHECK_THROWS_AS((void)linear_combine({&par, &tep}, {{{"par", 1.2}, {"tep", -0.2}}}), DataError);
        CHECK_THROWS_AS((void)linear_combine({&par, &tep}, {{{"par", 1.0}}}), DataError);
    }
}

TEST_CASE("linear_combine keeps per-word mass at most 1")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Lexicon> lexicons;
    for (int r = 0; r < 3; ++r) {
        std::map<std::string, Lexicon::Row> rows;
        for (int s = 0; s < 10; ++s) {
            Lexicon::Row row;
            double total = 0.0;
            for (int t = 0; t < 4; ++t) {
                row.push_back({"t" + std::to_string(rng() % 8), u(rng)});
                total += row.back().prob;
            }
            for (auto& x : row) {
                x.prob /= total;
            }
            // Merge repeated words so each row stays a distribution.
            std::map<std::string, double> merged;
            for (const auto& x : row) {
                merged[x.word] += x.prob;
            }
            Lexicon::Row clean;
            for (const auto& [w, p] : merged) {
                clean.push_back({w, p});
            }
            if (rng() % 4 != 0) {
                rows["s" + std::to_string(s)] = clean;
            }
        }
        lexicons.push_back(lexicon("r" + std::to_string(r), rows));
    }
    const std::vector<const Lexicon*> ptrs{&lexicons[0], &lexicons[1], &lexicons[2]};
    for (const auto& cfg : lambda_grid({"r0", "r1", "r2"}, 0.25)) {
        const auto mixed = linear_combine(ptrs, cfg);
        for (const auto& [s, row] : mixed.table()) {
            double total = 0.0;
            for (const auto& t : row) {
                total += t.prob;
            }
            CHECK(total <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("lambda_grid enumerates the simplex")
{
    const auto grid = lambda_grid({"a", "b", "c"}, 0.5);
    REQUIRE(grid.size() == 6);
    CHECK(grid.front().weights.at("a") == 1.0);
    for (const auto& cfg : grid) {
        double total = 0.0;
        for (const auto& [id, w] : cfg.weights) {
            CHECK(w >= 0.0);
            total += w;
        }
        CHECK(std::abs(total - 1.0) <= 1e-9);
    }
    // Step 0.1 over four resources: C(13, 3) points.
    CHECK(lambda_grid({"a", "b", "c", "d"}, 0.1).size() == 286);
}

TEST_CASE("one-hot lambda reproduces the single resource")
{
    SmallWorld w;
    const auto par = lexicon("par", kParallel);
    const auto comp = lexicon("comp", kComparable);
    for (std::size_t n : {1, 2, 5}) {
        const auto single = run_single_resource(w.setup, par, n, "par");
        const auto mixed = linear_combine({&par, &comp}, {{{"par", 1.0}, {"comp", 0.0}}});
        CHECK(mixed.table() == par.table());
        const auto linear = run_single_resource(w.setup, mixed, n, "par");
        CHECK(linear.queries == single.queries);
        CHECK(linear.run == single.run);
        CHECK(linear.eval == single.eval);
    }
}

TEST_CASE("run_single_resource")
{
    SmallWorld w;
    SUBCASE("records N and evaluates every judged query")
    {
        const auto dict = lexicon("dict", kDictionary);
        const auto r = run_single_resource(w.setup, dict, 6, "dictionary");
        CHECK(r.eval.meta["n"] == 6);
        CHECK(r.eval.ap.size() == 3);
        // "world" and "unknown" have no dictionary entry.
        CHECK(r.eval.oov == 2);
    }
    SUBCASE("lexicon covering no query word")
    {
        const auto empty = lexicon("none", {{"zzz", {{"x", 1.0}}}});
        const auto r = run_single_resource(w.setup, empty, 5, "none");
        CHECK(r.eval.map == 0.0);
        CHECK(r.eval.oov == 4);
    }
    SUBCASE("repeatable")
    {
        const auto par = lexicon("par", kParallel);
        CHECK(run_single_resource(w.setup, par, 5, "p").eval == run_single_resource(w.setup, par, 5, "p").eval);
    }
}

TEST_CASE("lexicon_candidates normalizes row probabilities")
{
    const auto par = lexicon("par", kParallel);
    const auto c = lexicon_candidates(par, "cup");
    REQUIRE(c.size() == 3);
    CHECK(c[0].word == "فنجان");
    CHECK(c[0].weight == doctest::Approx(0.46).epsilon(1e-12));
    CHECK(lexicon_candidates(par, "nothing").empty());
}

TEST_CASE("run_ltr")
{
    SmallWorld w;
    const ResourceSet set({dictionary_resource("par", kParallel), dictionary_resource("dict", kDictionary)});
    RankingModel model;
    model.schema_hash = set.schema().hash();
    model.weights.assign(set.schema().size(), 0.0);
    const auto context = lexicon("par", kParallel);
    LtrTranslator translator{&set, &model, &context};

    SUBCASE("zero model completes with tie-break order")
    {
        const auto r = run_ltr(w.setup, translator, 5);
        CHECK(r.eval.ap.size() == 3);
        const auto per_word = translator.translate(tokenize("cup"));
        REQUIRE(per_word.size() == 1);
        for (std::size_t i = 1; i < per_word[0].size(); ++i) {
            CHECK(per_word[0][i - 1].word < per_word[0][i].word);
        }
    }
    SUBCASE("N = 1 keeps one term per covered word")
    {
        const auto prob = set.schema().index_of("prob", "par");
        REQUIRE(prob.has_value());
        model.weights[*prob] = 1.0;
        const auto r = run_ltr(w.setup, translator, 1);
        CHECK(r.queries.at("1").terms.size() == 2);
        CHECK(r.queries.at("2").terms.size() == 1);
        CHECK(r.queries.at("2").terms[0].term == "فنجان");
        CHECK(r.eval.meta["n"] == 1);
    }
    SUBCASE("schema mismatch")
    {
        model.schema_hash = "other";
        CHECK_THROWS_AS((void)run_ltr(w.setup, translator, 5), DataError);
    }
}

TEST_CASE("forward selection")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<RankList> lists;
    for (int q = 1; q <= 40; ++q) {
        RankList l{q, "w", {}};
        const int positive = static_cast<int>(rng() % 4);
        for (int c = 0; c < 4; ++c) {
            const double noise = u(rng);
            const double signal = c == positive ? 2.0 + u(rng) : u(rng);
            l.candidates.push_back({"c" + std::to_string(c), c == positive ? 1 : 0, {noise, signal, signal}});
        }
        lists.push_back(l);
    }
    const auto report = forward_selection(lists, {"noise", "signal", "copy"}, {});
    REQUIRE(report.size() == 3);
    CHECK(report[0].label == "signal");
    CHECK(report[0].training_map == 1.0);
    for (std::size_t i = 1; i < report.size(); ++i) {
        CHECK(report[i].metric >= report[i - 1].metric);
    }
    const auto two = forward_selection(lists, {"noise", "signal", "copy"}, {.max_steps = 2});
    REQUIRE(two.size() == 2);
    CHECK(two[1].metric - two[0].metric <= 1e-9);
    CHECK_THROWS_AS((void)forward_selection(lists, {"only"}, {}), DataError);
}
