#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "clir/error.hpp"
#include "clir/synthetic.hpp"
#include "fixtures.hpp"

using namespace clir;

TEST_CASE("same seed writes byte-identical worlds")
{
    fixture::TempDir dir;
    const auto world = generate_synthetic_world({.seed = 3});
    write_world(world, dir / "a");
    write_world(generate_synthetic_world({.seed = 3}), dir / "b");
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
        const auto other = dir / "b" / entry.path().filename();
        REQUIRE(std::filesystem::exists(other));
        CHECK(fixture::read_file(entry.path()) == fixture::read_file(other));
        ++files;
    }
    CHECK(files >= 10);
    CHECK(std::filesystem::exists(dir / "a" / "exp.toml"));

    const auto changed = generate_synthetic_world({.seed = 4});
    CHECK(changed.parallel1 != world.parallel1);
}

TEST_CASE("ambiguity 0 gives one translation per word")
{
    const auto world = generate_synthetic_world({.seed = 1, .ambiguity = 0.0});
    for (const auto& w : world.words) {
        CHECK(w.senses.size() == 1);
    }
}

TEST_CASE("the generated world has the requested shape")
{
    const SyntheticOptions opts{.seed = 2};
    const auto world = generate_synthetic_world(opts);
    CHECK(world.words.size() == opts.vocabulary);
    CHECK(world.parallel1.size() == opts.parallel1_pairs);
    CHECK(world.parallel2.size() == opts.parallel2_pairs);
    CHECK(world.topics.size() == opts.queries);
    CHECK(world.heldout_gold.size() > 0);

    std::size_t ambiguous = 0;
    std::set<std::string> sources;
    for (const auto& w : world.words) {
        sources.insert(w.source);
        ambiguous += w.ambiguous() ? 1 : 0;
        if (w.ambiguous()) {
            CHECK(w.senses.size() == 2);
            CHECK(w.senses[0].topic != w.senses[1].topic);
        }
    }
    CHECK(sources.size() == world.words.size());
    CHECK(std::abs(static_cast<double>(ambiguous) / static_cast<double>(opts.vocabulary) - opts.ambiguity) <= 0.05);

    for (const auto& [qid, judged] : world.qrels) {
        std::size_t relevant = 0;
        for (const auto& [doc, grade] : judged) {
            relevant += grade > 0 ? 1 : 0;
        }
        CHECK(relevant == opts.relevant_per_query);
    }
}

TEST_CASE("coverage gaps are disjoint and a tenth of the vocabulary each")
{
    const auto world = generate_synthetic_world({.seed = 5});
    REQUIRE(world.gaps.size() == 4);
    std::set<std::string> seen;
    const auto expected = static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(world.words.size())));
    for (const auto& [id, gap] : world.gaps) {
        CHECK(gap.size() == expected);
        for (const auto& w : gap) {
            CHECK(seen.insert(w).second);
        }
    }
    // A gapped word never appears in that resource's source side.
    const auto& par1_gap = world.gaps.at("par1");
    for (const auto& [src, tgt] : world.parallel1) {
        for (const auto& tok : tokenize(src).tokens) {
            CHECK_FALSE(par1_gap.contains(tok));
        }
    }
    const auto& dict_gap = world.gaps.at("dictionary");
    for (const auto& [src, targets] : world.dictionary) {
        CHECK_FALSE(dict_gap.contains(src));
    }
}

TEST_CASE("undersized worlds are rejected")
{
    CHECK_THROWS_AS((void)generate_synthetic_world({.vocabulary = 100}), DataError);
    CHECK_THROWS_AS((void)generate_synthetic_world({.parallel1_pairs = 500, .parallel2_pairs = 500}), DataError);
    CHECK_THROWS_AS((void)generate_synthetic_world({.gap = 0.5}), DataError);
}
