#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "clir/retrieval.hpp"

namespace clir {

struct SyntheticOptions {
    std::uint64_t seed = 7;
    std::size_t vocabulary = 400;
    std::size_t topics = 10;
    /// Fraction of source words with two topic-bound senses.
    double ambiguity = 0.3;
    /// Fraction of topic-neutral source words.
    double general = 0.1;
    /// Fraction of the source vocabulary each resource misses; the four gaps are disjoint.
    double gap = 0.1;
    std::size_t parallel1_pairs = 3000;
    std::size_t parallel2_pairs = 1500;
    std::size_t comparable_docs = 400;
    std::size_t labeling_pairs = 800;
    std::size_t heldout_pairs = 400;
    std::size_t background_docs = 900;
    std::size_t queries = 60;
    std::size_t relevant_per_query = 6;
    std::size_t confusers_per_query = 5;
    /// Per-token probability of dropping a translation, and of inserting a random target word.
    double noise = 0.03;
};

struct SyntheticSense {
    std::string target;
    std::size_t topic = 0;
    double weight = 1.0;
};

struct SyntheticWord {
    std::string source;
    /// One sense for unambiguous words, two for ambiguous ones (dominant first).
    std::vector<SyntheticSense> senses;
    bool general = false;

    [[nodiscard]] bool ambiguous() const noexcept { return senses.size() > 1; }
};

struct GoldSense {
    /// 1-based line of the held-out file.
    std::size_t line = 0;
    std::string source;
    std::string target;
};

using TextPairs = std::vector<std::pair<std::string, std::string>>;

struct SyntheticWorld {
    SyntheticOptions options;
    std::vector<SyntheticWord> words;
    /// Resource id -> source words the resource never sees.
    std::map<std::string, std::set<std::string>, std::less<>> gaps;
    TextPairs parallel1;
    TextPairs parallel2;
    TextPairs labeling;
    TextPairs heldout;
    std::vector<GoldSense> heldout_gold;
    /// (id, text) documents of the comparable corpus and their alignments (src, tgt, score).
    TextPairs comparable_src;
    TextPairs comparable_tgt;
    std::vector<std::tuple<std::string, std::string, double>> comparable_alignments;
    /// Source word -> listed targets (true senses plus distractors).
    std::vector<std::pair<std::string, std::vector<std::string>>> dictionary;
    TextPairs documents;
    std::vector<Topic> topics;
    Qrels qrels;
};

/// Deterministic in `options`. Throws DataError below the minimal sizes
/// (200 word types, 2000 parallel sentence pairs).
[[nodiscard]] SyntheticWorld generate_synthetic_world(const SyntheticOptions& options);

/// Writes every corpus plus an `exp.toml` experiment config into `dir`.
void write_world(const SyntheticWorld& world, const std::filesystem::path& dir);

}  // namespace clir
