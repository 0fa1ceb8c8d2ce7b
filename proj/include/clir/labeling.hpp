#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "clir/corpus.hpp"
#include "clir/lexicon.hpp"

namespace clir {

enum class Validation { Any, All };

[[nodiscard]] Validation parse_validation(std::string_view s);

struct LabeledCandidate {
    std::string word;
    int label = 0;

    friend bool operator==(const LabeledCandidate&, const LabeledCandidate&) = default;
};

/// One source word occurrence in its sentence pair, with pooled and labeled
/// translation candidates.
struct TrainingInstance {
    int query_id = 0;
    std::string source_word;
    TokenizedText source_sentence;
    TokenizedText target_sentence;
    std::vector<LabeledCandidate> candidates;

    friend bool operator==(const TrainingInstance&, const TrainingInstance&) = default;
};

struct LabelingOptions {
    std::size_t pool_k = 10;
    Validation validation = Validation::Any;
    bool use_null = true;
    std::size_t min_word_chars = 2;
};

struct LabelingReport {
    std::size_t occurrences = 0;
    std::size_t skipped_short = 0;
    std::size_t skipped_unknown = 0;
    std::size_t dropped_no_positive = 0;
    std::size_t emitted = 0;
};

/// Union of the top pool_k translations of `word` over all lexicons, in
/// lexicon order then row order, without duplicates.
[[nodiscard]] std::vector<std::string> pool_candidates(std::string_view word,
                                                       const std::vector<const Lexicon*>& lexicons,
                                                       std::size_t pool_k);

/// Aligns every pair with `aligner`, pools candidates from `resources` and
/// labels the aligned word 1 when the resources confirm the relation.
[[nodiscard]] std::vector<TrainingInstance> build_training_data(const SentencePairCorpus& labeling_corpus,
                                                                const std::vector<const Lexicon*>& resources,
                                                                const Lexicon& aligner,
                                                                const LabelingOptions& options,
                                                                LabelingReport* report = nullptr);

/// JSON-lines file of instances, one object per line.
void write_instances(const std::vector<TrainingInstance>& instances, const std::filesystem::path& path);
[[nodiscard]] std::vector<TrainingInstance> read_instances(const std::filesystem::path& path);

}  // namespace clir
