#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clir/corpus.hpp"

namespace clir {

enum class Direction { SourceToTarget, TargetToSource };

[[nodiscard]] std::string_view to_string(Direction d) noexcept;
[[nodiscard]] Direction parse_direction(std::string_view s);

/// Reserved source token for the empty word. Never produced by tokenize(),
/// which case-folds everything.
inline constexpr std::string_view kNullWord = "NULL";

struct Translation {
    std::string word;
    double prob = 0.0;

    friend bool operator==(const Translation&, const Translation&) = default;
};

/// Directed probabilistic lexicon p(target | source) of one resource. Each
/// row is sorted by descending probability, ties by ascending word.
class Lexicon {
  public:
    using Row = std::vector<Translation>;
    using Table = std::map<std::string, Row, std::less<>>;

    Lexicon() = default;
    Lexicon(std::string resource_id, Direction direction)
        : resource_id_(std::move(resource_id)), direction_(direction)
    {}

    [[nodiscard]] const std::string& resource_id() const noexcept { return resource_id_; }
    [[nodiscard]] Direction direction() const noexcept { return direction_; }
    [[nodiscard]] const Table& table() const noexcept { return table_; }
    [[nodiscard]] std::size_t size() const noexcept { return table_.size(); }

    /// Row for `source`, or nullptr.
    [[nodiscard]] const Row* find(std::string_view source) const;
    /// p(target | source), 0 when absent.
    [[nodiscard]] double prob(std::string_view source, std::string_view target) const;
    /// 1-based position of `target` in the row of `source`, 0 when absent.
    [[nodiscard]] std::size_t rank(std::string_view source, std::string_view target) const;

    /// Replaces a row; sorts it and drops non-positive entries.
    void set_row(std::string source, Row row);

    friend bool operator==(const Lexicon&, const Lexicon&) = default;

  private:
    std::string resource_id_;
    Direction direction_ = Direction::SourceToTarget;
    Table table_;
};

/// Sorts by descending probability, ties by ascending word.
void sort_row(Lexicon::Row& row);

struct Model1Options {
    std::size_t iterations = 5;
    bool use_null = true;
};

/// Log-likelihood of the corpus before the first and after every EM
/// iteration (iterations + 1 values).
struct Model1Trace {
    std::vector<double> log_likelihood;
};

/// IBM Model 1 EM, p(target | source). Uniform start over co-occurring pairs.
/// With use_null the table carries a kNullWord row.
[[nodiscard]] Lexicon train_model1(const SentencePairCorpus& corpus, const Model1Options& options,
                                   Model1Trace* trace = nullptr);

/// Same corpus with source and target swapped; used to train reverse lexicons.
[[nodiscard]] SentencePairCorpus swap_sides(const SentencePairCorpus& corpus);

inline constexpr double kAlignmentFloor = 1e-12;

struct WordAlignment {
    std::size_t pair_index = 0;
    /// One entry per target token: source position, or nullopt for NULL.
    std::vector<std::optional<std::size_t>> links;
};

/// Links every target token to the source position maximizing
/// p(target | source); NULL counts as the leftmost position when enabled.
[[nodiscard]] WordAlignment viterbi_align(const SentencePair& pair, std::size_t pair_index, const Lexicon& lexicon,
                                          bool use_null, double floor = kAlignmentFloor);

/// Alignment-score-weighted co-occurrence lexicon from a comparable corpus,
/// normalized per source word and cut to top_k. TargetToSource swaps roles.
[[nodiscard]] Lexicon extract_comparable_lexicon(const ComparableCorpus& corpus, std::size_t top_k,
                                                 Direction direction = Direction::SourceToTarget,
                                                 std::string resource_id = "comparable");

/// Uniform probabilities over each entry's targets. TargetToSource inverts the
/// dictionary first.
[[nodiscard]] Lexicon dictionary_lexicon(const BilingualDictionary& dict,
                                         Direction direction = Direction::SourceToTarget,
                                         std::string resource_id = "dictionary");

/// Keeps at most top_k entries per row with probability >= min_prob. No
/// renormalization.
[[nodiscard]] Lexicon prune_lexicon(const Lexicon& lex, std::size_t top_k, double min_prob);

[[nodiscard]] Lexicon with_resource_id(Lexicon lex, std::string resource_id);

void write_lexicon(const Lexicon& lex, const std::filesystem::path& path);
[[nodiscard]] Lexicon read_lexicon(const std::filesystem::path& path);

}  // namespace clir
