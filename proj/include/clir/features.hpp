#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "clir/corpus.hpp"
#include "clir/labeling.hpp"
#include "clir/lexicon.hpp"
#include "clir/ranklist.hpp"

namespace clir {

enum class ResourceKind { Parallel, Comparable, Dictionary };

[[nodiscard]] std::string_view to_string(ResourceKind kind) noexcept;
[[nodiscard]] ResourceKind parse_resource_kind(std::string_view s);

/// One translation resource with everything features read from it. Corpus
/// statistics are present for parallel and comparable resources only.
struct Resource {
    std::string id;
    ResourceKind kind = ResourceKind::Parallel;
    Lexicon forward;
    Lexicon reverse;
    std::optional<CorpusStats> source_stats;
    std::optional<CorpusStats> target_stats;
    std::optional<AlignmentStats> cross;

    [[nodiscard]] bool has_corpus() const noexcept { return kind != ResourceKind::Dictionary; }
};

inline constexpr std::string_view kSchemaVersion = "clir-features-v1";
inline constexpr std::string_view kAllResources = "*";

class FeatureSchema {
  public:
    struct Slot {
        std::string name;
        std::string resource;

        friend bool operator==(const Slot&, const Slot&) = default;
    };

    FeatureSchema() = default;
    FeatureSchema(std::string version, std::vector<Slot> slots);

    [[nodiscard]] const std::string& version() const noexcept { return version_; }
    [[nodiscard]] const std::vector<Slot>& slots() const noexcept { return slots_; }
    [[nodiscard]] std::size_t size() const noexcept { return slots_.size(); }
    /// Slot index, or nullopt.
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name, std::string_view resource) const;
    /// "name@resource"
    [[nodiscard]] std::string label(std::size_t slot) const;

    [[nodiscard]] nlohmann::json manifest() const;
    [[nodiscard]] static FeatureSchema from_manifest(const nlohmann::json& manifest);
    /// SHA-256 of the serialized manifest.
    [[nodiscard]] const std::string& hash() const noexcept { return hash_; }

    friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) { return a.hash_ == b.hash_; }

  private:
    std::string version_;
    std::vector<Slot> slots_;
    std::string hash_;
};

struct FeatureVector {
    std::vector<double> values;
    std::string schema_version;
};

/// S (source sentence) and S_t (target sentence) around a word pair.
struct ContextSpec {
    TokenizedText source_sentence;
    TokenizedText target_sentence;
};

/// Immutable set of resources plus per-resource entropy tables.
class ResourceSet {
  public:
    ResourceSet() = default;
    explicit ResourceSet(std::vector<Resource> resources);

    [[nodiscard]] const std::vector<Resource>& resources() const noexcept { return resources_; }
    [[nodiscard]] const Resource& get(std::string_view id) const;
    [[nodiscard]] const FeatureSchema& schema() const noexcept { return schema_; }
    [[nodiscard]] std::vector<const Lexicon*> forward_lexicons() const;

    /// -sum_s p(word|s) log p(word|s) over sources related to `word`.
    [[nodiscard]] double target_entropy(std::size_t resource, std::string_view word) const;
    /// Same over the reverse lexicon for a source word.
    [[nodiscard]] double source_entropy(std::size_t resource, std::string_view word) const;

  private:
    std::vector<Resource> resources_;
    std::vector<StringMap<double>> target_entropy_;
    std::vector<StringMap<double>> source_entropy_;
    FeatureSchema schema_;
};

/// Slot layout for a resource configuration. Order is fixed by resource order.
[[nodiscard]] FeatureSchema make_schema(std::span<const Resource> resources);

/// log(p12 / (p1 p2)) over documents; 0 when any count is zero.
[[nodiscard]] double pmi(const CorpusStats& stats, std::string_view w1, std::string_view w2);

/// Sum of pmi(w, w_i) over distinct w_i in `sentence`, w_i != w.
[[nodiscard]] double context_score(const CorpusStats& stats, std::string_view word, const TokenizedText& sentence);

/// Cross-lingual PMI over alignments; 0 when any count is zero.
[[nodiscard]] double clpmi(const AlignmentStats& stats, std::string_view source_word, std::string_view target_word);

/// Sum of clpmi(word, w_i) over distinct w_i of a target sentence.
[[nodiscard]] double cross_context_score(const AlignmentStats& stats, std::string_view source_word,
                                         const TokenizedText& target_sentence);

/// Symmetric variant: sum of clpmi(w_i, word) over distinct w_i of a source sentence.
[[nodiscard]] double reverse_cross_context_score(const AlignmentStats& stats, std::string_view target_word,
                                                 const TokenizedText& source_sentence);

/// Feature vector of (source word, candidate) in `context`. Throws DataError
/// when `schema` was not built from `resources`.
[[nodiscard]] FeatureVector extract_vector(std::string_view source_word, std::string_view candidate,
                                           const ContextSpec& context, const ResourceSet& resources,
                                           const FeatureSchema& schema);

/// Per-slot min-max scaling to [0, 1] within one list; constant slots -> 0.
[[nodiscard]] std::vector<FeatureVector> normalize_list(std::vector<FeatureVector> vectors);

/// In-place variant on raw value rows.
void normalize_rows(std::vector<std::vector<double>*>& rows);

/// Attaches raw feature vectors to labeled instances, in input order.
[[nodiscard]] std::vector<RankList> extract_lists(const std::vector<TrainingInstance>& instances,
                                                  const ResourceSet& resources, unsigned threads = 1);

/// Query-time context: the query as S, and the top `per_word` translations
/// of every query word from `context_lexicon` as S_t.
[[nodiscard]] ContextSpec query_context(const TokenizedText& query, const Lexicon& context_lexicon,
                                        std::size_t per_word = 5);

}  // namespace clir
