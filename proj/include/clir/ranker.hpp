#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clir/ranklist.hpp"

namespace clir {

/// Linear scoring function over a feature schema.
struct RankingModel {
    std::vector<double> weights;
    std::string schema_hash;
    std::string trainer;
    /// Per-list min-max scaling applied before scoring, at train and predict time.
    bool normalize = true;
    nlohmann::json meta = nlohmann::json::object();
};

[[nodiscard]] nlohmann::json to_json(const RankingModel& model);
[[nodiscard]] RankingModel model_from_json(const nlohmann::json& j);
void write_model(const RankingModel& model, const std::filesystem::path& path);
[[nodiscard]] RankingModel read_model(const std::filesystem::path& path);

/// Expected reciprocal rank of the single positive when tied scores are
/// ordered uniformly at random. `beaten_by` candidates score strictly
/// higher, `tied_with` score equal (the positive itself excluded).
[[nodiscard]] double expected_reciprocal_rank(std::size_t beaten_by, std::size_t tied_with);

/// Average precision of one list under `scores`. Lists with a single positive
/// use the tie-aware expectation; with several positives ties are broken by
/// candidate order. Returns nullopt for lists without positives.
[[nodiscard]] std::optional<double> list_average_precision(std::span<const double> scores,
                                                           std::span<const int> labels);

/// MAP of `lists` under `weights` (optionally list-normalized). Lists without
/// positives are skipped.
[[nodiscard]] double mean_average_precision(const std::vector<RankList>& lists, std::span<const double> weights,
                                            bool normalize);

struct CoordinateAscentOptions {
    std::size_t restarts = 8;
    double epsilon = 1e-5;
    double min_weight = -10.0;
    double max_weight = 10.0;
    std::size_t max_cycles = 50;
    std::uint64_t seed = 1;
    bool normalize = true;
    /// Start point of the first restart; uniform weights when empty.
    std::vector<double> initial;
    /// Coordinates allowed to move; all when empty. Inactive ones stay at 0.
    std::vector<bool> active;
};

struct CoordinateAscentTrace {
    /// Training MAP after every accepted step of the returned restart,
    /// starting with the initial value.
    std::vector<double> accepted;
    std::size_t best_restart = 0;
};

/// Maximizes training MAP by cyclic exact line search over one weight at a
/// time. Throws DataError without any list holding both labels.
[[nodiscard]] RankingModel train_coordinate_ascent(const std::vector<RankList>& lists,
                                                   const CoordinateAscentOptions& options,
                                                   std::string schema_hash = {},
                                                   CoordinateAscentTrace* trace = nullptr);

struct PairwiseHingeOptions {
    double learning_rate = 0.1;
    std::size_t epochs = 50;
    double reg = 1e-4;
    std::uint64_t seed = 1;
    bool normalize = true;
};

/// Subgradient descent on the hinge loss of (positive, negative) pairs inside
/// each list, pairs weighted 1 / (pairs in list).
[[nodiscard]] RankingModel train_pairwise_hinge(const std::vector<RankList>& lists,
                                                const PairwiseHingeOptions& options,
                                                std::string schema_hash = {});

/// Pairs (positive, negative) within lists that the weights order wrongly or tie.
[[nodiscard]] std::size_t pair_violations(const std::vector<RankList>& lists, std::span<const double> weights,
                                          bool normalize);

struct ScoringInput {
    std::string word;
    std::vector<double> features;
};

struct RankedCandidate {
    std::string word;
    double score = 0.0;
    double weight = 0.0;

    friend bool operator==(const RankedCandidate&, const RankedCandidate&) = default;
};

using RankedCandidates = std::vector<RankedCandidate>;

/// Scores, sorts (descending, ties by word), drops negative scores and
/// sum-normalizes the rest. When every score is negative the top candidate
/// is kept with weight 1; when the kept scores sum to 0 they share weight
/// uniformly.
[[nodiscard]] RankedCandidates score_and_rank(const RankingModel& model, std::vector<ScoringInput> candidates,
                                              std::string_view schema_hash);

/// First n candidates, weights renormalized to sum to 1.
[[nodiscard]] RankedCandidates top_n(RankedCandidates ranked, std::size_t n);

/// Weights proportional to scores over the whole list (used for lexicon rows).
void normalize_weights(RankedCandidates& ranked);

}  // namespace clir
