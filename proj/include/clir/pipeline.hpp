#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clir/evaluation.hpp"
#include "clir/features.hpp"
#include "clir/lexicon.hpp"
#include "clir/ranker.hpp"
#include "clir/retrieval.hpp"

namespace clir {

/// Mixing weights of a linear lexicon combination, keyed by resource id.
struct LinearCombinationConfig {
    std::map<std::string, double, std::less<>> weights;

    friend bool operator==(const LinearCombinationConfig&, const LinearCombinationConfig&) = default;
};

/// P(f|e) = sum_i lambda_i P_i(f|e). Throws DataError unless every lexicon
/// has a non-negative weight and the weights sum to 1 within 1e-9.
[[nodiscard]] Lexicon linear_combine(const std::vector<const Lexicon*>& lexicons,
                                     const LinearCombinationConfig& config, std::string resource_id = "linear");

/// Every weight vector on the simplex with the given step, in lexicographic
/// order of the first resource's weight descending.
[[nodiscard]] std::vector<LinearCombinationConfig> lambda_grid(const std::vector<std::string>& resource_ids,
                                                               double step = 0.1);

/// Candidates of one word from a lexicon row, weights proportional to probability.
[[nodiscard]] RankedCandidates lexicon_candidates(const Lexicon& lexicon, std::string_view word);

/// Shared retrieval inputs of an experiment.
struct RetrievalSetup {
    const InvertedIndex* index = nullptr;
    std::vector<Topic> topics;
    Qrels qrels;
    Bm25Params bm25;
    std::size_t depth = 1000;
    Stoplist stoplist;
};

struct MethodRun {
    std::string name;
    Run run;
    EvalResult eval;
    /// Translated query per qid, for inspection.
    std::map<std::string, WeightedQuery, std::less<>> queries;
};

/// Retrieves with queries built from per-word candidate lists produced by `translate`.
template <typename Translate>
[[nodiscard]] MethodRun run_queries(const RetrievalSetup& setup, std::string name, std::size_t n, Translate&& translate);

/// Top-N translations of each query word from one lexicon.
[[nodiscard]] MethodRun run_single_resource(const RetrievalSetup& setup, const Lexicon& lexicon, std::size_t n,
                                            std::string name);

/// Per-word candidates of a query re-ranked by a trained model.
struct LtrTranslator {
    const ResourceSet* resources = nullptr;
    const RankingModel* model = nullptr;
    const Lexicon* context_lexicon = nullptr;
    std::size_t pool_k = 10;
    std::size_t context_per_word = 5;

    /// Throws DataError when the model does not match the resource schema.
    void check() const;
    [[nodiscard]] std::vector<RankedCandidates> translate(const TokenizedText& query) const;
    /// Candidates of the word at `position`, with `query` as source context.
    [[nodiscard]] RankedCandidates translate_word(const TokenizedText& query, std::size_t position,
                                                  const ContextSpec& context) const;
};

[[nodiscard]] MethodRun run_ltr(const RetrievalSetup& setup, const LtrTranslator& translator, std::size_t n = 5,
                                std::string name = "ltr");

struct SelectionStep {
    std::size_t feature = 0;
    std::string label;
    /// Metric that chose the feature (validation MAP, or training MAP without validation data).
    double metric = 0.0;
    double training_map = 0.0;
};

struct ForwardSelectionOptions {
    CoordinateAscentOptions trainer;
    /// 0 = until every feature is selected.
    std::size_t max_steps = 0;
};

/// Greedy forward selection: each step adds the feature whose coordinate
/// ascent model (warm-started from the previous step) scores best.
[[nodiscard]] std::vector<SelectionStep> forward_selection(const std::vector<RankList>& train,
                                                           const std::vector<std::string>& labels,
                                                           const ForwardSelectionOptions& options,
                                                           const std::vector<RankList>* validation = nullptr);

// ---------------------------------------------------------------------------

template <typename Translate>
MethodRun run_queries(const RetrievalSetup& setup, std::string name, std::size_t n, Translate&& translate)
{
    MethodRun out;
    out.name = std::move(name);
    std::size_t oov = 0;
    for (const auto& topic : setup.topics) {
        const auto words = tokenize(topic.title, setup.stoplist);
        auto query = construct_query(words, translate(words), n, setup.bm25.weighted);
        oov += query.oov;
        auto hits = bm25_search(*setup.index, query, setup.depth, setup.bm25);
        if (setup.qrels.contains(topic.qid)) {
            out.run[topic.qid] = std::move(hits);
        }
        out.queries[topic.qid] = std::move(query);
    }
    out.eval = evaluate(out.run, setup.qrels);
    out.eval.oov = oov;
    out.eval.meta = {{"method", out.name},
                     {"n", n},
                     {"weighted", setup.bm25.weighted},
                     {"k1", setup.bm25.k1},
                     {"b", setup.bm25.b}};
    return out;
}

}  // namespace clir
