#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clir/corpus.hpp"
#include "clir/ranker.hpp"

namespace clir {

struct Document {
    std::string id;
    TokenizedText text;
};

/// JSON-lines `{"id": ..., "text": ...}`, one document per line.
[[nodiscard]] std::vector<Document> load_documents(const std::filesystem::path& path, const Stoplist& stoplist = {});

/// Term -> postings over a document collection. Documents are numbered in
/// ascending order of their external id.
class InvertedIndex {
  public:
    struct Posting {
        std::uint32_t doc = 0;
        std::uint32_t tf = 0;

        friend bool operator==(const Posting&, const Posting&) = default;
    };
    using Postings = std::vector<Posting>;

    /// Throws DataError on an empty collection or a duplicate id.
    static InvertedIndex build(std::span<const Document> docs);

    [[nodiscard]] std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    [[nodiscard]] double avg_doc_len() const noexcept { return avg_doc_len_; }
    [[nodiscard]] const std::string& doc_id(std::uint32_t doc) const { return doc_ids_[doc]; }
    [[nodiscard]] std::uint32_t doc_length(std::uint32_t doc) const { return lengths_[doc]; }
    /// Postings of `term` sorted by doc, or nullptr.
    [[nodiscard]] const Postings* postings(std::string_view term) const;
    [[nodiscard]] std::size_t df(std::string_view term) const;
    [[nodiscard]] const std::map<std::string, Postings, std::less<>>& terms() const noexcept { return postings_; }

    void write(const std::filesystem::path& path) const;
    [[nodiscard]] static InvertedIndex read(const std::filesystem::path& path);

    friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

  private:
    void finish();

    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> lengths_;
    std::map<std::string, Postings, std::less<>> postings_;
    double avg_doc_len_ = 0.0;
};

[[nodiscard]] inline InvertedIndex build_index(std::span<const Document> docs) { return InvertedIndex::build(docs); }

struct QueryTerm {
    std::string term;
    double weight = 1.0;

    friend bool operator==(const QueryTerm&, const QueryTerm&) = default;
};

/// Target-language query. Terms keep first-occurrence order; a repeated term
/// accumulates weight.
struct WeightedQuery {
    std::vector<QueryTerm> terms;
    /// Source words that had no translation candidate.
    std::size_t oov = 0;

    void add(std::string_view term, double weight);
    friend bool operator==(const WeightedQuery&, const WeightedQuery&) = default;
};

/// Concatenates the top `n` candidates of each word (`per_word[i]` belongs to
/// `words[i]`). Unweighted mode gives every term weight 1. A word without
/// candidates is kept verbatim with weight 1 and counted as OOV.
[[nodiscard]] WeightedQuery construct_query(const TokenizedText& words, const std::vector<RankedCandidates>& per_word,
                                            std::size_t n, bool weighted);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
    /// When false every query term counts with weight 1.
    bool weighted = true;
};

struct SearchHit {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// ln((N - df + 0.5) / (df + 0.5) + 1)
[[nodiscard]] double bm25_idf(std::size_t doc_count, std::size_t df) noexcept;

/// Top `k` documents matching at least one term, by descending score, ties
/// by ascending doc id.
[[nodiscard]] std::vector<SearchHit> bm25_search(const InvertedIndex& index, const WeightedQuery& query, std::size_t k,
                                                 const Bm25Params& params = {});

struct Topic {
    std::string qid;
    std::string title;
};

/// TSV `qid<TAB>title`; duplicate qids are rejected.
[[nodiscard]] std::vector<Topic> load_topics(const std::filesystem::path& path);

/// qid -> doc id -> relevance grade.
using Qrels = std::map<std::string, std::map<std::string, int, std::less<>>, std::less<>>;
/// qid -> ranked hits.
using Run = std::map<std::string, std::vector<SearchHit>, std::less<>>;

/// TREC `qid 0 docid rel`.
[[nodiscard]] Qrels load_qrels(const std::filesystem::path& path);
void write_qrels(const Qrels& qrels, const std::filesystem::path& path);

/// TREC `qid Q0 docid rank score tag`, queries in qid order.
void write_run(const Run& run, const std::string& tag, const std::filesystem::path& path);
/// Reads a TREC run; hits of each query ordered by rank.
[[nodiscard]] Run load_run(const std::filesystem::path& path);

}  // namespace clir
