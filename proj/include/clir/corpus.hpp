#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace clir {

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

template <typename Value>
using StringMap = std::unordered_map<std::string, Value, StringHash, std::equal_to<>>;

using Stoplist = std::set<std::string, std::less<>>;

/// Normalized word tokens of one text (sentence or document).
struct TokenizedText {
    std::vector<std::string> tokens;

    [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
    [[nodiscard]] bool empty() const noexcept { return tokens.empty(); }
    [[nodiscard]] auto begin() const noexcept { return tokens.begin(); }
    [[nodiscard]] auto end() const noexcept { return tokens.end(); }
    [[nodiscard]] const std::string& operator[](std::size_t i) const { return tokens[i]; }

    /// Tokens joined by single spaces.
    [[nodiscard]] std::string joined() const;

    friend bool operator==(const TokenizedText&, const TokenizedText&) = default;
};

/// NFKC + case folding, then splits on whitespace, punctuation and control
/// characters. Deterministic and idempotent.
[[nodiscard]] TokenizedText tokenize(std::string_view text);
[[nodiscard]] TokenizedText tokenize(std::string_view text, const Stoplist& stoplist);

struct SentencePair {
    TokenizedText source;
    TokenizedText target;
};

struct SentencePairCorpus {
    std::string name;
    std::vector<SentencePair> pairs;
    /// Input lines dropped because one side tokenized to nothing.
    std::size_t skipped_lines = 0;
};

struct DocumentAlignment {
    std::string src_id;
    std::string tgt_id;
    double score = 0.0;
};

struct ComparableCorpus {
    std::string name;
    std::map<std::string, TokenizedText, std::less<>> src_docs;
    std::map<std::string, TokenizedText, std::less<>> tgt_docs;
    std::vector<DocumentAlignment> alignments;
};

struct BilingualDictionary {
    std::string name;
    /// Source word -> distinct target words, in file order.
    std::map<std::string, std::vector<std::string>, std::less<>> entries;
    std::size_t skipped_entries = 0;
};

using DocumentMap = std::map<std::string, TokenizedText, std::less<>>;

/// JSON-lines `{"id": ..., "text": ...}` documents keyed by id. Duplicate ids
/// and malformed lines raise ParseError.
[[nodiscard]] DocumentMap load_document_map(const std::filesystem::path& path, const Stoplist& stoplist = {});

/// Parallel corpus: one `source<TAB>target` pair per line.
[[nodiscard]] SentencePairCorpus load_parallel(const std::filesystem::path& path,
                                               const Stoplist& stoplist = {});

/// Comparable corpus from two JSON-lines document files and a JSON-lines
/// alignment file. Every alignment must reference existing documents.
[[nodiscard]] ComparableCorpus load_comparable(const std::filesystem::path& src_path,
                                               const std::filesystem::path& tgt_path,
                                               const std::filesystem::path& align_path,
                                               const Stoplist& stoplist = {});

/// Dictionary: `source<TAB>tgt1|tgt2|...`. Entries whose source or target
/// does not normalize to exactly one token are skipped and counted.
[[nodiscard]] BilingualDictionary load_dictionary(const std::filesystem::path& path);

/// One word per line; blank lines and lines starting with '#' ignored.
[[nodiscard]] Stoplist load_stoplist(const std::filesystem::path& path);

/// Dense integer ids for words, assigned in first-seen order.
class Vocabulary {
  public:
    static constexpr std::uint32_t npos = UINT32_MAX;

    std::uint32_t intern(std::string_view word);
    [[nodiscard]] std::uint32_t find(std::string_view word) const;
    [[nodiscard]] const std::string& word(std::uint32_t id) const { return words_[id]; }
    [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }
    [[nodiscard]] const std::vector<std::string>& words() const noexcept { return words_; }

  private:
    StringMap<std::uint32_t> ids_;
    std::vector<std::string> words_;
};

[[nodiscard]] inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) noexcept
{
    return (static_cast<std::uint64_t>(a) << 32U) | b;
}

/// Document-level frequency statistics of a monolingual document set.
class CorpusStats {
  public:
    /// Throws DataError when `docs` is empty.
    static CorpusStats build(std::span<const TokenizedText> docs);

    [[nodiscard]] std::int64_t doc_count() const noexcept { return doc_count_; }
    [[nodiscard]] double avg_doc_len() const noexcept { return avg_doc_len_; }
    [[nodiscard]] std::int64_t total_tokens() const noexcept { return total_tokens_; }

    [[nodiscard]] std::int64_t df(std::string_view word) const;
    [[nodiscard]] std::int64_t tf(std::string_view word) const;
    /// Documents containing both words; cooccur(w, w) == df(w).
    [[nodiscard]] std::int64_t cooccur(std::string_view a, std::string_view b) const;

    [[nodiscard]] const Vocabulary& vocabulary() const noexcept { return vocab_; }

  private:
    Vocabulary vocab_;
    std::vector<std::int64_t> df_;
    std::vector<std::int64_t> tf_;
    std::unordered_map<std::uint64_t, std::int64_t> cooccur_;
    std::int64_t doc_count_ = 0;
    std::int64_t total_tokens_ = 0;
    double avg_doc_len_ = 0.0;
};

[[nodiscard]] CorpusStats compute_stats(std::span<const TokenizedText> docs);

/// Counts over aligned document pairs, used for cross-lingual PMI. A
/// sentence pair of a parallel corpus counts as one alignment.
class AlignmentStats {
  public:
    static AlignmentStats build(const ComparableCorpus& corpus);
    static AlignmentStats build(const SentencePairCorpus& corpus);

    [[nodiscard]] std::int64_t alignment_count() const noexcept { return alignments_; }
    /// Alignments whose source document contains `word`.
    [[nodiscard]] std::int64_t source_count(std::string_view word) const;
    /// Alignments whose target document contains `word`.
    [[nodiscard]] std::int64_t target_count(std::string_view word) const;
    /// Alignments with `source_word` in the source and `target_word` in the target document.
    [[nodiscard]] std::int64_t mutual_count(std::string_view source_word, std::string_view target_word) const;

  private:
    void add(const TokenizedText& src, const TokenizedText& tgt);

    Vocabulary src_vocab_;
    Vocabulary tgt_vocab_;
    std::vector<std::int64_t> src_count_;
    std::vector<std::int64_t> tgt_count_;
    std::unordered_map<std::uint64_t, std::int64_t> mutual_;
    std::int64_t alignments_ = 0;
};

/// Number of Unicode code points in a UTF-8 string.
[[nodiscard]] std::size_t codepoint_count(std::string_view utf8) noexcept;

/// True when the token contains at least one letter or digit.
[[nodiscard]] bool has_alphanumeric(std::string_view utf8);

/// Sorted distinct ids of a text's tokens.
[[nodiscard]] std::vector<std::uint32_t> distinct_ids(const TokenizedText& text, Vocabulary& vocab);

}  // namespace clir
