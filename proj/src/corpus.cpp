#include "clir/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "clir/error.hpp"

namespace clir {

namespace {

const icu::Normalizer2& nfkc_casefold()
{
    static const icu::Normalizer2* instance = [] {
        UErrorCode status = U_ZERO_ERROR;
        const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
        if (U_FAILURE(status)) {
            throw Error(std::string("ICU NFKC_Casefold unavailable: ") + u_errorName(status));
        }
        return n;
    }();
    return *instance;
}

bool is_delimiter(UChar32 c)
{
    if (u_isUWhiteSpace(c) || u_ispunct(c) || u_iscntrl(c)) {
        return true;
    }
    auto type = u_charType(c);
    return type == U_FORMAT_CHAR || type == U_UNASSIGNED || type == U_SURROGATE;
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return in;
}

void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

}  // namespace

DocumentMap load_document_map(const std::filesystem::path& path, const Stoplist& stoplist)
{
    auto in = open_input(path);
    DocumentMap docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
        if (!record.is_object() || !record.contains("id") || !record.contains("text")
            || !record["id"].is_string() || !record["text"].is_string()) {
            throw ParseError(path.string(), lineno, R"(expected {"id": str, "text": str})");
        }
        auto id = record["id"].get<std::string>();
        if (docs.contains(id)) {
            throw ParseError(path.string(), lineno, "duplicate document id '" + id + "'");
        }
        docs.emplace(std::move(id), tokenize(record["text"].get<std::string>(), stoplist));
    }
    return docs;
}

namespace {

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::string TokenizedText::joined() const
{
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) {
            out += ' ';
        }
        out += t;
    }
    return out;
}

TokenizedText tokenize(std::string_view text)
{
    TokenizedText out;
    if (text.empty()) {
        return out;
    }
    UErrorCode status = U_ZERO_ERROR;
    auto input = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString normalized = nfkc_casefold().normalize(input, status);
    if (U_FAILURE(status)) {
        throw Error(std::string("normalization failed: ") + u_errorName(status));
    }

    icu::UnicodeString current;
    auto flush = [&] {
        if (!current.isEmpty()) {
            std::string utf8;
            current.toUTF8String(utf8);
            out.tokens.push_back(std::move(utf8));
            current.remove();
        }
    };
    for (int32_t i = 0; i < normalized.length();) {
        UChar32 c = normalized.char32At(i);
        i += U16_LENGTH(c);
        if (is_delimiter(c)) {
            flush();
        } else {
            current.append(c);
        }
    }
    flush();
    return out;
}

TokenizedText tokenize(std::string_view text, const Stoplist& stoplist)
{
    auto out = tokenize(text);
    if (!stoplist.empty()) {
        std::erase_if(out.tokens, [&](const std::string& t) { return stoplist.contains(t); });
    }
    return out;
}

SentencePairCorpus load_parallel(const std::filesystem::path& path, const Stoplist& stoplist)
{
    auto in = open_input(path);
    SentencePairCorpus corpus;
    corpus.name = path.stem().string();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path.string(), lineno, "missing tab between source and target");
        }
        SentencePair pair{tokenize(std::string_view(line).substr(0, tab), stoplist),
                          tokenize(std::string_view(line).substr(tab + 1), stoplist)};
        if (pair.source.empty() || pair.target.empty()) {
            ++corpus.skipped_lines;
            continue;
        }
        corpus.pairs.push_back(std::move(pair));
    }
    if (corpus.skipped_lines > 0) {
        std::cerr << "warning: " << path.string() << ": skipped " << corpus.skipped_lines
                  << " line(s) with an empty side\n";
    }
    return corpus;
}

ComparableCorpus load_comparable(const std::filesystem::path& src_path,
                                 const std::filesystem::path& tgt_path,
                                 const std::filesystem::path& align_path,
                                 const Stoplist& stoplist)
{
    ComparableCorpus corpus;
    corpus.name = align_path.stem().string();
    corpus.src_docs = load_document_map(src_path, stoplist);
    corpus.tgt_docs = load_document_map(tgt_path, stoplist);

    auto in = open_input(align_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(align_path.string(), lineno, e.what());
        }
        if (!record.is_object() || !record.contains("src") || !record.contains("tgt")
            || !record.contains("score") || !record["src"].is_string() || !record["tgt"].is_string()
            || !record["score"].is_number()) {
            throw ParseError(align_path.string(), lineno, R"(expected {"src": str, "tgt": str, "score": float})");
        }
        DocumentAlignment a{record["src"].get<std::string>(), record["tgt"].get<std::string>(),
                            record["score"].get<double>()};
        if (!corpus.src_docs.contains(a.src_id)) {
            throw DataError(align_path.string() + ":" + std::to_string(lineno) + ": unknown source document id '"
                            + a.src_id + "'");
        }
        if (!corpus.tgt_docs.contains(a.tgt_id)) {
            throw DataError(align_path.string() + ":" + std::to_string(lineno) + ": unknown target document id '"
                            + a.tgt_id + "'");
        }
        if (!(a.score > 0.0 && a.score <= 1.0)) {
            throw ParseError(align_path.string(), lineno, "alignment score must be in (0, 1]");
        }
        corpus.alignments.push_back(std::move(a));
    }
    return corpus;
}

BilingualDictionary load_dictionary(const std::filesystem::path& path)
{
    auto in = open_input(path);
    BilingualDictionary dict;
    dict.name = path.stem().string();
    std::string line;
    std::size_t lineno = 0;
    auto single_token = [](std::string_view s) -> std::string {
        auto t = tokenize(s);
        return t.size() == 1 ? t.tokens.front() : std::string{};
    };
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path.string(), lineno, "missing tab after source word");
        }
        auto source = single_token(std::string_view(line).substr(0, tab));
        std::vector<std::string> targets;
        for (const auto& field : split(std::string_view(line).substr(tab + 1), '|')) {
            auto t = single_token(field);
            if (!t.empty() && std::find(targets.begin(), targets.end(), t) == targets.end()) {
                targets.push_back(std::move(t));
            }
        }
        if (source.empty() || targets.empty()) {
            ++dict.skipped_entries;
            continue;
        }
        auto& slot = dict.entries[source];
        for (auto& t : targets) {
            if (std::find(slot.begin(), slot.end(), t) == slot.end()) {
                slot.push_back(std::move(t));
            }
        }
    }
    return dict;
}

Stoplist load_stoplist(const std::filesystem::path& path)
{
    auto in = open_input(path);
    Stoplist words;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        for (auto& t : tokenize(line).tokens) {
            words.insert(std::move(t));
        }
    }
    return words;
}

std::uint32_t Vocabulary::intern(std::string_view word)
{
    if (auto it = ids_.find(word); it != ids_.end()) {
        return it->second;
    }
    auto id = static_cast<std::uint32_t>(words_.size());
    words_.emplace_back(word);
    ids_.emplace(words_.back(), id);
    return id;
}

std::uint32_t Vocabulary::find(std::string_view word) const
{
    auto it = ids_.find(word);
    return it == ids_.end() ? npos : it->second;
}

std::size_t codepoint_count(std::string_view utf8) noexcept
{
    return static_cast<std::size_t>(
        std::count_if(utf8.begin(), utf8.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0U) != 0x80U; }));
}

bool has_alphanumeric(std::string_view utf8)
{
    auto s = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    for (int32_t i = 0; i < s.length();) {
        UChar32 c = s.char32At(i);
        i += U16_LENGTH(c);
        if (u_isalnum(c)) {
            return true;
        }
    }
    return false;
}

std::vector<std::uint32_t> distinct_ids(const TokenizedText& text, Vocabulary& vocab)
{
    std::vector<std::uint32_t> ids;
    ids.reserve(text.size());
    for (const auto& t : text) {
        ids.push_back(vocab.intern(t));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

CorpusStats CorpusStats::build(std::span<const TokenizedText> docs)
{
    if (docs.empty()) {
        throw DataError("corpus statistics need at least one document");
    }
    CorpusStats stats;
    stats.doc_count_ = static_cast<std::int64_t>(docs.size());
    for (const auto& doc : docs) {
        for (const auto& t : doc) {
            auto id = stats.vocab_.intern(t);
            if (id >= stats.tf_.size()) {
                stats.tf_.resize(id + 1, 0);
                stats.df_.resize(id + 1, 0);
            }
            ++stats.tf_[id];
        }
        stats.total_tokens_ += static_cast<std::int64_t>(doc.size());
        auto ids = distinct_ids(doc, stats.vocab_);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            ++stats.df_[ids[i]];
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                ++stats.cooccur_[pair_key(ids[i], ids[j])];
            }
        }
    }
    stats.avg_doc_len_ = static_cast<double>(stats.total_tokens_) / static_cast<double>(stats.doc_count_);
    return stats;
}

std::int64_t CorpusStats::df(std::string_view word) const
{
    auto id = vocab_.find(word);
    return id == Vocabulary::npos ? 0 : df_[id];
}

std::int64_t CorpusStats::tf(std::string_view word) const
{
    auto id = vocab_.find(word);
    return id == Vocabulary::npos ? 0 : tf_[id];
}

std::int64_t CorpusStats::cooccur(std::string_view a, std::string_view b) const
{
    auto ia = vocab_.find(a);
    auto ib = vocab_.find(b);
    if (ia == Vocabulary::npos || ib == Vocabulary::npos) {
        return 0;
    }
    if (ia == ib) {
        return df_[ia];
    }
    auto it = cooccur_.find(pair_key(std::min(ia, ib), std::max(ia, ib)));
    return it == cooccur_.end() ? 0 : it->second;
}

CorpusStats compute_stats(std::span<const TokenizedText> docs)
{
    return CorpusStats::build(docs);
}

void AlignmentStats::add(const TokenizedText& src, const TokenizedText& tgt)
{
    ++alignments_;
    auto s_ids = distinct_ids(src, src_vocab_);
    auto t_ids = distinct_ids(tgt, tgt_vocab_);
    src_count_.resize(src_vocab_.size(), 0);
    tgt_count_.resize(tgt_vocab_.size(), 0);
    for (auto s : s_ids) {
        ++src_count_[s];
    }
    for (auto t : t_ids) {
        ++tgt_count_[t];
    }
    for (auto s : s_ids) {
        for (auto t : t_ids) {
            ++mutual_[pair_key(s, t)];
        }
    }
}

AlignmentStats AlignmentStats::build(const ComparableCorpus& corpus)
{
    AlignmentStats stats;
    for (const auto& a : corpus.alignments) {
        stats.add(corpus.src_docs.find(a.src_id)->second, corpus.tgt_docs.find(a.tgt_id)->second);
    }
    return stats;
}

AlignmentStats AlignmentStats::build(const SentencePairCorpus& corpus)
{
    AlignmentStats stats;
    for (const auto& p : corpus.pairs) {
        stats.add(p.source, p.target);
    }
    return stats;
}

std::int64_t AlignmentStats::source_count(std::string_view word) const
{
    auto id = src_vocab_.find(word);
    return id == Vocabulary::npos ? 0 : src_count_[id];
}

std::int64_t AlignmentStats::target_count(std::string_view word) const
{
    auto id = tgt_vocab_.find(word);
    return id == Vocabulary::npos ? 0 : tgt_count_[id];
}

std::int64_t AlignmentStats::mutual_count(std::string_view source_word, std::string_view target_word) const
{
    auto s = src_vocab_.find(source_word);
    auto t = tgt_vocab_.find(target_word);
    if (s == Vocabulary::npos || t == Vocabulary::npos) {
        return 0;
    }
    auto it = mutual_.find(pair_key(s, t));
    return it == mutual_.end() ? 0 : it->second;
}

}  // namespace clir
