#include "clir/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "clir/error.hpp"

namespace clir {

namespace {

constexpr std::string_view kIndexHeader = "#clir-index v1";

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

std::vector<std::string> fields(const std::string& line)
{
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string f;
    while (in >> f) {
        out.push_back(std::move(f));
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& s, double& value)
{
    // from_chars for double is missing in older libstdc++ builds.
    try {
        std::size_t used = 0;
        value = std::stod(s, &used);
        return used == s.size() && std::isfinite(value);
    } catch (const std::exception&) {
        return false;
    }
}

bool has_space(std::string_view s) { return s.find_first_of(" \t\r\n") != std::string_view::npos; }

}  // namespace

std::vector<Document> load_documents(const std::filesystem::path& path, const Stoplist& stoplist)
{
    std::vector<Document> docs;
    for (auto& [id, text] : load_document_map(path, stoplist)) {
        docs.push_back({id, std::move(text)});
    }
    return docs;
}

InvertedIndex InvertedIndex::build(std::span<const Document> docs)
{
    if (docs.empty()) {
        throw DataError("cannot index an empty collection");
    }
    std::vector<std::size_t> order(docs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return docs[a].id < docs[b].id; });

    InvertedIndex index;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& doc = docs[order[i]];
        if (i > 0 && doc.id == index.doc_ids_.back()) {
            throw DataError("duplicate document id '" + doc.id + "'");
        }
        if (doc.id.empty() || has_space(doc.id)) {
            throw DataError("document id '" + doc.id + "' is empty or contains whitespace");
        }
        const auto number = static_cast<std::uint32_t>(i);
        index.doc_ids_.push_back(doc.id);
        index.lengths_.push_back(static_cast<std::uint32_t>(doc.text.size()));
        std::map<std::string_view, std::uint32_t> counts;
        for (const auto& t : doc.text) {
            ++counts[t];
        }
        for (const auto& [term, tf] : counts) {
            auto it = index.postings_.find(term);
            if (it == index.postings_.end()) {
                it = index.postings_.emplace(std::string(term), Postings{}).first;
            }
            it->second.push_back({number, tf});
        }
    }
    index.finish();
    return index;
}

void InvertedIndex::finish()
{
    const double total = std::accumulate(lengths_.begin(), lengths_.end(), 0.0);
    avg_doc_len_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());
}

const InvertedIndex::Postings* InvertedIndex::postings(std::string_view term) const
{
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

std::size_t InvertedIndex::df(std::string_view term) const
{
    const auto* p = postings(term);
    return p == nullptr ? 0 : p->size();
}

void InvertedIndex::write(const std::filesystem::path& path) const
{
    auto out = open_output(path);
    out << kIndexHeader << '\n';
    for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
        out << "D " << doc_ids_[d] << ' ' << lengths_[d] << '\n';
    }
    for (const auto& [term, list] : postings_) {
        out << "T " << term;
        for (const auto& p : list) {
            out << ' ' << p.doc << ':' << p.tf;
        }
        out << '\n';
    }
}

InvertedIndex InvertedIndex::read(const std::filesystem::path& path)
{
    auto in = open_input(path);
    const std::string file = path.string();
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line) || (strip_cr(line), line != kIndexHeader)) {
        throw ParseError(file, 1, "not a clir index (missing header)");
    }
    ++lineno;
    InvertedIndex index;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (blank(line)) {
            continue;
        }
        auto f = fields(line);
        if (f[0] == "D") {
            std::uint32_t len = 0;
            if (f.size() != 3 || !parse_number(f[2], len)) {
                throw ParseError(file, lineno, "expected 'D <id> <length>'");
            }
            if (!index.postings_.empty()) {
                throw ParseError(file, lineno, "document record after term records");
            }
            if (!index.doc_ids_.empty() && !(index.doc_ids_.back() < f[1])) {
                throw ParseError(file, lineno, "document ids not strictly ascending");
            }
            index.doc_ids_.push_back(f[1]);
            index.lengths_.push_back(len);
        } else if (f[0] == "T" && f.size() >= 3) {
            Postings list;
            for (std::size_t i = 2; i < f.size(); ++i) {
                const auto colon = f[i].find(':');
                Posting p;
                if (colon == std::string::npos || !parse_number(std::string_view(f[i]).substr(0, colon), p.doc)
                    || !parse_number(std::string_view(f[i]).substr(colon + 1), p.tf) || p.tf == 0
                    || p.doc >= index.doc_ids_.size() || (!list.empty() && list.back().doc >= p.doc)) {
                    throw ParseError(file, lineno, "bad posting '" + f[i] + "'");
                }
                list.push_back(p);
            }
            if (!index.postings_.emplace(f[1], std::move(list)).second) {
                throw ParseError(file, lineno, "duplicate term '" + f[1] + "'");
            }
        } else {
            throw ParseError(file, lineno, "unrecognized index record");
        }
    }
    if (index.doc_ids_.empty()) {
        throw ParseError(file, lineno, "index has no documents");
    }
    index.finish();
    return index;
}

void WeightedQuery::add(std::string_view term, double weight)
{
    auto it = std::find_if(terms.begin(), terms.end(), [&](const QueryTerm& t) { return t.term == term; });
    if (it == terms.end()) {
        terms.push_back({std::string(term), weight});
    } else {
        it->weight += weight;
    }
}

WeightedQuery construct_query(const TokenizedText& words, const std::vector<RankedCandidates>& per_word, std::size_t n,
                              bool weighted)
{
    if (n < 1) {
        throw DataError("construct_query: n must be at least 1");
    }
    if (per_word.size() != words.size()) {
        throw DataError("construct_query: one candidate list per query word required");
    }
    WeightedQuery query;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (per_word[i].empty()) {
            query.add(words[i], 1.0);
            ++query.oov;
            continue;
        }
        for (const auto& c : top_n(per_word[i], n)) {
            const double w = weighted ? c.weight : 1.0;
            if (w > 0.0) {
                query.add(c.word, w);
            }
        }
    }
    return query;
}

double bm25_idf(std::size_t doc_count, std::size_t df) noexcept
{
    const auto n = static_cast<double>(doc_count);
    const auto d = static_cast<double>(df);
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

std::vector<SearchHit> bm25_search(const InvertedIndex& index, const WeightedQuery& query, std::size_t k,
                                   const Bm25Params& params)
{
    if (k < 1) {
        throw DataError("bm25_search: k must be at least 1");
    }
    std::vector<double> acc(index.doc_count(), 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<bool> seen(index.doc_count(), false);
    const double avg = index.avg_doc_len() > 0.0 ? index.avg_doc_len() : 1.0;
    for (const auto& term : query.terms) {
        const auto* list = index.postings(term.term);
        if (list == nullptr) {
            continue;
        }
        const double w = params.weighted ? term.weight : 1.0;
        const double idf = bm25_idf(index.doc_count(), list->size());
        for (const auto& p : *list) {
            const double tf = p.tf;
            const double norm = params.k1 * (1.0 - params.b + params.b * index.doc_length(p.doc) / avg);
            acc[p.doc] += w * idf * tf * (params.k1 + 1.0) / (tf + norm);
            if (!seen[p.doc]) {
                seen[p.doc] = true;
                touched.push_back(p.doc);
            }
        }
    }
    // Doc numbers follow id order, so comparing numbers breaks ties by id.
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (acc[a] != acc[b]) {
            return acc[a] > acc[b];
        }
        return a < b;
    };
    const std::size_t keep = std::min(k, touched.size());
    std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(keep), touched.end(), better);
    std::vector<SearchHit> hits;
    hits.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        hits.push_back({index.doc_id(touched[i]), acc[touched[i]]});
    }
    return hits;
}

std::vector<Topic> load_topics(const std::filesystem::path& path)
{
    auto in = open_input(path);
    std::vector<Topic> topics;
    std::set<std::string, std::less<>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (blank(line)) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw ParseError(path.string(), lineno, "expected 'qid<TAB>title'");
        }
        Topic t{line.substr(0, tab), line.substr(tab + 1)};
        if (has_space(t.qid)) {
            throw ParseError(path.string(), lineno, "qid contains whitespace");
        }
        if (!seen.insert(t.qid).second) {
            throw ParseError(path.string(), lineno, "duplicate qid '" + t.qid + "'");
        }
        topics.push_back(std::move(t));
    }
    return topics;
}

Qrels load_qrels(const std::filesystem::path& path)
{
    auto in = open_input(path);
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (blank(line)) {
            continue;
        }
        auto f = fields(line);
        int rel = 0;
        if (f.size() != 4 || !parse_number(f[3], rel)) {
            throw ParseError(path.string(), lineno, "expected 'qid 0 docid relevance'");
        }
        auto& judged = qrels[f[0]];
        if (!judged.emplace(f[2], rel).second) {
            throw ParseError(path.string(), lineno, fmt::format("duplicate judgment for {} {}", f[0], f[2]));
        }
    }
    return qrels;
}

void write_qrels(const Qrels& qrels, const std::filesystem::path& path)
{
    auto out = open_output(path);
    for (const auto& [qid, judged] : qrels) {
        for (const auto& [doc, rel] : judged) {
            out << qid << " 0 " << doc << ' ' << rel << '\n';
        }
    }
}

void write_run(const Run& run, const std::string& tag, const std::filesystem::path& path)
{
    if (tag.empty() || has_space(tag)) {
        throw DataError("run tag must be a non-empty word");
    }
    auto out = open_output(path);
    for (const auto& [qid, hits] : run) {
        for (std::size_t r = 0; r < hits.size(); ++r) {
            out << fmt::format("{} Q0 {} {} {:.10f} {}\n", qid, hits[r].doc_id, r + 1, hits[r].score, tag);
        }
    }
}

Run load_run(const std::filesystem::path& path)
{
    auto in = open_input(path);
    std::map<std::string, std::vector<std::pair<long, SearchHit>>, std::less<>> ranked;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (blank(line)) {
            continue;
        }
        auto f = fields(line);
        long rank = 0;
        double score = 0.0;
        if (f.size() != 6 || !parse_number(f[3], rank) || !parse_double(f[4], score)) {
            throw ParseError(path.string(), lineno, "expected 'qid Q0 docid rank score tag'");
        }
        ranked[f[0]].push_back({rank, {f[2], score}});
    }
    Run run;
    for (auto& [qid, entries] : ranked) {
        std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        auto& hits = run[qid];
        for (auto& e : entries) {
            hits.push_back(std::move(e.second));
        }
    }
    return run;
}

}  // namespace clir
