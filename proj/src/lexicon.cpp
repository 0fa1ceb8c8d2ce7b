#include "clir/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/os.h>

#include "clir/error.hpp"

namespace clir {

std::string_view to_string(Direction d) noexcept
{
    return d == Direction::SourceToTarget ? "s2t" : "t2s";
}

Direction parse_direction(std::string_view s)
{
    if (s == "s2t") {
        return Direction::SourceToTarget;
    }
    if (s == "t2s") {
        return Direction::TargetToSource;
    }
    throw DataError("unknown lexicon direction '" + std::string(s) + "'");
}

void sort_row(Lexicon::Row& row)
{
    std::sort(row.begin(), row.end(), [](const Translation& a, const Translation& b) {
        if (a.prob != b.prob) {
            return a.prob > b.prob;
        }
        return a.word < b.word;
    });
}

const Lexicon::Row* Lexicon::find(std::string_view source) const
{
    auto it = table_.find(source);
    return it == table_.end() ? nullptr : &it->second;
}

double Lexicon::prob(std::string_view source, std::string_view target) const
{
    if (const auto* row = find(source)) {
        for (const auto& t : *row) {
            if (t.word == target) {
                return t.prob;
            }
        }
    }
    return 0.0;
}

std::size_t Lexicon::rank(std::string_view source, std::string_view target) const
{
    if (const auto* row = find(source)) {
        for (std::size_t i = 0; i < row->size(); ++i) {
            if ((*row)[i].word == target) {
                return i + 1;
            }
        }
    }
    return 0;
}

void Lexicon::set_row(std::string source, Row row)
{
    std::erase_if(row, [](const Translation& t) { return !(t.prob > 0.0); });
    if (row.empty()) {
        table_.erase(source);
        return;
    }
    sort_row(row);
    table_[std::move(source)] = std::move(row);
}

Lexicon extract_comparable_lexicon(const ComparableCorpus& corpus, std::size_t top_k, Direction direction,
                                   std::string resource_id)
{
    const bool forward = direction == Direction::SourceToTarget;
    Vocabulary from_vocab;
    Vocabulary to_vocab;
    std::vector<std::unordered_map<std::uint32_t, double>> assoc;

    for (const auto& a : corpus.alignments) {
        const auto& src_doc = corpus.src_docs.find(a.src_id)->second;
        const auto& tgt_doc = corpus.tgt_docs.find(a.tgt_id)->second;
        auto from_ids = distinct_ids(forward ? src_doc : tgt_doc, from_vocab);
        auto to_ids = distinct_ids(forward ? tgt_doc : src_doc, to_vocab);
        assoc.resize(from_vocab.size());
        for (auto f : from_ids) {
            auto& row = assoc[f];
            for (auto t : to_ids) {
                row[t] += a.score;
            }
        }
    }

    Lexicon lex(std::move(resource_id), direction);
    for (std::uint32_t f = 0; f < assoc.size(); ++f) {
        if (assoc[f].empty()) {
            continue;
        }
        // Sum in id order so the normalizer does not depend on hash layout.
        std::vector<std::pair<std::uint32_t, double>> entries(assoc[f].begin(), assoc[f].end());
        std::sort(entries.begin(), entries.end());
        double total = 0.0;
        for (const auto& [t, v] : entries) {
            total += v;
        }
        Lexicon::Row row;
        row.reserve(entries.size());
        for (const auto& [t, v] : entries) {
            row.push_back({to_vocab.word(t), v / total});
        }
        sort_row(row);
        if (row.size() > top_k) {
            row.resize(top_k);
        }
        lex.set_row(from_vocab.word(f), std::move(row));
    }
    return lex;
}

Lexicon dictionary_lexicon(const BilingualDictionary& dict, Direction direction, std::string resource_id)
{
    std::map<std::string, std::vector<std::string>, std::less<>> entries;
    if (direction == Direction::SourceToTarget) {
        entries = dict.entries;
    } else {
        for (const auto& [source, targets] : dict.entries) {
            for (const auto& t : targets) {
                auto& slot = entries[t];
                if (std::find(slot.begin(), slot.end(), source) == slot.end()) {
                    slot.push_back(source);
                }
            }
        }
    }
    Lexicon lex(std::move(resource_id), direction);
    for (auto& [word, translations] : entries) {
        if (translations.empty()) {
            continue;
        }
        const double p = 1.0 / static_cast<double>(translations.size());
        Lexicon::Row row;
        for (const auto& t : translations) {
            row.push_back({t, p});
        }
        lex.set_row(word, std::move(row));
    }
    return lex;
}

Lexicon prune_lexicon(const Lexicon& lex, std::size_t top_k, double min_prob)
{
    if (top_k < 1) {
        throw DataError("prune_lexicon: top_k must be at least 1");
    }
    if (!(min_prob >= 0.0 && min_prob < 1.0)) {
        throw DataError("prune_lexicon: min_prob must be in [0, 1)");
    }
    Lexicon out(lex.resource_id(), lex.direction());
    for (const auto& [source, row] : lex.table()) {
        Lexicon::Row kept;
        for (const auto& t : row) {
            if (kept.size() >= top_k) {
                break;
            }
            if (t.prob >= min_prob) {
                kept.push_back(t);
            }
        }
        out.set_row(source, std::move(kept));
    }
    return out;
}

Lexicon with_resource_id(Lexicon lex, std::string resource_id)
{
    Lexicon out(std::move(resource_id), lex.direction());
    for (const auto& [source, row] : lex.table()) {
        out.set_row(source, row);
    }
    return out;
}

void write_lexicon(const Lexicon& lex, const std::filesystem::path& path)
{
    auto out = fmt::output_file(path.string());
    out.print("#lexicon resource={} direction={}\n", lex.resource_id(), to_string(lex.direction()));
    for (const auto& [source, row] : lex.table()) {
        for (const auto& t : row) {
            out.print("{}\t{}\t{:.17g}\n", source, t.word, t.prob);
        }
    }
}

Lexicon read_lexicon(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("#lexicon ")) {
        throw ParseError(path.string(), 1, "missing '#lexicon resource=<id> direction=<s2t|t2s>' header");
    }
    std::string resource;
    std::optional<Direction> direction;
    {
        std::string_view rest = std::string_view(line).substr(9);
        while (!rest.empty()) {
            auto space = rest.find(' ');
            auto field = rest.substr(0, space);
            if (field.starts_with("resource=")) {
                resource = std::string(field.substr(9));
            } else if (field.starts_with("direction=")) {
                direction = parse_direction(field.substr(10));
            }
            rest = space == std::string_view::npos ? std::string_view{} : rest.substr(space + 1);
        }
    }
    if (resource.empty() || !direction) {
        throw ParseError(path.string(), 1, "header lacks resource or direction");
    }

    std::map<std::string, Lexicon::Row, std::less<>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw ParseError(path.string(), lineno, "expected source<TAB>target<TAB>probability");
        }
        double p = 0.0;
        const char* first = line.data() + t2 + 1;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, p);
        if (ec != std::errc{} || ptr != last || !(p > 0.0 && p <= 1.0)) {
            throw ParseError(path.string(), lineno, "probability must be a number in (0, 1]");
        }
        rows[line.substr(0, t1)].push_back({line.substr(t1 + 1, t2 - t1 - 1), p});
    }
    Lexicon lex(resource, *direction);
    for (auto& [source, row] : rows) {
        lex.set_row(source, std::move(row));
    }
    return lex;
}

}  // namespace clir
