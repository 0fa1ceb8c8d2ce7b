#include <algorithm>
#include <cmath>

#include "clir/error.hpp"
#include "clir/lexicon.hpp"

namespace clir {

namespace {

struct EncodedPair {
    std::vector<std::uint32_t> source;  // position 0 is NULL when enabled
    std::vector<std::uint32_t> target;
};

}  // namespace

SentencePairCorpus swap_sides(const SentencePairCorpus& corpus)
{
    SentencePairCorpus out;
    out.name = corpus.name;
    out.skipped_lines = corpus.skipped_lines;
    out.pairs.reserve(corpus.pairs.size());
    for (const auto& p : corpus.pairs) {
        out.pairs.push_back({p.target, p.source});
    }
    return out;
}

Lexicon train_model1(const SentencePairCorpus& corpus, const Model1Options& options, Model1Trace* trace)
{
    if (options.iterations < 1) {
        throw DataError("train_model1: iterations must be at least 1");
    }
    Vocabulary src_vocab;
    Vocabulary tgt_vocab;
    if (options.use_null) {
        src_vocab.intern(kNullWord);
    }

    std::vector<EncodedPair> encoded;
    encoded.reserve(corpus.pairs.size());
    for (const auto& p : corpus.pairs) {
        if (p.source.empty() || p.target.empty()) {
            continue;
        }
        EncodedPair e;
        if (options.use_null) {
            e.source.push_back(0);
        }
        for (const auto& w : p.source) {
            e.source.push_back(src_vocab.intern(w));
        }
        for (const auto& w : p.target) {
            e.target.push_back(tgt_vocab.intern(w));
        }
        encoded.push_back(std::move(e));
    }
    const std::size_t real_sources = src_vocab.size() - (options.use_null ? 1 : 0);
    if (encoded.empty() || real_sources == 0 || tgt_vocab.size() == 0) {
        throw DataError("train_model1: corpus '" + corpus.name + "' has an empty vocabulary");
    }

    // Row e holds the sorted target ids co-occurring with e; the translation
    // table is flat with row offsets.
    std::vector<std::vector<std::uint32_t>> rows(src_vocab.size());
    for (const auto& e : encoded) {
        for (auto s : e.source) {
            rows[s].insert(rows[s].end(), e.target.begin(), e.target.end());
        }
    }
    std::vector<std::size_t> offset(rows.size() + 1, 0);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        auto& r = rows[s];
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        offset[s + 1] = offset[s] + r.size();
    }

    // Cell index of every (target position, source position) of every pair.
    std::vector<std::size_t> cell;
    std::vector<std::size_t> cell_start(encoded.size() + 1, 0);
    for (std::size_t k = 0; k < encoded.size(); ++k) {
        const auto& e = encoded[k];
        for (auto f : e.target) {
            for (auto s : e.source) {
                const auto& r = rows[s];
                auto pos = static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), f) - r.begin());
                cell.push_back(offset[s] + pos);
            }
        }
        cell_start[k + 1] = cell.size();
    }

    std::vector<double> table(offset.back(), 1.0 / static_cast<double>(tgt_vocab.size()));
    std::vector<double> counts(table.size());

    auto log_likelihood = [&] {
        double ll = 0.0;
        for (std::size_t k = 0; k < encoded.size(); ++k) {
            const std::size_t len = encoded[k].source.size();
            const std::size_t* c = cell.data() + cell_start[k];
            for (std::size_t j = 0; j < encoded[k].target.size(); ++j, c += len) {
                double denom = 0.0;
                for (std::size_t i = 0; i < len; ++i) {
                    denom += table[c[i]];
                }
                ll += std::log(denom / static_cast<double>(len));
            }
        }
        return ll;
    };

    if (trace != nullptr) {
        trace->log_likelihood.clear();
    }
    for (std::size_t iter = 0; iter < options.iterations; ++iter) {
        std::fill(counts.begin(), counts.end(), 0.0);
        double ll = 0.0;
        for (std::size_t k = 0; k < encoded.size(); ++k) {
            const std::size_t len = encoded[k].source.size();
            const std::size_t* c = cell.data() + cell_start[k];
            for (std::size_t j = 0; j < encoded[k].target.size(); ++j, c += len) {
                double denom = 0.0;
                for (std::size_t i = 0; i < len; ++i) {
                    denom += table[c[i]];
                }
                ll += std::log(denom / static_cast<double>(len));
                for (std::size_t i = 0; i < len; ++i) {
                    counts[c[i]] += table[c[i]] / denom;
                }
            }
        }
        if (trace != nullptr) {
            trace->log_likelihood.push_back(ll);
        }
        for (std::size_t s = 0; s < rows.size(); ++s) {
            double total = 0.0;
            for (std::size_t x = offset[s]; x < offset[s + 1]; ++x) {
                total += counts[x];
            }
            if (total > 0.0) {
                for (std::size_t x = offset[s]; x < offset[s + 1]; ++x) {
                    table[x] = counts[x] / total;
                }
            }
        }
    }
    if (trace != nullptr) {
        trace->log_likelihood.push_back(log_likelihood());
    }

    Lexicon lex(corpus.name, Direction::SourceToTarget);
    for (std::uint32_t s = 0; s < rows.size(); ++s) {
        Lexicon::Row row;
        row.reserve(rows[s].size());
        for (std::size_t x = 0; x < rows[s].size(); ++x) {
            row.push_back({tgt_vocab.word(rows[s][x]), table[offset[s] + x]});
        }
        lex.set_row(src_vocab.word(s), std::move(row));
    }
    return lex;
}

WordAlignment viterbi_align(const SentencePair& pair, std::size_t pair_index, const Lexicon& lexicon, bool use_null,
                            double floor)
{
    WordAlignment alignment;
    alignment.pair_index = pair_index;
    alignment.links.reserve(pair.target.size());
    for (const auto& f : pair.target) {
        std::optional<std::size_t> best;
        double best_score = -1.0;
        if (use_null) {
            best_score = std::max(lexicon.prob(kNullWord, f), floor);
        }
        for (std::size_t i = 0; i < pair.source.size(); ++i) {
            double score = std::max(lexicon.prob(pair.source[i], f), floor);
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        if (!use_null && !best && !pair.source.empty()) {
            best = 0;
        }
        alignment.links.push_back(best);
    }
    return alignment;
}

}  // namespace clir
