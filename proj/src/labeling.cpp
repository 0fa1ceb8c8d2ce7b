#include "clir/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "clir/error.hpp"

namespace clir {

Validation parse_validation(std::string_view s)
{
    if (s == "any") {
        return Validation::Any;
    }
    if (s == "all") {
        return Validation::All;
    }
    throw DataError("validation must be 'any' or 'all', got '" + std::string(s) + "'");
}

std::vector<std::string> pool_candidates(std::string_view word, const std::vector<const Lexicon*>& lexicons,
                                         std::size_t pool_k)
{
    std::vector<std::string> pool;
    for (const auto* lex : lexicons) {
        const auto* row = lex->find(word);
        if (row == nullptr) {
            continue;
        }
        for (std::size_t i = 0; i < row->size() && i < pool_k; ++i) {
            const auto& w = (*row)[i].word;
            if (std::find(pool.begin(), pool.end(), w) == pool.end()) {
                pool.push_back(w);
            }
        }
    }
    return pool;
}

std::vector<TrainingInstance> build_training_data(const SentencePairCorpus& labeling_corpus,
                                                  const std::vector<const Lexicon*>& resources,
                                                  const Lexicon& aligner, const LabelingOptions& options,
                                                  LabelingReport* report)
{
    if (resources.empty()) {
        throw DataError("build_training_data needs at least one resource lexicon");
    }
    LabelingReport local;
    std::vector<TrainingInstance> instances;
    int next_qid = 1;

    for (std::size_t k = 0; k < labeling_corpus.pairs.size(); ++k) {
        const auto& pair = labeling_corpus.pairs[k];
        auto alignment = viterbi_align(pair, k, aligner, options.use_null);
        std::set<std::string, std::less<>> seen;

        for (const auto& word : pair.source) {
            if (!seen.insert(word).second) {
                continue;
            }
            ++local.occurrences;
            if (codepoint_count(word) < options.min_word_chars || !has_alphanumeric(word)) {
                ++local.skipped_short;
                continue;
            }
            auto pool = pool_candidates(word, resources, options.pool_k);
            if (pool.empty()) {
                ++local.skipped_unknown;
                continue;
            }

            // Among target tokens linked to any occurrence of `word`, keep the
            // one the aligner likes best (leftmost on ties).
            std::string aligned;
            double aligned_prob = -1.0;
            for (std::size_t j = 0; j < alignment.links.size(); ++j) {
                const auto& link = alignment.links[j];
                if (!link || pair.source[*link] != word) {
                    continue;
                }
                double p = aligner.prob(word, pair.target[j]);
                if (p > aligned_prob) {
                    aligned_prob = p;
                    aligned = pair.target[j];
                }
            }

            bool validated = false;
            if (!aligned.empty()) {
                std::size_t confirmations = 0;
                for (const auto* lex : resources) {
                    if (lex->rank(word, aligned) > 0) {
                        ++confirmations;
                    }
                }
                validated = options.validation == Validation::Any ? confirmations > 0
                                                                  : confirmations == resources.size();
            }

            TrainingInstance instance;
            instance.source_word = word;
            instance.source_sentence = pair.source;
            instance.target_sentence = pair.target;
            bool has_positive = false;
            for (auto& c : pool) {
                int label = (validated && c == aligned) ? 1 : 0;
                has_positive = has_positive || label == 1;
                instance.candidates.push_back({std::move(c), label});
            }
            if (!has_positive) {
                ++local.dropped_no_positive;
                continue;
            }
            instance.query_id = next_qid++;
            instances.push_back(std::move(instance));
        }
    }
    local.emitted = instances.size();
    if (report != nullptr) {
        *report = local;
    }
    return instances;
}

void write_instances(const std::vector<TrainingInstance>& instances, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    for (const auto& inst : instances) {
        nlohmann::json candidates = nlohmann::json::array();
        for (const auto& c : inst.candidates) {
            candidates.push_back({{"word", c.word}, {"label", c.label}});
        }
        nlohmann::json record = {{"qid", inst.query_id},
                                 {"source_word", inst.source_word},
                                 {"source_sentence", inst.source_sentence.tokens},
                                 {"target_sentence", inst.target_sentence.tokens},
                                 {"candidates", candidates}};
        out << record.dump() << '\n';
    }
}

std::vector<TrainingInstance> read_instances(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<TrainingInstance> instances;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            auto record = nlohmann::json::parse(line);
            TrainingInstance inst;
            inst.query_id = record.at("qid").get<int>();
            inst.source_word = record.at("source_word").get<std::string>();
            inst.source_sentence.tokens = record.at("source_sentence").get<std::vector<std::string>>();
            inst.target_sentence.tokens = record.at("target_sentence").get<std::vector<std::string>>();
            for (const auto& c : record.at("candidates")) {
                inst.candidates.push_back({c.at("word").get<std::string>(), c.at("label").get<int>()});
            }
            if (inst.candidates.empty()) {
                throw ParseError(path.string(), lineno, "instance without candidates");
            }
            instances.push_back(std::move(inst));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
    }
    return instances;
}

}  // namespace clir
