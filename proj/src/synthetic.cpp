#include "clir/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clir/error.hpp"

namespace clir {

namespace {

// Word forms. Source words are Latin syllable strings, target words Persian
// letter strings, so the two vocabularies can never collide.
constexpr std::array<std::string_view, 14> kConsonants = {"b", "d", "f", "g", "k", "l", "m",
                                                          "n", "p", "r", "s", "t", "v", "z"};
constexpr std::array<std::string_view, 5> kVowels = {"a", "e", "i", "o", "u"};
constexpr std::array<std::string_view, 28> kLetters = {"ا", "ب", "پ", "ت", "ج", "چ", "خ", "د", "ر", "ز",
                                                       "ژ", "س", "ش", "ع", "غ", "ف", "ق", "ک", "گ", "ل",
                                                       "م", "ن", "و", "ه", "ی", "ح", "ص", "ط"};

using WordSense = std::pair<std::size_t, std::size_t>;  // (word index, sense index)

class Generator {
  public:
    explicit Generator(const SyntheticOptions& options) : options_(options), rng_(options.seed) {}

    SyntheticWorld run();

  private:
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + pick(hi - lo + 1); }

    std::string source_form();
    std::string target_form();
    void make_words();
    void make_gaps();

    using Allowed = const std::set<std::string>*;
    [[nodiscard]] bool allowed(std::size_t word, Allowed excluded) const
    {
        return excluded == nullptr || !excluded->contains(world_.words[word].source);
    }
    WordSense sample_slot(std::size_t topic, Allowed excluded);
    std::vector<WordSense> sample_text(std::size_t topic, std::size_t length, Allowed excluded);
    std::string source_text(const std::vector<WordSense>& text) const;
    std::string target_text(const std::vector<WordSense>& text, double noise);
    TextPairs sentence_pairs(std::size_t count, Allowed excluded, std::vector<std::vector<WordSense>>* drawn = nullptr);

    void make_comparable();
    void make_dictionary();
    void make_heldout();
    void make_retrieval();

    const SyntheticOptions& options_;
    std::mt19937_64 rng_;
    SyntheticWorld world_;
    std::set<std::string> source_forms_;
    std::set<std::string> target_forms_;
    std::vector<std::vector<std::size_t>> topic_words_;
    std::vector<std::vector<WordSense>> topic_senses_;
    std::vector<std::size_t> general_words_;
    std::vector<std::size_t> ambiguous_words_;
    std::vector<std::string> all_targets_;
};

std::string Generator::source_form()
{
    while (true) {
        std::string s;
        const std::size_t syllables = between(2, 3);
        for (std::size_t i = 0; i < syllables; ++i) {
            s += kConsonants[pick(kConsonants.size())];
            s += kVowels[pick(kVowels.size())];
        }
        if (source_forms_.insert(s).second) {
            return s;
        }
    }
}

std::string Generator::target_form()
{
    while (true) {
        std::string s;
        const std::size_t letters = between(3, 5);
        for (std::size_t i = 0; i < letters; ++i) {
            s += kLetters[pick(kLetters.size())];
        }
        if (target_forms_.insert(s).second) {
            return s;
        }
    }
}

void Generator::make_words()
{
    const auto v = options_.vocabulary;
    const auto k = options_.topics;
    const auto n_ambiguous = static_cast<std::size_t>(std::lround(static_cast<double>(v) * options_.ambiguity));
    const auto n_general = static_cast<std::size_t>(std::lround(static_cast<double>(v) * options_.general));
    topic_words_.assign(k, {});
    topic_senses_.assign(k, {});
    for (std::size_t i = 0; i < v; ++i) {
        SyntheticWord w;
        w.source = source_form();
        if (i < n_ambiguous) {
            const std::size_t t1 = pick(k);
            std::size_t t2 = pick(k - 1);
            t2 += t2 >= t1 ? 1 : 0;
            const double dominant = 0.6 + 0.2 * uniform();
            w.senses.push_back({target_form(), t1, dominant});
            w.senses.push_back({target_form(), t2, 1.0 - dominant});
            topic_senses_[t1].push_back({i, 0});
            topic_senses_[t2].push_back({i, 1});
            ambiguous_words_.push_back(i);
        } else if (i < n_ambiguous + n_general) {
            w.general = true;
            w.senses.push_back({target_form(), k, 1.0});
            general_words_.push_back(i);
        } else {
            const std::size_t t = (i - n_ambiguous - n_general) % k;
            w.senses.push_back({target_form(), t, 1.0});
            topic_words_[t].push_back(i);
        }
        for (const auto& s : w.senses) {
            all_targets_.push_back(s.target);
        }
        world_.words.push_back(std::move(w));
    }
}

void Generator::make_gaps()
{
    std::vector<std::size_t> order(world_.words.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    const auto size = static_cast<std::size_t>(std::lround(static_cast<double>(order.size()) * options_.gap));
    std::size_t next = 0;
    for (const char* id : {"par1", "par2", "comparable", "dictionary"}) {
        auto& gap = world_.gaps[id];
        for (std::size_t i = 0; i < size; ++i) {
            gap.insert(world_.words[order[next++]].source);
        }
    }
}

WordSense Generator::sample_slot(std::size_t topic, Allowed excluded)
{
    for (int attempt = 0;; ++attempt) {
        const double r = uniform();
        WordSense ws{0, 0};
        const bool topical = r < 0.55 || (topic_senses_[topic].empty() && r < 0.8) || (r >= 0.8 && general_words_.empty());
        if (topical) {
            const auto& pool = topic_words_[topic];
            ws = {pool[pick(pool.size())], 0};
        } else if (r < 0.8) {
            const auto& pool = topic_senses_[topic];
            double total = 0.0;
            for (const auto& [w, s] : pool) {
                total += world_.words[w].senses[s].weight;
            }
            double x = uniform() * total;
            ws = pool.back();
            for (const auto& cand : pool) {
                x -= world_.words[cand.first].senses[cand.second].weight;
                if (x < 0.0) {
                    ws = cand;
                    break;
                }
            }
        } else {
            ws = {general_words_[pick(general_words_.size())], 0};
        }
        if (allowed(ws.first, excluded) || attempt > 100) {
            return ws;
        }
    }
}

std::vector<WordSense> Generator::sample_text(std::size_t topic, std::size_t length, Allowed excluded)
{
    std::vector<WordSense> text;
    text.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        text.push_back(sample_slot(topic, excluded));
    }
    return text;
}

std::string Generator::source_text(const std::vector<WordSense>& text) const
{
    std::string out;
    for (const auto& [w, s] : text) {
        if (!out.empty()) {
            out += ' ';
        }
        out += world_.words[w].source;
    }
    return out;
}

std::string Generator::target_text(const std::vector<WordSense>& text, double noise)
{
    std::string out;
    auto append = [&](const std::string& t) {
        if (!out.empty()) {
            out += ' ';
        }
        out += t;
    };
    for (const auto& [w, s] : text) {
        if (uniform() >= noise) {
            append(world_.words[w].senses[s].target);
        }
        if (uniform() < noise) {
            append(all_targets_[pick(all_targets_.size())]);
        }
    }
    if (out.empty()) {
        append(world_.words[text.front().first].senses[text.front().second].target);
    }
    return out;
}

TextPairs Generator::sentence_pairs(std::size_t count, Allowed excluded, std::vector<std::vector<WordSense>>* drawn)
{
    TextPairs pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto text = sample_text(pick(options_.topics), between(6, 10), excluded);
        pairs.emplace_back(source_text(text), target_text(text, options_.noise));
        if (drawn != nullptr) {
            drawn->push_back(text);
        }
    }
    return pairs;
}

void Generator::make_comparable()
{
    const auto* excluded = &world_.gaps.at("comparable");
    for (std::size_t i = 0; i < options_.comparable_docs; ++i) {
        const std::size_t topic = i % options_.topics;
        const auto src = sample_text(topic, between(30, 45), excluded);
        // Target side: a noisy translation of part of the source plus independent text on the same topic.
        std::vector<WordSense> tgt;
        for (const auto& ws : src) {
            if (uniform() < 0.5) {
                tgt.push_back(ws);
            }
        }
        auto extra = sample_text(topic, between(15, 25), excluded);
        tgt.insert(tgt.end(), extra.begin(), extra.end());
        std::shuffle(tgt.begin(), tgt.end(), rng_);
        const auto src_id = fmt::format("cs{:04d}", i + 1);
        const auto tgt_id = fmt::format("ct{:04d}", i + 1);
        world_.comparable_src.emplace_back(src_id, source_text(src));
        world_.comparable_tgt.emplace_back(tgt_id, target_text(tgt, options_.noise));
        const double score = std::round((0.5 + 0.5 * uniform()) * 1000.0) / 1000.0;
        world_.comparable_alignments.emplace_back(src_id, tgt_id, score);
    }
}

void Generator::make_dictionary()
{
    const auto& excluded = world_.gaps.at("dictionary");
    for (const auto& w : world_.words) {
        if (excluded.contains(w.source)) {
            continue;
        }
        std::vector<std::string> targets;
        for (const auto& s : w.senses) {
            targets.push_back(s.target);
        }
        const std::size_t distractors = between(1, 3);
        while (targets.size() < w.senses.size() + distractors) {
            const auto& t = all_targets_[pick(all_targets_.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
                targets.push_back(t);
            }
        }
        std::shuffle(targets.begin(), targets.end(), rng_);
        world_.dictionary.emplace_back(w.source, std::move(targets));
    }
}

void Generator::make_heldout()
{
    std::vector<std::vector<WordSense>> drawn;
    world_.heldout = sentence_pairs(options_.heldout_pairs, nullptr, &drawn);
    for (std::size_t line = 0; line < drawn.size(); ++line) {
        std::set<std::size_t> seen;
        for (const auto& [w, s] : drawn[line]) {
            if (world_.words[w].ambiguous() && seen.insert(w).second) {
                world_.heldout_gold.push_back({line + 1, world_.words[w].source, world_.words[w].senses[s].target});
            }
        }
    }
}

void Generator::make_retrieval()
{
    struct Doc {
        std::string text;
        std::size_t query = 0;  // 1-based, 0 for background
        int relevance = 0;
    };
    std::vector<Doc> docs;
    const auto& words = world_.words;
    auto target_of = [&](std::size_t w, std::size_t s) { return words[w].senses[s].target; };
    auto topic_doc = [&](std::size_t topic, std::size_t length) {
        return target_text(sample_text(topic, length, nullptr), 0.0);
    };
    auto repeat = [](std::string& text, const std::string& term, std::size_t times) {
        for (std::size_t i = 0; i < times; ++i) {
            text += ' ';
            text += term;
        }
    };
    for (std::size_t i = 0; i < options_.background_docs; ++i) {
        docs.push_back({topic_doc(i % options_.topics, between(30, 50)), 0, 0});
    }
    for (std::size_t q = 0; q < options_.queries; ++q) {
        // An ambiguous query word, alternating between its minor and dominant
        // sense; without ambiguous words a third topic word stands in.
        const bool has_ambiguous = !ambiguous_words_.empty();
        std::size_t a = 0;
        std::size_t sense = 0;
        std::size_t topic = 0;
        if (has_ambiguous) {
            a = ambiguous_words_[pick(ambiguous_words_.size())];
            sense = q % 2 == 0 ? 1 : 0;
            topic = words[a].senses[sense].topic;
        } else {
            topic = pick(options_.topics);
        }
        const auto& pool = topic_words_[topic];
        std::vector<std::size_t> chosen;
        while (chosen.size() < (has_ambiguous ? 2U : 3U)) {
            const std::size_t w = pool[pick(pool.size())];
            if (std::find(chosen.begin(), chosen.end(), w) == chosen.end()) {
                chosen.push_back(w);
            }
        }
        const std::size_t w1 = chosen[0];
        const std::size_t w2 = chosen[1];
        if (!has_ambiguous) {
            a = chosen[2];
        }
        std::vector<std::string> title = {words[w1].source, words[w2].source, words[a].source};
        std::shuffle(title.begin(), title.end(), rng_);
        const auto qid = fmt::format("q{:03d}", q + 1);
        world_.topics.push_back({qid, fmt::format("{} {} {}", title[0], title[1], title[2])});

        for (std::size_t r = 0; r < options_.relevant_per_query; ++r) {
            auto text = topic_doc(topic, between(25, 40));
            repeat(text, target_of(a, sense), between(1, 3));
            for (auto w : {w1, w2}) {
                if (uniform() < 0.8) {
                    repeat(text, target_of(w, 0), between(1, 2));
                }
            }
            docs.push_back({std::move(text), q + 1, 1});
        }
        for (std::size_t c = 0; c < options_.confusers_per_query; ++c) {
            std::size_t wrong_topic = 0;
            std::string decoy;
            if (has_ambiguous) {
                wrong_topic = words[a].senses[1 - sense].topic;
                decoy = target_of(a, 1 - sense);
            } else {
                wrong_topic = (topic + 1 + pick(options_.topics - 1)) % options_.topics;
                const auto& other_pool = topic_words_[wrong_topic];
                decoy = target_of(other_pool[pick(other_pool.size())], 0);
            }
            auto text = topic_doc(wrong_topic, between(25, 40));
            repeat(text, decoy, between(1, 3));
            repeat(text, target_of(uniform() < 0.5 ? w1 : w2, 0), 1);
            docs.push_back({std::move(text), q + 1, 0});
        }
    }
    std::shuffle(docs.begin(), docs.end(), rng_);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto id = fmt::format("d{:05d}", i + 1);
        world_.documents.emplace_back(id, docs[i].text);
        if (docs[i].query > 0) {
            world_.qrels[fmt::format("q{:03d}", docs[i].query)][id] = docs[i].relevance;
        }
    }
}

SyntheticWorld Generator::run()
{
    world_.options = options_;
    make_words();
    make_gaps();
    world_.parallel1 = sentence_pairs(options_.parallel1_pairs, &world_.gaps.at("par1"));
    world_.parallel2 = sentence_pairs(options_.parallel2_pairs, &world_.gaps.at("par2"));
    make_comparable();
    make_dictionary();
    world_.labeling = sentence_pairs(options_.labeling_pairs, nullptr);
    make_heldout();
    make_retrieval();
    return std::move(world_);
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

void write_pairs(const TextPairs& pairs, const std::filesystem::path& path)
{
    auto out = open_output(path);
    for (const auto& [s, t] : pairs) {
        out << s << '\t' << t << '\n';
    }
}

void write_docs(const TextPairs& docs, const std::filesystem::path& path)
{
    auto out = open_output(path);
    for (const auto& [id, text] : docs) {
        out << nlohmann::json{{"id", id}, {"text", text}}.dump() << '\n';
    }
}

}  // namespace

SyntheticWorld generate_synthetic_world(const SyntheticOptions& options)
{
    if (options.vocabulary < 200) {
        throw DataError("synthetic world needs at least 200 word types");
    }
    if (options.parallel1_pairs + options.parallel2_pairs < 2000) {
        throw DataError("synthetic world needs at least 2000 parallel sentence pairs");
    }
    if (options.topics < 2) {
        throw DataError("synthetic world needs at least two topics");
    }
    if (!(options.ambiguity >= 0.0) || !(options.general >= 0.0) || options.ambiguity + options.general > 0.8) {
        throw DataError("ambiguity and general fractions must leave room for topic words");
    }
    if (!(options.gap >= 0.0) || options.gap * 4.0 > 1.0) {
        throw DataError("coverage gap fraction must be in [0, 0.25]");
    }
    Generator generator(options);
    return generator.run();
}

void write_world(const SyntheticWorld& world, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_pairs(world.parallel1, dir / "par1.tsv");
    write_pairs(world.parallel2, dir / "par2.tsv");
    write_pairs(world.labeling, dir / "labeling.tsv");
    write_pairs(world.heldout, dir / "heldout.tsv");
    write_docs(world.comparable_src, dir / "comparable_src.jsonl");
    write_docs(world.comparable_tgt, dir / "comparable_tgt.jsonl");
    write_docs(world.documents, dir / "documents.jsonl");
    {
        auto out = open_output(dir / "comparable_align.jsonl");
        for (const auto& [s, t, score] : world.comparable_alignments) {
            out << nlohmann::json{{"src", s}, {"tgt", t}, {"score", score}}.dump() << '\n';
        }
    }
    {
        auto out = open_output(dir / "dictionary.tsv");
        for (const auto& [source, targets] : world.dictionary) {
            out << source << '\t';
            for (std::size_t i = 0; i < targets.size(); ++i) {
                out << (i > 0 ? "|" : "") << targets[i];
            }
            out << '\n';
        }
    }
    {
        auto out = open_output(dir / "heldout_gold.tsv");
        for (const auto& g : world.heldout_gold) {
            out << g.line << '\t' << g.source << '\t' << g.target << '\n';
        }
    }
    {
        auto out = open_output(dir / "topics.tsv");
        for (const auto& t : world.topics) {
            out << t.qid << '\t' << t.title << '\n';
        }
    }
    write_qrels(world.qrels, dir / "qrels.txt");
    {
        auto out = open_output(dir / "exp.toml");
        out << fmt::format(R"(# Synthetic bilingual world (seed {seed}). Paths are relative to this file.

[experiment]
seed = {seed}
trainer = "pairwise_hinge"
context_resource = ""
pool_k = 10
output = "out"

[model1]
iterations = 5
use_null = true

[lexicon]
top_k = 20
min_prob = 0.001

[labeling]
corpus = "labeling.tsv"
validation = "any"
heldout = "heldout.tsv"
heldout_gold = "heldout_gold.tsv"

[retrieval]
documents = "documents.jsonl"
topics = "topics.tsv"
qrels = "qrels.txt"
k1 = 1.2
b = 0.75
depth = 1000
weighted = true

[n]
sweep = "1,2,3,4,5,6"
dictionary = 6
comparable = 3
parallel = 5
linear = 5
ltr = 5

[resource.par1]
kind = "parallel"
path = "par1.tsv"

[resource.par2]
kind = "parallel"
path = "par2.tsv"

[resource.comparable]
kind = "comparable"
source = "comparable_src.jsonl"
target = "comparable_tgt.jsonl"
alignments = "comparable_align.jsonl"

[resource.dictionary]
kind = "dictionary"
path = "dictionary.tsv"
)",
                           fmt::arg("seed", world.options.seed));
    }
}

}  // namespace clir
