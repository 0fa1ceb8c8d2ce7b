#include "clir/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "clir/error.hpp"
#include "clir/hash.hpp"

namespace clir {

namespace {

constexpr std::string_view kCommonFamilies[] = {"present", "prob",    "revprob", "rank",
                                                "probdiff", "ent_tgt", "ent_src", "n_relevant"};
constexpr std::string_view kCorpusFamilies[] = {"tf_src",  "tf_tgt",  "idf_src",   "idf_tgt",
                                                "pmi_src", "pmi_tgt", "clpmi_s2t", "clpmi_t2s"};

double safe_log_ratio(double joint, double a, double b)
{
    if (joint <= 0.0 || a <= 0.0 || b <= 0.0) {
        return 0.0;
    }
    return std::log(joint / (a * b));
}

std::vector<std::string_view> distinct_words(const TokenizedText& text)
{
    std::vector<std::string_view> words(text.begin(), text.end());
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return words;
}

double idf(const CorpusStats& stats, std::string_view word)
{
    auto df = stats.df(word);
    return df == 0 ? 0.0 : std::log(static_cast<double>(stats.doc_count()) / static_cast<double>(df));
}

}  // namespace

std::string_view to_string(ResourceKind kind) noexcept
{
    switch (kind) {
    case ResourceKind::Parallel: return "parallel";
    case ResourceKind::Comparable: return "comparable";
    case ResourceKind::Dictionary: return "dictionary";
    }
    return "unknown";
}

ResourceKind parse_resource_kind(std::string_view s)
{
    if (s == "parallel") {
        return ResourceKind::Parallel;
    }
    if (s == "comparable") {
        return ResourceKind::Comparable;
    }
    if (s == "dictionary") {
        return ResourceKind::Dictionary;
    }
    throw DataError("unknown resource kind '" + std::string(s) + "'");
}

FeatureSchema::FeatureSchema(std::string version, std::vector<Slot> slots)
    : version_(std::move(version)), slots_(std::move(slots))
{
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& s : slots_) {
        if (!seen.emplace(s.name, s.resource).second) {
            throw DataError("duplicate feature slot " + s.name + "@" + s.resource);
        }
    }
    hash_ = sha256_hex(manifest().dump());
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name, std::string_view resource) const
{
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].name == name && slots_[i].resource == resource) {
            return i;
        }
    }
    return std::nullopt;
}

std::string FeatureSchema::label(std::size_t slot) const
{
    return slots_.at(slot).name + "@" + slots_.at(slot).resource;
}

nlohmann::json FeatureSchema::manifest() const
{
    nlohmann::json slots = nlohmann::json::array();
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        slots.push_back({{"index", i}, {"name", slots_[i].name}, {"resource", slots_[i].resource}});
    }
    return {{"version", version_}, {"slots", slots}};
}

FeatureSchema FeatureSchema::from_manifest(const nlohmann::json& manifest)
{
    try {
        std::vector<Slot> slots;
        for (const auto& s : manifest.at("slots")) {
            if (s.at("index").get<std::size_t>() != slots.size()) {
                throw DataError("schema manifest slots out of order");
            }
            slots.push_back({s.at("name").get<std::string>(), s.at("resource").get<std::string>()});
        }
        return FeatureSchema(manifest.at("version").get<std::string>(), std::move(slots));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed schema manifest: ") + e.what());
    }
}

FeatureSchema make_schema(std::span<const Resource> resources)
{
    std::vector<FeatureSchema::Slot> slots;
    for (const auto& r : resources) {
        for (auto family : kCommonFamilies) {
            slots.push_back({std::string(family), r.id});
        }
        if (r.has_corpus()) {
            for (auto family : kCorpusFamilies) {
                slots.push_back({std::string(family), r.id});
            }
        }
    }
    slots.push_back({"n_relevant", std::string(kAllResources)});
    return FeatureSchema(std::string(kSchemaVersion), std::move(slots));
}

ResourceSet::ResourceSet(std::vector<Resource> resources) : resources_(std::move(resources))
{
    std::set<std::string, std::less<>> ids;
    for (const auto& r : resources_) {
        if (!ids.insert(r.id).second) {
            throw DataError("duplicate resource id '" + r.id + "'");
        }
        if (r.has_corpus() && (!r.source_stats || !r.target_stats || !r.cross)) {
            throw DataError("corpus resource '" + r.id + "' lacks corpus statistics");
        }
    }
    auto entropy_table = [](const Lexicon& lex) {
        StringMap<double> table;
        for (const auto& [from, row] : lex.table()) {
            if (from == kNullWord) {
                continue;
            }
            for (const auto& t : row) {
                table[t.word] -= t.prob * std::log(t.prob);
            }
        }
        return table;
    };
    for (const auto& r : resources_) {
        target_entropy_.push_back(entropy_table(r.forward));
        source_entropy_.push_back(entropy_table(r.reverse));
    }
    schema_ = make_schema(resources_);
}

const Resource& ResourceSet::get(std::string_view id) const
{
    for (const auto& r : resources_) {
        if (r.id == id) {
            return r;
        }
    }
    throw DataError("unknown resource '" + std::string(id) + "'");
}

std::vector<const Lexicon*> ResourceSet::forward_lexicons() const
{
    std::vector<const Lexicon*> out;
    for (const auto& r : resources_) {
        out.push_back(&r.forward);
    }
    return out;
}

double ResourceSet::target_entropy(std::size_t resource, std::string_view word) const
{
    const auto& table = target_entropy_.at(resource);
    auto it = table.find(word);
    return it == table.end() ? 0.0 : it->second;
}

double ResourceSet::source_entropy(std::size_t resource, std::string_view word) const
{
    const auto& table = source_entropy_.at(resource);
    auto it = table.find(word);
    return it == table.end() ? 0.0 : it->second;
}

double pmi(const CorpusStats& stats, std::string_view w1, std::string_view w2)
{
    const auto n = static_cast<double>(stats.doc_count());
    return safe_log_ratio(static_cast<double>(stats.cooccur(w1, w2)) / n, static_cast<double>(stats.df(w1)) / n,
                          static_cast<double>(stats.df(w2)) / n);
}

double context_score(const CorpusStats& stats, std::string_view word, const TokenizedText& sentence)
{
    double total = 0.0;
    for (auto w : distinct_words(sentence)) {
        if (w != word) {
            total += pmi(stats, word, w);
        }
    }
    return total;
}

double clpmi(const AlignmentStats& stats, std::string_view source_word, std::string_view target_word)
{
    const auto n = static_cast<double>(stats.alignment_count());
    if (n <= 0.0) {
        return 0.0;
    }
    return safe_log_ratio(static_cast<double>(stats.mutual_count(source_word, target_word)) / n,
                          static_cast<double>(stats.source_count(source_word)) / n,
                          static_cast<double>(stats.target_count(target_word)) / n);
}

double cross_context_score(const AlignmentStats& stats, std::string_view source_word,
                           const TokenizedText& target_sentence)
{
    double total = 0.0;
    for (auto w : distinct_words(target_sentence)) {
        total += clpmi(stats, source_word, w);
    }
    return total;
}

double reverse_cross_context_score(const AlignmentStats& stats, std::string_view target_word,
                                   const TokenizedText& source_sentence)
{
    double total = 0.0;
    for (auto w : distinct_words(source_sentence)) {
        total += clpmi(stats, w, target_word);
    }
    return total;
}

FeatureVector extract_vector(std::string_view source_word, std::string_view candidate, const ContextSpec& context,
                             const ResourceSet& resources, const FeatureSchema& schema)
{
    if (schema.hash() != resources.schema().hash()) {
        throw DataError("feature schema does not match the configured resources");
    }
    FeatureVector out;
    out.schema_version = schema.version();
    out.values.reserve(schema.size());
    auto& v = out.values;

    const auto source_words = distinct_words(context.source_sentence);
    std::size_t related_any = 0;
    std::vector<bool> related(source_words.size(), false);

    const auto& all = resources.resources();
    for (std::size_t r = 0; r < all.size(); ++r) {
        const auto& res = all[r];
        const auto rank = res.forward.rank(source_word, candidate);
        const double prob = res.forward.prob(source_word, candidate);
        double probdiff = 0.0;
        if (rank > 0) {
            probdiff = res.forward.find(source_word)->front().prob - prob;
        }
        std::size_t n_relevant = 0;
        for (std::size_t i = 0; i < source_words.size(); ++i) {
            if (res.forward.rank(source_words[i], candidate) > 0) {
                ++n_relevant;
                related[i] = true;
            }
        }
        v.push_back(rank > 0 ? 1.0 : 0.0);
        v.push_back(prob);
        v.push_back(res.reverse.prob(candidate, source_word));
        v.push_back(static_cast<double>(rank));
        v.push_back(probdiff);
        v.push_back(resources.target_entropy(r, candidate));
        v.push_back(resources.source_entropy(r, source_word));
        v.push_back(static_cast<double>(n_relevant));

        if (res.has_corpus()) {
            const auto& src = *res.source_stats;
            const auto& tgt = *res.target_stats;
            v.push_back(static_cast<double>(src.tf(source_word)));
            v.push_back(static_cast<double>(tgt.tf(candidate)));
            v.push_back(idf(src, source_word));
            v.push_back(idf(tgt, candidate));
            v.push_back(context_score(src, source_word, context.source_sentence));
            v.push_back(context_score(tgt, candidate, context.target_sentence));
            v.push_back(cross_context_score(*res.cross, source_word, context.target_sentence));
            v.push_back(reverse_cross_context_score(*res.cross, candidate, context.source_sentence));
        }
    }
    related_any = static_cast<std::size_t>(std::count(related.begin(), related.end(), true));
    v.push_back(static_cast<double>(related_any));

    if (v.size() != schema.size()) {
        throw DataError("feature vector length does not match schema");
    }
    return out;
}

void normalize_rows(std::vector<std::vector<double>*>& rows)
{
    if (rows.empty()) {
        return;
    }
    const std::size_t width = rows.front()->size();
    for (std::size_t j = 0; j < width; ++j) {
        double lo = (*rows.front())[j];
        double hi = lo;
        for (const auto* row : rows) {
            lo = std::min(lo, (*row)[j]);
            hi = std::max(hi, (*row)[j]);
        }
        const double span = hi - lo;
        for (auto* row : rows) {
            (*row)[j] = span > 0.0 ? ((*row)[j] - lo) / span : 0.0;
        }
    }
}

std::vector<FeatureVector> normalize_list(std::vector<FeatureVector> vectors)
{
    std::vector<std::vector<double>*> rows;
    for (auto& v : vectors) {
        if (!rows.empty() && v.values.size() != rows.front()->size()) {
            throw DataError("normalize_list: vectors of different lengths");
        }
        rows.push_back(&v.values);
    }
    normalize_rows(rows);
    return vectors;
}

std::vector<RankList> extract_lists(const std::vector<TrainingInstance>& instances, const ResourceSet& resources,
                                    unsigned threads)
{
    std::vector<RankList> lists(instances.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& inst = instances[i];
            ContextSpec context{inst.source_sentence, inst.target_sentence};
            auto& list = lists[i];
            list.qid = inst.query_id;
            list.source_word = inst.source_word;
            for (const auto& c : inst.candidates) {
                auto fv = extract_vector(inst.source_word, c.word, context, resources, resources.schema());
                list.candidates.push_back({c.word, c.label, std::move(fv.values)});
            }
        }
    };
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(instances.size())));
    if (threads <= 1) {
        work(0, instances.size());
        return lists;
    }
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (instances.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(instances.size(), begin + chunk);
            if (begin < end) {
                pool.emplace_back(work, begin, end);
            }
        }
    }
    return lists;
}

ContextSpec query_context(const TokenizedText& query, const Lexicon& context_lexicon, std::size_t per_word)
{
    ContextSpec context;
    context.source_sentence = query;
    for (const auto& w : query) {
        if (const auto* row = context_lexicon.find(w)) {
            for (std::size_t i = 0; i < row->size() && i < per_word; ++i) {
                context.target_sentence.tokens.push_back((*row)[i].word);
            }
        }
    }
    return context;
}

}  // namespace clir
