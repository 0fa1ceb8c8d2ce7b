#include "clir/pipeline.hpp"

#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "clir/error.hpp"

namespace clir {

Lexicon linear_combine(const std::vector<const Lexicon*>& lexicons, const LinearCombinationConfig& config,
                       std::string resource_id)
{
    if (lexicons.empty()) {
        throw DataError("linear combination of no lexicons");
    }
    double total = 0.0;
    for (const auto& [id, w] : config.weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw DataError(fmt::format("linear combination weight for '{}' must be >= 0, got {}", id, w));
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw DataError(fmt::format("linear combination weights sum to {}, expected 1", total));
    }
    if (config.weights.size() != lexicons.size()) {
        throw DataError("linear combination weights must cover exactly the supplied lexicons");
    }
    const Direction direction = lexicons.front()->direction();
    std::map<std::string, std::map<std::string, double, std::less<>>, std::less<>> sums;
    for (const auto* lex : lexicons) {
        auto it = config.weights.find(lex->resource_id());
        if (it == config.weights.end()) {
            throw DataError("no linear combination weight for resource '" + lex->resource_id() + "'");
        }
        if (lex->direction() != direction) {
            throw DataError("linear combination mixes lexicon directions");
        }
        const double lambda = it->second;
        if (lambda == 0.0) {
            continue;
        }
        for (const auto& [source, row] : lex->table()) {
            auto& target = sums[source];
            for (const auto& t : row) {
                target[t.word] += lambda * t.prob;
            }
        }
    }
    Lexicon out(std::move(resource_id), direction);
    for (auto& [source, targets] : sums) {
        Lexicon::Row row;
        for (const auto& [word, p] : targets) {
            row.push_back({word, p});
        }
        out.set_row(source, std::move(row));
    }
    return out;
}

std::vector<LinearCombinationConfig> lambda_grid(const std::vector<std::string>& resource_ids, double step)
{
    if (resource_ids.empty()) {
        throw DataError("lambda grid over no resources");
    }
    const double units_d = 1.0 / step;
    const auto units = static_cast<int>(std::lround(units_d));
    if (!(step > 0.0) || units < 1 || std::abs(units_d - units) > 1e-9) {
        throw DataError(fmt::format("lambda grid step {} must divide 1", step));
    }
    std::vector<LinearCombinationConfig> grid;
    std::vector<int> parts(resource_ids.size(), 0);
    std::function<void(std::size_t, int)> fill = [&](std::size_t i, int left) {
        if (i + 1 == parts.size()) {
            parts[i] = left;
            LinearCombinationConfig config;
            for (std::size_t r = 0; r < parts.size(); ++r) {
                config.weights[resource_ids[r]] = static_cast<double>(parts[r]) / units;
            }
            grid.push_back(std::move(config));
            return;
        }
        for (int k = left; k >= 0; --k) {
            parts[i] = k;
            fill(i + 1, left - k);
        }
    };
    fill(0, units);
    return grid;
}

RankedCandidates lexicon_candidates(const Lexicon& lexicon, std::string_view word)
{
    RankedCandidates out;
    if (const auto* row = lexicon.find(word)) {
        for (const auto& t : *row) {
            out.push_back({t.word, t.prob, 0.0});
        }
    }
    normalize_weights(out);
    return out;
}

MethodRun run_single_resource(const RetrievalSetup& setup, const Lexicon& lexicon, std::size_t n, std::string name)
{
    return run_queries(setup, std::move(name), n, [&](const TokenizedText& words) {
        std::vector<RankedCandidates> per_word;
        per_word.reserve(words.size());
        for (const auto& w : words) {
            per_word.push_back(lexicon_candidates(lexicon, w));
        }
        return per_word;
    });
}

void LtrTranslator::check() const
{
    if (resources == nullptr || model == nullptr || context_lexicon == nullptr) {
        throw DataError("LTR translator is not fully configured");
    }
    if (model->schema_hash != resources->schema().hash()) {
        throw DataError("model schema hash does not match the configured resources");
    }
    if (model->weights.size() != resources->schema().size()) {
        throw DataError("model weight count does not match the feature schema");
    }
}

RankedCandidates LtrTranslator::translate_word(const TokenizedText& query, std::size_t position,
                                               const ContextSpec& context) const
{
    const auto& word = query[position];
    const auto pool = pool_candidates(word, resources->forward_lexicons(), pool_k);
    if (pool.empty()) {
        return {};
    }
    std::vector<ScoringInput> inputs;
    inputs.reserve(pool.size());
    for (const auto& candidate : pool) {
        inputs.push_back({candidate, extract_vector(word, candidate, context, *resources, resources->schema()).values});
    }
    return score_and_rank(*model, std::move(inputs), resources->schema().hash());
}

std::vector<RankedCandidates> LtrTranslator::translate(const TokenizedText& query) const
{
    check();
    const auto context = query_context(query, *context_lexicon, context_per_word);
    std::vector<RankedCandidates> out;
    out.reserve(query.size());
    for (std::size_t i = 0; i < query.size(); ++i) {
        out.push_back(translate_word(query, i, context));
    }
    return out;
}

MethodRun run_ltr(const RetrievalSetup& setup, const LtrTranslator& translator, std::size_t n, std::string name)
{
    translator.check();
    auto out = run_queries(setup, std::move(name), n,
                           [&](const TokenizedText& words) { return translator.translate(words); });
    out.eval.meta["pool_k"] = translator.pool_k;
    out.eval.meta["context_resource"] = translator.context_lexicon->resource_id();
    out.eval.meta["context_per_word"] = translator.context_per_word;
    return out;
}

std::vector<SelectionStep> forward_selection(const std::vector<RankList>& train, const std::vector<std::string>& labels,
                                             const ForwardSelectionOptions& options,
                                             const std::vector<RankList>* validation)
{
    const std::size_t width = labels.size();
    if (width < 2) {
        throw DataError("forward selection needs at least two features");
    }
    const std::size_t steps = options.max_steps == 0 ? width : std::min(options.max_steps, width);
    std::vector<bool> selected(width, false);
    std::vector<double> weights(width, 0.0);
    std::vector<SelectionStep> report;
    for (std::size_t step = 0; step < steps; ++step) {
        std::optional<SelectionStep> best;
        std::vector<double> best_weights;
        for (std::size_t f = 0; f < width; ++f) {
            if (selected[f]) {
                continue;
            }
            auto opts = options.trainer;
            opts.restarts = 1;
            opts.active = selected;
            opts.active[f] = true;
            opts.initial = weights;
            const auto model = train_coordinate_ascent(train, opts);
            SelectionStep candidate;
            candidate.feature = f;
            candidate.label = labels[f];
            candidate.training_map = model.meta.at("training_map").get<double>();
            candidate.metric = validation == nullptr
                                   ? candidate.training_map
                                   : mean_average_precision(*validation, model.weights, opts.normalize);
            if (!best || candidate.metric > best->metric) {
                best = candidate;
                best_weights = model.weights;
            }
        }
        selected[best->feature] = true;
        weights = std::move(best_weights);
        report.push_back(*best);
    }
    return report;
}

}  // namespace clir
