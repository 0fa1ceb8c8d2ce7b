#include "clir/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "clir/error.hpp"
#include "clir/features.hpp"

namespace clir {

namespace {

std::vector<double> list_scores(const RankList& list, std::span<const double> weights, bool normalize)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(list.candidates.size());
    for (const auto& c : list.candidates) {
        if (c.features.size() != weights.size()) {
            throw DataError(fmt::format("qid {}: {} features, model has {} weights", list.qid, c.features.size(),
                                        weights.size()));
        }
        rows.push_back(c.features);
    }
    if (normalize) {
        std::vector<std::vector<double>*> ptrs;
        for (auto& r : rows) {
            ptrs.push_back(&r);
        }
        normalize_rows(ptrs);
    }
    std::vector<double> scores;
    scores.reserve(rows.size());
    for (const auto& r : rows) {
        scores.push_back(std::inner_product(r.begin(), r.end(), weights.begin(), 0.0));
    }
    return scores;
}

}  // namespace

nlohmann::json to_json(const RankingModel& model)
{
    nlohmann::json meta = model.meta.is_object() ? model.meta : nlohmann::json::object();
    meta["normalization"] = model.normalize ? "list_minmax" : "none";
    return {{"schema_hash", model.schema_hash}, {"trainer", model.trainer}, {"weights", model.weights}, {"meta", meta}};
}

RankingModel model_from_json(const nlohmann::json& j)
{
    try {
        RankingModel model;
        model.schema_hash = j.at("schema_hash").get<std::string>();
        model.trainer = j.at("trainer").get<std::string>();
        model.weights = j.at("weights").get<std::vector<double>>();
        model.meta = j.value("meta", nlohmann::json::object());
        model.normalize = model.meta.value("normalization", std::string("list_minmax")) != "none";
        for (double w : model.weights) {
            if (!std::isfinite(w)) {
                throw DataError("model weights must be finite");
            }
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model: ") + e.what());
    }
}

void write_model(const RankingModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << to_json(model).dump(2) << '\n';
}

RankingModel read_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    try {
        return model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

double expected_reciprocal_rank(std::size_t beaten_by, std::size_t tied_with)
{
    double total = 0.0;
    for (std::size_t r = beaten_by + 1; r <= beaten_by + tied_with + 1; ++r) {
        total += 1.0 / static_cast<double>(r);
    }
    return total / static_cast<double>(tied_with + 1);
}

std::optional<double> list_average_precision(std::span<const double> scores, std::span<const int> labels)
{
    const auto positives = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l > 0; }));
    if (positives == 0) {
        return std::nullopt;
    }
    if (positives == 1) {
        const auto p = static_cast<std::size_t>(std::find_if(labels.begin(), labels.end(), [](int l) { return l > 0; })
                                                - labels.begin());
        std::size_t beaten = 0;
        std::size_t tied = 0;
        for (std::size_t c = 0; c < scores.size(); ++c) {
            if (c == p) {
                continue;
            }
            if (scores[c] > scores[p]) {
                ++beaten;
            } else if (scores[c] == scores[p]) {
                ++tied;
            }
        }
        return expected_reciprocal_rank(beaten, tied);
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double hits = 0.0;
    double sum = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (labels[order[r]] > 0) {
            hits += 1.0;
            sum += hits / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(positives);
}

double mean_average_precision(const std::vector<RankList>& lists, std::span<const double> weights, bool normalize)
{
    double total = 0.0;
    std::size_t counted = 0;
    std::vector<int> labels;
    for (const auto& list : lists) {
        auto scores = list_scores(list, weights, normalize);
        labels.clear();
        for (const auto& c : list.candidates) {
            labels.push_back(c.label);
        }
        if (auto ap = list_average_precision(scores, labels)) {
            total += *ap;
            ++counted;
        }
    }
    return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

std::size_t pair_violations(const std::vector<RankList>& lists, std::span<const double> weights, bool normalize)
{
    std::size_t violations = 0;
    for (const auto& list : lists) {
        auto scores = list_scores(list, weights, normalize);
        for (std::size_t p = 0; p < scores.size(); ++p) {
            if (list.candidates[p].label <= 0) {
                continue;
            }
            for (std::size_t n = 0; n < scores.size(); ++n) {
                if (list.candidates[n].label <= 0 && scores[p] <= scores[n]) {
                    ++violations;
                }
            }
        }
    }
    return violations;
}

RankingModel train_pairwise_hinge(const std::vector<RankList>& lists, const PairwiseHingeOptions& options,
                                  std::string schema_hash)
{
    std::size_t width = 0;
    bool any_pair = false;
    for (const auto& l : lists) {
        bool pos = false;
        bool neg = false;
        for (const auto& c : l.candidates) {
            width = std::max(width, c.features.size());
            pos = pos || c.label > 0;
            neg = neg || c.label <= 0;
        }
        any_pair = any_pair || (pos && neg);
    }
    if (!any_pair) {
        throw DataError("pairwise training needs a list with both a positive and a negative candidate");
    }

    // Pair differences x_pos - x_neg per list, on normalized features.
    struct ListPairs {
        std::vector<std::vector<double>> diffs;
    };
    std::vector<ListPairs> data;
    for (const auto& l : lists) {
        std::vector<std::vector<double>> rows;
        for (const auto& c : l.candidates) {
            if (c.features.size() != width) {
                throw DataError(fmt::format("qid {}: inconsistent feature count", l.qid));
            }
            rows.push_back(c.features);
        }
        if (options.normalize) {
            std::vector<std::vector<double>*> ptrs;
            for (auto& r : rows) {
                ptrs.push_back(&r);
            }
            normalize_rows(ptrs);
        }
        ListPairs lp;
        for (std::size_t p = 0; p < rows.size(); ++p) {
            if (l.candidates[p].label <= 0) {
                continue;
            }
            for (std::size_t n = 0; n < rows.size(); ++n) {
                if (l.candidates[n].label > 0) {
                    continue;
                }
                std::vector<double> d(width);
                for (std::size_t j = 0; j < width; ++j) {
                    d[j] = rows[p][j] - rows[n][j];
                }
                lp.diffs.push_back(std::move(d));
            }
        }
        if (!lp.diffs.empty()) {
            data.push_back(std::move(lp));
        }
    }

    std::vector<double> w(width, 0.0);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(options.seed);
    std::vector<double> grad(width);
    double loss = 0.0;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        loss = 0.0;
        for (auto idx : order) {
            const auto& lp = data[idx];
            const double pair_weight = 1.0 / static_cast<double>(lp.diffs.size());
            std::fill(grad.begin(), grad.end(), 0.0);
            for (const auto& d : lp.diffs) {
                const double margin = std::inner_product(d.begin(), d.end(), w.begin(), 0.0);
                if (margin < 1.0) {
                    loss += pair_weight * (1.0 - margin);
                    for (std::size_t j = 0; j < width; ++j) {
                        grad[j] += pair_weight * d[j];
                    }
                }
            }
            const double shrink = 1.0 / (1.0 + options.learning_rate * options.reg);
            for (std::size_t j = 0; j < width; ++j) {
                w[j] = (w[j] + options.learning_rate * grad[j]) * shrink;
            }
        }
        const bool weights_finite = std::all_of(w.begin(), w.end(), [](double x) { return std::isfinite(x); });
        if (!std::isfinite(loss) || !weights_finite) {
            throw DataError(fmt::format("pairwise hinge diverged at epoch {} (learning_rate={}, reg={})", epoch + 1,
                                        options.learning_rate, options.reg));
        }
    }

    RankingModel model;
    model.weights = std::move(w);
    model.schema_hash = std::move(schema_hash);
    model.trainer = "pairwise_hinge";
    model.normalize = options.normalize;
    model.meta = {{"epochs", options.epochs},
                  {"learning_rate", options.learning_rate},
                  {"reg", options.reg},
                  {"seed", options.seed},
                  {"final_epoch_loss", loss},
                  {"training_map", mean_average_precision(lists, model.weights, model.normalize)}};
    return model;
}

RankedCandidates score_and_rank(const RankingModel& model, std::vector<ScoringInput> candidates,
                                std::string_view schema_hash)
{
    if (model.schema_hash != schema_hash) {
        throw DataError("model schema hash does not match the feature schema");
    }
    if (candidates.empty()) {
        return {};
    }
    std::vector<std::vector<double>*> rows;
    for (auto& c : candidates) {
        if (c.features.size() != model.weights.size()) {
            throw DataError(fmt::format("candidate '{}' has {} features, model has {} weights", c.word,
                                        c.features.size(), model.weights.size()));
        }
        rows.push_back(&c.features);
    }
    if (model.normalize) {
        normalize_rows(rows);
    }
    RankedCandidates ranked;
    ranked.reserve(candidates.size());
    for (auto& c : candidates) {
        double s = std::inner_product(c.features.begin(), c.features.end(), model.weights.begin(), 0.0);
        ranked.push_back({std::move(c.word), s, 0.0});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.word < b.word;
    });
    if (ranked.front().score < 0.0) {
        ranked.resize(1);
        ranked.front().weight = 1.0;
        return ranked;
    }
    std::erase_if(ranked, [](const RankedCandidate& c) { return c.score < 0.0; });
    normalize_weights(ranked);
    return ranked;
}

void normalize_weights(RankedCandidates& ranked)
{
    double total = 0.0;
    for (const auto& c : ranked) {
        total += c.score;
    }
    for (auto& c : ranked) {
        c.weight = total > 0.0 ? c.score / total : 1.0 / static_cast<double>(ranked.size());
    }
}

RankedCandidates top_n(RankedCandidates ranked, std::size_t n)
{
    if (n < 1) {
        throw DataError("top_n: n must be at least 1");
    }
    if (ranked.size() > n) {
        ranked.resize(n);
    }
    double total = 0.0;
    for (const auto& c : ranked) {
        total += c.weight;
    }
    for (auto& c : ranked) {
        c.weight = total > 0.0 ? c.weight / total : 1.0 / static_cast<double>(ranked.size());
    }
    return ranked;
}

}  // namespace clir
