#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "clir/error.hpp"
#include "clir/features.hpp"
#include "clir/ranker.hpp"

namespace clir {

namespace {

// Lists with exactly one positive, features stored column-major.
struct PackedLists {
    std::size_t width = 0;
    std::vector<std::size_t> start;  // size lists + 1
    std::vector<std::size_t> positive;
    std::vector<std::vector<double>> columns;
    std::vector<std::vector<double>> rr;  // rr[g][t]

    [[nodiscard]] std::size_t list_count() const { return positive.size(); }
    [[nodiscard]] std::size_t candidate_count() const { return start.empty() ? 0 : start.back(); }
};

PackedLists pack(const std::vector<RankList>& lists, bool normalize)
{
    PackedLists packed;
    bool any_pair = false;
    std::size_t max_size = 1;
    for (const auto& l : lists) {
        for (const auto& c : l.candidates) {
            packed.width = std::max(packed.width, c.features.size());
        }
    }
    packed.columns.assign(packed.width, {});
    packed.start.push_back(0);
    for (const auto& l : lists) {
        const auto positives = std::count_if(l.candidates.begin(), l.candidates.end(),
                                             [](const ListCandidate& c) { return c.label > 0; });
        if (positives == 0) {
            continue;
        }
        if (positives > 1) {
            throw DataError(fmt::format("qid {}: coordinate ascent expects one positive per list, found {}", l.qid,
                                        positives));
        }
        any_pair = any_pair || l.candidates.size() > 1;
        std::vector<std::vector<double>> rows;
        for (const auto& c : l.candidates) {
            if (c.features.size() != packed.width) {
                throw DataError(fmt::format("qid {}: inconsistent feature count", l.qid));
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
        const std::size_t base = packed.start.back();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < packed.width; ++j) {
                packed.columns[j].push_back(rows[i][j]);
            }
            if (l.candidates[i].label > 0) {
                packed.positive.push_back(base + i);
            }
        }
        packed.start.push_back(base + rows.size());
        max_size = std::max(max_size, rows.size());
    }
    if (!any_pair) {
        throw DataError("coordinate ascent needs a list with both a positive and a negative candidate");
    }
    packed.rr.assign(max_size + 1, std::vector<double>(max_size + 1, 0.0));
    for (std::size_t g = 0; g <= max_size; ++g) {
        for (std::size_t t = 0; g + t <= max_size; ++t) {
            packed.rr[g][t] = expected_reciprocal_rank(g, t);
        }
    }
    return packed;
}

class Optimizer {
  public:
    Optimizer(const PackedLists& data, const CoordinateAscentOptions& options)
        : data_(data), options_(options), scores_(data.candidate_count(), 0.0)
    {}

    void set_weights(std::vector<double> w)
    {
        weights_ = std::move(w);
        recompute_scores();
    }

    [[nodiscard]] const std::vector<double>& weights() const { return weights_; }

    [[nodiscard]] double metric() const
    {
        double sum = 0.0;
        for (std::size_t l = 0; l < data_.list_count(); ++l) {
            sum += list_rr(l);
        }
        return sum / static_cast<double>(data_.list_count());
    }

    /// Best value for coordinate j with the others fixed. Returns the new
    /// weight and metric, or nullopt when no interval beats the current
    /// metric by more than epsilon.
    std::optional<std::pair<double, double>> line_search(std::size_t j, double current_metric)
    {
        const auto& x = data_.columns[j];
        const double lo = options_.min_weight;
        const double hi = options_.max_weight;
        const double wj = weights_[j];
        events_.clear();
        beaten_.assign(data_.list_count(), 0);
        tied_.assign(data_.list_count(), 0);

        for (std::size_t l = 0; l < data_.list_count(); ++l) {
            const std::size_t p = data_.positive[l];
            const double ap = scores_[p] - wj * x[p];
            for (std::size_t c = data_.start[l]; c < data_.start[l + 1]; ++c) {
                if (c == p) {
                    continue;
                }
                const double alpha = (scores_[c] - wj * x[c]) - ap;
                const double beta = x[c] - x[p];
                if (beta == 0.0) {
                    if (alpha > 0.0) {
                        ++beaten_[l];
                    } else if (alpha == 0.0) {
                        ++tied_[l];
                    }
                    continue;
                }
                const double crossing = -alpha / beta;
                if (crossing <= lo) {
                    beaten_[l] += beta > 0.0 ? 1 : 0;
                } else if (crossing >= hi) {
                    beaten_[l] += beta < 0.0 ? 1 : 0;
                } else {
                    beaten_[l] += beta < 0.0 ? 1 : 0;
                    events_.push_back({crossing, static_cast<std::uint32_t>(l), beta > 0.0 ? 1 : -1});
                }
            }
        }
        std::sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) { return a.at < b.at; });

        double sum = 0.0;
        for (std::size_t l = 0; l < data_.list_count(); ++l) {
            sum += data_.rr[beaten_[l]][tied_[l]];
        }
        const double n = static_cast<double>(data_.list_count());

        // Open intervals between consecutive crossings; remember the best.
        double best_sum = sum;
        double best_lo = lo;
        double best_hi = events_.empty() ? hi : events_.front().at;
        bool best_contains_current = best_lo <= wj && wj < best_hi;
        std::size_t e = 0;
        while (e < events_.size()) {
            const double at = events_[e].at;
            while (e < events_.size() && events_[e].at == at) {
                const auto l = events_[e].list;
                sum -= data_.rr[beaten_[l]][tied_[l]];
                beaten_[l] = static_cast<std::size_t>(static_cast<long long>(beaten_[l]) + events_[e].delta);
                sum += data_.rr[beaten_[l]][tied_[l]];
                ++e;
            }
            const double next = e < events_.size() ? events_[e].at : hi;
            const bool contains_current = at < wj && wj < next;
            const double tol = 1e-12 * n;
            if (sum > best_sum + tol || (std::abs(sum - best_sum) <= tol && contains_current && !best_contains_current)) {
                best_sum = sum;
                best_lo = at;
                best_hi = next;
                best_contains_current = contains_current;
            }
        }
        const double best_metric = best_sum / n;
        if (best_contains_current || !(best_metric > current_metric + options_.epsilon)) {
            return std::nullopt;
        }
        return std::make_pair(0.5 * (best_lo + best_hi), best_metric);
    }

    void set_coordinate(std::size_t j, double value)
    {
        weights_[j] = value;
        recompute_scores();
    }

  private:
    struct Event {
        double at;
        std::uint32_t list;
        int delta;
    };

    void recompute_scores()
    {
        std::fill(scores_.begin(), scores_.end(), 0.0);
        for (std::size_t j = 0; j < data_.width; ++j) {
            const double w = weights_[j];
            if (w == 0.0) {
                continue;
            }
            const auto& col = data_.columns[j];
            for (std::size_t c = 0; c < scores_.size(); ++c) {
                scores_[c] += w * col[c];
            }
        }
    }

    [[nodiscard]] double list_rr(std::size_t l) const
    {
        const std::size_t p = data_.positive[l];
        std::size_t beaten = 0;
        std::size_t tied = 0;
        for (std::size_t c = data_.start[l]; c < data_.start[l + 1]; ++c) {
            if (c == p) {
                continue;
            }
            if (scores_[c] > scores_[p]) {
                ++beaten;
            } else if (scores_[c] == scores_[p]) {
                ++tied;
            }
        }
        return data_.rr[beaten][tied];
    }

    const PackedLists& data_;
    const CoordinateAscentOptions& options_;
    std::vector<double> weights_;
    std::vector<double> scores_;
    std::vector<Event> events_;
    std::vector<std::size_t> beaten_;
    std::vector<std::size_t> tied_;
};

}  // namespace

RankingModel train_coordinate_ascent(const std::vector<RankList>& lists, const CoordinateAscentOptions& options,
                                     std::string schema_hash, CoordinateAscentTrace* trace)
{
    if (options.restarts < 1) {
        throw DataError("coordinate ascent needs at least one restart");
    }
    if (!(options.min_weight < options.max_weight)) {
        throw DataError("coordinate ascent weight range is empty");
    }
    const PackedLists data = pack(lists, options.normalize);
    const std::size_t width = data.width;

    std::vector<bool> active = options.active;
    if (active.empty()) {
        active.assign(width, true);
    }
    if (active.size() != width) {
        throw DataError("coordinate ascent: active mask length does not match feature count");
    }
    const auto active_count = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
    if (!options.initial.empty() && options.initial.size() != width) {
        throw DataError("coordinate ascent: initial weights length does not match feature count");
    }
    // Columns that are constant everywhere cannot change any ordering.
    std::vector<bool> informative(width, false);
    for (std::size_t j = 0; j < width; ++j) {
        const auto& col = data.columns[j];
        informative[j] = std::any_of(col.begin(), col.end(), [&](double v) { return v != col.front(); });
    }

    std::vector<double> best_weights;
    double best_metric = -1.0;
    std::vector<double> best_trajectory;
    std::size_t best_restart = 0;
    std::size_t best_cycles = 0;

    Optimizer opt(data, options);
    for (std::size_t r = 0; r < options.restarts; ++r) {
        std::vector<double> w(width, 0.0);
        if (r == 0) {
            if (!options.initial.empty()) {
                w = options.initial;
            } else {
                for (std::size_t j = 0; j < width; ++j) {
                    w[j] = active[j] ? 1.0 / static_cast<double>(std::max<std::size_t>(active_count, 1)) : 0.0;
                }
            }
        } else {
            std::mt19937_64 rng(options.seed + r);
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            for (std::size_t j = 0; j < width; ++j) {
                const double v = dist(rng);
                w[j] = active[j] ? v : 0.0;
            }
        }
        for (std::size_t j = 0; j < width; ++j) {
            if (!active[j]) {
                w[j] = 0.0;
            }
        }
        opt.set_weights(w);
        double metric = opt.metric();
        std::vector<double> trajectory{metric};

        std::size_t cycles = 0;
        for (; cycles < options.max_cycles; ++cycles) {
            bool moved = false;
            for (std::size_t j = 0; j < width; ++j) {
                if (!active[j] || !informative[j]) {
                    continue;
                }
                if (auto step = opt.line_search(j, metric)) {
                    opt.set_coordinate(j, step->first);
                    // Score from scratch; the sweep value can differ in the last bits.
                    const double updated = opt.metric();
                    if (updated > metric) {
                        metric = updated;
                        trajectory.push_back(metric);
                        moved = true;
                    } else {
                        opt.set_coordinate(j, w[j]);
                    }
                }
                w = opt.weights();
            }
            if (!moved) {
                break;
            }
        }
        if (metric > best_metric) {
            best_metric = metric;
            best_weights = opt.weights();
            best_trajectory = std::move(trajectory);
            best_restart = r;
            best_cycles = cycles;
        }
    }

    RankingModel model;
    model.weights = std::move(best_weights);
    model.schema_hash = std::move(schema_hash);
    model.trainer = "coordinate_ascent";
    model.normalize = options.normalize;
    model.meta = {{"restarts", options.restarts},
                  {"epsilon", options.epsilon},
                  {"weight_range", {options.min_weight, options.max_weight}},
                  {"line_search", "exact_breakpoint_sweep"},
                  {"seed", options.seed},
                  {"best_restart", best_restart},
                  {"iterations", best_cycles},
                  {"training_map", best_metric},
                  {"training_mrr", best_metric},
                  {"lists", data.list_count()}};
    if (trace != nullptr) {
        trace->accepted = std::move(best_trajectory);
        trace->best_restart = best_restart;
    }
    return model;
}

}  // namespace clir
