#include "clir/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "clir/error.hpp"

namespace clir {

namespace {

bool relevant(const std::map<std::string, int, std::less<>>& judged, std::string_view doc)
{
    auto it = judged.find(doc);
    return it != judged.end() && it->second > 0;
}

double mean_of(const std::map<std::string, double, std::less<>>& values)
{
    double sum = 0.0;
    for (const auto& [qid, v] : values) {
        sum += v;
    }
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace

double average_precision(std::span<const SearchHit> ranking, const std::map<std::string, int, std::less<>>& judged)
{
    const auto total = std::count_if(judged.begin(), judged.end(), [](const auto& j) { return j.second > 0; });
    if (total == 0) {
        return 0.0;
    }
    double hits = 0.0;
    double sum = 0.0;
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        if (relevant(judged, ranking[r].doc_id)) {
            hits += 1.0;
            sum += hits / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(total);
}

double precision_at(std::span<const SearchHit> ranking, const std::map<std::string, int, std::less<>>& judged,
                    std::size_t k)
{
    if (k == 0) {
        throw DataError("precision_at: k must be at least 1");
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < std::min(k, ranking.size()); ++r) {
        hits += relevant(judged, ranking[r].doc_id) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

EvalResult evaluate(const Run& run, const Qrels& qrels)
{
    for (const auto& [qid, hits] : run) {
        if (!qrels.contains(qid)) {
            throw DataError("run contains query '" + qid + "' that has no relevance judgments");
        }
    }
    EvalResult result;
    const std::vector<SearchHit> empty;
    for (const auto& [qid, judged] : qrels) {
        const bool any = std::any_of(judged.begin(), judged.end(), [](const auto& j) { return j.second > 0; });
        if (!any) {
            ++result.excluded_queries;
            continue;
        }
        auto it = run.find(qid);
        const auto& hits = it == run.end() ? empty : it->second;
        result.ap[qid] = average_precision(hits, judged);
        result.p5[qid] = precision_at(hits, judged, 5);
        result.p10[qid] = precision_at(hits, judged, 10);
    }
    result.map = mean_of(result.ap);
    result.p_at_5 = mean_of(result.p5);
    result.p_at_10 = mean_of(result.p10);
    return result;
}

nlohmann::json to_json(const EvalResult& result)
{
    nlohmann::json per_query = nlohmann::json::object();
    for (const auto& [qid, ap] : result.ap) {
        per_query[qid] = {{"ap", ap}, {"p5", result.p5.at(qid)}, {"p10", result.p10.at(qid)}};
    }
    return {{"map", result.map},
            {"p5", result.p_at_5},
            {"p10", result.p_at_10},
            {"oov", result.oov},
            {"queries", result.ap.size()},
            {"excluded_queries", result.excluded_queries},
            {"per_query", per_query},
            {"meta", result.meta}};
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DataError(fmt::format("paired t-test: {} vs {} values", a.size(), b.size()));
    }
    if (a.size() < 2) {
        throw DataError("paired t-test needs at least two pairs");
    }
    const auto n = static_cast<double>(a.size());
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d[i] = a[i] - b[i];
    }
    if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; })) {
        throw DataError("paired t-test is degenerate: all differences are zero");
    }
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : d) {
        ss += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    TTestResult r;
    r.df = n - 1.0;
    if (sd == 0.0) {
        r.t = mean > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.t = mean / (sd / std::sqrt(n));
    const boost::math::students_t dist(r.df);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    return r;
}

TTestResult paired_ttest(const EvalResult& a, const EvalResult& b)
{
    std::vector<double> va;
    std::vector<double> vb;
    for (const auto& [qid, ap] : a.ap) {
        auto it = b.ap.find(qid);
        if (it != b.ap.end()) {
            va.push_back(ap);
            vb.push_back(it->second);
        }
    }
    return paired_ttest(va, vb);
}

}  // namespace clir
