#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clir/retrieval.hpp"

namespace clir {

struct EvalResult {
    /// Per-query values over the evaluated queries, keyed by qid.
    std::map<std::string, double, std::less<>> ap;
    std::map<std::string, double, std::less<>> p5;
    std::map<std::string, double, std::less<>> p10;
    double map = 0.0;
    double p_at_5 = 0.0;
    double p_at_10 = 0.0;
    std::size_t oov = 0;
    /// Qrels queries without any relevant document; not evaluated.
    std::size_t excluded_queries = 0;
    nlohmann::json meta = nlohmann::json::object();

    friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

/// Average precision of a ranking against a relevant set.
[[nodiscard]] double average_precision(std::span<const SearchHit> ranking,
                                       const std::map<std::string, int, std::less<>>& judged);

/// Fraction of the first k hits that are relevant (divides by k).
[[nodiscard]] double precision_at(std::span<const SearchHit> ranking,
                                  const std::map<std::string, int, std::less<>>& judged, std::size_t k);

/// Evaluates every qrels query that has a relevant document; queries absent
/// from the run score 0. Throws DataError when the run names a qid that the
/// qrels do not know.
[[nodiscard]] EvalResult evaluate(const Run& run, const Qrels& qrels);

[[nodiscard]] nlohmann::json to_json(const EvalResult& result);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Two-sided paired t-test on a - b. Throws DataError for fewer than two
/// pairs, unequal lengths, or all differences zero ("degenerate").
[[nodiscard]] TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

/// Per-query AP of two results on their common queries, in qid order.
[[nodiscard]] TTestResult paired_ttest(const EvalResult& a, const EvalResult& b);

}  // namespace clir
