#pragma once

// Slow, independent re-implementations used as test oracles. None of these
// call into the library beyond plain data types.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Words = std::vector<std::string>;
using Table = std::map<std::string, std::map<std::string, double>>;

/// ASCII-only tokenizer: letters are lowercased, digits and symbol
/// characters ($+<=>^`|~) kept, whitespace and punctuation split.
Words tokenize_ascii(const std::string& text);

struct Model1Result {
    Table table;
    /// Before every iteration plus once after the last.
    std::vector<double> log_likelihood;
};

/// Textbook IBM Model 1 EM with string-keyed maps, uniform 1/|V_target| start.
Model1Result model1(const std::vector<std::pair<Words, Words>>& corpus, std::size_t iterations, bool use_null);

struct Hit {
    std::string id;
    double score = 0.0;
};

/// Scores every document separately and sorts; documents without a query
/// term are left out.
std::vector<Hit> bm25(const std::vector<std::pair<std::string, Words>>& docs,
                      const std::vector<std::pair<std::string, double>>& query, double k1, double b);

/// Sum of precision at each relevant rank over the relevant count.
double average_precision(const std::vector<std::string>& ranking, const std::set<std::string>& relevant);
double precision_at(const std::vector<std::string>& ranking, const std::set<std::string>& relevant, std::size_t k);

/// Mean of 1/rank of the positive over all orderings of the tied group.
double expected_reciprocal_rank(std::size_t beaten_by, std::size_t tied_with);

/// Document PMI counted directly from the raw documents.
double pmi(const std::vector<Words>& docs, const std::string& a, const std::string& b);

/// Cross-lingual PMI counted directly from aligned (source, target) documents.
double clpmi(const std::vector<std::pair<Words, Words>>& aligned, const std::string& s, const std::string& t);

/// Sample mean / standard deviation t statistic of paired differences.
double paired_t(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace oracle
