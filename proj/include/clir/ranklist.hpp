#pragma once

#include <string>
#include <vector>

namespace clir {

struct ListCandidate {
    std::string word;
    int label = 0;
    std::vector<double> features;

    friend bool operator==(const ListCandidate&, const ListCandidate&) = default;
};

/// Candidate list of one source word occurrence: the unit a ranker trains on.
struct RankList {
    int qid = 0;
    std::string source_word;
    std::vector<ListCandidate> candidates;

    friend bool operator==(const RankList&, const RankList&) = default;
};

}  // namespace clir
