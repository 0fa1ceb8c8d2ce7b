#include "clir/training_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/os.h>

#include "clir/error.hpp"

namespace clir {

namespace {

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

void write_training_file(const std::vector<RankList>& lists, const FeatureSchema& schema,
                         const std::filesystem::path& path)
{
    std::vector<const RankList*> ordered;
    for (const auto& l : lists) {
        for (const auto& c : l.candidates) {
            if (c.features.size() != schema.size()) {
                throw DataError(fmt::format("qid {} candidate '{}' has {} features, schema has {}", l.qid, c.word,
                                            c.features.size(), schema.size()));
            }
        }
        ordered.push_back(&l);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const RankList* a, const RankList* b) { return a->qid < b->qid; });

    auto out = fmt::output_file(path.string());
    out.print("# clir-training schema={} hash={} features={}\n", schema.version(), schema.hash(), schema.size());
    std::string line;
    for (const auto* l : ordered) {
        for (const auto& c : l->candidates) {
            line = fmt::format("{} qid:{}", c.label, l->qid);
            for (std::size_t j = 0; j < c.features.size(); ++j) {
                line += fmt::format(" {}:{:.17g}", j + 1, c.features[j]);
            }
            line += fmt::format(" #src={} tgt={}\n", l->source_word, c.word);
            out.print("{}", line);
        }
    }
}

TrainingFile read_training_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    TrainingFile file;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line) || !line.starts_with("# clir-training ")) {
        throw ParseError(path.string(), 1, "missing '# clir-training' header");
    }
    ++lineno;
    {
        std::istringstream header(line.substr(16));
        std::string field;
        while (header >> field) {
            if (field.starts_with("schema=")) {
                file.schema_version = field.substr(7);
            } else if (field.starts_with("hash=")) {
                file.schema_hash = field.substr(5);
            } else if (field.starts_with("features=") && !parse_number(field.substr(9), file.feature_count)) {
                throw ParseError(path.string(), lineno, "bad feature count");
            }
        }
    }

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto hash = line.find(" #src=");
        auto tgt = hash == std::string::npos ? std::string::npos : line.find(" tgt=", hash + 6);
        if (tgt == std::string::npos) {
            throw ParseError(path.string(), lineno, "missing '#src=<word> tgt=<word>' comment");
        }
        std::string source = line.substr(hash + 6, tgt - hash - 6);
        ListCandidate candidate;
        candidate.word = line.substr(tgt + 5);
        candidate.features.assign(file.feature_count, 0.0);

        std::istringstream fields(line.substr(0, hash));
        std::string field;
        if (!(fields >> field) || !parse_number(field, candidate.label)) {
            throw ParseError(path.string(), lineno, "bad label");
        }
        int qid = 0;
        if (!(fields >> field) || !field.starts_with("qid:") || !parse_number(std::string_view(field).substr(4), qid)) {
            throw ParseError(path.string(), lineno, "bad qid");
        }
        while (fields >> field) {
            auto colon = field.find(':');
            std::size_t index = 0;
            double value = 0.0;
            if (colon == std::string::npos || !parse_number(std::string_view(field).substr(0, colon), index)
                || !parse_number(std::string_view(field).substr(colon + 1), value) || index == 0) {
                throw ParseError(path.string(), lineno, "bad feature '" + field + "'");
            }
            if (index > candidate.features.size()) {
                candidate.features.resize(index, 0.0);
            }
            candidate.features[index - 1] = value;
        }
        if (file.lists.empty() || file.lists.back().qid != qid) {
            file.lists.push_back({qid, source, {}});
        }
        file.lists.back().candidates.push_back(std::move(candidate));
    }
    return file;
}

}  // namespace clir
