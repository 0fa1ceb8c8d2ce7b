#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "clir/features.hpp"
#include "clir/ranklist.hpp"

namespace clir {

/// LETOR-style training file contents.
struct TrainingFile {
    std::string schema_version;
    std::string schema_hash;
    std::size_t feature_count = 0;
    std::vector<RankList> lists;
};

/// Writes `label qid:<q> 1:<v> ... #src=<w> tgt=<w>` lines ordered by qid,
/// after a header comment naming the schema. Throws DataError when a
/// candidate's vector does not match the schema.
void write_training_file(const std::vector<RankList>& lists, const FeatureSchema& schema,
                         const std::filesystem::path& path);

[[nodiscard]] TrainingFile read_training_file(const std::filesystem::path& path);

}  // namespace clir
