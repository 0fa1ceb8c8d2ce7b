#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clir/features.hpp"
#include "clir/labeling.hpp"
#include "clir/lexicon.hpp"
#include "clir/ranker.hpp"
#include "clir/retrieval.hpp"

namespace clir {

struct ResourceConfig {
    std::string id;
    ResourceKind kind = ResourceKind::Parallel;
    /// Parallel corpus or dictionary file.
    std::filesystem::path path;
    /// Comparable corpus files.
    std::filesystem::path source;
    std::filesystem::path target;
    std::filesystem::path alignments;
};

struct LexiconBuildOptions {
    Model1Options model1;
    std::size_t top_k = 20;
    double min_prob = 0.001;
};

struct ExperimentConfig {
    /// Directory that relative paths are resolved against.
    std::filesystem::path root;
    std::uint64_t seed = 1;
    std::string trainer = "coordinate_ascent";
    /// Resource whose translations form the query-time target context; the
    /// best single resource when empty.
    std::string context_resource;
    std::size_t pool_k = 10;
    std::filesystem::path output = "out";
    LexiconBuildOptions lexicon;
    std::filesystem::path labeling_corpus;
    Validation validation = Validation::Any;
    std::filesystem::path heldout;
    std::filesystem::path heldout_gold;
    std::filesystem::path documents;
    std::filesystem::path topics;
    std::filesystem::path qrels;
    Bm25Params bm25;
    std::size_t depth = 1000;
    double lambda_step = 0.1;
    /// Top-N per method: dictionary, comparable, parallel, linear, ltr.
    std::map<std::string, std::size_t, std::less<>> n = {
        {"dictionary", 6}, {"comparable", 3}, {"parallel", 5}, {"linear", 5}, {"ltr", 5}};
    /// When non-empty, every method picks its MAP-best N from this list
    /// (smallest on ties) instead of using the fixed value above.
    std::vector<std::size_t> n_sweep;
    CoordinateAscentOptions coordinate_ascent;
    PairwiseHingeOptions pairwise_hinge;
    std::vector<ResourceConfig> resources;

    [[nodiscard]] std::filesystem::path resolve(const std::filesystem::path& p) const;
    [[nodiscard]] std::size_t n_for(ResourceKind kind) const;
    /// Normalized view of every setting, recorded in manifests.
    [[nodiscard]] nlohmann::json snapshot() const;
};

/// Parses an INI/TOML-style `key = value` file with `[section]` headers and
/// `[resource.<id>]` blocks. Unknown sections or keys are rejected.
[[nodiscard]] ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Loads one resource and builds its lexicons and statistics.
[[nodiscard]] Resource build_resource(const ResourceConfig& config, const LexiconBuildOptions& options,
                                      const std::filesystem::path& root = {});

/// Runs every method and writes artifacts under `config.output`. Returns the
/// manifest that was written to `manifest.json`.
nlohmann::json run_experiment(const ExperimentConfig& config, unsigned threads = 1, std::ostream* log = nullptr);

}  // namespace clir
