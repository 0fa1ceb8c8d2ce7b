#include "clir/experiment.hpp"

#include <fstream>
#include <ostream>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "clir/error.hpp"
#include "clir/evaluation.hpp"
#include "clir/hash.hpp"
#include "clir/pipeline.hpp"
#include "clir/training_file.hpp"

namespace clir {

namespace {

namespace pt = boost::property_tree;

std::string unquote(std::string s)
{
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

/// Typed access to one section, remembering which keys were consumed.
class Section {
  public:
    Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

    [[nodiscard]] std::string text(const std::string& key, std::string fallback)
    {
        used_.insert(key);
        auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        return v ? unquote(*v) : fallback;
    }

    [[nodiscard]] std::string required(const std::string& key)
    {
        auto v = text(key, "");
        if (v.empty()) {
            throw DataError(fmt::format("config: [{}] needs '{}'", name_, key));
        }
        return v;
    }

    template <typename T>
    [[nodiscard]] T number(const std::string& key, T fallback)
    {
        const auto raw = text(key, "");
        if (raw.empty()) {
            return fallback;
        }
        try {
            std::size_t used = 0;
            T value{};
            if constexpr (std::is_floating_point_v<T>) {
                value = static_cast<T>(std::stod(raw, &used));
            } else {
                const long long parsed = std::stoll(raw, &used);
                if (parsed < 0) {
                    throw std::invalid_argument("negative");
                }
                value = static_cast<T>(parsed);
            }
            if (used != raw.size()) {
                throw std::invalid_argument("trailing characters");
            }
            return value;
        } catch (const std::exception&) {
            throw DataError(fmt::format("config: [{}] {} = '{}' is not a valid number", name_, key, raw));
        }
    }

    [[nodiscard]] bool flag(const std::string& key, bool fallback)
    {
        const auto raw = text(key, "");
        if (raw.empty()) {
            return fallback;
        }
        if (raw == "true") {
            return true;
        }
        if (raw == "false") {
            return false;
        }
        throw DataError(fmt::format("config: [{}] {} must be true or false", name_, key));
    }

    void finish() const
    {
        for (const auto& [key, value] : tree_) {
            if (!used_.contains(key)) {
                throw DataError(fmt::format("config: unknown key '{}' in [{}]", key, name_));
            }
        }
    }

  private:
    std::string name_;
    const pt::ptree& tree_;
    std::set<std::string> used_;
};

/// Comma-separated positive counts, e.g. "1, 2, 5".
std::vector<std::size_t> parse_counts(const std::string& text)
{
    std::vector<std::size_t> out;
    if (text.empty()) {
        return out;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        const auto v = first == std::string::npos ? std::string() : item.substr(first, last - first + 1);
        std::size_t used = 0;
        long long parsed = 0;
        try {
            parsed = std::stoll(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (v.empty() || used != v.size() || parsed < 1) {
            throw DataError(fmt::format("config: [n] sweep entry '{}' is not a positive count", v));
        }
        out.push_back(static_cast<std::size_t>(parsed));
    }
    return out;
}

void log_line(std::ostream* log, const std::string& message)
{
    if (log != nullptr) {
        *log << message << '\n';
    }
}

std::string rel(const std::filesystem::path& p) { return p.generic_string(); }

nlohmann::json ttest_json(const EvalResult& a, const EvalResult& b)
{
    try {
        const auto r = paired_ttest(a, b);
        nlohmann::json j = {{"t", r.t}, {"df", r.df}, {"p", r.p}, {"mean_diff", a.map - b.map}};
        j["significant_0.05"] = r.p < 0.05;
        j["significant_0.005"] = r.p < 0.005;
        return j;
    } catch (const DataError& e) {
        return {{"error", e.what()}, {"mean_diff", a.map - b.map}};
    }
}

struct GoldEntry {
    std::size_t line = 0;
    std::string source;
    std::string target;
};

std::vector<GoldEntry> load_gold(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<GoldEntry> gold;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        GoldEntry g;
        try {
            if (t2 == std::string::npos) {
                throw std::invalid_argument("fields");
            }
            g.line = std::stoul(line.substr(0, t1));
        } catch (const std::exception&) {
            throw ParseError(path.string(), lineno, "expected 'line<TAB>source<TAB>target'");
        }
        g.source = tokenize(line.substr(t1 + 1, t2 - t1 - 1)).joined();
        g.target = tokenize(line.substr(t2 + 1)).joined();
        gold.push_back(std::move(g));
    }
    return gold;
}

std::vector<TokenizedText> load_source_lines(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<TokenizedText> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(tokenize(line.substr(0, line.find('\t'))));
    }
    return lines;
}

/// Copy of `lex` restricted to the given source words.
Lexicon restrict_rows(const Lexicon& lex, const std::set<std::string, std::less<>>& words)
{
    Lexicon out(lex.resource_id(), lex.direction());
    for (const auto& w : words) {
        if (const auto* row = lex.find(w)) {
            out.set_row(w, *row);
        }
    }
    return out;
}

}  // namespace

std::filesystem::path ExperimentConfig::resolve(const std::filesystem::path& p) const
{
    return p.is_absolute() ? p : root / p;
}

std::size_t ExperimentConfig::n_for(ResourceKind kind) const
{
    return n.at(std::string(to_string(kind)));
}

nlohmann::json ExperimentConfig::snapshot() const
{
    nlohmann::json resources_json = nlohmann::json::array();
    for (const auto& r : resources) {
        nlohmann::json j = {{"id", r.id}, {"kind", to_string(r.kind)}};
        if (r.kind == ResourceKind::Comparable) {
            j["source"] = rel(r.source);
            j["target"] = rel(r.target);
            j["alignments"] = rel(r.alignments);
        } else {
            j["path"] = rel(r.path);
        }
        resources_json.push_back(j);
    }
    return {{"seed", seed},
            {"trainer", trainer},
            {"context_resource", context_resource},
            {"pool_k", pool_k},
            {"output", rel(output)},
            {"model1", {{"iterations", lexicon.model1.iterations}, {"use_null", lexicon.model1.use_null}}},
            {"lexicon", {{"top_k", lexicon.top_k}, {"min_prob", lexicon.min_prob}}},
            {"labeling",
             {{"corpus", rel(labeling_corpus)},
              {"validation", validation == Validation::Any ? "any" : "all"},
              {"heldout", rel(heldout)},
              {"heldout_gold", rel(heldout_gold)}}},
            {"retrieval",
             {{"documents", rel(documents)},
              {"topics", rel(topics)},
              {"qrels", rel(qrels)},
              {"k1", bm25.k1},
              {"b", bm25.b},
              {"weighted", bm25.weighted},
              {"depth", depth},
              {"lambda_step", lambda_step}}},
            {"n", n},
            {"n_sweep", n_sweep},
            {"coordinate_ascent",
             {{"restarts", coordinate_ascent.restarts},
              {"epsilon", coordinate_ascent.epsilon},
              {"max_cycles", coordinate_ascent.max_cycles},
              {"min_weight", coordinate_ascent.min_weight},
              {"max_weight", coordinate_ascent.max_weight}}},
            {"pairwise_hinge",
             {{"learning_rate", pairwise_hinge.learning_rate},
              {"epochs", pairwise_hinge.epochs},
              {"reg", pairwise_hinge.reg}}},
            {"resources", resources_json}};
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(path.string(), e.line(), e.message());
    }
    ExperimentConfig config;
    config.root = path.parent_path();
    std::set<std::string> seen_sections;
    for (const auto& [name, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw DataError(fmt::format("config: key '{}' outside of a section", name));
        }
        Section s(name, body);
        if (name == "experiment") {
            config.seed = s.number<std::uint64_t>("seed", config.seed);
            config.trainer = s.text("trainer", config.trainer);
            config.context_resource = s.text("context_resource", "");
            config.pool_k = s.number<std::size_t>("pool_k", config.pool_k);
            config.output = s.text("output", config.output.string());
        } else if (name == "model1") {
            config.lexicon.model1.iterations = s.number<std::size_t>("iterations", config.lexicon.model1.iterations);
            config.lexicon.model1.use_null = s.flag("use_null", config.lexicon.model1.use_null);
        } else if (name == "lexicon") {
            config.lexicon.top_k = s.number<std::size_t>("top_k", config.lexicon.top_k);
            config.lexicon.min_prob = s.number<double>("min_prob", config.lexicon.min_prob);
        } else if (name == "labeling") {
            config.labeling_corpus = s.required("corpus");
            config.validation = parse_validation(s.text("validation", "any"));
            config.heldout = s.text("heldout", "");
            config.heldout_gold = s.text("heldout_gold", "");
        } else if (name == "retrieval") {
            config.documents = s.required("documents");
            config.topics = s.required("topics");
            config.qrels = s.required("qrels");
            config.bm25.k1 = s.number<double>("k1", config.bm25.k1);
            config.bm25.b = s.number<double>("b", config.bm25.b);
            config.bm25.weighted = s.flag("weighted", config.bm25.weighted);
            config.depth = s.number<std::size_t>("depth", config.depth);
            config.lambda_step = s.number<double>("lambda_step", config.lambda_step);
        } else if (name == "n") {
            config.n_sweep = parse_counts(s.text("sweep", ""));
            for (auto& [key, value] : config.n) {
                value = s.number<std::size_t>(key, value);
                if (value < 1) {
                    throw DataError(fmt::format("config: [n] {} must be at least 1", key));
                }
            }
        } else if (name == "trainer") {
            auto& ca = config.coordinate_ascent;
            ca.restarts = s.number<std::size_t>("restarts", ca.restarts);
            ca.epsilon = s.number<double>("epsilon", ca.epsilon);
            ca.max_cycles = s.number<std::size_t>("max_cycles", ca.max_cycles);
            ca.min_weight = -s.number<double>("weight_bound", -ca.min_weight);
            ca.max_weight = -ca.min_weight;
            auto& ph = config.pairwise_hinge;
            ph.learning_rate = s.number<double>("learning_rate", ph.learning_rate);
            ph.epochs = s.number<std::size_t>("epochs", ph.epochs);
            ph.reg = s.number<double>("reg", ph.reg);
        } else if (name.starts_with("resource.")) {
            ResourceConfig r;
            r.id = name.substr(std::string_view("resource.").size());
            if (r.id.empty() || r.id == kAllResources) {
                throw DataError(fmt::format("config: invalid resource id in [{}]", name));
            }
            r.kind = parse_resource_kind(s.required("kind"));
            if (r.kind == ResourceKind::Comparable) {
                r.source = s.required("source");
                r.target = s.required("target");
                r.alignments = s.required("alignments");
            } else {
                r.path = s.required("path");
            }
            config.resources.push_back(std::move(r));
        } else {
            throw DataError(fmt::format("config: unknown section [{}]", name));
        }
        s.finish();
        seen_sections.insert(name);
    }
    for (const char* needed : {"labeling", "retrieval"}) {
        if (!seen_sections.contains(needed)) {
            throw DataError(fmt::format("config: missing [{}] section", needed));
        }
    }
    if (config.resources.empty()) {
        throw DataError("config: no [resource.<id>] sections");
    }
    if (config.trainer != "coordinate_ascent" && config.trainer != "pairwise_hinge") {
        throw DataError("config: trainer must be coordinate_ascent or pairwise_hinge, got '" + config.trainer + "'");
    }
    if (config.pool_k < 1 || config.depth < 1) {
        throw DataError("config: pool_k and depth must be at least 1");
    }
    config.coordinate_ascent.seed = config.seed;
    config.pairwise_hinge.seed = config.seed;
    return config;
}

Resource build_resource(const ResourceConfig& config, const LexiconBuildOptions& options,
                        const std::filesystem::path& root)
{
    auto at = [&](const std::filesystem::path& p) { return p.is_absolute() || root.empty() ? p : root / p; };
    Resource r;
    r.id = config.id;
    r.kind = config.kind;
    auto finish = [&](const Lexicon& forward, const Lexicon& reverse) {
        r.forward = with_resource_id(prune_lexicon(forward, options.top_k, options.min_prob), config.id);
        r.reverse = with_resource_id(prune_lexicon(reverse, options.top_k, options.min_prob), config.id);
    };
    switch (config.kind) {
    case ResourceKind::Parallel: {
        const auto corpus = load_parallel(at(config.path));
        if (corpus.pairs.empty()) {
            throw DataError("parallel corpus '" + config.id + "' has no usable sentence pairs");
        }
        finish(train_model1(corpus, options.model1), train_model1(swap_sides(corpus), options.model1));
        std::vector<TokenizedText> src;
        std::vector<TokenizedText> tgt;
        for (const auto& p : corpus.pairs) {
            src.push_back(p.source);
            tgt.push_back(p.target);
        }
        r.source_stats = compute_stats(src);
        r.target_stats = compute_stats(tgt);
        r.cross = AlignmentStats::build(corpus);
        break;
    }
    case ResourceKind::Comparable: {
        const auto corpus = load_comparable(at(config.source), at(config.target), at(config.alignments));
        if (corpus.alignments.empty()) {
            throw DataError("comparable corpus '" + config.id + "' has no alignments");
        }
        finish(extract_comparable_lexicon(corpus, options.top_k, Direction::SourceToTarget, config.id),
               extract_comparable_lexicon(corpus, options.top_k, Direction::TargetToSource, config.id));
        std::vector<TokenizedText> src;
        std::vector<TokenizedText> tgt;
        for (const auto& [id, doc] : corpus.src_docs) {
            src.push_back(doc);
        }
        for (const auto& [id, doc] : corpus.tgt_docs) {
            tgt.push_back(doc);
        }
        r.source_stats = compute_stats(src);
        r.target_stats = compute_stats(tgt);
        r.cross = AlignmentStats::build(corpus);
        break;
    }
    case ResourceKind::Dictionary: {
        const auto dict = load_dictionary(at(config.path));
        finish(dictionary_lexicon(dict, Direction::SourceToTarget, config.id),
               dictionary_lexicon(dict, Direction::TargetToSource, config.id));
        break;
    }
    }
    return r;
}

nlohmann::json run_experiment(const ExperimentConfig& config, unsigned threads, std::ostream* log)
{
    const auto out_dir = config.resolve(config.output);
    std::filesystem::create_directories(out_dir / "runs");
    std::filesystem::create_directories(out_dir / "lexicons");

    nlohmann::json manifest;
    manifest["config"] = config.snapshot();

    // Inputs and their hashes.
    std::map<std::string, std::string> inputs;
    auto record_input = [&](const std::filesystem::path& p) {
        if (!p.empty()) {
            inputs[rel(p)] = file_sha256(config.resolve(p));
        }
    };
    for (const auto& r : config.resources) {
        record_input(r.path);
        record_input(r.source);
        record_input(r.target);
        record_input(r.alignments);
    }
    for (const auto* p : {&config.labeling_corpus, &config.heldout, &config.heldout_gold, &config.documents,
                          &config.topics, &config.qrels}) {
        record_input(*p);
    }
    manifest["inputs"] = inputs;

    // Resources.
    std::vector<Resource> built;
    for (const auto& rc : config.resources) {
        log_line(log, "building resource " + rc.id);
        built.push_back(build_resource(rc, config.lexicon, config.root));
        write_lexicon(built.back().forward, out_dir / "lexicons" / (rc.id + ".s2t.lex"));
    }
    const ResourceSet resources(std::move(built));
    const auto& schema = resources.schema();
    manifest["schema"] = {{"version", schema.version()}, {"hash", schema.hash()}, {"features", schema.size()}};
    {
        std::ofstream out(out_dir / "schema.json");
        out << schema.manifest().dump(2) << '\n';
    }

    // Training data.
    log_line(log, "labeling training data");
    const auto labeling = load_parallel(config.resolve(config.labeling_corpus));
    const auto aligner = train_model1(labeling, config.lexicon.model1);
    LabelingOptions lopts;
    lopts.pool_k = config.pool_k;
    lopts.validation = config.validation;
    lopts.use_null = config.lexicon.model1.use_null;
    LabelingReport report;
    const auto instances = build_training_data(labeling, resources.forward_lexicons(), aligner, lopts, &report);
    if (instances.empty()) {
        throw DataError("labeling produced no training instances");
    }
    write_instances(instances, out_dir / "instances.jsonl");
    log_line(log, fmt::format("extracting features for {} instances", instances.size()));
    const auto lists = extract_lists(instances, resources, threads);
    write_training_file(lists, schema, out_dir / "training.letor");
    manifest["labeling"] = {{"occurrences", report.occurrences},
                            {"skipped_short", report.skipped_short},
                            {"skipped_unknown", report.skipped_unknown},
                            {"dropped_no_positive", report.dropped_no_positive},
                            {"instances", report.emitted}};

    // Ranker.
    log_line(log, "training " + config.trainer);
    RankingModel model;
    if (config.trainer == "coordinate_ascent") {
        model = train_coordinate_ascent(lists, config.coordinate_ascent, schema.hash());
    } else {
        model = train_pairwise_hinge(lists, config.pairwise_hinge, schema.hash());
    }
    write_model(model, out_dir / "model.json");
    manifest["model"] = {{"trainer", model.trainer},
                         {"training_map", mean_average_precision(lists, model.weights, model.normalize)}};

    // Retrieval.
    log_line(log, "indexing documents");
    const auto docs = load_documents(config.resolve(config.documents));
    const auto index = build_index(docs);
    RetrievalSetup setup;
    setup.index = &index;
    setup.topics = load_topics(config.resolve(config.topics));
    setup.qrels = load_qrels(config.resolve(config.qrels));
    setup.bm25 = config.bm25;
    setup.depth = config.depth;

    nlohmann::json methods = nlohmann::json::object();
    std::map<std::string, std::string> outputs;
    auto save_run = [&](const MethodRun& run) {
        const auto file = "runs/" + run.name + ".trec";
        write_run(run.run, run.name, out_dir / file);
        methods[run.name] = to_json(run.eval);
    };

    // Best run over the N sweep, or the single run at `fixed` without one.
    auto tuned = [&](std::size_t fixed, const auto& make_run) {
        if (config.n_sweep.empty()) {
            return make_run(fixed);
        }
        std::optional<MethodRun> best_run;
        for (const auto n : config.n_sweep) {
            auto run = make_run(n);
            if (!best_run || run.eval.map > best_run->eval.map) {
                best_run = std::move(run);
            }
        }
        best_run->eval.meta["n_sweep"] = config.n_sweep;
        return std::move(*best_run);
    };

    std::vector<MethodRun> singles;
    for (const auto& r : resources.resources()) {
        log_line(log, "single-resource run " + r.id);
        singles.push_back(tuned(config.n_for(r.kind),
                                [&](std::size_t n) { return run_single_resource(setup, r.forward, n, r.id); }));
        save_run(singles.back());
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < singles.size(); ++i) {
        if (singles[i].eval.map > singles[best].eval.map) {
            best = i;
        }
    }
    const auto& best_single = singles[best];

    // Linear combination, lambda tuned by grid search.
    log_line(log, "linear combination grid search");
    std::set<std::string, std::less<>> query_words;
    for (const auto& t : setup.topics) {
        for (const auto& w : tokenize(t.title, setup.stoplist)) {
            query_words.insert(w);
        }
    }
    std::vector<Lexicon> restricted;
    std::vector<std::string> ids;
    for (const auto& r : resources.resources()) {
        restricted.push_back(restrict_rows(r.forward, query_words));
        ids.push_back(r.id);
    }
    std::vector<const Lexicon*> restricted_ptrs;
    for (const auto& l : restricted) {
        restricted_ptrs.push_back(&l);
    }
    std::optional<MethodRun> linear;
    LinearCombinationConfig best_lambda;
    std::size_t grid_points = 0;
    for (const auto& lambda : lambda_grid(ids, config.lambda_step)) {
        ++grid_points;
        const auto combined = linear_combine(restricted_ptrs, lambda);
        auto run = tuned(config.n.at("linear"),
                         [&](std::size_t n) { return run_single_resource(setup, combined, n, "linear"); });
        if (!linear || run.eval.map > linear->eval.map) {
            linear = std::move(run);
            best_lambda = lambda;
        }
    }
    linear->eval.meta["lambda"] = best_lambda.weights;
    linear->eval.meta["grid_points"] = grid_points;
    save_run(*linear);

    // Learning to rank.
    const std::string context_id = config.context_resource.empty() ? best_single.name : config.context_resource;
    log_line(log, "LTR run, context resource " + context_id);
    LtrTranslator translator;
    translator.resources = &resources;
    translator.model = &model;
    translator.context_lexicon = &resources.get(context_id).forward;
    translator.pool_k = config.pool_k;
    auto ltr = tuned(config.n.at("ltr"), [&](std::size_t n) { return run_ltr(setup, translator, n, "ltr"); });
    save_run(ltr);

    manifest["methods"] = methods;
    manifest["best_single"] = best_single.name;
    manifest["context_resource"] = context_id;
    manifest["ttests"] = {{"ltr_vs_best_single", ttest_json(ltr.eval, best_single.eval)},
                          {"ltr_vs_linear", ttest_json(ltr.eval, linear->eval)},
                          {"linear_vs_best_single", ttest_json(linear->eval, best_single.eval)}};

    // Top-1 translation accuracy on held-out ambiguous words.
    if (!config.heldout.empty() && !config.heldout_gold.empty()) {
        log_line(log, "held-out translation accuracy");
        const auto sentences = load_source_lines(config.resolve(config.heldout));
        const auto gold = load_gold(config.resolve(config.heldout_gold));
        std::map<std::string, std::size_t> correct;
        std::size_t total = 0;
        std::size_t cached_line = 0;
        ContextSpec context;
        for (const auto& g : gold) {
            if (g.line == 0 || g.line > sentences.size()) {
                throw DataError(fmt::format("held-out gold refers to line {} of {}", g.line, sentences.size()));
            }
            const auto& sentence = sentences[g.line - 1];
            const auto pos = std::find(sentence.begin(), sentence.end(), g.source);
            if (pos == sentence.end()) {
                throw DataError(fmt::format("held-out line {} does not contain '{}'", g.line, g.source));
            }
            if (cached_line != g.line) {
                context = query_context(sentence, *translator.context_lexicon, translator.context_per_word);
                cached_line = g.line;
            }
            ++total;
            translator.check();
            const auto ranked =
                translator.translate_word(sentence, static_cast<std::size_t>(pos - sentence.begin()), context);
            correct["ltr"] += !ranked.empty() && ranked.front().word == g.target ? 1 : 0;
            for (const auto& r : resources.resources()) {
                const auto* row = r.forward.find(g.source);
                correct[r.id] += row != nullptr && row->front().word == g.target ? 1 : 0;
            }
        }
        nlohmann::json accuracy = {{"occurrences", total}};
        for (const auto& [method, hits] : correct) {
            accuracy[method] = total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
        }
        manifest["heldout_accuracy"] = accuracy;
    }

    for (const auto& file : {std::string("model.json"), std::string("training.letor"), std::string("schema.json")}) {
        outputs[file] = file_sha256(out_dir / file);
    }
    for (const auto& [name, value] : methods.items()) {
        const auto file = "runs/" + name + ".trec";
        outputs[file] = file_sha256(out_dir / file);
    }
    manifest["outputs"] = outputs;
    {
        std::ofstream out(out_dir / "manifest.json");
        if (!out) {
            throw Error("cannot write " + (out_dir / "manifest.json").string());
        }
        out << manifest.dump(2) << '\n';
    }
    log_line(log, fmt::format("MAP: ltr {:.4f}, linear {:.4f}, best single ({}) {:.4f}", ltr.eval.map,
                              linear->eval.map, best_single.name, best_single.eval.map));
    return manifest;
}

}  // namespace clir
