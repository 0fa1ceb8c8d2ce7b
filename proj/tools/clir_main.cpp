// Stage-oriented command line: every verb reads its inputs from files and
// writes its outputs to files, so any stage can be rerun on its own.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clir/error.hpp"
#include "clir/evaluation.hpp"
#include "clir/experiment.hpp"
#include "clir/features.hpp"
#include "clir/labeling.hpp"
#include "clir/lexicon.hpp"
#include "clir/pipeline.hpp"
#include "clir/ranker.hpp"
#include "clir/retrieval.hpp"
#include "clir/synthetic.hpp"
#include "clir/training_file.hpp"

namespace {

using namespace clir;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    return out;
}

ResourceSet resources_from_config(const ExperimentConfig& config)
{
    std::vector<Resource> built;
    for (const auto& rc : config.resources) {
        built.push_back(build_resource(rc, config.lexicon, config.root));
    }
    return ResourceSet(std::move(built));
}

nlohmann::json ranked_json(const RankedCandidates& ranked)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : ranked) {
        out.push_back({{"word", c.word}, {"score", c.score}, {"weight", c.weight}});
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cross-language retrieval with learned translation reranking"};
    app.require_subcommand(1);
    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker threads for feature extraction")->check(CLI::Range(1U, 256U));

    std::function<void()> action;

    // train-model1
    {
        auto* cmd = app.add_subcommand("train-model1", "Train an IBM Model 1 lexicon on a parallel corpus");
        static std::string corpus;
        static std::string out;
        static std::string trace_path;
        static std::string id;
        static Model1Options opts;
        static std::size_t top_k = 0;
        static double min_prob = 0.0;
        static bool reverse = false;
        static bool no_null = false;
        cmd->add_option("--corpus", corpus, "Parallel corpus, source<TAB>target per line")->required();
        cmd->add_option("--out", out, "Output lexicon")->required();
        cmd->add_option("--iterations", opts.iterations, "EM iterations")->capture_default_str();
        cmd->add_option("--id", id, "Resource id written to the lexicon (default: corpus file stem)");
        cmd->add_option("--top-k", top_k, "Keep at most this many translations per word (0 = all)");
        cmd->add_option("--min-prob", min_prob, "Drop translations below this probability");
        cmd->add_option("--trace", trace_path, "Write the per-iteration log-likelihood as JSON");
        cmd->add_flag("--reverse", reverse, "Train p(source | target) instead");
        cmd->add_flag("--no-null", no_null, "Do not add the NULL source word");
        cmd->callback([&] {
            action = [&] {
                opts.use_null = !no_null;
                auto c = load_parallel(corpus);
                if (reverse) {
                    c = swap_sides(c);
                }
                Model1Trace trace;
                auto lex = train_model1(c, opts, &trace);
                if (top_k > 0 || min_prob > 0.0) {
                    lex = prune_lexicon(lex, top_k > 0 ? top_k : SIZE_MAX, min_prob);
                }
                lex = with_resource_id(std::move(lex), id.empty() ? c.name : id);
                write_lexicon(lex, out);
                if (!trace_path.empty()) {
                    open_output(trace_path) << nlohmann::json{{"log_likelihood", trace.log_likelihood}}.dump(2) << '\n';
                }
                std::cerr << fmt::format("{} source words, {} pairs ({} skipped)\n", lex.size(), c.pairs.size(),
                                         c.skipped_lines);
            };
        });
    }

    // extract-lexicon
    {
        auto* cmd = app.add_subcommand("extract-lexicon", "Build a lexicon from a comparable corpus or a dictionary");
        cmd->require_subcommand(1);
        static std::string out;
        static std::string direction = "s2t";
        static std::string id;
        static std::string src;
        static std::string tgt;
        static std::string align;
        static std::size_t top_k = 20;
        static std::string dict;

        auto* comparable = cmd->add_subcommand("comparable", "Alignment-weighted co-occurrence lexicon");
        comparable->add_option("--source", src, "Source documents (JSON lines)")->required();
        comparable->add_option("--target", tgt, "Target documents (JSON lines)")->required();
        comparable->add_option("--alignments", align, "Document alignments (JSON lines)")->required();
        comparable->add_option("--top-k", top_k, "Translations kept per word")->capture_default_str();
        comparable->add_option("--direction", direction, "s2t or t2s")->capture_default_str();
        comparable->add_option("--id", id, "Resource id")->default_val("comparable");
        comparable->add_option("--out", out, "Output lexicon")->required();
        comparable->callback([&] {
            action = [&] {
                if (top_k < 1) {
                    throw DataError("--top-k must be at least 1");
                }
                const auto corpus = load_comparable(src, tgt, align);
                write_lexicon(extract_comparable_lexicon(corpus, top_k, parse_direction(direction), id), out);
            };
        });

        auto* dictionary = cmd->add_subcommand("dictionary", "Uniform-probability dictionary lexicon");
        dictionary->add_option("--dict", dict, "Dictionary, source<TAB>t1|t2|... per line")->required();
        dictionary->add_option("--direction", direction, "s2t or t2s")->capture_default_str();
        dictionary->add_option("--id", id, "Resource id")->default_val("dictionary");
        dictionary->add_option("--out", out, "Output lexicon")->required();
        dictionary->callback([&] {
            action = [&] {
                const auto d = load_dictionary(dict);
                write_lexicon(dictionary_lexicon(d, parse_direction(direction), id), out);
                if (d.skipped_entries > 0) {
                    std::cerr << fmt::format("skipped {} entries that are not single words\n", d.skipped_entries);
                }
            };
        });
    }

    // build-training-data
    {
        auto* cmd = app.add_subcommand("build-training-data", "Label pooled translation candidates via word alignment");
        static std::string corpus;
        static std::vector<std::string> lexicons;
        static std::string aligner_path;
        static std::string validation = "any";
        static std::string out;
        static LabelingOptions opts;
        static std::size_t iterations = 5;
        cmd->add_option("--corpus", corpus, "Labeling parallel corpus")->required();
        cmd->add_option("--lexicon", lexicons, "Resource lexicon (repeatable, in resource order)")->required();
        cmd->add_option("--aligner", aligner_path,
                        "Lexicon used for Viterbi alignment (default: Model 1 trained on the corpus)");
        cmd->add_option("--iterations", iterations, "EM iterations for the default aligner")->capture_default_str();
        cmd->add_option("--pool-k", opts.pool_k, "Candidates taken from each resource")->capture_default_str();
        cmd->add_option("--validation", validation, "any or all")->capture_default_str();
        cmd->add_option("--out", out, "Output instances (JSON lines)")->required();
        cmd->callback([&] {
            action = [&] {
                opts.validation = parse_validation(validation);
                const auto c = load_parallel(corpus);
                std::vector<Lexicon> loaded;
                for (const auto& p : lexicons) {
                    loaded.push_back(read_lexicon(p));
                }
                std::vector<const Lexicon*> ptrs;
                for (const auto& l : loaded) {
                    ptrs.push_back(&l);
                }
                const auto aligner = aligner_path.empty() ? train_model1(c, {iterations, opts.use_null})
                                                          : read_lexicon(aligner_path);
                LabelingReport report;
                const auto instances = build_training_data(c, ptrs, aligner, opts, &report);
                write_instances(instances, out);
                std::cerr << fmt::format("{} occurrences, {} instances, {} without a positive\n", report.occurrences,
                                         report.emitted, report.dropped_no_positive);
            };
        });
    }

    // extract-features
    {
        auto* cmd = app.add_subcommand("extract-features", "Attach feature vectors to labeled instances");
        static std::string config_path;
        static std::string instances_path;
        static std::string out;
        static std::string schema_out;
        cmd->add_option("--config", config_path, "Experiment config naming the resources")->required();
        cmd->add_option("--instances", instances_path, "Labeled instances (JSON lines)")->required();
        cmd->add_option("--out", out, "Output training file (LETOR format)")->required();
        cmd->add_option("--schema-out", schema_out, "Also write the feature schema manifest");
        cmd->callback([&] {
            action = [&] {
                const auto config = load_experiment_config(config_path);
                const auto resources = resources_from_config(config);
                const auto lists = extract_lists(read_instances(instances_path), resources, threads);
                write_training_file(lists, resources.schema(), out);
                if (!schema_out.empty()) {
                    open_output(schema_out) << resources.schema().manifest().dump(2) << '\n';
                }
            };
        });
    }

    // train-ranker
    {
        auto* cmd = app.add_subcommand("train-ranker", "Train a linear ranking model on a training file");
        static std::string training;
        static std::string out;
        static std::string trainer = "coordinate_ascent";
        static CoordinateAscentOptions ca;
        static PairwiseHingeOptions ph;
        static std::uint64_t seed = 1;
        static bool raw = false;
        cmd->add_option("--training", training, "Training file (LETOR format)")->required();
        cmd->add_option("--out", out, "Output model (JSON)")->required();
        cmd->add_option("--trainer", trainer, "coordinate_ascent or pairwise_hinge")
            ->check(CLI::IsMember({"coordinate_ascent", "pairwise_hinge"}))
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
        cmd->add_option("--restarts", ca.restarts, "Coordinate ascent restarts")->capture_default_str();
        cmd->add_option("--epsilon", ca.epsilon, "Minimum accepted gain")->capture_default_str();
        cmd->add_option("--epochs", ph.epochs, "Pairwise hinge epochs")->capture_default_str();
        cmd->add_option("--learning-rate", ph.learning_rate, "Pairwise hinge step size")->capture_default_str();
        cmd->add_option("--reg", ph.reg, "Pairwise hinge L2 strength")->capture_default_str();
        cmd->add_flag("--no-normalize", raw, "Skip per-list min-max scaling");
        cmd->callback([&] {
            action = [&] {
                const auto file = read_training_file(training);
                ca.seed = ph.seed = seed;
                ca.normalize = ph.normalize = !raw;
                const auto model = trainer == "coordinate_ascent"
                                       ? train_coordinate_ascent(file.lists, ca, file.schema_hash)
                                       : train_pairwise_hinge(file.lists, ph, file.schema_hash);
                write_model(model, out);
                std::cerr << fmt::format("training MAP {:.4f}\n",
                                         mean_average_precision(file.lists, model.weights, model.normalize));
            };
        });
    }

    // translate
    {
        auto* cmd = app.add_subcommand("translate", "Rerank translation candidates of queries with a model");
        static std::string config_path;
        static std::string model_path;
        static std::string query;
        static std::string topics_path;
        static std::string context_id;
        static std::string out;
        static std::size_t n = 5;
        cmd->add_option("--config", config_path, "Experiment config naming the resources")->required();
        cmd->add_option("--model", model_path, "Ranking model (JSON)")->required();
        auto* q = cmd->add_option("--query", query, "One source-language query");
        auto* t = cmd->add_option("--topics", topics_path, "Topics file, qid<TAB>title");
        q->excludes(t);
        cmd->add_option("--context-resource", context_id, "Resource providing the target context")->required();
        cmd->add_option("--n", n, "Translations kept per word")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--out", out, "Output (JSON lines); standard output when omitted");
        cmd->callback([&] {
            action = [&] {
                if (query.empty() && topics_path.empty()) {
                    throw CLI::RequiredError("--query or --topics");
                }
                const auto config = load_experiment_config(config_path);
                const auto resources = resources_from_config(config);
                const auto model = read_model(model_path);
                LtrTranslator translator;
                translator.resources = &resources;
                translator.model = &model;
                translator.context_lexicon = &resources.get(context_id).forward;
                translator.pool_k = config.pool_k;
                translator.check();
                std::vector<Topic> topics = topics_path.empty() ? std::vector<Topic>{{"query", query}}
                                                                : load_topics(topics_path);
                std::ofstream file;
                if (!out.empty()) {
                    file = open_output(out);
                }
                std::ostream& sink = out.empty() ? std::cout : file;
                for (const auto& topic : topics) {
                    const auto words = tokenize(topic.title);
                    const auto per_word = translator.translate(words);
                    nlohmann::json j = {{"qid", topic.qid}, {"words", nlohmann::json::array()}};
                    for (std::size_t i = 0; i < words.size(); ++i) {
                        j["words"].push_back({{"source", words[i]},
                                              {"candidates", ranked_json(per_word[i].empty() ? per_word[i]
                                                                                             : top_n(per_word[i], n))}});
                    }
                    const auto wq = construct_query(words, per_word, n, true);
                    for (const auto& term : wq.terms) {
                        j["query"].push_back({{"term", term.term}, {"weight", term.weight}});
                    }
                    j["oov"] = wq.oov;
                    sink << j.dump() << '\n';
                }
            };
        });
    }

    // index
    {
        auto* cmd = app.add_subcommand("index", "Build an inverted index over target documents");
        static std::string docs;
        static std::string out;
        cmd->add_option("--documents", docs, "Documents (JSON lines)")->required();
        cmd->add_option("--out", out, "Output index file")->required();
        cmd->callback([&] {
            action = [&] {
                const auto index = build_index(load_documents(docs));
                index.write(out);
                std::cerr << fmt::format("{} documents, {} terms\n", index.doc_count(), index.terms().size());
            };
        });
    }

    // search
    {
        auto* cmd = app.add_subcommand("search", "BM25 search with target-language queries");
        static std::string index_path;
        static std::string topics_path;
        static std::string query;
        static std::string out;
        static std::string tag = "clir";
        static std::size_t k = 1000;
        static Bm25Params params;
        cmd->add_option("--index", index_path, "Index file")->required();
        auto* t = cmd->add_option("--topics", topics_path, "Topics file, qid<TAB>title (target language)");
        auto* q = cmd->add_option("--query", query, "Query terms, each optionally term:weight");
        q->excludes(t);
        cmd->add_option("--k", k, "Results per query")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--k1", params.k1, "BM25 k1")->capture_default_str();
        cmd->add_option("--b", params.b, "BM25 b")->capture_default_str();
        cmd->add_option("--tag", tag, "Run tag")->capture_default_str();
        cmd->add_option("--out", out, "Output run file (TREC); standard output when omitted");
        cmd->callback([&] {
            action = [&] {
                if (query.empty() && topics_path.empty()) {
                    throw CLI::RequiredError("--query or --topics");
                }
                const auto index = InvertedIndex::read(index_path);
                auto parse_query = [](const std::string& text) {
                    WeightedQuery wq;
                    std::istringstream in(text);
                    std::string item;
                    while (in >> item) {
                        double weight = 1.0;
                        const auto colon = item.rfind(':');
                        if (colon != std::string::npos && colon > 0) {
                            try {
                                weight = std::stod(item.substr(colon + 1));
                                item.resize(colon);
                            } catch (const std::exception&) {
                                weight = 1.0;
                            }
                        }
                        for (const auto& term : tokenize(item)) {
                            if (weight > 0.0) {
                                wq.add(term, weight);
                            }
                        }
                    }
                    return wq;
                };
                Run run;
                const auto topics = topics_path.empty() ? std::vector<Topic>{{"query", query}} : load_topics(topics_path);
                for (const auto& topic : topics) {
                    run[topic.qid] = bm25_search(index, parse_query(topic.title), k, params);
                }
                if (out.empty()) {
                    for (const auto& [qid, hits] : run) {
                        for (std::size_t r = 0; r < hits.size(); ++r) {
                            std::cout << fmt::format("{} Q0 {} {} {:.10f} {}\n", qid, hits[r].doc_id, r + 1,
                                                     hits[r].score, tag);
                        }
                    }
                } else {
                    write_run(run, tag, out);
                }
            };
        });
    }

    // evaluate
    {
        auto* cmd = app.add_subcommand("evaluate", "MAP, P@5 and P@10 of a TREC run");
        static std::string run_path;
        static std::string qrels_path;
        static std::string compare_path;
        static std::string json_out;
        cmd->add_option("--run", run_path, "Run file (TREC)")->required();
        cmd->add_option("--qrels", qrels_path, "Relevance judgments (TREC)")->required();
        cmd->add_option("--compare", compare_path, "Second run; adds a paired t-test on AP");
        cmd->add_option("--json", json_out, "Write the full result as JSON");
        cmd->callback([&] {
            action = [&] {
                const auto qrels = load_qrels(qrels_path);
                const auto result = evaluate(load_run(run_path), qrels);
                std::cout << fmt::format("queries\t{}\nmap\t{:.4f}\nP_5\t{:.4f}\nP_10\t{:.4f}\n", result.ap.size(),
                                         result.map, result.p_at_5, result.p_at_10);
                auto j = to_json(result);
                if (!compare_path.empty()) {
                    const auto other = evaluate(load_run(compare_path), qrels);
                    const auto t = paired_ttest(result, other);
                    std::cout << fmt::format("compare_map\t{:.4f}\nt\t{:.4f}\ndf\t{}\np\t{:.6g}\n", other.map, t.t,
                                             t.df, t.p);
                    j["ttest"] = {{"t", t.t}, {"df", t.df}, {"p", t.p}, {"compare_map", other.map}};
                }
                if (!json_out.empty()) {
                    open_output(json_out) << j.dump(2) << '\n';
                }
            };
        });
    }

    // run-experiment
    {
        auto* cmd = app.add_subcommand("run-experiment", "Run every baseline and the reranked pipeline");
        static std::string config_path;
        cmd->add_option("--config", config_path, "Experiment config")->required();
        cmd->callback([&] {
            action = [&] {
                const auto config = load_experiment_config(config_path);
                const auto manifest = run_experiment(config, threads, &std::cerr);
                std::cout << (config.resolve(config.output) / "manifest.json").string() << '\n';
            };
        });
    }

    // gen-synthetic
    {
        auto* cmd = app.add_subcommand("gen-synthetic", "Generate a seeded synthetic bilingual world");
        static SyntheticOptions opts;
        static std::string out;
        cmd->add_option("--seed", opts.seed, "Random seed")->capture_default_str();
        cmd->add_option("--out", out, "Output directory")->required();
        cmd->add_option("--vocabulary", opts.vocabulary, "Source word types")->capture_default_str();
        cmd->add_option("--topics", opts.topics, "Number of topics")->capture_default_str();
        cmd->add_option("--ambiguity", opts.ambiguity, "Fraction of two-sense words")->capture_default_str();
        cmd->add_option("--queries", opts.queries, "Number of queries")->capture_default_str();
        cmd->callback([&] {
            action = [&] { write_world(generate_synthetic_world(opts), out); };
        });
    }

    // feature-ablation
    {
        auto* cmd = app.add_subcommand("feature-ablation", "Greedy forward feature selection report");
        static std::string training;
        static std::string validation;
        static std::string schema_path;
        static std::string out;
        static ForwardSelectionOptions opts;
        static std::uint64_t seed = 1;
        cmd->add_option("--training", training, "Training file (LETOR format)")->required();
        cmd->add_option("--validation", validation, "Validation file; training MAP decides when omitted");
        cmd->add_option("--schema", schema_path, "Schema manifest for feature names");
        cmd->add_option("--max-steps", opts.max_steps, "Stop after this many features (0 = all)")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
        cmd->add_option("--out", out, "Output report (JSON); standard output when omitted");
        cmd->callback([&] {
            action = [&] {
                const auto train = read_training_file(training);
                std::vector<std::string> labels;
                if (!schema_path.empty()) {
                    std::ifstream in(schema_path);
                    if (!in) {
                        throw Error("cannot open " + schema_path);
                    }
                    nlohmann::json manifest;
                    try {
                        manifest = nlohmann::json::parse(in);
                    } catch (const nlohmann::json::parse_error& e) {
                        throw DataError(schema_path + ": " + e.what());
                    }
                    const auto schema = FeatureSchema::from_manifest(manifest);
                    if (schema.hash() != train.schema_hash) {
                        throw DataError("schema manifest does not match the training file");
                    }
                    for (std::size_t i = 0; i < schema.size(); ++i) {
                        labels.push_back(schema.label(i));
                    }
                } else {
                    for (std::size_t i = 0; i < train.feature_count; ++i) {
                        labels.push_back(fmt::format("f{}", i + 1));
                    }
                }
                std::optional<TrainingFile> valid;
                if (!validation.empty()) {
                    valid = read_training_file(validation);
                    if (valid->schema_hash != train.schema_hash) {
                        throw DataError("validation file uses a different feature schema");
                    }
                }
                opts.trainer.seed = seed;
                const auto report = forward_selection(train.lists, labels, opts, valid ? &valid->lists : nullptr);
                nlohmann::json j = nlohmann::json::array();
                for (const auto& step : report) {
                    j.push_back({{"feature", step.label},
                                 {"index", step.feature + 1},
                                 {"metric", step.metric},
                                 {"training_map", step.training_map}});
                }
                if (out.empty()) {
                    std::cout << j.dump(2) << '\n';
                } else {
                    open_output(out) << j.dump(2) << '\n';
                }
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }
    try {
        action();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return 0;
}
