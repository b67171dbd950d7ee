#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "logembed/pipeline.hpp"

namespace {

using namespace logembed;
using nlohmann::json;

// Defaults loaded from --config; command-line flags override.
struct CliConfig {
    std::map<std::string, std::string> paths;
    TokenizerConfig tokenizer;
    size_t k = 2000;
    size_t baseline_b = 5000;
    TrainConfig train;
    ClassifierConfig classifier;
    double test_fraction = 0.3;
    uint64_t split_seed = 7;
    uint64_t seed = 42;
    uint32_t workers = 1;

    std::string path(const std::string& key) const {
        auto it = paths.find(key);
        return it == paths.end() ? std::string() : it->second;
    }
};

CliConfig load_config(const std::string& path) {
    CliConfig cfg;
    if (path.empty()) return cfg;
    require_artifact(path, "config file");
    json j = json::parse(read_text_file(path), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorClass::InvalidConfig, "config file is not a JSON object: " + path);
    try {
        if (j.contains("paths"))
            for (const auto& [key, value] : j.at("paths").items())
                cfg.paths[key] = value.get<std::string>();
        if (j.contains("tokenizer")) {
            const auto& t = j.at("tokenizer");
            cfg.tokenizer.separators = t.value("separators", cfg.tokenizer.separators);
            cfg.tokenizer.fold_case = t.value("fold_case", cfg.tokenizer.fold_case);
        }
        cfg.k = j.value("k", cfg.k);
        cfg.baseline_b = j.value("baseline_b", cfg.baseline_b);
        if (j.contains("train")) {
            const auto& t = j.at("train");
            cfg.train.hidden_dim = t.value("d", cfg.train.hidden_dim);
            cfg.train.epochs = t.value("epochs", cfg.train.epochs);
            cfg.train.batch_size = t.value("batch", cfg.train.batch_size);
            cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
            cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
            cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
            cfg.train.epsilon = t.value("epsilon", cfg.train.epsilon);
            cfg.train.negative_ratio = t.value("negative_ratio", cfg.train.negative_ratio);
        }
        if (j.contains("classifier")) {
            const auto& c = j.at("classifier");
            cfg.classifier.kind =
                classifier_kind_from_name(c.value("kind", std::string("logistic")));
            cfg.classifier.logistic_iterations =
                c.value("iterations", cfg.classifier.logistic_iterations);
            cfg.classifier.logistic_learning_rate =
                c.value("learning_rate", cfg.classifier.logistic_learning_rate);
            cfg.classifier.l2 = c.value("l2", cfg.classifier.l2);
            cfg.classifier.n_trees = c.value("trees", cfg.classifier.n_trees);
            cfg.classifier.max_depth = c.value("depth", cfg.classifier.max_depth);
            cfg.classifier.tree_learning_rate =
                c.value("tree_learning_rate", cfg.classifier.tree_learning_rate);
            cfg.classifier.min_leaf = c.value("min_leaf", cfg.classifier.min_leaf);
        }
        if (j.contains("split")) {
            cfg.test_fraction = j.at("split").value("test_fraction", cfg.test_fraction);
            cfg.split_seed = j.at("split").value("seed", cfg.split_seed);
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.workers = j.value("workers", cfg.workers);
    } catch (const json::exception& e) {
        throw Error(ErrorClass::InvalidConfig, std::string("bad config file: ") + e.what());
    }
    return cfg;
}

std::string require_path(const std::string& value, const std::string& flag) {
    if (value.empty())
        throw Error(ErrorClass::InvalidConfig,
                    "missing " + flag + " (give the flag or set it in --config paths)");
    return value;
}

void print_parse_stats(const ParseStats& stats) {
    if (stats.warnings() > 0)
        std::cerr << "warnings: " << stats.warnings() << " (malformed " << stats.malformed_lines
                  << ", empty event types " << stats.empty_event_types << ", no-arg events "
                  << stats.no_argument_events << ", invalid utf8 " << stats.invalid_utf8_lines
                  << ", duplicate ids " << stats.duplicate_ids << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    // --config must be known before option defaults are set
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc)
            config_path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0)
            config_path = arg.substr(9);
    }

    try {
        CliConfig cfg = load_config(config_path);

        CLI::App app{"behavior-graph log featurization toolkit"};
        app.require_subcommand(1);
        std::string config_flag;
        app.add_option("--config", config_flag, "JSON config with defaults for all flags");

        // ---- gen ----
        auto* gen = app.add_subcommand("gen", "generate a labeled synthetic corpus");
        std::string gen_out = cfg.path("corpus");
        std::string gen_config;
        uint64_t gen_malicious = 0, gen_benign = 0, gen_seed = cfg.seed;
        uint32_t gen_alphabet = 24, gen_min_events = 8, gen_max_events = 28;
        uint32_t gen_workers = cfg.workers;
        std::string gen_prefix;
        gen->add_option("-o,--out", gen_out, "output corpus path");
        gen->add_option("--gen-config", gen_config, "generator spec JSON");
        gen->add_option("--malicious", gen_malicious, "number of malicious logs");
        gen->add_option("--benign", gen_benign, "number of benign logs");
        gen->add_option("--seed", gen_seed, "generator seed");
        gen->add_option("--event-alphabet", gen_alphabet, "number of event types");
        gen->add_option("--min-events", gen_min_events, "min background events per log");
        gen->add_option("--max-events", gen_max_events, "max background events per log");
        gen->add_option("--id-prefix", gen_prefix, "log id prefix");
        gen->add_option("--workers", gen_workers, "shard workers");

        // ---- registry ----
        auto* registry = app.add_subcommand("registry", "build the event-type registry");
        std::string reg_corpus = cfg.path("corpus"), reg_out = cfg.path("registry");
        bool reg_permissive = false;
        registry->add_option("--corpus", reg_corpus, "corpus path");
        registry->add_option("-o,--out", reg_out, "registry output path");
        registry->add_flag("--permissive", reg_permissive, "count malformed lines instead of failing");

        // ---- vocab ----
        auto* vocab = app.add_subcommand("vocab", "build the top-K token vocabulary");
        std::string voc_corpus = cfg.path("corpus"), voc_out = cfg.path("vocab");
        size_t voc_k = cfg.k;
        double voc_fraction = 0;
        uint64_t voc_split_seed = cfg.split_seed;
        bool voc_permissive = false;
        vocab->add_option("--corpus", voc_corpus, "corpus path");
        vocab->add_option("-o,--out", voc_out, "vocabulary output path");
        vocab->add_option("-k", voc_k, "vocabulary size");
        vocab->add_option("--test-fraction", voc_fraction,
                          "exclude this test fraction from counting");
        vocab->add_option("--split-seed", voc_split_seed, "split seed");
        vocab->add_flag("--permissive", voc_permissive, "count malformed lines instead of failing");

        // ---- encode ----
        auto* encode = app.add_subcommand("encode", "encode patterns as sparse binary vectors");
        std::string enc_corpus = cfg.path("corpus"), enc_registry = cfg.path("registry");
        std::string enc_vocab = cfg.path("vocab"), enc_out = cfg.path("encoded");
        bool enc_permissive = false;
        encode->add_option("--corpus", enc_corpus, "corpus path");
        encode->add_option("--registry", enc_registry, "registry path");
        encode->add_option("--vocab", enc_vocab, "vocabulary path");
        encode->add_option("-o,--out", enc_out, "encoded corpus output path");
        encode->add_flag("--permissive", enc_permissive, "count malformed lines instead of failing");

        // ---- train-ae ----
        auto* train_ae = app.add_subcommand("train-ae", "train the pattern autoencoder");
        std::string tae_encoded = cfg.path("encoded"), tae_registry = cfg.path("registry");
        std::string tae_vocab = cfg.path("vocab"), tae_out = cfg.path("model");
        TrainConfig tae_cfg = cfg.train;
        tae_cfg.seed = cfg.seed;
        double tae_fraction = 0;
        uint64_t tae_split_seed = cfg.split_seed;
        train_ae->add_option("--encoded", tae_encoded, "encoded corpus path");
        train_ae->add_option("--registry", tae_registry, "registry path");
        train_ae->add_option("--vocab", tae_vocab, "vocabulary path");
        train_ae->add_option("-o,--out", tae_out, "model output path");
        train_ae->add_option("-d,--hidden-dim", tae_cfg.hidden_dim, "hidden size D");
        train_ae->add_option("--epochs", tae_cfg.epochs, "training epochs");
        train_ae->add_option("--batch", tae_cfg.batch_size, "batch size");
        train_ae->add_option("--lr", tae_cfg.learning_rate, "Adam learning rate");
        train_ae->add_option("--negative-ratio", tae_cfg.negative_ratio,
                             "negative samples per positive");
        train_ae->add_option("--seed", tae_cfg.seed, "training seed");
        train_ae->add_option("--workers", tae_cfg.workers, "gradient workers");
        train_ae->add_option("--test-fraction", tae_fraction,
                             "exclude this test fraction from training");
        train_ae->add_option("--split-seed", tae_split_seed, "split seed");

        // ---- embed ----
        auto* embed = app.add_subcommand("embed", "export per-pattern embeddings");
        std::string emb_model = cfg.path("model"), emb_encoded = cfg.path("encoded");
        std::string emb_out = cfg.path("embeddings");
        embed->add_option("--model", emb_model, "model path");
        embed->add_option("--encoded", emb_encoded, "encoded corpus path");
        embed->add_option("-o,--out", emb_out, "embeddings output path");

        // ---- baseline ----
        auto* baseline = app.add_subcommand("baseline", "select top-B baseline signatures");
        std::string bas_corpus = cfg.path("corpus"), bas_out = cfg.path("baselines");
        size_t bas_b = cfg.baseline_b;
        double bas_fraction = 0;
        uint64_t bas_split_seed = cfg.split_seed;
        bool bas_permissive = false;
        baseline->add_option("--corpus", bas_corpus, "corpus path");
        baseline->add_option("-b", bas_b, "number of signatures");
        baseline->add_option("-o,--out", bas_out, "baselines output path");
        baseline->add_option("--test-fraction", bas_fraction,
                             "exclude this test fraction from counting");
        baseline->add_option("--split-seed", bas_split_seed, "split seed");
        baseline->add_flag("--permissive", bas_permissive, "count malformed lines instead of failing");

        // ---- featurize ----
        auto* featurize = app.add_subcommand("featurize", "write per-log feature vectors");
        std::string fea_corpus = cfg.path("corpus"), fea_registry = cfg.path("registry");
        std::string fea_vocab = cfg.path("vocab"), fea_model = cfg.path("model");
        std::string fea_baselines = cfg.path("baselines"), fea_out = cfg.path("features");
        std::string fea_mode = "semantic", fea_baseline_mode = "counter";
        uint32_t fea_workers = cfg.workers;
        bool fea_permissive = false;
        featurize->add_option("--corpus", fea_corpus, "corpus path");
        featurize->add_option("--mode", fea_mode, "semantic|indicator|counter|combined");
        featurize->add_option("--registry", fea_registry, "registry path (semantic/combined)");
        featurize->add_option("--vocab", fea_vocab, "vocabulary path (semantic/combined)");
        featurize->add_option("--model", fea_model, "model path (semantic/combined)");
        featurize->add_option("--baselines", fea_baselines,
                              "baselines path (indicator/counter/combined)");
        featurize->add_option("--baseline-mode", fea_baseline_mode,
                              "baseline block for combined: indicator|counter");
        featurize->add_option("-o,--out", fea_out, "features output path");
        featurize->add_option("--workers", fea_workers, "featurize workers");
        featurize->add_flag("--permissive", fea_permissive,
                            "count malformed lines instead of failing");

        // ---- train-clf ----
        auto* train_clf = app.add_subcommand("train-clf", "train the log classifier");
        std::string clf_features = cfg.path("features"), clf_out = cfg.path("classifier");
        std::string clf_kind = classifier_kind_name(cfg.classifier.kind);
        ClassifierConfig clf_cfg = cfg.classifier;
        clf_cfg.seed = cfg.seed;
        double clf_fraction = cfg.test_fraction;
        uint64_t clf_split_seed = cfg.split_seed;
        train_clf->add_option("--features", clf_features, "feature file");
        train_clf->add_option("--kind", clf_kind, "logistic|boosted_trees");
        train_clf->add_option("-o,--out", clf_out, "classifier output path");
        train_clf->add_option("--test-fraction", clf_fraction, "held-out test fraction");
        train_clf->add_option("--split-seed", clf_split_seed, "split seed");
        train_clf->add_option("--seed", clf_cfg.seed, "classifier seed");
        train_clf->add_option("--iterations", clf_cfg.logistic_iterations, "logistic iterations");
        train_clf->add_option("--lr", clf_cfg.logistic_learning_rate, "logistic learning rate");
        train_clf->add_option("--l2", clf_cfg.l2, "logistic L2 penalty");
        train_clf->add_option("--trees", clf_cfg.n_trees, "boosted trees");
        train_clf->add_option("--depth", clf_cfg.max_depth, "tree depth (1..3)");
        train_clf->add_option("--tree-lr", clf_cfg.tree_learning_rate, "boosting shrinkage");
        train_clf->add_option("--min-leaf", clf_cfg.min_leaf, "min rows per leaf");

        // ---- eval ----
        auto* eval = app.add_subcommand("eval", "score feature sets and write the ROC report");
        std::vector<std::string> eval_sets;
        std::string eval_features = cfg.path("features"), eval_classifier = cfg.path("classifier");
        std::string eval_name = "features";
        std::string eval_report = cfg.path("report"), eval_roc = cfg.path("roc");
        double eval_min_auc = -1.0;
        eval->add_option("--set", eval_sets,
                         "feature set as name=features.csv:classifier (repeatable)");
        eval->add_option("--features", eval_features, "single-set feature file");
        eval->add_option("--classifier", eval_classifier, "single-set classifier");
        eval->add_option("--name", eval_name, "single-set display name");
        eval->add_option("--report", eval_report, "report table output path");
        eval->add_option("--roc", eval_roc, "ROC points CSV output path");
        eval->add_option("--min-auc", eval_min_auc, "fail (exit 10) if any AUC is below this");

        // ---- nn ----
        auto* nn = app.add_subcommand("nn", "nearest neighbors of a token");
        std::string nn_model = cfg.path("model"), nn_vocab = cfg.path("vocab");
        std::string nn_token, nn_metric = "cosine";
        size_t nn_n = 5;
        nn->add_option("token", nn_token, "query token")->required();
        nn->add_option("-n", nn_n, "neighbors to return");
        nn->add_option("--model", nn_model, "model path");
        nn->add_option("--vocab", nn_vocab, "vocabulary path");
        nn->add_option("--metric", nn_metric, "cosine|euclidean");

        // ---- analogy ----
        auto* analogy = app.add_subcommand("analogy", "token arithmetic: a - b + c");
        std::string an_model = cfg.path("model"), an_vocab = cfg.path("vocab");
        std::vector<std::string> an_terms;
        std::string an_metric = "cosine";
        size_t an_n = 5;
        bool an_include_inputs = false;
        analogy->add_option("terms", an_terms, "a - b + c (or just: a b c)")
            ->expected(3, 5);
        analogy->add_option("-n", an_n, "results to return");
        analogy->add_option("--model", an_model, "model path");
        analogy->add_option("--vocab", an_vocab, "vocabulary path");
        analogy->add_option("--metric", an_metric, "cosine|euclidean");
        analogy->add_flag("--include-inputs", an_include_inputs,
                          "allow a, b, c to appear in results");

        // ---- model-info ----
        auto* model_info = app.add_subcommand("model-info", "print a model file header");
        std::string mi_model = cfg.path("model");
        model_info->add_option("model", mi_model, "model path");

        // --config is global; let it appear after the subcommand name too
        for (auto* sub : app.get_subcommands({})) sub->fallthrough();

        CLI11_PARSE(app, argc, argv);

        if (gen->parsed()) {
            GeneratorSpec spec;
            if (!gen_config.empty()) spec = GeneratorSpec::from_json_file(gen_config);
            if (gen->count("--malicious")) spec.malicious_count = gen_malicious;
            if (gen->count("--benign")) spec.benign_count = gen_benign;
            if (gen->count("--seed") || gen_config.empty()) spec.seed = gen_seed;
            if (gen->count("--event-alphabet")) spec.event_alphabet = gen_alphabet;
            if (gen->count("--min-events")) spec.min_events = gen_min_events;
            if (gen->count("--max-events")) spec.max_events = gen_max_events;
            if (gen->count("--id-prefix")) spec.id_prefix = gen_prefix;
            pipeline::run_gen(spec, require_path(gen_out, "--out"), gen_workers, &std::cerr);
        } else if (registry->parsed()) {
            auto stats = pipeline::run_registry(require_path(reg_corpus, "--corpus"),
                                                require_path(reg_out, "--out"),
                                                {reg_permissive, 0, 0});
            std::cerr << "registry: " << stats.logs << " logs\n";
            print_parse_stats(stats);
        } else if (vocab->parsed()) {
            auto stats = pipeline::run_vocab(require_path(voc_corpus, "--corpus"), voc_k,
                                             require_path(voc_out, "--out"), cfg.tokenizer,
                                             {voc_permissive, voc_fraction, voc_split_seed});
            std::cerr << "vocab: built from " << stats.logs << " logs\n";
            print_parse_stats(stats);
        } else if (encode->parsed()) {
            auto stats = pipeline::run_encode(require_path(enc_corpus, "--corpus"),
                                              require_path(enc_registry, "--registry"),
                                              require_path(enc_vocab, "--vocab"),
                                              require_path(enc_out, "--out"), cfg.tokenizer,
                                              {enc_permissive, 0, 0});
            std::cerr << "encode: " << stats.patterns << " patterns, " << stats.unknown_events
                      << " unknown events dropped, " << stats.unknown_tokens
                      << " unknown tokens dropped, " << stats.empty_vectors
                      << " empty vectors\n";
        } else if (train_ae->parsed()) {
            auto report = pipeline::run_train_ae(
                require_path(tae_encoded, "--encoded"), require_path(tae_registry, "--registry"),
                require_path(tae_vocab, "--vocab"), require_path(tae_out, "--out"), tae_cfg,
                cfg.tokenizer, {false, tae_fraction, tae_split_seed}, &std::cerr);
            std::cerr << "train-ae: " << report.steps << " steps, skipped "
                      << report.skipped_empty << " empty vectors\n";
        } else if (embed->parsed()) {
            pipeline::run_embed(require_path(emb_model, "--model"),
                                require_path(emb_encoded, "--encoded"),
                                require_path(emb_out, "--out"));
        } else if (baseline->parsed()) {
            pipeline::run_baseline(require_path(bas_corpus, "--corpus"), bas_b,
                                   require_path(bas_out, "--out"),
                                   {bas_permissive, bas_fraction, bas_split_seed});
        } else if (featurize->parsed()) {
            pipeline::run_featurize(require_path(fea_corpus, "--corpus"),
                                    pipeline::feature_mode_from_name(fea_mode),
                                    require_path(fea_out, "--out"), fea_registry, fea_vocab,
                                    fea_model, fea_baselines,
                                    baseline_mode_from_name(fea_baseline_mode),
                                    {fea_permissive, 0, 0}, fea_workers);
        } else if (train_clf->parsed()) {
            clf_cfg.kind = classifier_kind_from_name(clf_kind);
            auto result = pipeline::run_train_clf(require_path(clf_features, "--features"),
                                                  clf_fraction, clf_split_seed, clf_cfg,
                                                  require_path(clf_out, "--out"));
            std::cerr << "train-clf: " << result.train_rows << " train rows";
            if (result.unlabeled_skipped)
                std::cerr << ", skipped " << result.unlabeled_skipped << " unlabeled";
            std::cerr << "\n";
        } else if (eval->parsed()) {
            std::vector<pipeline::EvalSetSpec> sets;
            for (const auto& raw : eval_sets) {
                const size_t eq = raw.find('=');
                const size_t colon = raw.rfind(':');
                if (eq == std::string::npos || colon == std::string::npos || colon < eq)
                    throw Error(ErrorClass::InvalidConfig,
                                "bad --set, expected name=features.csv:classifier: " + raw);
                sets.push_back({raw.substr(0, eq), raw.substr(eq + 1, colon - eq - 1),
                                raw.substr(colon + 1)});
            }
            if (sets.empty())
                sets.push_back({eval_name, require_path(eval_features, "--features"),
                                require_path(eval_classifier, "--classifier")});
            auto report = pipeline::run_eval(sets, eval_report, eval_roc, eval_min_auc);
            std::cerr << report.render_table();
        } else if (nn->parsed()) {
            std::cout << pipeline::run_nn(require_path(nn_model, "--model"),
                                          require_path(nn_vocab, "--vocab"), nn_token, nn_n,
                                          metric_from_name(nn_metric));
        } else if (analogy->parsed()) {
            std::string a, b, c;
            if (an_terms.size() == 3) {
                a = an_terms[0];
                b = an_terms[1];
                c = an_terms[2];
            } else if (an_terms.size() == 5 && an_terms[1] == "-" && an_terms[3] == "+") {
                a = an_terms[0];
                b = an_terms[2];
                c = an_terms[4];
            } else {
                throw Error(ErrorClass::InvalidConfig, "analogy expects: a - b + c");
            }
            std::cout << pipeline::run_analogy(require_path(an_model, "--model"),
                                               require_path(an_vocab, "--vocab"), a, b, c, an_n,
                                               metric_from_name(an_metric), !an_include_inputs);
        } else if (model_info->parsed()) {
            std::cout << pipeline::run_model_info(require_path(mi_model, "model path"));
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.cls());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
