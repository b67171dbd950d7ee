#include "logembed/pipeline.hpp"

#include <algorithm>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace logembed::pipeline {

namespace {

std::vector<Log> read_split_corpus(const std::string& corpus_path, const CorpusOptions& options,
                                   ParseStats* stats_out) {
    std::vector<Log> logs = read_corpus(corpus_path, ParseOptions{options.permissive}, stats_out);
    if (options.exclude_test_fraction > 0) {
        std::erase_if(logs, [&](const Log& log) {
            return is_test_id(log.id, options.exclude_test_fraction, options.split_seed);
        });
    }
    return logs;
}

void check_model_lineage(const AutoencoderModel& model, const EventTypeRegistry& registry,
                         const Vocabulary& vocab) {
    if (model.registry_hash != registry.content_hash())
        throw Error(ErrorClass::LineageMismatch,
                    "model was trained against a different event-type registry");
    if (model.vocab_hash != vocab.content_hash())
        throw Error(ErrorClass::LineageMismatch,
                    "model was trained against a different vocabulary");
    if (model.event_count != registry.size() || model.vocab_size != vocab.size())
        throw Error(ErrorClass::DimensionMismatch, "model M/K do not match registry/vocabulary");
}

// Deterministic per-index parallel map: out[i] depends only on in[i].
template <class Fn>
void parallel_indexed(size_t n, uint32_t workers, Fn&& fn) {
    workers = std::max<uint32_t>(1, workers);
    if (workers == 1 || n < 2 * workers) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    threads.reserve(workers);
    for (uint32_t w = 0; w < workers; ++w) {
        const size_t lo = n * w / workers;
        const size_t hi = n * (w + 1) / workers;
        threads.emplace_back([&fn, &errors, w, lo, hi] {
            try {
                for (size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace

bool is_test_id(const std::string& id, double test_fraction, uint64_t split_seed) {
    if (test_fraction <= 0) return false;
    if (test_fraction >= 1) return true;
    Rng rng(fnv1a64(id) ^ (0x9e3779b97f4a7c15ULL * (split_seed + 1)));
    return rng.next_double() < test_fraction;
}

const char* feature_mode_name(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::Semantic: return "semantic";
        case FeatureMode::Indicator: return "indicator";
        case FeatureMode::Counter: return "counter";
        case FeatureMode::Combined: return "combined";
    }
    return "semantic";
}

FeatureMode feature_mode_from_name(const std::string& name) {
    if (name == "semantic") return FeatureMode::Semantic;
    if (name == "indicator") return FeatureMode::Indicator;
    if (name == "counter") return FeatureMode::Counter;
    if (name == "combined") return FeatureMode::Combined;
    throw Error(ErrorClass::InvalidConfig, "unknown feature mode: " + name);
}

void run_gen(const GeneratorSpec& spec, const std::string& corpus_out, uint32_t workers,
             std::ostream* progress) {
    generate_corpus_file(spec, corpus_out, workers);
    if (progress)
        *progress << "gen: wrote " << (spec.malicious_count + spec.benign_count)
                  << " logs to " << corpus_out << "\n";
}

ParseStats run_registry(const std::string& corpus_path, const std::string& registry_out,
                        const CorpusOptions& options) {
    require_artifact(corpus_path, "corpus");
    CorpusReader reader(corpus_path, ParseOptions{options.permissive});
    RegistryBuilder builder;
    while (auto log = reader.next()) builder.add(*log);
    builder.build().save(registry_out);
    return reader.stats();
}

ParseStats run_vocab(const std::string& corpus_path, size_t k, const std::string& vocab_out,
                     const TokenizerConfig& tokenizer, const CorpusOptions& options) {
    require_artifact(corpus_path, "corpus");
    CorpusReader reader(corpus_path, ParseOptions{options.permissive});
    VocabularyBuilder builder(tokenizer);
    while (auto log = reader.next()) {
        if (options.exclude_test_fraction > 0 &&
            is_test_id(log->id, options.exclude_test_fraction, options.split_seed))
            continue;
        for (const auto& pattern : extract_patterns(build_graph(*log)))
            builder.add_pattern(pattern);
    }
    builder.build(k).save(vocab_out);
    return reader.stats();
}

EncodeStats run_encode(const std::string& corpus_path, const std::string& registry_path,
                       const std::string& vocab_path, const std::string& encoded_out,
                       const TokenizerConfig& tokenizer, const CorpusOptions& options) {
    require_artifact(corpus_path, "corpus");
    const EventTypeRegistry registry = EventTypeRegistry::load(registry_path);
    const Vocabulary vocab = Vocabulary::load(vocab_path);
    PatternEncoder encoder(registry, vocab, tokenizer);

    EncodeStats stats;
    std::vector<EncodedPattern> rows;
    CorpusReader reader(corpus_path, ParseOptions{options.permissive});
    while (auto log = reader.next()) {
        for (auto& vec : encoder.encode_log(*log, &stats))
            rows.push_back(EncodedPattern{log->id, std::move(vec)});
    }
    write_encoded_corpus(encoded_out, rows);
    return stats;
}

TrainReport run_train_ae(const std::string& encoded_path, const std::string& registry_path,
                         const std::string& vocab_path, const std::string& model_out,
                         const TrainConfig& config, const TokenizerConfig& tokenizer,
                         const CorpusOptions& options, std::ostream* progress) {
    const EventTypeRegistry registry = EventTypeRegistry::load(registry_path);
    const Vocabulary vocab = Vocabulary::load(vocab_path);
    const auto dim = static_cast<uint32_t>(registry.size() + vocab.size());

    std::vector<EncodedPattern> rows = read_encoded_corpus(encoded_path, dim);
    std::vector<SparseBinaryVector> corpus;
    corpus.reserve(rows.size());
    for (auto& row : rows) {
        if (options.exclude_test_fraction > 0 &&
            is_test_id(row.log_id, options.exclude_test_fraction, options.split_seed))
            continue;
        corpus.push_back(std::move(row.vec));
    }

    TrainReport report;
    EpochCallback on_epoch = nullptr;
    if (progress)
        on_epoch = [progress](uint32_t epoch, double mean_loss) {
            *progress << "train-ae: epoch " << epoch << " mean loss " << mean_loss << "\n";
        };
    AutoencoderModel model = train_autoencoder(corpus, config, &report, on_epoch);
    model.event_count = static_cast<uint32_t>(registry.size());
    model.vocab_size = static_cast<uint32_t>(vocab.size());
    model.tokenizer = tokenizer;
    model.registry_hash = registry.content_hash();
    model.vocab_hash = vocab.content_hash();
    model.save(model_out);
    return report;
}

void run_embed(const std::string& model_path, const std::string& encoded_path,
               const std::string& embeddings_out) {
    const AutoencoderModel model = AutoencoderModel::load(model_path);
    const auto rows = read_encoded_corpus(encoded_path, model.input_dim);
    std::string out;
    for (const auto& row : rows) {
        out += row.log_id;
        out += '\t';
        const auto embedding = embed_pattern(model, row.vec);
        for (size_t d = 0; d < embedding.size(); ++d) {
            if (d > 0) out += ' ';
            out += fmt_g9(embedding[d]);
        }
        out += '\n';
    }
    write_text_file(embeddings_out, out);
}

void run_baseline(const std::string& corpus_path, size_t b, const std::string& baselines_out,
                  const CorpusOptions& options) {
    require_artifact(corpus_path, "corpus");
    const std::vector<Log> train_logs = read_split_corpus(corpus_path, options, nullptr);
    build_baseline_spec(train_logs, b).save(baselines_out);
}

void run_featurize(const std::string& corpus_path, FeatureMode mode,
                   const std::string& features_out, const std::string& registry_path,
                   const std::string& vocab_path, const std::string& model_path,
                   const std::string& baselines_path, BaselineMode baseline_mode,
                   const CorpusOptions& options, uint32_t workers) {
    require_artifact(corpus_path, "corpus");
    const bool needs_model = mode == FeatureMode::Semantic || mode == FeatureMode::Combined;
    const bool needs_baselines =
        mode == FeatureMode::Indicator || mode == FeatureMode::Counter ||
        mode == FeatureMode::Combined;

    EventTypeRegistry registry;
    Vocabulary vocab;
    AutoencoderModel model;
    BaselineSpec baselines;
    if (needs_model) {
        registry = EventTypeRegistry::load(registry_path);
        vocab = Vocabulary::load(vocab_path);
        model = AutoencoderModel::load(model_path);
        check_model_lineage(model, registry, vocab);
    }
    if (needs_baselines) baselines = BaselineSpec::load(baselines_path);

    const std::vector<Log> logs =
        read_corpus(corpus_path, ParseOptions{options.permissive}, nullptr);

    const PatternEncoder encoder(registry, vocab, model.tokenizer);
    // Combined layout: counter baseline block first, then the 3D semantic block.
    std::vector<std::vector<double>> rows(logs.size());
    parallel_indexed(logs.size(), workers, [&](size_t i) {
        const Log& log = logs[i];
        std::vector<double>& row = rows[i];
        if (needs_baselines) {
            BaselineMode bm = baseline_mode;
            if (mode == FeatureMode::Indicator) bm = BaselineMode::Indicator;
            if (mode == FeatureMode::Counter) bm = BaselineMode::Counter;
            row = baseline_features(log, baselines, bm);
        }
        if (needs_model) {
            const auto feature = featurize_log(model, encoder.encode_log(log));
            row.insert(row.end(), feature.values.begin(), feature.values.end());
        }
    });

    FeatureMatrix matrix;
    for (size_t i = 0; i < logs.size(); ++i) matrix.add_row(logs[i].id, logs[i].label, rows[i]);
    write_features(features_out, matrix);
}

TrainClfResult run_train_clf(const std::string& features_path, double test_fraction,
                             uint64_t split_seed, const ClassifierConfig& config,
                             const std::string& classifier_out) {
    require_artifact(features_path, "feature file");
    const std::string bytes = read_text_file(features_path);
    const FeatureMatrix features = parse_features(bytes);

    TrainClfResult result;
    std::vector<size_t> train_rows;
    for (size_t i = 0; i < features.rows(); ++i) {
        if (features.labels[i] == Label::Unlabeled) {
            ++result.unlabeled_skipped;
            continue;
        }
        if (!is_test_id(features.ids[i], test_fraction, split_seed)) train_rows.push_back(i);
    }
    result.train_rows = train_rows.size();

    ClassifierModel model = train_classifier(features, train_rows, config);
    model.features_hash = fnv1a64(bytes);
    model.test_fraction = test_fraction;
    model.split_seed = split_seed;
    model.save(classifier_out);
    return result;
}

EvalReport run_eval(const std::vector<EvalSetSpec>& sets, const std::string& report_out,
                    const std::string& roc_out, double min_auc) {
    if (sets.empty()) throw Error(ErrorClass::InvalidConfig, "eval: no feature sets given");

    EvalReport report;
    std::vector<std::string> reference_ids;
    double reference_fraction = 0;
    uint64_t reference_seed = 0;

    for (size_t s = 0; s < sets.size(); ++s) {
        const auto& set = sets[s];
        require_artifact(set.classifier_path, "classifier");
        require_artifact(set.features_path, "feature file");
        const ClassifierModel clf = ClassifierModel::load(set.classifier_path);
        const std::string bytes = read_text_file(set.features_path);
        if (fnv1a64(bytes) != clf.features_hash)
            throw Error(ErrorClass::LineageMismatch,
                        "eval: feature file \"" + set.features_path +
                            "\" is not the one the classifier was trained from");
        const FeatureMatrix features = parse_features(bytes);

        if (s == 0) {
            reference_fraction = clf.test_fraction;
            reference_seed = clf.split_seed;
        } else if (clf.test_fraction != reference_fraction || clf.split_seed != reference_seed) {
            throw Error(ErrorClass::LineageMismatch,
                        "eval: classifiers disagree on the train/test split");
        }

        std::vector<size_t> test_rows;
        std::vector<int> labels;
        std::vector<std::string> ids;
        for (size_t i = 0; i < features.rows(); ++i) {
            if (features.labels[i] == Label::Unlabeled) continue;
            if (!is_test_id(features.ids[i], clf.test_fraction, clf.split_seed)) continue;
            test_rows.push_back(i);
            labels.push_back(label_to_binary(features.labels[i]));
            ids.push_back(features.ids[i]);
        }
        if (s == 0) {
            reference_ids = ids;
        } else if (ids != reference_ids) {
            throw Error(ErrorClass::LineageMismatch,
                        "eval: feature sets cover different test logs");
        }

        const std::vector<double> scores = clf.score_rows(features, test_rows);
        report.rows.push_back(evaluate_scores(set.name, scores, labels));
    }

    if (!report_out.empty()) write_text_file(report_out, report.render_table());
    if (!roc_out.empty()) write_text_file(roc_out, report.roc_csv());

    if (min_auc >= 0) {
        for (const auto& row : report.rows)
            if (row.auc < min_auc)
                throw Error(ErrorClass::GateFailed,
                            "eval gate: " + row.feature_set + " AUC " + fmt_g9(row.auc) +
                                " below " + fmt_g9(min_auc));
    }
    return report;
}

namespace {

EmbeddingIndex load_index(const std::string& model_path, const std::string& vocab_path,
                          Metric metric) {
    const AutoencoderModel model = AutoencoderModel::load(model_path);
    const Vocabulary vocab = Vocabulary::load(vocab_path);
    if (model.vocab_hash != vocab.content_hash())
        throw Error(ErrorClass::LineageMismatch,
                    "vocabulary is not the one the model was trained with");
    return EmbeddingIndex::from_model(model, vocab, metric);
}

}  // namespace

std::string run_nn(const std::string& model_path, const std::string& vocab_path,
                   const std::string& token, size_t n, Metric metric) {
    return render_neighbors(load_index(model_path, vocab_path, metric).nearest_neighbors(token, n));
}

std::string run_analogy(const std::string& model_path, const std::string& vocab_path,
                        const std::string& positive_a, const std::string& negative_b,
                        const std::string& positive_c, size_t n, Metric metric,
                        bool exclude_inputs) {
    return render_neighbors(load_index(model_path, vocab_path, metric)
                                .analogy(positive_a, negative_b, positive_c, n, exclude_inputs));
}

std::string run_model_info(const std::string& model_path) {
    const AutoencoderModel model = AutoencoderModel::load(model_path);
    std::ostringstream out;
    out << "model: " << model_path << "\n";
    out << "M (event types): " << model.event_count << "\n";
    out << "K (vocabulary): " << model.vocab_size << "\n";
    out << "D (hidden): " << model.hidden_dim << "\n";
    out << "seed: " << model.seed << "\n";
    out << "registry_hash: " << hex_u64(model.registry_hash) << "\n";
    out << "vocab_hash: " << hex_u64(model.vocab_hash) << "\n";
    out << "tokenizer: fold_case=" << (model.tokenizer.fold_case ? "true" : "false")
        << " separators=\"" << model.tokenizer.separators << "\"\n";
    out << "parameters: W " << model.input_dim << "x" << model.hidden_dim << ", V "
        << model.input_dim << "x" << model.hidden_dim << ", b " << model.hidden_dim << ", c "
        << model.input_dim << "\n";
    return out.str();
}

}  // namespace logembed::pipeline
