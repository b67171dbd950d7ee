#include <doctest.h>

#include "helpers.hpp"
#include "logembed/pipeline.hpp"

using namespace logembed;
using namespace logembed::pipeline;
using testutil::TempDir;

namespace {

struct PipelineRun {
    TempDir dir;
    std::string corpus, registry, vocab, encoded, model, features, baselines, classifier;

    explicit PipelineRun(uint64_t seed, uint64_t n_mal = 150, uint64_t n_ben = 150) {
        corpus = dir.file("corpus.jsonl");
        registry = dir.file("registry.txt");
        vocab = dir.file("vocab.txt");
        encoded = dir.file("encoded.tsv");
        model = dir.file("model.bin");
        features = dir.file("features.csv");
        baselines = dir.file("baselines.txt");
        classifier = dir.file("classifier.txt");

        GeneratorSpec spec;
        spec.seed = seed;
        spec.malicious_count = n_mal;
        spec.benign_count = n_ben;
        run_gen(spec, corpus);
        run_registry(corpus, registry);
        run_vocab(corpus, 300, vocab, {}, {false, 0.3, 7});
        run_encode(corpus, registry, vocab, encoded);

        TrainConfig train;
        train.hidden_dim = 8;
        train.epochs = 2;
        train.batch_size = 64;
        train.seed = seed;
        run_train_ae(encoded, registry, vocab, model, train, {}, {false, 0.3, 7});
        run_baseline(corpus, 500, baselines, {false, 0.3, 7});
        run_featurize(corpus, FeatureMode::Semantic, features, registry, vocab, model);

        ClassifierConfig clf;
        clf.kind = ClassifierKind::Logistic;
        clf.logistic_iterations = 150;
        run_train_clf(features, 0.3, 7, clf, classifier);
    }
};

}  // namespace

TEST_CASE("id-based split is deterministic and close to the requested fraction") {
    size_t test_count = 0;
    const size_t n = 5000;
    for (size_t i = 0; i < n; ++i) {
        const std::string id = "log-" + std::to_string(i);
        const bool t = is_test_id(id, 0.3, 42);
        CHECK(t == is_test_id(id, 0.3, 42));
        test_count += t;
    }
    CHECK(test_count > n * 0.27);
    CHECK(test_count < n * 0.33);
    CHECK(is_test_id("anything", 0, 42) == false);
    CHECK(is_test_id("anything", 1, 42) == true);
}

TEST_CASE("full pipeline runs end to end and eval reports a sane AUC") {
    PipelineRun run(21);
    const std::string report = run.dir.file("report.txt");
    const std::string roc = run.dir.file("roc.csv");
    const EvalReport result =
        run_eval({{"semantic", run.features, run.classifier}}, report, roc);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].auc > 0.6); // planted signal must be learnable
    CHECK(file_exists(report));
    CHECK(file_exists(roc));
    CHECK(read_text_file(report).find("semantic") != std::string::npos);
}

TEST_CASE("rerunning the pipeline with the same seed is bytewise identical") {
    PipelineRun a(33), b(33);
    CHECK(read_text_file(a.corpus) == read_text_file(b.corpus));
    CHECK(read_text_file(a.model) == read_text_file(b.model));
    CHECK(read_text_file(a.features) == read_text_file(b.features));
    CHECK(read_text_file(a.classifier) == read_text_file(b.classifier));
}

TEST_CASE("featurize worker count does not change the output") {
    PipelineRun run(35, 60, 60);
    const std::string two = run.dir.file("features2.csv");
    run_featurize(run.corpus, FeatureMode::Semantic, two, run.registry, run.vocab, run.model,
                  "", BaselineMode::Counter, {}, 2);
    CHECK(read_text_file(run.features) == read_text_file(two));
}

TEST_CASE("eval refuses a feature file the classifier was not trained from") {
    PipelineRun run(34, 80, 80);
    const std::string other = run.dir.file("other.csv");
    run_featurize(run.corpus, FeatureMode::Counter, other, "", "", "", run.baselines);
    try {
        run_eval({{"counter", other, run.classifier}}, run.dir.file("r.txt"),
                 run.dir.file("roc.csv"));
        FAIL("expected LineageMismatch");
    } catch (const Error& e) {
        CHECK(e.cls() == ErrorClass::LineageMismatch);
    }
}

TEST_CASE("featurize refuses artifacts from a different training run") {
    PipelineRun run(36, 60, 60);
    // rebuild the vocabulary with a different size: hash changes
    run_vocab(run.corpus, 100, run.dir.file("other_vocab.txt"));
    try {
        run_featurize(run.corpus, FeatureMode::Semantic, run.dir.file("f.csv"), run.registry,
                      run.dir.file("other_vocab.txt"), run.model);
        FAIL("expected LineageMismatch");
    } catch (const Error& e) {
        CHECK(e.cls() == ErrorClass::LineageMismatch);
    }
}

TEST_CASE("eval gate throws GateFailed when AUC is below the bar") {
    PipelineRun run(37, 80, 80);
    try {
        run_eval({{"semantic", run.features, run.classifier}}, run.dir.file("r.txt"),
                 run.dir.file("roc.csv"), 1.01);
        FAIL("expected GateFailed");
    } catch (const Error& e) {
        CHECK(e.cls() == ErrorClass::GateFailed);
    }
}

TEST_CASE("missing artifacts raise MissingArtifact") {
    TempDir dir;
    try {
        run_eval({{"x", dir.file("nope.csv"), dir.file("nope.clf")}}, "", "");
        FAIL("expected MissingArtifact");
    } catch (const Error& e) {
        CHECK(e.cls() == ErrorClass::MissingArtifact);
    }
    CHECK_THROWS_AS(run_registry(dir.file("missing.jsonl"), dir.file("out.txt")), Error);
    CHECK_THROWS_AS(AutoencoderModel::load(dir.file("missing.bin")), Error);
}

TEST_CASE("combined features concatenate counter and semantic blocks") {
    PipelineRun run(38, 60, 60);
    const std::string counter_path = run.dir.file("counter.csv");
    const std::string combined_path = run.dir.file("combined.csv");
    run_featurize(run.corpus, FeatureMode::Counter, counter_path, "", "", "", run.baselines);
    run_featurize(run.corpus, FeatureMode::Combined, combined_path, run.registry, run.vocab,
                  run.model, run.baselines);
    const FeatureMatrix counter = read_features(counter_path);
    const FeatureMatrix semantic = read_features(run.features);
    const FeatureMatrix combined = read_features(combined_path);
    CHECK(combined.n_features == counter.n_features + semantic.n_features);
    REQUIRE(combined.rows() == counter.rows());
    // first row: counter block then semantic block
    for (size_t j = 0; j < counter.n_features; ++j)
        CHECK(combined.row(0)[j] == counter.row(0)[j]);
    for (size_t j = 0; j < semantic.n_features; ++j)
        CHECK(combined.row(0)[counter.n_features + j] == semantic.row(0)[j]);
}

TEST_CASE("baseline spec provenance proves it was built from the train split") {
    PipelineRun run(42, 60, 60);
    const BaselineSpec spec = BaselineSpec::load(run.baselines);

    // recompute the expected provenance hash from the train-split ids
    std::vector<std::string> train_ids;
    for (const auto& log : read_corpus(run.corpus))
        if (!is_test_id(log.id, 0.3, 7)) train_ids.push_back(log.id);
    std::sort(train_ids.begin(), train_ids.end());
    uint64_t expected = 0xcbf29ce484222325ULL;
    for (const auto& id : train_ids) expected = fnv1a64(id + "\n", expected);
    CHECK(spec.source_hash() == expected);

    // a spec built from the full corpus has different provenance
    const std::string full = run.dir.file("baselines_full.txt");
    run_baseline(run.corpus, 500, full);
    CHECK(BaselineSpec::load(full).source_hash() != spec.source_hash());
}

TEST_CASE("model info echoes the training header") {
    PipelineRun run(39, 40, 40);
    const std::string info = run_model_info(run.model);
    CHECK(info.find("D (hidden): 8") != std::string::npos);
    CHECK(info.find("seed: 39") != std::string::npos);
    CHECK(info.find("registry_hash") != std::string::npos);
}

TEST_CASE("nn and analogy verbs answer deterministically from a trained model") {
    PipelineRun run(40, 80, 80);
    const std::string nn1 = run_nn(run.model, run.vocab, "exe", 5);
    const std::string nn2 = run_nn(run.model, run.vocab, "exe", 5);
    CHECK(nn1 == nn2);
    CHECK(!nn1.empty());
    CHECK(nn1.find("exe") == std::string::npos); // query excluded

    const std::string an = run_analogy(run.model, run.vocab, "exe", "dll", "com", 3);
    CHECK(!an.empty());
    try {
        run_nn(run.model, run.vocab, "definitely-not-a-token", 5);
        FAIL("expected UnknownToken");
    } catch (const Error& e) {
        CHECK(e.cls() == ErrorClass::UnknownToken);
    }
}

TEST_CASE("embed exports one embedding line per pattern") {
    PipelineRun run(41, 30, 30);
    const std::string out = run.dir.file("embeddings.tsv");
    run_embed(run.model, run.encoded, out);
    const auto lines = split_lines(read_text_file(out));
    const auto encoded = read_encoded_corpus(run.encoded, 0x7fffffff);
    size_t non_empty = 0;
    for (const auto& line : lines) non_empty += !line.empty();
    CHECK(non_empty == encoded.size());
}
