#include <doctest.h>

#include "helpers.hpp"
#include "logembed/baseline.hpp"
#include "logembed/classifier.hpp"
#include "logembed/eval.hpp"

using namespace logembed;
using testutil::TempDir;

namespace {

Log log_with_signature_times(const std::string& id, size_t times) {
    // each argument adjacent to exactly {X, Y} -> one occurrence per argument
    Log log;
    log.id = id;
    for (size_t i = 0; i < times; ++i) {
        const std::string arg = "shared" + std::to_string(i);
        log.events.push_back({"X", {arg}});
        log.events.push_back({"Y", {arg}});
    }
    return log;
}

}  // namespace

TEST_CASE("baseline indicator and counter semantics") {
    const Log once = log_with_signature_times("a", 1);
    const Log thrice = log_with_signature_times("b", 3);
    const BaselineSpec spec = build_baseline_spec({once, thrice}, 1);
    REQUIRE(spec.size() == 1);
    CHECK(spec.signatures()[0] == "X|Y");

    CHECK(baseline_features(once, spec, BaselineMode::Indicator) == std::vector<double>{1});
    CHECK(baseline_features(once, spec, BaselineMode::Counter) == std::vector<double>{1});
    CHECK(baseline_features(thrice, spec, BaselineMode::Indicator) == std::vector<double>{1});
    CHECK(baseline_features(thrice, spec, BaselineMode::Counter) == std::vector<double>{3});

    Log other;
    other.id = "c";
    other.events = {{"Z", {"p"}}};
    CHECK(baseline_features(other, spec, BaselineMode::Counter) == std::vector<double>{0});
}

TEST_CASE("baseline counts match a brute-force recount oracle") {
    Rng rng(50);
    std::vector<Log> corpus;
    for (int i = 0; i < 40; ++i) {
        corpus.push_back(testutil::random_log(rng, 10, 4, 6));
        corpus.back().id = "log" + std::to_string(i);
    }
    const BaselineSpec spec = build_baseline_spec(corpus, 50);

    for (const auto& log : corpus) {
        // oracle: per argument, recompute its adjacency from scratch
        std::map<std::string, std::set<std::string>> adjacency;
        for (const auto& ev : log.events)
            for (const auto& arg : ev.args) adjacency[arg].insert(ev.event_type);
        std::map<std::string, double> oracle_counts;
        for (const auto& [arg, adj] : adjacency) {
            std::string sig;
            for (const auto& ev : adj) {
                if (!sig.empty()) sig += '|';
                sig += ev;
            }
            oracle_counts[sig] += 1;
        }

        const auto counter = baseline_features(log, spec, BaselineMode::Counter);
        const auto indicator = baseline_features(log, spec, BaselineMode::Indicator);
        for (size_t i = 0; i < spec.size(); ++i) {
            const auto it = oracle_counts.find(spec.signatures()[i]);
            const double expected = it == oracle_counts.end() ? 0.0 : it->second;
            CHECK(counter[i] == expected);
            CHECK(indicator[i] == (expected > 0 ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("baseline spec records training provenance and respects B") {
    Rng rng(51);
    std::vector<Log> corpus;
    for (int i = 0; i < 30; ++i) {
        corpus.push_back(testutil::random_log(rng, 8, 5, 6));
        corpus.back().id = "log" + std::to_string(i);
    }
    const BaselineSpec full = build_baseline_spec(corpus, 1000);
    const BaselineSpec top3 = build_baseline_spec(corpus, 3);
    CHECK(top3.size() == std::min<size_t>(3, full.size()));
    CHECK(top3.source_hash() == full.source_hash());
    for (size_t i = 0; i + 1 < top3.size(); ++i)
        CHECK(top3.frequency_at(i) >= top3.frequency_at(i + 1));

    const std::vector<Log> half(corpus.begin(), corpus.begin() + 15);
    CHECK(build_baseline_spec(half, 1000).source_hash() != full.source_hash());

    TempDir dir;
    const std::string path = dir.file("baselines.txt");
    top3.save(path);
    const BaselineSpec back = BaselineSpec::load(path);
    CHECK(back.signatures() == top3.signatures());
    CHECK(back.source_hash() == top3.source_hash());
}

TEST_CASE("logistic reaches training accuracy 1.0 on a separable set") {
    std::vector<double> data;
    std::vector<int> labels;
    Rng rng(52);
    for (int i = 0; i < 60; ++i) {
        const bool pos = i % 2 == 0;
        data.push_back(pos ? rng.uniform(2, 3) : rng.uniform(-3, -2));
        data.push_back(rng.uniform(-1, 1));
        labels.push_back(pos ? 1 : 0);
    }
    ClassifierConfig cfg;
    cfg.kind = ClassifierKind::Logistic;
    const ClassifierModel m = train_classifier(data.data(), 60, 2, labels, cfg);
    size_t correct = 0;
    for (int i = 0; i < 60; ++i)
        correct += (m.score(&data[i * 2]) > 0.5 ? 1 : 0) == labels[i];
    CHECK(correct == 60);
}

TEST_CASE("boosted trees reach training accuracy 1.0 on a separable set") {
    std::vector<double> data;
    std::vector<int> labels;
    Rng rng(53);
    for (int i = 0; i < 60; ++i) {
        const bool pos = i % 2 == 0;
        data.push_back(pos ? rng.uniform(2, 3) : rng.uniform(-3, -2));
        data.push_back(rng.uniform(-1, 1));
        labels.push_back(pos ? 1 : 0);
    }
    ClassifierConfig cfg;
    cfg.kind = ClassifierKind::BoostedTrees;
    cfg.n_trees = 20;
    cfg.max_depth = 1;
    cfg.min_leaf = 1;
    const ClassifierModel m = train_classifier(data.data(), 60, 2, labels, cfg);
    size_t correct = 0;
    for (int i = 0; i < 60; ++i)
        correct += (m.score(&data[i * 2]) > 0.5 ? 1 : 0) == labels[i];
    CHECK(correct == 60);
}

TEST_CASE("shuffled labels give chance-level test AUC") {
    Rng rng(54);
    const size_t n = 400, d = 4;
    std::vector<double> data(n * d);
    for (auto& x : data) x = rng.uniform(-1, 1);
    std::vector<int> labels(n);
    for (size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.below(2));

    const auto split = split_rows(n, 0.5, 9);
    std::vector<double> train_data;
    std::vector<int> train_labels;
    for (size_t i : split.train) {
        train_data.insert(train_data.end(), &data[i * d], &data[i * d] + d);
        train_labels.push_back(labels[i]);
    }
    ClassifierConfig cfg;
    cfg.kind = ClassifierKind::Logistic;
    const ClassifierModel m =
        train_classifier(train_data.data(), split.train.size(), d, train_labels, cfg);

    std::vector<double> scores;
    std::vector<int> test_labels;
    for (size_t i : split.test) {
        scores.push_back(m.score(&data[i * d]));
        test_labels.push_back(labels[i]);
    }
    const double auc = roc_auc(scores, test_labels);
    CHECK(auc > 0.4);
    CHECK(auc < 0.6);
}

TEST_CASE("positive scaling leaves boosted-tree predictions identical") {
    Rng rng(55);
    const size_t n = 120, d = 3;
    std::vector<double> data(n * d);
    for (auto& x : data) x = rng.uniform(-2, 2);
    std::vector<int> labels(n);
    for (size_t i = 0; i < n; ++i)
        labels[i] = data[i * d] + 0.3 * data[i * d + 1] > 0 ? 1 : 0;

    ClassifierConfig cfg;
    cfg.kind = ClassifierKind::BoostedTrees;
    cfg.n_trees = 25;
    cfg.max_depth = 2;
    cfg.min_leaf = 2;
    const ClassifierModel base = train_classifier(data.data(), n, d, labels, cfg);

    std::vector<double> scaled(data);
    for (auto& x : scaled) x *= 7.5;
    const ClassifierModel rescaled = train_classifier(scaled.data(), n, d, labels, cfg);
    for (size_t i = 0; i < n; ++i)
        CHECK(base.score(&data[i * d]) == rescaled.score(&scaled[i * d]));
}

TEST_CASE("boosted-tree predictions are invariant under monotone transforms") {
    Rng rng(56);
    const size_t n = 100, d = 2;
    std::vector<double> data(n * d);
    for (auto& x : data) x = rng.uniform(-2, 2);
    std::vector<int> labels(n);
    for (size_t i = 0; i < n; ++i) labels[i] = data[i * d] > 0.2 ? 1 : 0;

    ClassifierConfig cfg;
    cfg.kind = ClassifierKind::BoostedTrees;
    cfg.n_trees = 15;
    cfg.max_depth = 2;
    cfg.min_leaf = 2;
    const ClassifierModel base = train_classifier(data.data(), n, d, labels, cfg);

    // strictly monotone per-feature transform: x -> x^3
    std::vector<double> cubed(data);
    for (auto& x : cubed) x = x * x * x;
    const ClassifierModel transformed = train_classifier(cubed.data(), n, d, labels, cfg);
    for (size_t i = 0; i < n; ++i)
        CHECK(base.score(&data[i * d]) ==
              doctest::Approx(transformed.score(&cubed[i * d])).epsilon(1e-12));
}

TEST_CASE("single-class training data is rejected") {
    std::vector<double> data{1, 2, 3};
    std::vector<int> labels{1, 1, 1};
    ClassifierConfig cfg;
    try {
        train_classifier(data.data(), 3, 1, labels, cfg);
        FAIL("expected SingleClassCorpus");
    } catch (const Error& e) {
        CHECK(e.cls() == ErrorClass::SingleClassCorpus);
    }
}

TEST_CASE("classifier files round trip for both kinds") {
    Rng rng(57);
    const size_t n = 80, d = 3;
    std::vector<double> data(n * d);
    for (auto& x : data) x = rng.uniform(-2, 2);
    std::vector<int> labels(n);
    for (size_t i = 0; i < n; ++i) labels[i] = data[i * d] > 0 ? 1 : 0;

    TempDir dir;
    for (const auto kind : {ClassifierKind::Logistic, ClassifierKind::BoostedTrees}) {
        ClassifierConfig cfg;
        cfg.kind = kind;
        cfg.n_trees = 10;
        cfg.min_leaf = 2;
        ClassifierModel m = train_classifier(data.data(), n, d, labels, cfg);
        m.features_hash = 0xabcd;
        m.test_fraction = 0.25;
        m.split_seed = 3;
        const std::string path = dir.file("clf.txt");
        m.save(path);
        const ClassifierModel back = ClassifierModel::load(path);
        CHECK(back.kind == kind);
        CHECK(back.features_hash == 0xabcd);
        CHECK(back.test_fraction == 0.25);
        CHECK(back.split_seed == 3);
        for (size_t i = 0; i < n; ++i)
            CHECK(back.score(&data[i * d]) == m.score(&data[i * d]));
    }
}

TEST_CASE("perfect separation gives AUC 1, constant scores give 0.5") {
    CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
    CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == 0.5);
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0}) == 0.0);
}

TEST_CASE("ten-point sweep AUC equals the pairwise oracle") {
    const std::vector<double> scores{0.1, 0.4, 0.35, 0.8, 0.8, 0.7, 0.2, 0.5, 0.5, 0.9};
    const std::vector<int> labels{0, 0, 1, 1, 0, 1, 0, 1, 0, 1};
    CHECK(roc_auc(scores, labels) ==
          doctest::Approx(testutil::oracle_auc(scores, labels)).epsilon(1e-12));
}

TEST_CASE("sweep AUC equals Mann-Whitney on random score sets with ties") {
    Rng rng(58);
    for (int trial = 0; trial < 100; ++trial) {
        const size_t n = 2 + rng.below(200);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (size_t i = 0; i < n; ++i) {
            // quantized scores force tie groups
            scores[i] = static_cast<double>(rng.below(20)) / 20.0;
            labels[i] = static_cast<int>(rng.below(2));
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos) labels[0] = 1;
        if (!has_neg) labels[n - 1] = 0;
        CHECK(roc_auc(scores, labels) ==
              doctest::Approx(testutil::oracle_auc(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("roc curve is monotone and detection rates respect the FPR caps") {
    Rng rng(59);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 3000; ++i) {
        const int y = static_cast<int>(rng.below(2));
        scores.push_back(rng.uniform(0, 1) + (y ? 0.4 : 0.0));
        labels.push_back(y);
    }
    const EvalRow row = evaluate_scores("t", scores, labels);
    for (size_t i = 1; i < row.roc.size(); ++i) {
        CHECK(row.roc[i].fpr >= row.roc[i - 1].fpr);
        CHECK(row.roc[i].tpr >= row.roc[i - 1].tpr);
    }
    CHECK(row.roc.front().fpr == 0.0);
    CHECK(row.roc.back().fpr == 1.0);
    CHECK(row.auc >= 0.0);
    CHECK(row.auc <= 1.0);
    CHECK(row.tpr_at_fpr_1e4 <= row.tpr_at_fpr_1e3);

    // detection rate at fpr cap tau: max tpr with at most floor(tau * n_neg) FPs
    const double fp_allowed = std::floor(1e-3 * static_cast<double>(row.n_neg));
    double best = 0;
    for (const auto& p : row.roc)
        if (p.fpr * static_cast<double>(row.n_neg) <= fp_allowed + 1e-9)
            best = std::max(best, p.tpr);
    CHECK(row.tpr_at_fpr_1e3 == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("single-class score sets are rejected") {
    CHECK_THROWS_AS(evaluate_scores("t", {0.5, 0.6}, {1, 1}), Error);
}

TEST_CASE("report table and roc csv render deterministically") {
    EvalReport report;
    report.rows.push_back(evaluate_scores("set_a", {0.9, 0.1}, {1, 0}));
    const std::string table = report.render_table();
    CHECK(table.find("feature_set") != std::string::npos);
    CHECK(table.find("set_a") != std::string::npos);
    const std::string csv = report.roc_csv();
    CHECK(csv.rfind("feature_set,fpr,tpr\n", 0) == 0);
    CHECK(report.render_table() == table);
}

TEST_CASE("split_rows partitions deterministically") {
    const auto a = split_rows(100, 0.3, 5);
    const auto b = split_rows(100, 0.3, 5);
    CHECK(a.test == b.test);
    CHECK(a.train == b.train);
    CHECK(a.test.size() == 30);
    CHECK(a.train.size() == 70);
    std::set<size_t> all(a.test.begin(), a.test.end());
    all.insert(a.train.begin(), a.train.end());
    CHECK(all.size() == 100);
    CHECK(split_rows(100, 0.3, 6).test != a.test);
}
