#include <doctest.h>

#include "helpers.hpp"
#include "logembed/featurizer.hpp"

using namespace logembed;
using testutil::TempDir;

TEST_CASE("a single embedding reduces to [e | e | e]") {
    Rng rng(40);
    const auto m = testutil::random_model(rng, 6, 3);
    const auto v = testutil::random_sparse(rng, 6, 4);
    const auto e = embed_pattern(m, v);
    const auto f = featurize_log(m, {v}, "one", Label::Benign);
    CHECK_FALSE(f.empty_log);
    REQUIRE(f.values.size() == 9);
    for (int d = 0; d < 3; ++d) {
        CHECK(f.values[d] == e[d]);
        CHECK(f.values[3 + d] == e[d]);
        CHECK(f.values[6 + d] == e[d]);
    }
}

TEST_CASE("forced arithmetic: [1,2] and [3,0] give min [1,0], max [3,2], mean [2,1]") {
    const auto out = aggregate_embeddings({{1, 2}, {3, 0}}, 2);
    CHECK(out == std::vector<double>{1, 0, 3, 2, 2, 1});
}

TEST_CASE("aggregation equals an independent fold oracle") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const size_t d = 1 + rng.below(6);
        const size_t n = 1 + rng.below(10);
        std::vector<std::vector<double>> embeddings(n, std::vector<double>(d));
        for (auto& e : embeddings)
            for (auto& x : e) x = rng.uniform(-10, 10);

        // oracle: plain left fold in input order
        std::vector<double> lo(embeddings[0]), hi(embeddings[0]), sum(d, 0.0);
        for (const auto& e : embeddings)
            for (size_t i = 0; i < d; ++i) {
                lo[i] = std::min(lo[i], e[i]);
                hi[i] = std::max(hi[i], e[i]);
                sum[i] += e[i];
            }

        const auto out = aggregate_embeddings(embeddings, d);
        for (size_t i = 0; i < d; ++i) {
            CHECK(out[i] == lo[i]);
            CHECK(out[d + i] == hi[i]);
            CHECK(out[2 * d + i] ==
                  doctest::Approx(sum[i] / static_cast<double>(n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("aggregation is bit-identical under permutation") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const size_t d = 1 + rng.below(5);
        const size_t n = 1 + rng.below(12);
        std::vector<std::vector<double>> embeddings(n, std::vector<double>(d));
        for (auto& e : embeddings)
            for (auto& x : e) x = rng.uniform(-5, 5);
        const auto before = aggregate_embeddings(embeddings, d);
        rng.shuffle(embeddings);
        CHECK(aggregate_embeddings(embeddings, d) == before);
    }
}

TEST_CASE("duplicating one embedding changes only the mean block") {
    Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const size_t d = 1 + rng.below(5);
        const size_t n = 2 + rng.below(8);
        std::vector<std::vector<double>> embeddings(n, std::vector<double>(d));
        for (auto& e : embeddings)
            for (auto& x : e) x = rng.uniform(-5, 5);
        const auto base = aggregate_embeddings(embeddings, d);
        auto dup = embeddings;
        dup.push_back(embeddings[rng.below(n)]);
        const auto out = aggregate_embeddings(dup, d);
        for (size_t i = 0; i < d; ++i) {
            CHECK(out[i] == base[i]);         // min unchanged
            CHECK(out[d + i] == base[d + i]); // max unchanged
        }
    }
}

TEST_CASE("min <= mean <= max coordinate-wise, always") {
    Rng rng(44);
    for (int trial = 0; trial < 300; ++trial) {
        const size_t d = 1 + rng.below(6);
        const size_t n = 1 + rng.below(10);
        std::vector<std::vector<double>> embeddings(n, std::vector<double>(d));
        for (auto& e : embeddings)
            for (auto& x : e) x = rng.uniform(-1e6, 1e6);
        const auto out = aggregate_embeddings(embeddings, d);
        for (size_t i = 0; i < d; ++i) {
            CHECK(out[i] <= out[2 * d + i]);
            CHECK(out[2 * d + i] <= out[d + i]);
        }
    }
}

TEST_CASE("a log with no patterns yields the zero sentinel with a flag") {
    Rng rng(45);
    const auto m = testutil::random_model(rng, 6, 4);
    const auto f = featurize_log(m, {}, "empty", Label::Malicious);
    CHECK(f.empty_log);
    CHECK(f.values == std::vector<double>(12, 0.0));
    CHECK(f.log_id == "empty");
    CHECK(f.label == Label::Malicious);
}

TEST_CASE("feature CSV header and round trip") {
    FeatureMatrix m;
    m.add_row("a", Label::Malicious, {1.0, 0.5});
    m.add_row("b", Label::Benign, {-2.25, 1e-9});
    m.add_row("c", Label::Unlabeled, {0.0, 123456789.0});

    const std::string text = serialize_features(m);
    CHECK(text.rfind("log_id,label,f0,f1\n", 0) == 0);
    const FeatureMatrix back = parse_features(text);
    CHECK(back.ids == m.ids);
    CHECK(back.labels == m.labels);
    REQUIRE(back.values.size() == m.values.size());
    for (size_t i = 0; i < m.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(m.values[i]).epsilon(1e-8));

    CHECK_THROWS_AS(parse_features("bogus\n"), Error);
    CHECK_THROWS_AS(parse_features("log_id,label,f0\nid,benign\n"), Error);
}

TEST_CASE("feature rows must not change width") {
    FeatureMatrix m;
    m.add_row("a", Label::Benign, {1.0});
    CHECK_THROWS_AS(m.add_row("b", Label::Benign, {1.0, 2.0}), Error);
}
