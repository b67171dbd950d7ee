#include <doctest.h>

#include <cstdlib>

#include "helpers.hpp"
#include "logembed/featurizer.hpp"
#include "logembed/log.hpp"

using namespace logembed;
using testutil::TempDir;

namespace {

int run_cli(const std::string& args, const std::string& stdout_to = "/dev/null") {
    const std::string cmd =
        std::string(LOGEMBED_CLI_PATH) + " " + args + " >" + stdout_to + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli: full pipeline smoke run") {
    TempDir dir;
    const std::string corpus = dir.file("corpus.jsonl");
    const std::string registry = dir.file("registry.txt");
    const std::string vocab = dir.file("vocab.txt");
    const std::string encoded = dir.file("encoded.tsv");
    const std::string model = dir.file("model.bin");
    const std::string features = dir.file("features.csv");
    const std::string baselines = dir.file("baselines.txt");
    const std::string counter = dir.file("counter.csv");
    const std::string classifier = dir.file("classifier.txt");
    const std::string report = dir.file("report.txt");
    const std::string roc = dir.file("roc.csv");

    CHECK(run_cli("gen --malicious 120 --benign 120 --seed 5 -o " + corpus) == 0);
    CHECK(run_cli("registry --corpus " + corpus + " -o " + registry) == 0);
    CHECK(run_cli("vocab --corpus " + corpus + " -k 250 --test-fraction 0.3 --split-seed 7 -o " +
                  vocab) == 0);
    CHECK(run_cli("encode --corpus " + corpus + " --registry " + registry + " --vocab " + vocab +
                  " -o " + encoded) == 0);
    CHECK(run_cli("train-ae --encoded " + encoded + " --registry " + registry + " --vocab " +
                  vocab + " -d 8 --epochs 2 --seed 5 --test-fraction 0.3 --split-seed 7 -o " +
                  model) == 0);
    CHECK(run_cli("baseline --corpus " + corpus + " -b 200 --test-fraction 0.3 --split-seed 7 -o " +
                  baselines) == 0);
    CHECK(run_cli("featurize --corpus " + corpus + " --mode semantic --registry " + registry +
                  " --vocab " + vocab + " --model " + model + " -o " + features) == 0);
    CHECK(run_cli("featurize --corpus " + corpus + " --mode counter --baselines " + baselines +
                  " -o " + counter) == 0);
    CHECK(run_cli("train-clf --features " + features +
                  " --kind logistic --iterations 120 --test-fraction 0.3 --split-seed 7 -o " +
                  classifier) == 0);
    CHECK(run_cli("eval --set semantic=" + features + ":" + classifier + " --report " + report +
                  " --roc " + roc) == 0);

    CHECK(file_exists(report));
    CHECK(read_text_file(report).find("semantic") != std::string::npos);
    CHECK(read_text_file(roc).rfind("feature_set,fpr,tpr\n", 0) == 0);

    // model-info prints the header to stdout
    const std::string info_out = dir.file("info.txt");
    CHECK(run_cli("model-info " + model, info_out) == 0);
    const std::string info = read_text_file(info_out);
    CHECK(info.find("D (hidden): 8") != std::string::npos);
    CHECK(info.find("M (event types):") != std::string::npos);

    // nn / analogy answer from the trained embedding space
    const std::string nn_out = dir.file("nn.txt");
    CHECK(run_cli("nn exe -n 4 --model " + model + " --vocab " + vocab, nn_out) == 0);
    const auto nn_lines = split_lines(read_text_file(nn_out));
    CHECK(nn_lines.size() == 4);
    CHECK(nn_lines[0].find('\t') != std::string::npos);

    CHECK(run_cli("analogy exe - dll + com -n 3 --model " + model + " --vocab " + vocab) == 0);

    // per-pattern embedding export: one non-empty line per encoded pattern
    const std::string embeddings = dir.file("embeddings.tsv");
    CHECK(run_cli("embed --model " + model + " --encoded " + encoded + " -o " + embeddings) == 0);
    size_t pattern_lines = 0, embedding_lines = 0;
    for (const auto& line : split_lines(read_text_file(encoded))) pattern_lines += !line.empty();
    for (const auto& line : split_lines(read_text_file(embeddings)))
        embedding_lines += !line.empty();
    CHECK(embedding_lines == pattern_lines);

    // an unreachable AUC gate fails with the gate exit code
    CHECK(run_cli("eval --set semantic=" + features + ":" + classifier + " --report " + report +
                  " --roc " + roc + " --min-auc 1.01") == 10);
}

TEST_CASE("cli: eval without a trained classifier exits with the missing-artifact code") {
    TempDir dir;
    FeatureMatrix m;
    m.add_row("a", Label::Malicious, {1.0});
    m.add_row("b", Label::Benign, {0.0});
    write_features(dir.file("features.csv"), m);
    CHECK(run_cli("eval --features " + dir.file("features.csv") + " --classifier " +
                  dir.file("never-trained.txt") + " --report " + dir.file("r.txt") + " --roc " +
                  dir.file("roc.csv")) == 7);
}

TEST_CASE("cli: malformed corpus exits with the parse code; permissive succeeds") {
    TempDir dir;
    write_text_file(dir.file("bad.jsonl"),
                    R"({"id":"ok","events":[{"e":"X","args":["y"]}]})"
                    "\nnot json at all\n");
    CHECK(run_cli("registry --corpus " + dir.file("bad.jsonl") + " -o " + dir.file("reg.txt")) ==
          2);
    CHECK(run_cli("registry --corpus " + dir.file("bad.jsonl") + " -o " + dir.file("reg.txt") +
                  " --permissive") == 0);
}

TEST_CASE("cli: unknown token exits with the unknown-token code") {
    TempDir dir;
    const std::string corpus = dir.file("c.jsonl");
    const std::string registry = dir.file("r.txt");
    const std::string vocab = dir.file("v.txt");
    const std::string encoded = dir.file("e.tsv");
    const std::string model = dir.file("m.bin");
    REQUIRE(run_cli("gen --malicious 20 --benign 20 --seed 2 -o " + corpus) == 0);
    REQUIRE(run_cli("registry --corpus " + corpus + " -o " + registry) == 0);
    REQUIRE(run_cli("vocab --corpus " + corpus + " -k 50 -o " + vocab) == 0);
    REQUIRE(run_cli("encode --corpus " + corpus + " --registry " + registry + " --vocab " +
                    vocab + " -o " + encoded) == 0);
    REQUIRE(run_cli("train-ae --encoded " + encoded + " --registry " + registry + " --vocab " +
                    vocab + " -d 4 --epochs 1 -o " + model) == 0);
    CHECK(run_cli("nn not-a-real-token --model " + model + " --vocab " + vocab) == 6);
}

TEST_CASE("cli: config file supplies defaults") {
    TempDir dir;
    const std::string corpus = dir.file("c.jsonl");
    const std::string config = dir.file("config.json");
    write_text_file(config, std::string("{\n") + "  \"paths\": {\"corpus\": \"" + corpus +
                                "\", \"registry\": \"" + dir.file("r.txt") + "\"},\n" +
                                "  \"seed\": 12\n}\n");
    CHECK(run_cli("gen --malicious 10 --benign 10 --config " + config) == 0);
    CHECK(run_cli("registry --config " + config) == 0);
    CHECK(file_exists(dir.file("r.txt")));
}

TEST_CASE("cli: rerun with identical config and seed is bytewise identical") {
    TempDir dir;
    auto run_once = [&](const std::string& tag) {
        const std::string corpus = dir.file(tag + "corpus.jsonl");
        const std::string registry = dir.file(tag + "reg.txt");
        const std::string vocab = dir.file(tag + "vocab.txt");
        const std::string encoded = dir.file(tag + "enc.tsv");
        const std::string model = dir.file(tag + "model.bin");
        const std::string features = dir.file(tag + "features.csv");
        REQUIRE(run_cli("gen --malicious 60 --benign 60 --seed 3 -o " + corpus) == 0);
        REQUIRE(run_cli("registry --corpus " + corpus + " -o " + registry) == 0);
        REQUIRE(run_cli("vocab --corpus " + corpus + " -k 120 -o " + vocab) == 0);
        REQUIRE(run_cli("encode --corpus " + corpus + " --registry " + registry + " --vocab " +
                        vocab + " -o " + encoded) == 0);
        REQUIRE(run_cli("train-ae --encoded " + encoded + " --registry " + registry +
                        " --vocab " + vocab + " -d 6 --epochs 2 --seed 3 -o " + model) == 0);
        REQUIRE(run_cli("featurize --corpus " + corpus + " --registry " + registry +
                        " --vocab " + vocab + " --model " + model + " -o " + features) == 0);
        return read_text_file(corpus) + "\x1e" + read_text_file(model) + "\x1e" +
               read_text_file(features);
    };
    CHECK(run_once("a_") == run_once("b_"));
}
