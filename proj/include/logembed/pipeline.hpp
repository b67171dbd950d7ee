#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "logembed/autoencoder.hpp"
#include "logembed/baseline.hpp"
#include "logembed/classifier.hpp"
#include "logembed/eval.hpp"
#include "logembed/explorer.hpp"
#include "logembed/featurizer.hpp"
#include "logembed/synth.hpp"

namespace logembed::pipeline {

// Splits travel by log id, not by row position, so every stage (vocabulary,
// baselines, autoencoder corpus, classifier, eval) agrees on membership no
// matter how rows are ordered or which logs produced patterns.
bool is_test_id(const std::string& id, double test_fraction, uint64_t split_seed);

enum class FeatureMode { Semantic, Indicator, Counter, Combined };
const char* feature_mode_name(FeatureMode mode);
FeatureMode feature_mode_from_name(const std::string& name);

// Stage options shared by the corpus-consuming commands.
struct CorpusOptions {
    bool permissive = false;
    double exclude_test_fraction = 0; // > 0: build only from the train split
    uint64_t split_seed = 0;
};

void run_gen(const GeneratorSpec& spec, const std::string& corpus_out, uint32_t workers = 1,
             std::ostream* progress = nullptr);

ParseStats run_registry(const std::string& corpus_path, const std::string& registry_out,
                        const CorpusOptions& options = {});

ParseStats run_vocab(const std::string& corpus_path, size_t k, const std::string& vocab_out,
                     const TokenizerConfig& tokenizer = {}, const CorpusOptions& options = {});

EncodeStats run_encode(const std::string& corpus_path, const std::string& registry_path,
                       const std::string& vocab_path, const std::string& encoded_out,
                       const TokenizerConfig& tokenizer = {}, const CorpusOptions& options = {});

TrainReport run_train_ae(const std::string& encoded_path, const std::string& registry_path,
                         const std::string& vocab_path, const std::string& model_out,
                         const TrainConfig& config, const TokenizerConfig& tokenizer = {},
                         const CorpusOptions& options = {}, std::ostream* progress = nullptr);

void run_embed(const std::string& model_path, const std::string& encoded_path,
               const std::string& embeddings_out);

void run_baseline(const std::string& corpus_path, size_t b, const std::string& baselines_out,
                  const CorpusOptions& options = {});

void run_featurize(const std::string& corpus_path, FeatureMode mode,
                   const std::string& features_out, const std::string& registry_path = "",
                   const std::string& vocab_path = "", const std::string& model_path = "",
                   const std::string& baselines_path = "", BaselineMode baseline_mode =
                       BaselineMode::Counter,
                   const CorpusOptions& options = {}, uint32_t workers = 1);

struct TrainClfResult {
    size_t train_rows = 0;
    size_t unlabeled_skipped = 0;
};
TrainClfResult run_train_clf(const std::string& features_path, double test_fraction,
                             uint64_t split_seed, const ClassifierConfig& config,
                             const std::string& classifier_out);

struct EvalSetSpec {
    std::string name;
    std::string features_path;
    std::string classifier_path;
};

// Scores each set on its test split, writes the table and the ROC CSV, and
// refuses mismatched artifact lineages. min_auc < 0 disables the gate.
EvalReport run_eval(const std::vector<EvalSetSpec>& sets, const std::string& report_out,
                    const std::string& roc_out, double min_auc = -1.0);

std::string run_nn(const std::string& model_path, const std::string& vocab_path,
                   const std::string& token, size_t n, Metric metric = Metric::Cosine);

std::string run_analogy(const std::string& model_path, const std::string& vocab_path,
                        const std::string& positive_a, const std::string& negative_b,
                        const std::string& positive_c, size_t n, Metric metric = Metric::Cosine,
                        bool exclude_inputs = true);

std::string run_model_info(const std::string& model_path);

}  // namespace logembed::pipeline
