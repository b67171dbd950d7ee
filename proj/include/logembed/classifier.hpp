#pragma once

#include <string>
#include <vector>

#include "logembed/common.hpp"
#include "logembed/featurizer.hpp"

namespace logembed {

enum class ClassifierKind { Logistic, BoostedTrees };

const char* classifier_kind_name(ClassifierKind kind);
ClassifierKind classifier_kind_from_name(const std::string& name);

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::Logistic;
    uint64_t seed = 1;

    // logistic: full-batch Adam on standardized features
    uint32_t logistic_iterations = 400;
    double logistic_learning_rate = 0.05;
    double l2 = 1e-4;

    // boosted trees: exact greedy splits on logloss gradients
    uint32_t n_trees = 150;
    uint32_t max_depth = 2; // 1..3
    double tree_learning_rate = 0.1;
    uint32_t min_leaf = 8;
    double reg_lambda = 1.0;

    void validate() const;
};

struct TreeNode {
    int32_t feature = -1; // < 0 means leaf
    double threshold = 0; // x <= threshold goes left
    int32_t left = -1;
    int32_t right = -1;
    double value = 0; // leaf weight
};

class ClassifierModel {
public:
    ClassifierKind kind = ClassifierKind::Logistic;
    uint64_t seed = 0;

    // lineage: which feature file and split this classifier was trained on
    uint64_t features_hash = 0;
    double test_fraction = 0;
    uint64_t split_seed = 0;

    // logistic parameters
    std::vector<double> feat_mean, feat_scale, weights;
    double bias = 0;

    // boosted-tree parameters
    double base_score = 0;
    double shrinkage = 0.1;
    std::vector<std::vector<TreeNode>> trees;

    size_t n_features_ = 0;
    size_t n_features() const { return n_features_; }

    double score(const double* row) const; // in [0, 1]
    std::vector<double> score_rows(const FeatureMatrix& features,
                                   const std::vector<size_t>& row_indices) const;

    std::string serialize() const;
    static ClassifierModel parse(const std::string& text);
    void save(const std::string& path) const;
    static ClassifierModel load(const std::string& path);
};

// labels are 0/1 (benign/malicious); needs both classes present.
ClassifierModel train_classifier(const double* data, size_t n_rows, size_t n_features,
                                 const std::vector<int>& labels, const ClassifierConfig& config);

ClassifierModel train_classifier(const FeatureMatrix& features,
                                 const std::vector<size_t>& row_indices,
                                 const ClassifierConfig& config);

// Deterministic shuffled split of [0, n); both halves sorted ascending.
struct SplitIndices {
    std::vector<size_t> train, test;
};
SplitIndices split_rows(size_t n, double test_fraction, uint64_t seed);

int label_to_binary(Label label); // malicious=1, benign=0, unlabeled → error

}  // namespace logembed
