#include "logembed/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace logembed {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct TreeBuilder {
    const double* data;
    size_t n_features;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const ClassifierConfig& cfg;
    std::vector<TreeNode> nodes;

    double leaf_value(double g_sum, double h_sum) const {
        return -g_sum / (h_sum + cfg.reg_lambda);
    }

    double gain_term(double g, double h) const { return g * g / (h + cfg.reg_lambda); }

    // rows: indices into the training set owned by this node
    int32_t build(std::vector<size_t>& rows, uint32_t depth) {
        double g_sum = 0, h_sum = 0;
        for (size_t r : rows) {
            g_sum += grad[r];
            h_sum += hess[r];
        }

        int32_t node_id = static_cast<int32_t>(nodes.size());
        nodes.push_back({});
        if (depth >= cfg.max_depth || rows.size() < 2 * cfg.min_leaf) {
            nodes[node_id].value = leaf_value(g_sum, h_sum);
            return node_id;
        }

        double best_gain = 1e-12;
        size_t best_feature = 0;
        double best_threshold = 0;
        bool found = false;

        std::vector<std::pair<double, size_t>> order(rows.size());
        for (size_t f = 0; f < n_features; ++f) {
            for (size_t i = 0; i < rows.size(); ++i)
                order[i] = {data[rows[i] * n_features + f], rows[i]};
            std::sort(order.begin(), order.end());

            double gl = 0, hl = 0;
            size_t nl = 0;
            const double parent = gain_term(g_sum, h_sum);
            for (size_t i = 0; i + 1 < order.size(); ++i) {
                gl += grad[order[i].second];
                hl += hess[order[i].second];
                ++nl;
                if (order[i].first == order[i + 1].first) continue; // no boundary here
                if (nl < cfg.min_leaf || order.size() - nl < cfg.min_leaf) continue;
                const double gain =
                    gain_term(gl, hl) + gain_term(g_sum - gl, h_sum - hl) - parent;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = (order[i].first + order[i + 1].first) / 2.0;
                    found = true;
                }
            }
        }

        if (!found) {
            nodes[node_id].value = leaf_value(g_sum, h_sum);
            return node_id;
        }

        std::vector<size_t> left_rows, right_rows;
        for (size_t r : rows) {
            if (data[r * n_features + best_feature] <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes[node_id].feature = static_cast<int32_t>(best_feature);
        nodes[node_id].threshold = best_threshold;
        const int32_t left = build(left_rows, depth + 1);
        const int32_t right = build(right_rows, depth + 1);
        nodes[node_id].left = left;
        nodes[node_id].right = right;
        return node_id;
    }
};

double tree_predict(const std::vector<TreeNode>& nodes, const double* row) {
    int32_t cur = 0;
    while (nodes[cur].feature >= 0)
        cur = row[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left
                                                              : nodes[cur].right;
    return nodes[cur].value;
}

}  // namespace

const char* classifier_kind_name(ClassifierKind kind) {
    return kind == ClassifierKind::Logistic ? "logistic" : "boosted_trees";
}

ClassifierKind classifier_kind_from_name(const std::string& name) {
    if (name == "logistic") return ClassifierKind::Logistic;
    if (name == "boosted_trees" || name == "boosted" || name == "boosted_stumps")
        return ClassifierKind::BoostedTrees;
    throw Error(ErrorClass::InvalidConfig, "unknown classifier kind: " + name);
}

void ClassifierConfig::validate() const {
    if (logistic_iterations < 1)
        throw Error(ErrorClass::InvalidConfig, "logistic_iterations must be >= 1");
    if (!(logistic_learning_rate > 0))
        throw Error(ErrorClass::InvalidConfig, "logistic learning rate must be > 0");
    if (l2 < 0) throw Error(ErrorClass::InvalidConfig, "l2 must be >= 0");
    if (n_trees < 1) throw Error(ErrorClass::InvalidConfig, "n_trees must be >= 1");
    if (max_depth < 1 || max_depth > 3)
        throw Error(ErrorClass::InvalidConfig, "tree depth must be in [1, 3]");
    if (!(tree_learning_rate > 0))
        throw Error(ErrorClass::InvalidConfig, "tree learning rate must be > 0");
    if (min_leaf < 1) throw Error(ErrorClass::InvalidConfig, "min_leaf must be >= 1");
    if (reg_lambda < 0) throw Error(ErrorClass::InvalidConfig, "reg_lambda must be >= 0");
}

double ClassifierModel::score(const double* row) const {
    if (kind == ClassifierKind::Logistic) {
        double z = bias;
        for (size_t j = 0; j < n_features_; ++j)
            z += weights[j] * (row[j] - feat_mean[j]) / feat_scale[j];
        return sigmoid(z);
    }
    double raw = base_score;
    for (const auto& tree : trees) raw += shrinkage * tree_predict(tree, row);
    return sigmoid(raw);
}

std::vector<double> ClassifierModel::score_rows(const FeatureMatrix& features,
                                                const std::vector<size_t>& row_indices) const {
    if (features.n_features != n_features_)
        throw Error(ErrorClass::DimensionMismatch,
                    "feature width " + std::to_string(features.n_features) +
                        " != classifier width " + std::to_string(n_features_));
    std::vector<double> scores;
    scores.reserve(row_indices.size());
    for (size_t i : row_indices) scores.push_back(score(features.row(i)));
    return scores;
}

ClassifierModel train_classifier(const double* data, size_t n_rows, size_t n_features,
                                 const std::vector<int>& labels, const ClassifierConfig& config) {
    config.validate();
    if (labels.size() != n_rows)
        throw Error(ErrorClass::DimensionMismatch, "labels/rows size mismatch");
    size_t n_pos = 0;
    for (int y : labels) n_pos += static_cast<size_t>(y);
    if (n_rows == 0 || n_pos == 0 || n_pos == n_rows)
        throw Error(ErrorClass::SingleClassCorpus,
                    "SingleClassCorpus: training data needs both classes");

    ClassifierModel model;
    model.kind = config.kind;
    model.seed = config.seed;
    model.n_features_ = n_features;

    if (config.kind == ClassifierKind::Logistic) {
        model.feat_mean.assign(n_features, 0.0);
        model.feat_scale.assign(n_features, 1.0);
        for (size_t i = 0; i < n_rows; ++i)
            for (size_t j = 0; j < n_features; ++j) model.feat_mean[j] += data[i * n_features + j];
        for (auto& m : model.feat_mean) m /= static_cast<double>(n_rows);
        std::vector<double> var(n_features, 0.0);
        for (size_t i = 0; i < n_rows; ++i)
            for (size_t j = 0; j < n_features; ++j) {
                const double d = data[i * n_features + j] - model.feat_mean[j];
                var[j] += d * d;
            }
        for (size_t j = 0; j < n_features; ++j) {
            const double sd = std::sqrt(var[j] / static_cast<double>(n_rows));
            model.feat_scale[j] = sd > 1e-12 ? sd : 1.0;
        }

        // standardized copy once; the loop below is the hot path
        std::vector<double> X(n_rows * n_features);
        for (size_t i = 0; i < n_rows; ++i)
            for (size_t j = 0; j < n_features; ++j)
                X[i * n_features + j] =
                    (data[i * n_features + j] - model.feat_mean[j]) / model.feat_scale[j];

        model.weights.assign(n_features, 0.0);
        model.bias = 0;
        std::vector<double> m_w(n_features, 0.0), v_w(n_features, 0.0), grad(n_features, 0.0);
        double m_b = 0, v_b = 0;
        const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        const double inv_n = 1.0 / static_cast<double>(n_rows);

        for (uint32_t it = 1; it <= config.logistic_iterations; ++it) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0;
            for (size_t i = 0; i < n_rows; ++i) {
                const double* row = X.data() + i * n_features;
                double z = model.bias;
                for (size_t j = 0; j < n_features; ++j) z += model.weights[j] * row[j];
                const double err = sigmoid(z) - static_cast<double>(labels[i]);
                for (size_t j = 0; j < n_features; ++j) grad[j] += err * row[j];
                grad_b += err;
            }
            const double bias1 = 1.0 - std::pow(beta1, static_cast<double>(it));
            const double bias2 = 1.0 - std::pow(beta2, static_cast<double>(it));
            for (size_t j = 0; j < n_features; ++j) {
                const double g = grad[j] * inv_n + config.l2 * model.weights[j];
                m_w[j] = beta1 * m_w[j] + (1 - beta1) * g;
                v_w[j] = beta2 * v_w[j] + (1 - beta2) * g * g;
                model.weights[j] -= config.logistic_learning_rate * (m_w[j] / bias1) /
                                    (std::sqrt(v_w[j] / bias2) + eps);
            }
            const double gb = grad_b * inv_n;
            m_b = beta1 * m_b + (1 - beta1) * gb;
            v_b = beta2 * v_b + (1 - beta2) * gb * gb;
            model.bias -=
                config.logistic_learning_rate * (m_b / bias1) / (std::sqrt(v_b / bias2) + eps);
        }
        return model;
    }

    // gradient boosting with logistic loss
    const double p0 = static_cast<double>(n_pos) / static_cast<double>(n_rows);
    model.base_score = std::log(p0 / (1.0 - p0));
    model.shrinkage = config.tree_learning_rate;

    std::vector<double> raw(n_rows, model.base_score);
    std::vector<double> grad(n_rows), hess(n_rows);
    for (uint32_t t = 0; t < config.n_trees; ++t) {
        for (size_t i = 0; i < n_rows; ++i) {
            const double p = sigmoid(raw[i]);
            grad[i] = p - static_cast<double>(labels[i]);
            hess[i] = std::max(p * (1.0 - p), 1e-12);
        }
        TreeBuilder builder{data, n_features, grad, hess, config, {}};
        std::vector<size_t> rows(n_rows);
        std::iota(rows.begin(), rows.end(), size_t{0});
        builder.build(rows, 0);
        for (size_t i = 0; i < n_rows; ++i)
            raw[i] += model.shrinkage * tree_predict(builder.nodes, data + i * n_features);
        model.trees.push_back(std::move(builder.nodes));
    }
    return model;
}

ClassifierModel train_classifier(const FeatureMatrix& features,
                                 const std::vector<size_t>& row_indices,
                                 const ClassifierConfig& config) {
    std::vector<double> data;
    data.reserve(row_indices.size() * features.n_features);
    std::vector<int> labels;
    labels.reserve(row_indices.size());
    for (size_t i : row_indices) {
        const double* row = features.row(i);
        data.insert(data.end(), row, row + features.n_features);
        labels.push_back(label_to_binary(features.labels[i]));
    }
    return train_classifier(data.data(), row_indices.size(), features.n_features, labels,
                            config);
}

SplitIndices split_rows(size_t n, double test_fraction, uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
        throw Error(ErrorClass::InvalidConfig, "test_fraction must be in [0, 1]");
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), size_t{0});
    Rng rng(Rng::derive(seed, 0x517));
    rng.shuffle(perm);
    const auto n_test = static_cast<size_t>(std::llround(test_fraction * static_cast<double>(n)));
    SplitIndices split;
    split.test.assign(perm.begin(), perm.begin() + static_cast<long>(n_test));
    split.train.assign(perm.begin() + static_cast<long>(n_test), perm.end());
    std::sort(split.test.begin(), split.test.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

int label_to_binary(Label label) {
    switch (label) {
        case Label::Malicious: return 1;
        case Label::Benign: return 0;
        case Label::Unlabeled:
            throw Error(ErrorClass::InvalidConfig, "unlabeled log in a labeled operation");
    }
    return 0;
}

std::string ClassifierModel::serialize() const {
    std::ostringstream out;
    out << "#logembed-classifier v1\n";
    out << "kind " << classifier_kind_name(kind) << "\n";
    out << "seed " << seed << "\n";
    out << "features_hash " << hex_u64(features_hash) << "\n";
    out << "split " << fmt_g17(test_fraction) << " " << split_seed << "\n";
    out << "n_features " << n_features_ << "\n";
    if (kind == ClassifierKind::Logistic) {
        auto write_vec = [&](const char* name, const std::vector<double>& xs) {
            out << name;
            for (double x : xs) out << ' ' << fmt_g17(x);
            out << '\n';
        };
        write_vec("mean", feat_mean);
        write_vec("scale", feat_scale);
        write_vec("weights", weights);
        out << "bias " << fmt_g17(bias) << "\n";
    } else {
        out << "base " << fmt_g17(base_score) << " shrinkage " << fmt_g17(shrinkage)
            << " trees " << trees.size() << "\n";
        for (const auto& tree : trees) {
            out << "tree " << tree.size() << "\n";
            for (const auto& node : tree)
                out << node.feature << ' ' << fmt_g17(node.threshold) << ' ' << node.left << ' '
                    << node.right << ' ' << fmt_g17(node.value) << '\n';
        }
    }
    return out.str();
}

ClassifierModel ClassifierModel::parse(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "#logembed-classifier v1")
        throw Error(ErrorClass::Parse, "not a classifier file");

    ClassifierModel model;
    size_t li = 1;
    auto next_line = [&]() -> std::string {
        while (li < lines.size() && lines[li].empty()) ++li;
        if (li >= lines.size()) throw Error(ErrorClass::Parse, "classifier file truncated");
        return lines[li++];
    };
    auto expect_key = [&](const std::string& line, const std::string& key) -> std::string {
        if (line.rfind(key + " ", 0) != 0)
            throw Error(ErrorClass::Parse, "classifier file: expected \"" + key + "\"");
        return line.substr(key.size() + 1);
    };

    model.kind = classifier_kind_from_name(expect_key(next_line(), "kind"));
    model.seed = std::stoull(expect_key(next_line(), "seed"));
    model.features_hash = parse_hex_u64(expect_key(next_line(), "features_hash"));
    {
        std::istringstream ss(expect_key(next_line(), "split"));
        ss >> model.test_fraction >> model.split_seed;
    }
    model.n_features_ = std::stoull(expect_key(next_line(), "n_features"));

    auto parse_vec = [&](const std::string& body, size_t expected) {
        std::istringstream ss(body);
        std::vector<double> xs;
        double v;
        while (ss >> v) xs.push_back(v);
        if (xs.size() != expected)
            throw Error(ErrorClass::Parse, "classifier vector length mismatch");
        return xs;
    };

    if (model.kind == ClassifierKind::Logistic) {
        model.feat_mean = parse_vec(expect_key(next_line(), "mean"), model.n_features_);
        model.feat_scale = parse_vec(expect_key(next_line(), "scale"), model.n_features_);
        model.weights = parse_vec(expect_key(next_line(), "weights"), model.n_features_);
        model.bias = std::stod(expect_key(next_line(), "bias"));
    } else {
        std::istringstream ss(next_line());
        std::string kw;
        size_t n_trees = 0;
        ss >> kw >> model.base_score >> kw >> model.shrinkage >> kw >> n_trees;
        for (size_t t = 0; t < n_trees; ++t) {
            std::istringstream hs(next_line());
            std::string tree_kw;
            size_t n_nodes = 0;
            hs >> tree_kw >> n_nodes;
            if (tree_kw != "tree") throw Error(ErrorClass::Parse, "classifier: expected tree");
            std::vector<TreeNode> nodes(n_nodes);
            for (auto& node : nodes) {
                std::istringstream ns(next_line());
                ns >> node.feature >> node.threshold >> node.left >> node.right >> node.value;
                if (!ns) throw Error(ErrorClass::Parse, "classifier: bad tree node");
            }
            model.trees.push_back(std::move(nodes));
        }
    }
    return model;
}

void ClassifierModel::save(const std::string& path) const {
    write_text_file(path, serialize());
}

ClassifierModel ClassifierModel::load(const std::string& path) {
    require_artifact(path, "classifier");
    return parse(read_text_file(path));
}

}  // namespace logembed
