#pragma once

#include <string>
#include <vector>

#include "logembed/autoencoder.hpp"
#include "logembed/log.hpp"

namespace logembed {

// Fixed-size log representation: element-wise min, max and mean over the
// log's pattern embeddings, concatenated as [min | max | mean].
struct LogFeatureVector {
    std::string log_id;
    Label label = Label::Unlabeled;
    std::vector<double> values; // length 3D
    bool empty_log = false;     // no patterns; values are the all-zero sentinel
};

// Reduction over a multiset of length-d vectors. Inputs are brought into a
// canonical order first, so the result is bit-identical under permutation
// of the input; the mean block is clamped into [min, max] coordinate-wise.
std::vector<double> aggregate_embeddings(std::vector<std::vector<double>> embeddings, size_t d);

LogFeatureVector featurize_log(const AutoencoderModel& model,
                               const std::vector<SparseBinaryVector>& patterns,
                               std::string log_id = "", Label label = Label::Unlabeled);

// CSV feature file: header `log_id,label,f0,...,f{n-1}`, floats with
// 9 significant digits.
struct FeatureMatrix {
    std::vector<std::string> ids;
    std::vector<Label> labels;
    size_t n_features = 0;
    std::vector<double> values; // row-major, ids.size() x n_features

    size_t rows() const { return ids.size(); }
    const double* row(size_t i) const { return values.data() + i * n_features; }
    void add_row(std::string id, Label label, const std::vector<double>& row_values);
};

std::string serialize_features(const FeatureMatrix& features);
FeatureMatrix parse_features(const std::string& text);
void write_features(const std::string& path, const FeatureMatrix& features);
FeatureMatrix read_features(const std::string& path);

}  // namespace logembed
