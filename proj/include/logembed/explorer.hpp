#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "logembed/autoencoder.hpp"
#include "logembed/tokenizer.hpp"

namespace logembed {

enum class Metric { Cosine, Euclidean };

const char* metric_name(Metric metric);
Metric metric_from_name(const std::string& name);

// Immutable index over the K token embedding vectors; queries are read-only
// and freely concurrent.
class EmbeddingIndex {
public:
    EmbeddingIndex(std::vector<std::string> tokens, std::vector<double> matrix, size_t dim,
                   Metric metric = Metric::Cosine);

    // rows M..M+K of the model's input-to-hidden weights
    static EmbeddingIndex from_model(const AutoencoderModel& model, const Vocabulary& vocab,
                                     Metric metric = Metric::Cosine);

    size_t size() const { return tokens_.size(); }
    size_t dim() const { return dim_; }
    Metric metric() const { return metric_; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    std::vector<double> vector_of(const std::string& token) const;

    struct Neighbor {
        std::string token;
        double similarity;
    };

    // Top-n by similarity, query excluded, ties broken by token string.
    std::vector<Neighbor> nearest_neighbors(const std::string& token, size_t n) const;

    // Query vector v(a) - v(b) + v(c); a, b, c excluded unless disabled.
    std::vector<Neighbor> analogy(const std::string& positive_a, const std::string& negative_b,
                                  const std::string& positive_c, size_t n,
                                  bool exclude_inputs = true) const;

    std::vector<Neighbor> rank_by_query(const std::vector<double>& query, size_t n,
                                        const std::vector<std::string>& excluded) const;

private:
    uint32_t row_of(const std::string& token) const; // throws UnknownToken
    double similarity(const double* row, const std::vector<double>& query,
                      double query_norm) const;

    std::vector<std::string> tokens_;
    std::vector<double> matrix_; // row-major, size() x dim
    size_t dim_;
    Metric metric_;
    std::unordered_map<std::string, uint32_t> index_;
};

std::string render_neighbors(const std::vector<EmbeddingIndex::Neighbor>& neighbors);

}  // namespace logembed
