#include "logembed/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace logembed {

const char* metric_name(Metric metric) {
    return metric == Metric::Cosine ? "cosine" : "euclidean";
}

Metric metric_from_name(const std::string& name) {
    if (name == "cosine") return Metric::Cosine;
    if (name == "euclidean") return Metric::Euclidean;
    throw Error(ErrorClass::InvalidConfig, "unknown metric: " + name);
}

EmbeddingIndex::EmbeddingIndex(std::vector<std::string> tokens, std::vector<double> matrix,
                               size_t dim, Metric metric)
    : tokens_(std::move(tokens)), matrix_(std::move(matrix)), dim_(dim), metric_(metric) {
    if (matrix_.size() != tokens_.size() * dim_)
        throw Error(ErrorClass::DimensionMismatch, "embedding matrix size mismatch");
    for (double x : matrix_)
        if (!std::isfinite(x))
            throw Error(ErrorClass::Parse, "embedding index contains non-finite values");
    for (uint32_t i = 0; i < tokens_.size(); ++i)
        if (!index_.emplace(tokens_[i], i).second)
            throw Error(ErrorClass::Parse, "duplicate token in embedding index: " + tokens_[i]);
}

EmbeddingIndex EmbeddingIndex::from_model(const AutoencoderModel& model, const Vocabulary& vocab,
                                          Metric metric) {
    if (model.vocab_size != vocab.size())
        throw Error(ErrorClass::LineageMismatch,
                    "model K=" + std::to_string(model.vocab_size) +
                        " != vocabulary size " + std::to_string(vocab.size()));
    std::vector<double> matrix;
    matrix.reserve(static_cast<size_t>(vocab.size()) * model.hidden_dim);
    for (uint32_t j = 0; j < vocab.size(); ++j) {
        const double* row = model.w_row(model.event_count + j);
        matrix.insert(matrix.end(), row, row + model.hidden_dim);
    }
    return EmbeddingIndex(vocab.tokens(), std::move(matrix), model.hidden_dim, metric);
}

std::vector<double> EmbeddingIndex::vector_of(const std::string& token) const {
    const uint32_t row = row_of(token);
    const double* p = matrix_.data() + static_cast<size_t>(row) * dim_;
    return std::vector<double>(p, p + dim_);
}

uint32_t EmbeddingIndex::row_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end())
        throw Error(ErrorClass::UnknownToken, "UnknownToken: \"" + token + "\"");
    return it->second;
}

double EmbeddingIndex::similarity(const double* row, const std::vector<double>& query,
                                  double query_norm) const {
    if (metric_ == Metric::Euclidean) {
        double d2 = 0;
        for (size_t d = 0; d < dim_; ++d) {
            const double diff = row[d] - query[d];
            d2 += diff * diff;
        }
        return -std::sqrt(d2); // larger is nearer
    }
    double dot = 0, norm2 = 0;
    for (size_t d = 0; d < dim_; ++d) {
        dot += row[d] * query[d];
        norm2 += row[d] * row[d];
    }
    // zero vectors rank last rather than dividing by zero
    if (norm2 == 0 || query_norm == 0) return -std::numeric_limits<double>::infinity();
    return dot / (std::sqrt(norm2) * query_norm);
}

std::vector<EmbeddingIndex::Neighbor> EmbeddingIndex::rank_by_query(
    const std::vector<double>& query, size_t n, const std::vector<std::string>& excluded) const {
    if (query.size() != dim_)
        throw Error(ErrorClass::DimensionMismatch, "query vector length mismatch");
    double qnorm2 = 0;
    for (double x : query) qnorm2 += x * x;
    const double qnorm = std::sqrt(qnorm2);

    std::vector<Neighbor> all;
    all.reserve(tokens_.size());
    for (uint32_t i = 0; i < tokens_.size(); ++i) {
        if (std::find(excluded.begin(), excluded.end(), tokens_[i]) != excluded.end()) continue;
        const double* row = matrix_.data() + static_cast<size_t>(i) * dim_;
        all.push_back({tokens_[i], similarity(row, query, qnorm)});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.token < b.token;
    });
    if (all.size() > n) all.resize(n);
    return all;
}

std::vector<EmbeddingIndex::Neighbor> EmbeddingIndex::nearest_neighbors(const std::string& token,
                                                                        size_t n) const {
    if (n < 1) throw Error(ErrorClass::InvalidConfig, "n must be >= 1");
    const uint32_t row = row_of(token);
    const double* p = matrix_.data() + static_cast<size_t>(row) * dim_;
    return rank_by_query(std::vector<double>(p, p + dim_), n, {token});
}

std::vector<EmbeddingIndex::Neighbor> EmbeddingIndex::analogy(const std::string& positive_a,
                                                              const std::string& negative_b,
                                                              const std::string& positive_c,
                                                              size_t n,
                                                              bool exclude_inputs) const {
    if (n < 1) throw Error(ErrorClass::InvalidConfig, "n must be >= 1");
    const auto va = vector_of(positive_a);
    const auto vb = vector_of(negative_b);
    const auto vc = vector_of(positive_c);
    std::vector<double> query(dim_);
    for (size_t d = 0; d < dim_; ++d) query[d] = va[d] - vb[d] + vc[d];
    std::vector<std::string> excluded;
    if (exclude_inputs) excluded = {positive_a, negative_b, positive_c};
    return rank_by_query(query, n, excluded);
}

std::string render_neighbors(const std::vector<EmbeddingIndex::Neighbor>& neighbors) {
    std::string out;
    char buf[32];
    for (const auto& nb : neighbors) {
        std::snprintf(buf, sizeof(buf), "%.4f", nb.similarity);
        out += nb.token;
        out += '\t';
        out += buf;
        out += '\n';
    }
    return out;
}

}  // namespace logembed
