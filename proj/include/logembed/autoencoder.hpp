#pragma once

#include <functional>
#include <string>
#include <vector>

#include "logembed/common.hpp"
#include "logembed/pattern_encoder.hpp"
#include "logembed/tokenizer.hpp"

namespace logembed {

// Single hidden layer reconstruction model over sparse binary pattern
// vectors:
//   a(x) = W v(x) + b,  phi(x) = relu(a(x)),  vhat(x) = sigmoid(V phi(x) + c)
// W and V are stored row-major with input_dim rows and hidden_dim columns;
// row i of W is input unit i's fan-out vector (the token embedding), row i
// of V is output unit i's weight vector.
struct AutoencoderModel {
    uint32_t input_dim = 0;  // M + K
    uint32_t hidden_dim = 0; // D
    std::vector<double> W;   // input_dim x hidden_dim
    std::vector<double> V;   // input_dim x hidden_dim
    std::vector<double> b;   // hidden_dim
    std::vector<double> c;   // input_dim

    // Provenance carried in the model file.
    uint32_t event_count = 0; // M
    uint32_t vocab_size = 0;  // K
    TokenizerConfig tokenizer;
    uint64_t seed = 0;
    uint64_t registry_hash = 0;
    uint64_t vocab_hash = 0;

    double* w_row(uint32_t i) { return W.data() + static_cast<size_t>(i) * hidden_dim; }
    const double* w_row(uint32_t i) const {
        return W.data() + static_cast<size_t>(i) * hidden_dim;
    }
    double* v_row(uint32_t i) { return V.data() + static_cast<size_t>(i) * hidden_dim; }
    const double* v_row(uint32_t i) const {
        return V.data() + static_cast<size_t>(i) * hidden_dim;
    }

    bool finite() const;

    void save(const std::string& path) const;
    static AutoencoderModel load(const std::string& path);
};

struct TrainConfig {
    uint32_t hidden_dim = 64;
    double negative_ratio = 5.0; // |N| = min(round(ratio*|P|), zero coords)
    uint32_t batch_size = 256;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    uint32_t epochs = 10;
    uint64_t seed = 1; // mandatory; drives init, shuffling and sampling
    uint32_t workers = 1;

    void validate() const;
};

struct ForwardResult {
    std::vector<double> preactivation; // a(x), length D
    std::vector<double> hidden;        // phi(x) = relu(a(x)), length D
};

ForwardResult forward(const AutoencoderModel& model, const SparseBinaryVector& v);

// vhat_i, evaluated lazily for one output coordinate
double reconstruction_at(const AutoencoderModel& model, const std::vector<double>& phi,
                         uint32_t index);

struct LossSample {
    std::vector<uint32_t> positives; // P: the on-indices of v(x)
    std::vector<uint32_t> negatives; // N: sampled zero coordinates, sorted
    double value = 0;                // l(x)
};

// Draws N uniformly without replacement from the zero coordinates and
// evaluates the negative-sampled reconstruction loss.
LossSample sample_loss(const AutoencoderModel& model, const SparseBinaryVector& v,
                       double negative_ratio, Rng& rng);

// Loss for a fixed (P, N) pair; shared by training, sampling and the
// finite-difference tests.
double loss_with_sample(const AutoencoderModel& model, const std::vector<uint32_t>& positives,
                        const std::vector<uint32_t>& negatives);

// Exact gradients of loss_with_sample. Only W rows at the on-indices and
// V rows/c entries at P (union) N are nonzero; grad W.row(j) equals grad_b for
// every on-index j, so it is stored once.
struct SparseGradients {
    std::vector<uint32_t> w_rows;          // = v.on_indices
    std::vector<double> grad_b;            // length D; also the grad of each touched W row
    std::vector<std::pair<uint32_t, double>> grad_z; // dl/dz_i for i in P (union) N
    std::vector<double> phi;               // hidden activations (grad V.row(i) = grad_z_i * phi)
};

SparseGradients gradients(const AutoencoderModel& model, const SparseBinaryVector& v,
                          const LossSample& sample);

// Scatters sparse gradients into dense parameter-shaped accumulators.
void accumulate_gradients(const SparseGradients& g, uint32_t input_dim, uint32_t hidden_dim,
                          double scale, std::vector<double>& W_grad, std::vector<double>& V_grad,
                          std::vector<double>& b_grad, std::vector<double>& c_grad);

struct TrainReport {
    std::vector<double> epoch_mean_loss;
    uint64_t skipped_empty = 0; // vectors with no on-bits contribute no loss
    uint64_t steps = 0;
};

using EpochCallback = std::function<void(uint32_t epoch, double mean_loss)>;

AutoencoderModel train_autoencoder(const std::vector<SparseBinaryVector>& corpus,
                                   const TrainConfig& config, TrainReport* report = nullptr,
                                   const EpochCallback& on_epoch = nullptr);

// Pattern embedding a(x): the pre-activation encoder output.
std::vector<double> embed_pattern(const AutoencoderModel& model, const SparseBinaryVector& v);

// Fan-out vector of one input coordinate; index M+j is token j's embedding.
std::vector<double> token_embedding(const AutoencoderModel& model, uint32_t index);

}  // namespace logembed
