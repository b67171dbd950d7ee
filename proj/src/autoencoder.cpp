#include "logembed/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <thread>
#include <unordered_set>

namespace logembed {

namespace {

constexpr char kMagic[8] = {'L', 'G', 'A', 'E', '0', '0', '0', '1'};
constexpr uint32_t kEndianMarker = 0x01020304u;

// rng stream ids
constexpr uint64_t kInitStream = 0x1217;
constexpr uint64_t kShuffleStream = 0x0bf50000;
constexpr uint64_t kSampleStream = 0x5eed0000;

bool host_little_endian() {
    uint32_t probe = 1;
    unsigned char byte0;
    std::memcpy(&byte0, &probe, 1);
    return byte0 == 1;
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(sigmoid(z)) without underflow at large |z|
double log_sigmoid(double z) {
    if (z >= 0) return -std::log1p(std::exp(-z));
    return z - std::log1p(std::exp(z));
}

double output_logit(const AutoencoderModel& model, const std::vector<double>& phi,
                    uint32_t index) {
    const double* row = model.v_row(index);
    double z = model.c[index];
    for (uint32_t d = 0; d < model.hidden_dim; ++d) z += row[d] * phi[d];
    return z;
}

std::vector<uint32_t> sample_negatives(const std::vector<uint32_t>& on_indices, uint32_t dim,
                                       double negative_ratio, Rng& rng) {
    const size_t n_on = on_indices.size();
    const size_t zeros = static_cast<size_t>(dim) - n_on;
    size_t want = static_cast<size_t>(std::llround(negative_ratio * static_cast<double>(n_on)));
    want = std::min(want, zeros);
    if (want == 0) return {};

    std::vector<uint32_t> negatives;
    negatives.reserve(want);

    if (want * 2 >= zeros) {
        // dense case: enumerate the zero coordinates and take a partial shuffle
        std::vector<uint32_t> pool;
        pool.reserve(zeros);
        size_t next_on = 0;
        for (uint32_t i = 0; i < dim; ++i) {
            if (next_on < n_on && on_indices[next_on] == i) {
                ++next_on;
                continue;
            }
            pool.push_back(i);
        }
        for (size_t i = 0; i < want; ++i) {
            size_t j = i + static_cast<size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(want);
        negatives = std::move(pool);
    } else {
        std::unordered_set<uint32_t> chosen;
        chosen.reserve(want * 2);
        while (negatives.size() < want) {
            auto candidate = static_cast<uint32_t>(rng.below(dim));
            if (std::binary_search(on_indices.begin(), on_indices.end(), candidate)) continue;
            if (chosen.insert(candidate).second) negatives.push_back(candidate);
        }
    }
    std::sort(negatives.begin(), negatives.end());
    return negatives;
}

void check_dims(const AutoencoderModel& model, const SparseBinaryVector& v) {
    if (v.dim != model.input_dim)
        throw Error(ErrorClass::DimensionMismatch,
                    "input vector dim " + std::to_string(v.dim) + " != model input dim " +
                        std::to_string(model.input_dim));
}

struct BatchAccumulator {
    std::vector<double> W, V, b, c;
    double loss_sum = 0;
    uint64_t used = 0;
    uint64_t skipped = 0;

    BatchAccumulator(uint32_t input_dim, uint32_t hidden_dim)
        : W(static_cast<size_t>(input_dim) * hidden_dim, 0.0),
          V(static_cast<size_t>(input_dim) * hidden_dim, 0.0),
          b(hidden_dim, 0.0),
          c(input_dim, 0.0) {}

    void reset() {
        std::fill(W.begin(), W.end(), 0.0);
        std::fill(V.begin(), V.end(), 0.0);
        std::fill(b.begin(), b.end(), 0.0);
        std::fill(c.begin(), c.end(), 0.0);
        loss_sum = 0;
        used = 0;
        skipped = 0;
    }

    void merge(const BatchAccumulator& other) {
        for (size_t i = 0; i < W.size(); ++i) W[i] += other.W[i];
        for (size_t i = 0; i < V.size(); ++i) V[i] += other.V[i];
        for (size_t i = 0; i < b.size(); ++i) b[i] += other.b[i];
        for (size_t i = 0; i < c.size(); ++i) c[i] += other.c[i];
        loss_sum += other.loss_sum;
        used += other.used;
        skipped += other.skipped;
    }
};

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One Adam update over a parameter array; returns false if a parameter
// became non-finite.
bool adam_update(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
                 const TrainConfig& cfg, double bias1, double bias2) {
    bool finite = true;
    for (size_t i = 0; i < params.size(); ++i) {
        double g = grad[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[i] / bias1;
        const double v_hat = state.v[i] / bias2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        finite &= std::isfinite(params[i]);
    }
    return finite;
}

}  // namespace

bool AutoencoderModel::finite() const {
    auto all_finite = [](const std::vector<double>& xs) {
        for (double x : xs)
            if (!std::isfinite(x)) return false;
        return true;
    };
    return all_finite(W) && all_finite(V) && all_finite(b) && all_finite(c);
}

void TrainConfig::validate() const {
    if (hidden_dim < 1) throw Error(ErrorClass::InvalidConfig, "hidden_dim must be >= 1");
    if (negative_ratio < 0)
        throw Error(ErrorClass::InvalidConfig, "negative_ratio must be >= 0");
    if (batch_size < 1) throw Error(ErrorClass::InvalidConfig, "batch_size must be >= 1");
    if (!(learning_rate > 0)) throw Error(ErrorClass::InvalidConfig, "learning_rate must be > 0");
    if (!(beta1 >= 0 && beta1 < 1)) throw Error(ErrorClass::InvalidConfig, "beta1 must be in [0,1)");
    if (!(beta2 >= 0 && beta2 < 1)) throw Error(ErrorClass::InvalidConfig, "beta2 must be in [0,1)");
    if (!(epsilon > 0)) throw Error(ErrorClass::InvalidConfig, "epsilon must be > 0");
    if (workers < 1) throw Error(ErrorClass::InvalidConfig, "workers must be >= 1");
}

ForwardResult forward(const AutoencoderModel& model, const SparseBinaryVector& v) {
    check_dims(model, v);
    ForwardResult r;
    r.preactivation = model.b;
    for (uint32_t i : v.on_indices) {
        const double* row = model.w_row(i);
        for (uint32_t d = 0; d < model.hidden_dim; ++d) r.preactivation[d] += row[d];
    }
    r.hidden.resize(model.hidden_dim);
    for (uint32_t d = 0; d < model.hidden_dim; ++d)
        r.hidden[d] = r.preactivation[d] > 0 ? r.preactivation[d] : 0.0;
    return r;
}

double reconstruction_at(const AutoencoderModel& model, const std::vector<double>& phi,
                         uint32_t index) {
    if (index >= model.input_dim)
        throw Error(ErrorClass::IndexOutOfRange,
                    "output index " + std::to_string(index) + " out of range");
    return sigmoid(output_logit(model, phi, index));
}

double loss_with_sample(const AutoencoderModel& model, const std::vector<uint32_t>& positives,
                        const std::vector<uint32_t>& negatives) {
    const auto phi = [&] {
        SparseBinaryVector v{model.input_dim, positives};
        return forward(model, v).hidden;
    }();

    double loss = 0;
    if (!positives.empty()) {
        double pos_sum = 0;
        for (uint32_t i : positives) pos_sum += log_sigmoid(output_logit(model, phi, i));
        loss -= pos_sum / static_cast<double>(positives.size());
    }
    if (!negatives.empty()) {
        double neg_sum = 0;
        for (uint32_t i : negatives) neg_sum += log_sigmoid(-output_logit(model, phi, i));
        loss -= neg_sum / static_cast<double>(negatives.size());
    }
    return loss;
}

LossSample sample_loss(const AutoencoderModel& model, const SparseBinaryVector& v,
                       double negative_ratio, Rng& rng) {
    check_dims(model, v);
    LossSample sample;
    sample.positives = v.on_indices;
    sample.negatives = sample_negatives(v.on_indices, v.dim, negative_ratio, rng);
    sample.value = loss_with_sample(model, sample.positives, sample.negatives);
    return sample;
}

SparseGradients gradients(const AutoencoderModel& model, const SparseBinaryVector& v,
                          const LossSample& sample) {
    check_dims(model, v);
    const auto fwd = forward(model, v);
    const uint32_t d_hidden = model.hidden_dim;

    SparseGradients g;
    g.w_rows = v.on_indices;
    g.phi = fwd.hidden;
    g.grad_z.reserve(sample.positives.size() + sample.negatives.size());

    const double inv_p =
        sample.positives.empty() ? 0.0 : 1.0 / static_cast<double>(sample.positives.size());
    const double inv_n =
        sample.negatives.empty() ? 0.0 : 1.0 / static_cast<double>(sample.negatives.size());

    std::vector<double> grad_phi(d_hidden, 0.0);
    auto push = [&](uint32_t i, double dz) {
        g.grad_z.emplace_back(i, dz);
        const double* row = model.v_row(i);
        for (uint32_t d = 0; d < d_hidden; ++d) grad_phi[d] += dz * row[d];
    };
    for (uint32_t i : sample.positives) {
        const double vhat = sigmoid(output_logit(model, fwd.hidden, i));
        push(i, -inv_p * (1.0 - vhat));
    }
    for (uint32_t i : sample.negatives) {
        const double vhat = sigmoid(output_logit(model, fwd.hidden, i));
        push(i, inv_n * vhat);
    }

    // ReLU subgradient at exactly 0 is 0
    g.grad_b.resize(d_hidden);
    for (uint32_t d = 0; d < d_hidden; ++d)
        g.grad_b[d] = fwd.preactivation[d] > 0 ? grad_phi[d] : 0.0;
    return g;
}

void accumulate_gradients(const SparseGradients& g, uint32_t input_dim, uint32_t hidden_dim,
                          double scale, std::vector<double>& W_grad, std::vector<double>& V_grad,
                          std::vector<double>& b_grad, std::vector<double>& c_grad) {
    (void)input_dim;
    for (uint32_t row : g.w_rows) {
        double* out = W_grad.data() + static_cast<size_t>(row) * hidden_dim;
        for (uint32_t d = 0; d < hidden_dim; ++d) out[d] += scale * g.grad_b[d];
    }
    for (uint32_t d = 0; d < hidden_dim; ++d) b_grad[d] += scale * g.grad_b[d];
    for (const auto& [i, dz] : g.grad_z) {
        c_grad[i] += scale * dz;
        double* out = V_grad.data() + static_cast<size_t>(i) * hidden_dim;
        for (uint32_t d = 0; d < hidden_dim; ++d) out[d] += scale * dz * g.phi[d];
    }
}

AutoencoderModel train_autoencoder(const std::vector<SparseBinaryVector>& corpus,
                                   const TrainConfig& config, TrainReport* report,
                                   const EpochCallback& on_epoch) {
    config.validate();
    if (corpus.empty()) throw Error(ErrorClass::EmptyCorpus, "EmptyCorpus: no training vectors");
    const uint32_t input_dim = corpus.front().dim;
    for (const auto& v : corpus)
        if (v.dim != input_dim)
            throw Error(ErrorClass::DimensionMismatch, "training vectors disagree on dim");

    AutoencoderModel model;
    model.input_dim = input_dim;
    model.hidden_dim = config.hidden_dim;
    model.seed = config.seed;
    model.W.assign(static_cast<size_t>(input_dim) * config.hidden_dim, 0.0);
    model.V.assign(static_cast<size_t>(input_dim) * config.hidden_dim, 0.0);
    model.b.assign(config.hidden_dim, 0.0);
    model.c.assign(input_dim, 0.0);

    // uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)); biases start at 0
    const double s = std::sqrt(6.0 / (static_cast<double>(input_dim) + config.hidden_dim));
    Rng init_rng(Rng::derive(config.seed, kInitStream));
    for (auto& w : model.W) w = init_rng.uniform(-s, s);
    for (auto& w : model.V) w = init_rng.uniform(-s, s);

    const size_t param_count = model.W.size();
    AdamState adam_W(param_count), adam_V(param_count), adam_b(config.hidden_dim),
        adam_c(input_dim);
    uint64_t step = 0;

    const uint32_t workers = std::max<uint32_t>(1, config.workers);
    std::vector<BatchAccumulator> acc;
    acc.reserve(workers);
    for (uint32_t w = 0; w < workers; ++w) acc.emplace_back(input_dim, config.hidden_dim);

    std::vector<size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), size_t{0});

    TrainReport local_report;
    TrainReport& rep = report ? *report : local_report;
    rep.epoch_mean_loss.clear();
    rep.skipped_empty = 0;
    rep.steps = 0;

    for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(Rng::derive(config.seed, kShuffleStream + epoch));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0;
        uint64_t epoch_used = 0;

        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            const size_t end = std::min(order.size(), start + config.batch_size);

            // Negative samples are keyed to (seed, epoch, position in the
            // shuffled order), so the draw is identical for any worker count.
            auto run_chunk = [&](size_t chunk_begin, size_t chunk_end, BatchAccumulator& out) {
                for (size_t pos = chunk_begin; pos < chunk_end; ++pos) {
                    const SparseBinaryVector& v = corpus[order[pos]];
                    if (v.on_indices.empty()) {
                        ++out.skipped;
                        continue;
                    }
                    Rng sample_rng(
                        Rng::derive(Rng::derive(config.seed, kSampleStream + epoch), pos));
                    LossSample sample = sample_loss(model, v, config.negative_ratio, sample_rng);
                    if (!std::isfinite(sample.value))
                        throw Error(ErrorClass::NonFiniteLoss,
                                    "NonFiniteLoss at step " + std::to_string(step));
                    out.loss_sum += sample.value;
                    ++out.used;
                    SparseGradients g = gradients(model, v, sample);
                    accumulate_gradients(g, input_dim, config.hidden_dim, 1.0, out.W, out.V,
                                         out.b, out.c);
                }
            };

            for (auto& a : acc) a.reset();
            if (workers == 1 || end - start < 2 * workers) {
                run_chunk(start, end, acc[0]);
            } else {
                const size_t len = end - start;
                std::vector<std::thread> threads;
                std::vector<std::exception_ptr> errors(workers);
                threads.reserve(workers);
                for (uint32_t w = 0; w < workers; ++w) {
                    const size_t lo = start + len * w / workers;
                    const size_t hi = start + len * (w + 1) / workers;
                    threads.emplace_back([&, w, lo, hi] {
                        try {
                            run_chunk(lo, hi, acc[w]);
                        } catch (...) {
                            errors[w] = std::current_exception();
                        }
                    });
                }
                for (auto& t : threads) t.join();
                for (const auto& err : errors)
                    if (err) std::rethrow_exception(err);
                for (uint32_t w = 1; w < workers; ++w) acc[0].merge(acc[w]);
            }

            rep.skipped_empty += acc[0].skipped;
            if (acc[0].used == 0) continue; // batch held only empty vectors

            epoch_loss += acc[0].loss_sum;
            epoch_used += acc[0].used;

            // batch gradient = mean of per-example gradients
            const double scale = 1.0 / static_cast<double>(acc[0].used);
            for (auto& g : acc[0].W) g *= scale;
            for (auto& g : acc[0].V) g *= scale;
            for (auto& g : acc[0].b) g *= scale;
            for (auto& g : acc[0].c) g *= scale;

            ++step;
            const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
            const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
            bool finite = adam_update(model.W, acc[0].W, adam_W, config, bias1, bias2);
            finite &= adam_update(model.V, acc[0].V, adam_V, config, bias1, bias2);
            finite &= adam_update(model.b, acc[0].b, adam_b, config, bias1, bias2);
            finite &= adam_update(model.c, acc[0].c, adam_c, config, bias1, bias2);
            if (!finite)
                throw Error(ErrorClass::NonFiniteLoss,
                            "NonFiniteLoss: parameters non-finite after step " +
                                std::to_string(step));
        }

        const double mean_loss =
            epoch_used > 0 ? epoch_loss / static_cast<double>(epoch_used) : 0.0;
        rep.epoch_mean_loss.push_back(mean_loss);
        if (on_epoch) on_epoch(epoch, mean_loss);
    }
    rep.steps = step;
    return model;
}

std::vector<double> embed_pattern(const AutoencoderModel& model, const SparseBinaryVector& v) {
    return forward(model, v).preactivation;
}

std::vector<double> token_embedding(const AutoencoderModel& model, uint32_t index) {
    if (index >= model.input_dim)
        throw Error(ErrorClass::IndexOutOfRange,
                    "IndexOutOfRange: " + std::to_string(index) + " >= " +
                        std::to_string(model.input_dim));
    const double* row = model.w_row(index);
    return std::vector<double>(row, row + model.hidden_dim);
}

namespace {

template <class T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
void read_pod(std::ifstream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

void write_doubles(std::ofstream& out, const std::vector<double>& xs) {
    out.write(reinterpret_cast<const char*>(xs.data()),
              static_cast<std::streamsize>(xs.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::vector<double>& xs, size_t n) {
    xs.resize(n);
    in.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void AutoencoderModel::save(const std::string& path) const {
    if (!host_little_endian())
        throw Error(ErrorClass::Io, "model files are declared little-endian; host is not");
    if (static_cast<uint64_t>(event_count) + vocab_size != input_dim)
        throw Error(ErrorClass::DimensionMismatch,
                    "model M+K does not match input dim; set event_count and vocab_size");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorClass::Io, "cannot open model file for writing: " + path);

    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kEndianMarker);
    const uint32_t flags = tokenizer.fold_case ? 1u : 0u;
    write_pod(out, flags);
    write_pod(out, static_cast<uint64_t>(event_count));
    write_pod(out, static_cast<uint64_t>(vocab_size));
    write_pod(out, static_cast<uint64_t>(hidden_dim));
    write_pod(out, seed);
    write_pod(out, registry_hash);
    write_pod(out, vocab_hash);
    const auto sep_len = static_cast<uint32_t>(tokenizer.separators.size());
    write_pod(out, sep_len);
    out.write(tokenizer.separators.data(), sep_len);
    write_doubles(out, W);
    write_doubles(out, V);
    write_doubles(out, b);
    write_doubles(out, c);
    if (!out) throw Error(ErrorClass::Io, "model write failure: " + path);
}

AutoencoderModel AutoencoderModel::load(const std::string& path) {
    if (!host_little_endian())
        throw Error(ErrorClass::Io, "model files are declared little-endian; host is not");
    require_artifact(path, "autoencoder model");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorClass::Io, "cannot open model file: " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error(ErrorClass::Parse, "not a model file (bad magic): " + path);
    uint32_t marker = 0;
    read_pod(in, marker);
    if (marker != kEndianMarker)
        throw Error(ErrorClass::Parse, "model endianness marker mismatch: " + path);
    uint32_t flags = 0;
    read_pod(in, flags);
    uint64_t m = 0, k = 0, d = 0;
    read_pod(in, m);
    read_pod(in, k);
    read_pod(in, d);

    AutoencoderModel model;
    model.event_count = static_cast<uint32_t>(m);
    model.vocab_size = static_cast<uint32_t>(k);
    model.input_dim = static_cast<uint32_t>(m + k);
    model.hidden_dim = static_cast<uint32_t>(d);
    model.tokenizer.fold_case = (flags & 1u) != 0;
    read_pod(in, model.seed);
    read_pod(in, model.registry_hash);
    read_pod(in, model.vocab_hash);
    uint32_t sep_len = 0;
    read_pod(in, sep_len);
    model.tokenizer.separators.resize(sep_len);
    in.read(model.tokenizer.separators.data(), sep_len);

    const size_t matrix_size = static_cast<size_t>(model.input_dim) * model.hidden_dim;
    read_doubles(in, model.W, matrix_size);
    read_doubles(in, model.V, matrix_size);
    read_doubles(in, model.b, model.hidden_dim);
    read_doubles(in, model.c, model.input_dim);
    if (!in) throw Error(ErrorClass::Parse, "model file truncated: " + path);
    return model;
}

}  // namespace logembed
