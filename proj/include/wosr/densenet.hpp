#pragma once

#include <cmath>
#include <utility>

#include "wosr/spectra.hpp"

namespace wosr {

enum class Activation { GELU, Sigmoid, Identity };
const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
    size_t width = 0;
    Activation activation = Activation::GELU;
    double dropout_rate = 0.0;  // applied to this layer's output during training
};

double gelu(double x);
double gelu_prime(double x);
double sigmoid(double x);

inline constexpr double kBceEps = 1e-7;

// Mean over outputs of -[y ln p + (1-y) ln(1-p)], probs clamped to [eps, 1-eps].
double bce_loss(const std::vector<double>& probs, const std::vector<double>& target);
// Gradient w.r.t. pre-sigmoid logits: (p - y) / n_out.
std::vector<double> bce_logit_grad(const std::vector<double>& probs,
                                   const std::vector<double>& target);

struct AdamaxState {
    std::vector<double> m, u;
    uint64_t t = 0;
};

// t += 1; m = b1 m + (1-b1) g; u = max(b2 u, |g|); p -= alpha/(1-b1^t) * m/(u+eps).
void adamax_step(AdamaxState& st, std::vector<double>& params, const std::vector<double>& grad,
                 double alpha = 0.002, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8);

struct TrainConfig {
    int epochs = 45;
    size_t batch_size = 128;
    double alpha = 0.002;
    double alpha_final = 0.002;  // cosine-decayed per-epoch step (== alpha: constant)
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double validation_fraction = 0.1;
    uint64_t seed = 1;
    bool verbose = false;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

// Activations cached by a training-mode forward pass, consumed by backward.
struct BatchCache {
    size_t n = 0;
    std::vector<std::vector<double>> a;     // a[0] = input, a[l+1] = layer l output
    std::vector<std::vector<double>> z;     // z[l] = layer l pre-activation
    std::vector<std::vector<double>> mask;  // inverted-dropout multipliers ({} if unused)
    uint64_t revision = 0;                  // model revision the cache was built against
};

struct Gradients {
    std::vector<std::vector<double>> w, b;  // summed over the batch
};

class MlpModel {
public:
    // Gaussian init scaled by sqrt(2/fan_in), zero biases. Last layer must be Sigmoid.
    static MlpModel make(size_t input_dim, const std::vector<LayerSpec>& layers, uint64_t seed);

    // Batch training-mode pass. x is row-major n x input_dim. Dropout masks are
    // drawn from `drop` when train_mode; pass nullptr for inference.
    void forward_batch(const double* x, size_t n, bool train_mode, Rng* drop,
                       BatchCache& cache) const;
    // logit_grad is row-major n x n_out, dL/dz of the output layer.
    Gradients backward_batch(const BatchCache& cache, const std::vector<double>& logit_grad) const;

    // Single-sample inference (any model state).
    std::vector<double> forward(const std::vector<float>& x) const;

    // Inference on a trained model only (throw InvalidState otherwise).
    std::pair<int, double> predict(const std::vector<float>& x) const;  // (argmax, confidence)
    std::vector<double> embed(const std::vector<float>& x) const;       // embedding-tap output

    std::vector<EpochStats> train(const std::vector<SpectrumFeature>& data,
                                  const TrainConfig& cfg);

    size_t n_out() const { return specs.empty() ? 0 : specs.back().width; }
    size_t n_params() const;
    void snap_to_f32();  // round every parameter through float
    void check() const;  // shape/invariant validation

    size_t input_dim = 0;
    std::vector<LayerSpec> specs;
    std::vector<std::vector<double>> w;  // [layer], row-major width x fan_in
    std::vector<std::vector<double>> b;  // [layer], width
    size_t embedding_tap = 0;            // layer whose output is the embedding
    bool trained = false;
    uint64_t revision = 0;  // bumped on every parameter mutation
};

// The classifier architecture: hidden widths with GELU and dropout 0.2 on the
// first three, 32-wide tap preserved, 7 sigmoid outputs.
std::vector<LayerSpec> classifier_layers(const std::vector<size_t>& hidden, size_t n_out,
                                         double dropout_rate = 0.2, int n_dropout_layers = 3);

}  // namespace wosr
