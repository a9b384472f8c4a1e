#include "wosr/densenet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace wosr {

namespace {
const double kGeluC = std::sqrt(2.0 / std::numbers::pi);

double apply_act(Activation act, double x) {
    switch (act) {
        case Activation::GELU: return gelu(x);
        case Activation::Sigmoid: return sigmoid(x);
        case Activation::Identity: return x;
    }
    return x;
}

double act_prime(Activation act, double z) {
    switch (act) {
        case Activation::GELU: return gelu_prime(z);
        case Activation::Sigmoid: {
            const double s = sigmoid(z);
            return s * (1.0 - s);
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

// Fixed-order unrolled kernels: vectorizable without relaxing FP semantics,
// so results are identical for any thread count or optimization level.
double dot(const double* a, const double* b, size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
    size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        s0 += a[j] * b[j];
        s1 += a[j + 1] * b[j + 1];
        s2 += a[j + 2] * b[j + 2];
        s3 += a[j + 3] * b[j + 3];
        s4 += a[j + 4] * b[j + 4];
        s5 += a[j + 5] * b[j + 5];
        s6 += a[j + 6] * b[j + 6];
        s7 += a[j + 7] * b[j + 7];
    }
    double acc = ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
    for (; j < n; ++j) acc += a[j] * b[j];
    return acc;
}

void axpy(double* y, double a, const double* x, size_t n) {
    for (size_t j = 0; j < n; ++j) y[j] += a * x[j];
}
}  // namespace

const char* to_string(Activation a) {
    switch (a) {
        case Activation::GELU: return "gelu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "gelu") return Activation::GELU;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "identity") return Activation::Identity;
    throw InvalidParams("unknown activation: " + s);
}

double gelu(double x) {
    const double u = kGeluC * (x + 0.044715 * x * x * x);
    return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_prime(double x) {
    const double u = kGeluC * (x + 0.044715 * x * x * x);
    const double t = std::tanh(u);
    const double du = kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double bce_loss(const std::vector<double>& probs, const std::vector<double>& target) {
    if (probs.size() != target.size() || probs.empty())
        throw InvalidInput("bce_loss: size mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        const double p = std::clamp(probs[i], kBceEps, 1.0 - kBceEps);
        acc += -(target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p));
    }
    return acc / static_cast<double>(probs.size());
}

std::vector<double> bce_logit_grad(const std::vector<double>& probs,
                                   const std::vector<double>& target) {
    if (probs.size() != target.size() || probs.empty())
        throw InvalidInput("bce_logit_grad: size mismatch");
    std::vector<double> g(probs.size());
    const double inv = 1.0 / static_cast<double>(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) g[i] = (probs[i] - target[i]) * inv;
    return g;
}

void adamax_step(AdamaxState& st, std::vector<double>& params, const std::vector<double>& grad,
                 double alpha, double beta1, double beta2, double eps) {
    if (params.size() != grad.size()) throw InvalidInput("adamax_step: size mismatch");
    if (st.m.empty()) {
        st.m.assign(params.size(), 0.0);
        st.u.assign(params.size(), 0.0);
    }
    if (st.m.size() != params.size()) throw InvalidInput("adamax_step: stale state size");
    st.t += 1;
    const double bias = 1.0 - std::pow(beta1, static_cast<double>(st.t));
    const double step = alpha / bias;
    for (size_t i = 0; i < params.size(); ++i) {
        st.m[i] = beta1 * st.m[i] + (1.0 - beta1) * grad[i];
        st.u[i] = std::max(beta2 * st.u[i], std::abs(grad[i]));
        params[i] -= step * st.m[i] / (st.u[i] + eps);
    }
}

std::vector<LayerSpec> classifier_layers(const std::vector<size_t>& hidden, size_t n_out,
                                         double dropout_rate, int n_dropout_layers) {
    std::vector<LayerSpec> specs;
    for (size_t i = 0; i < hidden.size(); ++i) {
        LayerSpec s;
        s.width = hidden[i];
        s.activation = Activation::GELU;
        s.dropout_rate = i < static_cast<size_t>(n_dropout_layers) ? dropout_rate : 0.0;
        specs.push_back(s);
    }
    specs.push_back({n_out, Activation::Sigmoid, 0.0});
    return specs;
}

MlpModel MlpModel::make(size_t input_dim, const std::vector<LayerSpec>& layers, uint64_t seed) {
    if (input_dim == 0 || layers.empty()) throw InvalidParams("mlp: empty architecture");
    if (layers.back().activation != Activation::Sigmoid)
        throw InvalidParams("mlp: output layer must be sigmoid");
    for (const auto& l : layers) {
        if (l.width == 0) throw InvalidParams("mlp: zero-width layer");
        if (!(l.dropout_rate >= 0.0 && l.dropout_rate < 1.0))
            throw InvalidParams("mlp: dropout rate must be in [0, 1)");
    }

    MlpModel m;
    m.input_dim = input_dim;
    m.specs = layers;
    Rng rng(seed);
    size_t fan_in = input_dim;
    for (const auto& l : layers) {
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        std::vector<double> wl(l.width * fan_in);
        for (auto& v : wl) v = rng.gauss() * scale;
        m.w.push_back(std::move(wl));
        m.b.emplace_back(l.width, 0.0);
        fan_in = l.width;
    }
    // Embedding tap: the last 32-wide layer, else the second-to-last layer.
    m.embedding_tap = layers.size() >= 2 ? layers.size() - 2 : 0;
    for (size_t i = layers.size(); i-- > 0;) {
        if (layers[i].width == 32) {
            m.embedding_tap = i;
            break;
        }
    }
    m.revision = 1;
    m.check();
    return m;
}

void MlpModel::check() const {
    if (specs.size() != w.size() || specs.size() != b.size())
        throw InvalidState("mlp: layer count mismatch");
    size_t fan_in = input_dim;
    for (size_t l = 0; l < specs.size(); ++l) {
        if (w[l].size() != specs[l].width * fan_in || b[l].size() != specs[l].width)
            throw InvalidState("mlp: tensor shape mismatch at layer " + std::to_string(l));
        fan_in = specs[l].width;
    }
    if (embedding_tap >= specs.size()) throw InvalidState("mlp: embedding tap out of range");
}

size_t MlpModel::n_params() const {
    size_t n = 0;
    for (size_t l = 0; l < w.size(); ++l) n += w[l].size() + b[l].size();
    return n;
}

void MlpModel::snap_to_f32() {
    for (auto& t : w)
        for (auto& v : t) v = static_cast<double>(static_cast<float>(v));
    for (auto& t : b)
        for (auto& v : t) v = static_cast<double>(static_cast<float>(v));
    ++revision;
}

void MlpModel::forward_batch(const double* x, size_t n, bool train_mode, Rng* drop,
                             BatchCache& cache) const {
    if (n == 0) throw InvalidInput("forward: empty batch");
    cache.n = n;
    cache.revision = revision;
    cache.a.assign(specs.size() + 1, {});
    cache.z.assign(specs.size(), {});
    cache.mask.assign(specs.size(), {});
    cache.a[0].assign(x, x + n * input_dim);

    size_t fan_in = input_dim;
    for (size_t l = 0; l < specs.size(); ++l) {
        const size_t width = specs[l].width;
        auto& z = cache.z[l];
        auto& a = cache.a[l + 1];
        z.resize(n * width);
        a.resize(n * width);
        const double* in = cache.a[l].data();
        const double* wl = w[l].data();
        const double* bl = b[l].data();
        double* zp = z.data();
        const size_t fi = fan_in;
        parallel_for(n, [&, in, wl, bl, zp, fi, width](size_t s0, size_t s1) {
            for (size_t s = s0; s < s1; ++s) {
                const double* xs = in + s * fi;
                double* zs = zp + s * width;
                for (size_t i = 0; i < width; ++i) zs[i] = dot(wl + i * fi, xs, fi) + bl[i];
            }
        });
        const Activation act = specs[l].activation;
        double* ap = a.data();
        parallel_for(n * width, [&, zp, ap, act](size_t i0, size_t i1) {
            for (size_t i = i0; i < i1; ++i) ap[i] = apply_act(act, zp[i]);
        });

        if (train_mode && specs[l].dropout_rate > 0.0) {
            if (!drop) throw InvalidInput("forward: training mode needs a dropout rng");
            const double p = specs[l].dropout_rate;
            const double keep_scale = 1.0 / (1.0 - p);
            auto& mask = cache.mask[l];
            mask.resize(n * width);
            for (auto& mv : mask) mv = drop->uniform() < p ? 0.0 : keep_scale;
            for (size_t i = 0; i < n * width; ++i) a[i] *= mask[i];
        }
        fan_in = width;
    }
}

Gradients MlpModel::backward_batch(const BatchCache& cache,
                                   const std::vector<double>& logit_grad) const {
    if (cache.revision != revision) throw InvalidState("backward: stale forward cache");
    const size_t n = cache.n;
    const size_t n_layers = specs.size();
    if (logit_grad.size() != n * specs.back().width)
        throw InvalidInput("backward: logit gradient shape mismatch");

    Gradients g;
    g.w.resize(n_layers);
    g.b.resize(n_layers);

    std::vector<double> delta = logit_grad;  // dL/dz of the current layer
    for (size_t l = n_layers; l-- > 0;) {
        const size_t width = specs[l].width;
        const size_t fan_in = l == 0 ? input_dim : specs[l - 1].width;
        const double* in = cache.a[l].data();
        const double* dp = delta.data();

        g.w[l].assign(width * fan_in, 0.0);
        g.b[l].assign(width, 0.0);
        double* gw = g.w[l].data();
        double* gb = g.b[l].data();
        // Row-parallel accumulation: each output row sums over the batch in
        // fixed order, so results are thread-count invariant.
        parallel_for(width, [&, in, dp, gw, gb, width, fan_in, n](size_t i0, size_t i1) {
            for (size_t i = i0; i < i1; ++i) {
                double* row = gw + i * fan_in;
                double bsum = 0.0;
                for (size_t s = 0; s < n; ++s) {
                    const double d = dp[s * width + i];
                    bsum += d;
                    axpy(row, d, in + s * fan_in, fan_in);
                }
                gb[i] = bsum;
            }
        });

        if (l == 0) break;
        // delta_prev = (W^T delta) . mask . act'(z)
        std::vector<double> prev(n * fan_in, 0.0);
        const double* wl = w[l].data();
        double* pp = prev.data();
        const Activation act = specs[l - 1].activation;
        const double* zprev = cache.z[l - 1].data();
        const auto& mask = cache.mask[l - 1];
        const double* mp = mask.empty() ? nullptr : mask.data();
        parallel_for(n, [&, dp, wl, pp, mp, zprev, act, width, fan_in](size_t s0, size_t s1) {
            for (size_t s = s0; s < s1; ++s) {
                double* ps = pp + s * fan_in;
                const double* ds = dp + s * width;
                for (size_t i = 0; i < width; ++i) axpy(ps, ds[i], wl + i * fan_in, fan_in);
                for (size_t j = 0; j < fan_in; ++j) {
                    const size_t idx = s * fan_in + j;
                    const double m = mp ? mp[idx] : 1.0;
                    ps[j] *= m * act_prime(act, zprev[idx]);
                }
            }
        });
        delta = std::move(prev);
    }
    return g;
}

std::vector<double> MlpModel::forward(const std::vector<float>& x) const {
    if (x.size() != input_dim) throw InvalidInput("forward: feature dimension mismatch");
    std::vector<double> xd(x.begin(), x.end());
    BatchCache cache;
    forward_batch(xd.data(), 1, false, nullptr, cache);
    return cache.a.back();
}

std::pair<int, double> MlpModel::predict(const std::vector<float>& x) const {
    if (!trained) throw InvalidState("predict: model is not trained");
    const auto probs = forward(x);
    size_t best = 0;
    for (size_t i = 1; i < probs.size(); ++i)
        if (probs[i] > probs[best]) best = i;  // ties keep the lower index
    return {static_cast<int>(best), probs[best]};
}

std::vector<double> MlpModel::embed(const std::vector<float>& x) const {
    if (!trained) throw InvalidState("embed: model is not trained");
    if (x.size() != input_dim) throw InvalidInput("embed: feature dimension mismatch");
    std::vector<double> xd(x.begin(), x.end());
    BatchCache cache;
    forward_batch(xd.data(), 1, false, nullptr, cache);
    return cache.a[embedding_tap + 1];
}

std::vector<EpochStats> MlpModel::train(const std::vector<SpectrumFeature>& data,
                                        const TrainConfig& cfg) {
    check();
    const size_t n_total = data.size();
    const size_t n_cls = n_out();
    if (n_total == 0) throw InvalidInput("train: empty dataset");
    if (cfg.epochs < 1 || cfg.batch_size < 1) throw InvalidParams("train: bad epochs/batch size");
    if (!(cfg.validation_fraction >= 0.0 && cfg.validation_fraction < 1.0))
        throw InvalidParams("train: validation fraction must be in [0, 1)");

    std::vector<size_t> class_count(n_cls, 0);
    for (const auto& f : data) {
        if (f.values.size() != input_dim) throw InvalidInput("train: feature dimension mismatch");
        const auto cls = static_cast<size_t>(f.label);
        if (cls >= n_cls) throw InvalidInput("train: label outside the known classes");
        ++class_count[cls];
    }
    for (size_t c = 0; c < n_cls; ++c)
        if (class_count[c] == 0)
            throw InvalidInput("train: class " + std::to_string(c) + " has no samples");

    // Held-out validation split by seeded shuffle (tail of the permutation).
    Rng split_rng(mix_seed(cfg.seed, fnv1a64("split")));
    std::vector<size_t> order = split_rng.sample_without_replacement(n_total, n_total);
    const auto n_val = static_cast<size_t>(std::llround(cfg.validation_fraction *
                                                        static_cast<double>(n_total)));
    if (n_val >= n_total) throw InvalidInput("train: validation split leaves no training data");
    std::vector<size_t> train_idx(order.begin(), order.end() - static_cast<ptrdiff_t>(n_val));
    std::vector<size_t> val_idx(order.end() - static_cast<ptrdiff_t>(n_val), order.end());

    std::vector<AdamaxState> st_w(specs.size()), st_b(specs.size());
    std::vector<EpochStats> trace;
    BatchCache cache;
    std::vector<double> bx, by;

    auto fill_batch = [&](const std::vector<size_t>& idx, size_t lo, size_t hi) {
        const size_t nb = hi - lo;
        bx.assign(nb * input_dim, 0.0);
        by.assign(nb * n_cls, 0.0);
        for (size_t s = 0; s < nb; ++s) {
            const auto& f = data[idx[lo + s]];
            for (size_t j = 0; j < input_dim; ++j) bx[s * input_dim + j] = f.values[j];
            by[s * n_cls + static_cast<size_t>(f.label)] = 1.0;
        }
        return nb;
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(cfg.seed, fnv1a64("epoch"), static_cast<uint64_t>(epoch)));
        std::vector<size_t> perm =
            shuffle_rng.sample_without_replacement(train_idx.size(), train_idx.size());
        std::vector<size_t> epoch_idx(train_idx.size());
        for (size_t i = 0; i < perm.size(); ++i) epoch_idx[i] = train_idx[perm[i]];

        double loss_sum = 0.0;
        size_t batch_no = 0;
        for (size_t lo = 0; lo < epoch_idx.size(); lo += cfg.batch_size, ++batch_no) {
            const size_t hi = std::min(epoch_idx.size(), lo + cfg.batch_size);
            const size_t nb = fill_batch(epoch_idx, lo, hi);
            Rng drop(mix_seed(mix_seed(cfg.seed, fnv1a64("dropout")),
                              static_cast<uint64_t>(epoch), batch_no));
            forward_batch(bx.data(), nb, true, &drop, cache);

            const auto& probs = cache.a.back();
            std::vector<double> lg(nb * n_cls);
            const double inv_nb = 1.0 / static_cast<double>(nb);
            for (size_t s = 0; s < nb; ++s) {
                for (size_t i = 0; i < n_cls; ++i) {
                    const size_t k = s * n_cls + i;
                    const double p = std::clamp(probs[k], kBceEps, 1.0 - kBceEps);
                    loss_sum += -(by[k] * std::log(p) + (1.0 - by[k]) * std::log(1.0 - p)) /
                                static_cast<double>(n_cls);
                    lg[k] = (probs[k] - by[k]) / static_cast<double>(n_cls);
                }
            }
            Gradients g = backward_batch(cache, lg);
            for (auto& t : g.w)
                for (auto& v : t) v *= inv_nb;
            for (auto& t : g.b)
                for (auto& v : t) v *= inv_nb;
            for (size_t l = 0; l < specs.size(); ++l) {
                adamax_step(st_w[l], w[l], g.w[l], cfg.alpha, cfg.beta1, cfg.beta2, cfg.eps);
                adamax_step(st_b[l], b[l], g.b[l], cfg.alpha, cfg.beta1, cfg.beta2, cfg.eps);
            }
            ++revision;
        }

        EpochStats st;
        st.epoch = epoch;
        st.train_loss = loss_sum / static_cast<double>(epoch_idx.size());

        if (!val_idx.empty()) {
            double vloss = 0.0;
            size_t correct = 0;
            for (size_t lo = 0; lo < val_idx.size(); lo += cfg.batch_size) {
                const size_t hi = std::min(val_idx.size(), lo + cfg.batch_size);
                const size_t nb = fill_batch(val_idx, lo, hi);
                forward_batch(bx.data(), nb, false, nullptr, cache);
                const auto& probs = cache.a.back();
                for (size_t s = 0; s < nb; ++s) {
                    size_t best = 0;
                    for (size_t i = 0; i < n_cls; ++i) {
                        const size_t k = s * n_cls + i;
                        const double p = std::clamp(probs[k], kBceEps, 1.0 - kBceEps);
                        vloss += -(by[k] * std::log(p) + (1.0 - by[k]) * std::log(1.0 - p)) /
                                 static_cast<double>(n_cls);
                        if (probs[k] > probs[s * n_cls + best]) best = i;
                    }
                    if (best == static_cast<size_t>(data[val_idx[lo + s]].label)) ++correct;
                }
            }
            st.val_loss = vloss / static_cast<double>(val_idx.size());
            st.val_accuracy = static_cast<double>(correct) / static_cast<double>(val_idx.size());
        }
        trace.push_back(st);
        if (cfg.verbose)
            std::fprintf(stderr, "epoch %2d  loss %.4f  val_loss %.4f  val_acc %.4f\n", st.epoch,
                         st.train_loss, st.val_loss, st.val_accuracy);
    }

    snap_to_f32();
    trained = true;
    return trace;
}

}  // namespace wosr
