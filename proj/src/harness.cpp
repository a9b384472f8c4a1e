#include "wosr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"

namespace wosr {

using nlohmann::json;

NetConfig NetConfig::desk() { return {}; }

NetConfig NetConfig::full() {
    NetConfig c;
    c.hidden = {2048, 1024, 256, 128, 32, 16};
    return c;
}

std::string NetConfig::to_json() const {
    json j;
    j["hidden"] = hidden;
    j["dropout_rate"] = dropout_rate;
    j["n_dropout_layers"] = n_dropout_layers;
    j["epochs"] = train.epochs;
    j["batch_size"] = train.batch_size;
    j["alpha"] = train.alpha;
    j["beta1"] = train.beta1;
    j["beta2"] = train.beta2;
    j["eps"] = train.eps;
    j["validation_fraction"] = train.validation_fraction;
    j["seed"] = train.seed;
    return j.dump(2) + "\n";
}

NetConfig NetConfig::from_json(const std::string& text) {
    NetConfig c;
    try {
        const json j = json::parse(text);
        j.at("hidden").get_to(c.hidden);
        j.at("dropout_rate").get_to(c.dropout_rate);
        j.at("n_dropout_layers").get_to(c.n_dropout_layers);
        j.at("epochs").get_to(c.train.epochs);
        j.at("batch_size").get_to(c.train.batch_size);
        j.at("alpha").get_to(c.train.alpha);
        j.at("beta1").get_to(c.train.beta1);
        j.at("beta2").get_to(c.train.beta2);
        j.at("eps").get_to(c.train.eps);
        j.at("validation_fraction").get_to(c.train.validation_fraction);
        j.at("seed").get_to(c.train.seed);
    } catch (const json::exception& e) {
        throw InvalidParams(std::string("net config: missing or mistyped field: ") + e.what());
    }
    return c;
}

NetConfig NetConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open net config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

MlpModel train_classifier(const FeatureSet& train, const NetConfig& cfg,
                          std::vector<EpochStats>* trace) {
    if (train.items.empty()) throw InvalidInput("train_classifier: empty feature set");
    MlpModel model = MlpModel::make(
        train.dim,
        classifier_layers(cfg.hidden, kNumKnownClasses, cfg.dropout_rate, cfg.n_dropout_layers),
        mix_seed(cfg.train.seed, fnv1a64("init")));
    auto t = model.train(train.features(), cfg.train);
    if (trace) *trace = std::move(t);
    return model;
}

void fit_detectors(OsrModel& model, const FeatureSet& train, const DetectorConfig& cfg) {
    if (!model.classifier.trained) throw InvalidState("fit_detectors: classifier is not trained");
    if (!(cfg.fraction > 0.0 && cfg.fraction <= 1.0))
        throw InvalidParams("fit_detectors: fraction must be in (0, 1]");

    std::vector<std::vector<size_t>> by_class(kNumKnownClasses);
    for (size_t i = 0; i < train.items.size(); ++i) {
        const auto cls = train.items[i].feat.label;
        if (!is_known(cls)) continue;
        if (train.items[i].snr_db < cfg.min_snr_db) continue;  // NaN passes
        by_class[static_cast<size_t>(cls)].push_back(i);
    }

    for (size_t c = 0; c < kNumKnownClasses; ++c) {
        auto& pool = by_class[c];
        if (pool.empty())
            throw InvalidInput(std::string("fit_detectors: no training features for class ") +
                               to_string(static_cast<WaveformClass>(c)) +
                               " at or above the SNR floor");
        const auto take = std::max<size_t>(
            cfg.psi, static_cast<size_t>(std::llround(cfg.fraction *
                                                      static_cast<double>(pool.size()))));
        Rng rng(mix_seed(cfg.seed, fnv1a64("detector"), c));
        const auto chosen = rng.sample_without_replacement(pool.size(), std::min(take, pool.size()));

        std::vector<std::vector<double>> embeddings(chosen.size());
        parallel_for(chosen.size(), [&](size_t i0, size_t i1) {
            for (size_t i = i0; i < i1; ++i)
                embeddings[i] = model.classifier.embed(train.items[pool[chosen[i]]].feat.values);
        });
        model.detectors[c] =
            iforest_fit(embeddings, cfg.n_trees, cfg.psi, cfg.contamination,
                        mix_seed(cfg.seed, fnv1a64("forest"), c), static_cast<WaveformClass>(c));
    }
}

namespace {
// Accuracy bookkeeping keyed by (class pool, snr bin).
struct RateAcc {
    std::map<std::string, std::map<std::string, std::pair<uint64_t, uint64_t>>> cells;

    void add(const std::string& cls, const std::string& snr, bool hit) {
        auto& c = cells[cls][snr];
        c.first += hit ? 1 : 0;
        c.second += 1;
        auto& all = cells[cls]["all"];
        all.first += hit ? 1 : 0;
        all.second += 1;
    }
    void emit(std::vector<MetricRow>& rows, const std::string& metric,
              const std::vector<std::string>& snr_order) const {
        for (const auto& [cls, by_snr] : cells) {
            for (const auto& snr : snr_order) {
                auto it = by_snr.find(snr);
                if (it == by_snr.end()) continue;
                rows.push_back({cls, snr, metric,
                                static_cast<double>(it->second.first) /
                                    static_cast<double>(it->second.second)});
            }
            const auto& all = by_snr.at("all");
            rows.push_back({cls, "all", metric,
                            static_cast<double>(all.first) / static_cast<double>(all.second)});
        }
    }
};

std::vector<std::string> snr_bins(const FeatureSet& fsys) {
    std::set<double> vals;
    bool has_none = false;
    for (const auto& it : fsys.items) {
        if (std::isnan(it.snr_db)) has_none = true;
        else vals.insert(static_cast<double>(it.snr_db));
    }
    std::vector<std::string> out;
    for (double v : vals) out.push_back(format_snr(static_cast<float>(v)));
    if (has_none) out.push_back("none");
    return out;
}
}  // namespace

MetricsReport run_phase1(const MlpModel& classifier, const FeatureSet& test) {
    if (!classifier.trained) throw InvalidState("phase1: classifier is not trained");
    MetricsReport rep;
    rep.phase = "phase1";
    for (size_t c = 0; c < kNumKnownClasses; ++c)
        rep.labels.emplace_back(to_string(static_cast<WaveformClass>(c)));
    rep.confusion.assign(kNumKnownClasses, std::vector<uint64_t>(kNumKnownClasses, 0));

    std::vector<size_t> idx;
    for (size_t i = 0; i < test.items.size(); ++i)
        if (is_known(test.items[i].feat.label)) idx.push_back(i);
    if (idx.empty()) throw InvalidInput("phase1: no known-class records in the test set");

    std::vector<int> pred(idx.size());
    parallel_for(idx.size(), [&](size_t i0, size_t i1) {
        for (size_t i = i0; i < i1; ++i)
            pred[i] = classifier.predict(test.items[idx[i]].feat.values).first;
    });

    RateAcc acc;
    for (size_t i = 0; i < idx.size(); ++i) {
        const auto& it = test.items[idx[i]];
        const auto truth = static_cast<size_t>(it.feat.label);
        rep.confusion[truth][static_cast<size_t>(pred[i])] += 1;
        const bool hit = pred[i] == static_cast<int>(truth);
        acc.add(to_string(it.feat.label), format_snr(it.snr_db), hit);
        acc.add("overall", format_snr(it.snr_db), hit);
    }
    acc.emit(rep.rows, "accuracy", snr_bins(test));
    return rep;
}

MetricsReport run_phase2(const OsrModel& model, const FeatureSet& test) {
    model.check();
    MetricsReport rep;
    rep.phase = "phase2";
    if (test.items.empty()) throw InvalidInput("phase2: empty test set");

    struct Flags {
        std::array<bool, kNumKnownClasses> flag;
    };
    std::vector<Flags> flags(test.items.size());
    parallel_for(test.items.size(), [&](size_t i0, size_t i1) {
        for (size_t i = i0; i < i1; ++i) {
            const auto emb = model.classifier.embed(test.items[i].feat.values);
            for (size_t c = 0; c < kNumKnownClasses; ++c)
                flags[i].flag[c] = is_outlier(model.detectors[c], emb).first;
        }
    });

    RateAcc own, known, unknown, false_rej;
    for (size_t i = 0; i < test.items.size(); ++i) {
        const auto& it = test.items[i];
        const std::string snr = format_snr(it.snr_db);
        size_t n_accept = 0;
        for (size_t c = 0; c < kNumKnownClasses; ++c)
            n_accept += flags[i].flag[c] ? 0 : 1;
        const bool fused_accept = model.fusion_rule == FusionRule::AnyAccepts
                                      ? n_accept > 0
                                      : n_accept == kNumKnownClasses;
        if (is_known(it.feat.label)) {
            const auto c = static_cast<size_t>(it.feat.label);
            own.add(to_string(it.feat.label), snr, !flags[i].flag[c]);
            known.add("known", snr, fused_accept);
            false_rej.add("known", snr, !fused_accept);
        } else {
            unknown.add("unknown", snr, !fused_accept);
            unknown.add(to_string(it.feat.label), snr, !fused_accept);
        }
    }
    const auto bins = snr_bins(test);
    own.emit(rep.rows, "detector_accept_rate", bins);
    known.emit(rep.rows, "known_accept_rate", bins);
    false_rej.emit(rep.rows, "known_false_reject_rate", bins);
    unknown.emit(rep.rows, "unknown_reject_rate", bins);
    return rep;
}

MetricsReport run_phase3(const OsrModel& model, const FeatureSet& test) {
    model.check();
    MetricsReport rep;
    rep.phase = "phase3";
    if (test.items.empty()) throw InvalidInput("phase3: empty test set");
    for (size_t c = 0; c < kNumKnownClasses; ++c)
        rep.labels.emplace_back(to_string(static_cast<WaveformClass>(c)));
    rep.labels.emplace_back("Unknown");
    const size_t kUnk = kNumKnownClasses;
    rep.confusion.assign(kUnk + 1, std::vector<uint64_t>(kUnk + 1, 0));

    struct Out {
        size_t pred;
        int closed_pred;
    };
    std::vector<Out> outs(test.items.size());
    parallel_for(test.items.size(), [&](size_t i0, size_t i1) {
        for (size_t i = i0; i < i1; ++i) {
            const auto v = classify_open_set(model, test.items[i].feat);
            outs[i].pred = v.is_known ? static_cast<size_t>(v.decision) : kUnk;
            outs[i].closed_pred = is_known(test.items[i].feat.label)
                                      ? model.classifier.predict(test.items[i].feat.values).first
                                      : -1;
        }
    });

    RateAcc acc, open_known, closed_known, unk_rate;
    for (size_t i = 0; i < test.items.size(); ++i) {
        const auto& it = test.items[i];
        const std::string snr = format_snr(it.snr_db);
        const size_t truth =
            is_known(it.feat.label) ? static_cast<size_t>(it.feat.label) : kUnk;
        rep.confusion[truth][outs[i].pred] += 1;
        const bool hit = outs[i].pred == truth;
        acc.add(truth == kUnk ? "Unknown" : to_string(it.feat.label), snr, hit);
        acc.add("overall", snr, hit);
        if (truth != kUnk) {
            open_known.add("known", snr, hit);
            closed_known.add("known", snr,
                             outs[i].closed_pred == static_cast<int>(truth));
        } else {
            unk_rate.add("unknown", snr, hit);
        }
    }
    const auto bins = snr_bins(test);
    acc.emit(rep.rows, "accuracy", bins);
    open_known.emit(rep.rows, "open_set_accuracy", bins);
    closed_known.emit(rep.rows, "closed_set_accuracy", bins);
    if (!unk_rate.cells.empty()) unk_rate.emit(rep.rows, "unknown_reject_rate", bins);

    // Invariant: rejection can only remove correct answers.
    const double open = rep.row_value("known", "all", "open_set_accuracy");
    const double closed = rep.row_value("known", "all", "closed_set_accuracy");
    if (open > closed + 1e-12)
        throw InvalidState("phase3: open-set known accuracy exceeded closed-set accuracy");
    return rep;
}

}  // namespace wosr
