#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "json.hpp"
#include "wosr/container.hpp"
#include "wosr/harness.hpp"

namespace fs = std::filesystem;
using namespace wosr;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string hex64(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

DatasetManifest profile_manifest(const std::string& profile, const std::string& split,
                                 uint64_t seed) {
    if (profile == "desk") return split == "train" ? DatasetManifest::desk_train(seed)
                                                   : DatasetManifest::desk_test(seed);
    if (profile == "full") return split == "train" ? DatasetManifest::full_train(seed)
                                                   : DatasetManifest::full_test(seed);
    throw InvalidParams("unknown profile: " + profile);
}

struct EvalInputs {
    DatasetManifest manifest;
    FeatureSet features;
    std::string config_hash;
};

EvalInputs load_eval_inputs(const std::string& data_dir, const std::string& model_path) {
    EvalInputs in;
    const auto mpath = (fs::path(data_dir) / "manifest.json").string();
    const std::string mtext = slurp(mpath);
    in.manifest = DatasetManifest::from_json(mtext);
    in.features = load_features((fs::path(data_dir) / "features.bin").string());
    const std::string model_bytes = model_path.empty() ? "" : slurp(model_path);
    in.config_hash = hex64(mix_seed(fnv1a64(mtext), fnv1a64(model_bytes)));
    return in;
}

int cmd_manifest(const std::string& profile, const std::string& split, uint64_t seed,
                 const std::string& out) {
    DatasetManifest m = profile_manifest(profile, split, seed);
    m.validate();
    if (out.empty()) {
        std::cout << m.to_json();
    } else {
        m.save(out);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_gen_data(const std::string& manifest_path, const std::string& profile,
                 const std::string& split, uint64_t seed, const std::string& out_dir) {
    DatasetManifest m = manifest_path.empty() ? profile_manifest(profile, split, seed)
                                              : DatasetManifest::load(manifest_path);
    const auto t0 = std::chrono::steady_clock::now();
    FeatureSet fsys = build_dataset(m, out_dir);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    std::cout << "wrote " << fsys.items.size() << " records (" << m.split << ", "
              << m.profile << " profile) to " << out_dir << " in " << dt.count() << " s\n";
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& config_path,
              const std::string& out_path, bool quiet) {
    NetConfig cfg = config_path.empty() ? NetConfig::desk() : NetConfig::load(config_path);
    cfg.train.verbose = !quiet;
    FeatureSet train = load_features((fs::path(data_dir) / "features.bin").string());

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<EpochStats> trace;
    OsrModel model;
    model.classifier = train_classifier(train, cfg, &trace);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;

    save_models(out_path, model, false);
    std::cout << "trained " << model.classifier.n_params() << " parameters in " << dt.count()
              << " s; final val accuracy " << (trace.empty() ? 0.0 : trace.back().val_accuracy)
              << "; wrote " << out_path << "\n";
    return 0;
}

int cmd_train_detectors(const std::string& data_dir, const std::string& model_path,
                        double contamination, size_t n_trees, size_t psi, double fraction,
                        uint64_t seed, double min_snr_db, std::string out_path) {
    if (out_path.empty()) out_path = model_path;
    OsrModel model = load_models(model_path);
    FeatureSet train = load_features((fs::path(data_dir) / "features.bin").string());

    DetectorConfig cfg;
    cfg.contamination = contamination;
    cfg.n_trees = n_trees;
    cfg.psi = psi;
    cfg.fraction = fraction;
    cfg.seed = seed;
    cfg.min_snr_db = min_snr_db;
    const auto t0 = std::chrono::steady_clock::now();
    fit_detectors(model, train, cfg);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;

    save_models(out_path, model, true);
    std::cout << "fitted " << kNumKnownClasses << " detectors in " << dt.count() << " s";
    for (size_t c = 0; c < kNumKnownClasses; ++c)
        std::cout << (c == 0 ? "; train flag rates: " : ", ")
                  << to_string(static_cast<WaveformClass>(c)) << "="
                  << model.detectors[c].train_flag_rate;
    std::cout << "; wrote " << out_path << "\n";
    return 0;
}

int cmd_eval(int phase, const std::string& model_path, const std::string& data_dir,
             const std::string& report_path) {
    EvalInputs in = load_eval_inputs(data_dir, model_path);
    OsrModel model = load_models(model_path);

    const auto t0 = std::chrono::steady_clock::now();
    MetricsReport rep;
    switch (phase) {
        case 1: rep = run_phase1(model.classifier, in.features); break;
        case 2: rep = run_phase2(model, in.features); break;
        case 3: rep = run_phase3(model, in.features); break;
        default: throw InvalidParams("eval: phase must be 1, 2, or 3");
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    rep.duration_s = dt.count();
    rep.config_hash = in.config_hash;
    rep.dataset_seed = in.manifest.seed;
    rep.save(report_path);

    std::cout << rep.phase << " over " << in.features.items.size() << " records in "
              << dt.count() << " s; wrote " << report_path << "\n";
    for (const auto& r : rep.rows)
        if (r.snr == "all" &&
            (r.cls == "overall" || r.cls == "known" || r.cls == "unknown"))
            std::cout << "  " << r.cls << " " << r.metric << " = " << r.value << "\n";
    return 0;
}

int cmd_classify(const std::string& model_path, const std::string& input_path) {
    OsrModel model = load_models(model_path);
    if (!model.detectors[0].fitted)
        throw ModelError(model_path + ": container has no detectors; run train-detectors first");
    IqRecord rec = load_record(input_path);
    SpectrumFeature feat = featurize(rec, model.classifier.input_dim);
    OsrVerdict v = classify_open_set(model, feat);

    nlohmann::json j;
    j["decision"] = v.is_known ? "known" : "unknown";
    j["class"] = v.is_known ? to_string(v.decision) : "Unknown";
    j["confidence"] = v.confidence;
    j["detector_scores"] = v.detector_scores;
    j["detector_flags"] = v.detector_flags;
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_inspect(const std::string& model_path) {
    std::cout << describe_container(model_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"open-set waveform recognition toolkit"};
    app.require_subcommand(1);

    auto* man = app.add_subcommand("manifest", "emit a canonical dataset manifest");
    std::string man_profile = "desk", man_split = "train", man_out;
    uint64_t man_seed = 1;
    man->add_option("--profile", man_profile, "desk|full");
    man->add_option("--split", man_split, "train|test");
    man->add_option("--seed", man_seed, "master seed");
    man->add_option("--out", man_out, "output path (stdout if omitted)");

    auto* gen = app.add_subcommand("gen-data", "generate a dataset from a manifest");
    std::string gen_manifest, gen_profile = "desk", gen_split = "train", gen_out;
    uint64_t gen_seed = 1;
    gen->add_option("--manifest", gen_manifest, "manifest JSON path");
    gen->add_option("--profile", gen_profile, "canonical profile if no --manifest");
    gen->add_option("--split", gen_split, "train|test for --profile");
    gen->add_option("--seed", gen_seed, "master seed for --profile");
    gen->add_option("--out", gen_out, "output directory")->required();

    auto* tr = app.add_subcommand("train", "train the classifier on a generated dataset");
    std::string tr_data, tr_config, tr_out;
    bool tr_quiet = false;
    tr->add_option("--data", tr_data, "dataset directory")->required();
    tr->add_option("--config", tr_config, "net config JSON (defaults to the desk profile)");
    tr->add_option("--out", tr_out, "output model path")->required();
    tr->add_flag("--quiet", tr_quiet, "suppress the per-epoch trace");

    auto* td = app.add_subcommand("train-detectors", "fit per-class isolation forests");
    std::string td_data, td_model, td_out;
    double td_contamination = 0.02, td_fraction = 0.5;
    double td_min_snr = -std::numeric_limits<double>::infinity();
    size_t td_trees = 100, td_psi = 256;
    uint64_t td_seed = 1;
    td->add_option("--data", td_data, "training dataset directory")->required();
    td->add_option("--model", td_model, "trained classifier container")->required();
    td->add_option("--contamination", td_contamination, "training flag rate target");
    td->add_option("--trees", td_trees, "trees per forest");
    td->add_option("--psi", td_psi, "subsample size per tree");
    td->add_option("--fraction", td_fraction, "per-class share of training features");
    td->add_option("--seed", td_seed, "detector seed");
    td->add_option("--min-snr", td_min_snr, "skip training records below this SNR (dB)");
    td->add_option("--out", td_out, "output path (defaults to --model)");

    auto* ev = app.add_subcommand("eval", "run an evaluation phase");
    int ev_phase = 0;
    std::string ev_model, ev_data, ev_report;
    ev->add_option("--phase", ev_phase, "1|2|3")->required();
    ev->add_option("--model", ev_model, "model container")->required();
    ev->add_option("--data", ev_data, "test dataset directory")->required();
    ev->add_option("--report", ev_report, "report path or base name")->required();

    auto* cl = app.add_subcommand("classify", "classify one IQ record file");
    std::string cl_model, cl_input;
    cl->add_option("--model", cl_model, "model container (with detectors)")->required();
    cl->add_option("--input", cl_input, "single-record .iq file")->required();

    auto* ins = app.add_subcommand("inspect", "describe a model container");
    std::string ins_model;
    ins->add_option("--model", ins_model, "model container")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (man->parsed()) return cmd_manifest(man_profile, man_split, man_seed, man_out);
        if (gen->parsed())
            return cmd_gen_data(gen_manifest, gen_profile, gen_split, gen_seed, gen_out);
        if (tr->parsed()) return cmd_train(tr_data, tr_config, tr_out, tr_quiet);
        if (td->parsed())
            return cmd_train_detectors(td_data, td_model, td_contamination, td_trees, td_psi,
                                       td_fraction, td_seed, td_min_snr, td_out);
        if (ev->parsed()) return cmd_eval(ev_phase, ev_model, ev_data, ev_report);
        if (cl->parsed()) return cmd_classify(cl_model, cl_input);
        if (ins->parsed()) return cmd_inspect(ins_model);
        return 2;
    } catch (const InvalidParams& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "error (model): " << e.what() << "\n";
        return 4;
    } catch (const InvalidState& e) {
        std::cerr << "error (model state): " << e.what() << "\n";
        return 4;
    } catch (const InvalidInput& e) {
        std::cerr << "error (data): " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error (io): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
