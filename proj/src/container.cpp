#include "wosr/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little, "container format is little-endian");

namespace wosr {

using nlohmann::json;

namespace {
constexpr char kMagic[4] = {'W', 'O', 'S', 'R'};
constexpr uint32_t kVersion = 1;

struct Tensor {
    std::string name;
    size_t rows = 0, cols = 0;
    std::vector<float> data;
};

json header_json(const OsrModel& model, bool with_detectors, std::vector<Tensor>& tensors) {
    const MlpModel& c = model.classifier;
    json layers = json::array();
    size_t fan_in = c.input_dim;
    for (size_t l = 0; l < c.specs.size(); ++l) {
        layers.push_back({{"width", c.specs[l].width},
                          {"activation", to_string(c.specs[l].activation)},
                          {"dropout_rate", c.specs[l].dropout_rate}});
        Tensor w{"cls.w" + std::to_string(l), c.specs[l].width, fan_in, {}};
        w.data.assign(c.w[l].begin(), c.w[l].end());
        tensors.push_back(std::move(w));
        Tensor b{"cls.b" + std::to_string(l), c.specs[l].width, 1, {}};
        b.data.assign(c.b[l].begin(), c.b[l].end());
        tensors.push_back(std::move(b));
        fan_in = c.specs[l].width;
    }

    json detectors = json::array();
    if (with_detectors) {
        for (size_t d = 0; d < kNumKnownClasses; ++d) {
            const IsolationForestModel& f = model.detectors[d];
            json trees = json::array();
            for (size_t t = 0; t < f.trees.size(); ++t) {
                const auto& nodes = f.trees[t].nodes;
                trees.push_back(nodes.size());
                Tensor tt{"det." + std::to_string(d) + ".t" + std::to_string(t),
                          nodes.size(), 5, {}};
                tt.data.reserve(nodes.size() * 5);
                for (const auto& nd : nodes) {
                    tt.data.push_back(static_cast<float>(nd.split_dim));
                    tt.data.push_back(static_cast<float>(nd.split_value));
                    tt.data.push_back(static_cast<float>(nd.left));
                    tt.data.push_back(static_cast<float>(nd.right));
                    tt.data.push_back(static_cast<float>(nd.size));
                }
                tensors.push_back(std::move(tt));
            }
            detectors.push_back({{"class", to_string(f.class_tag)},
                                 {"psi", f.psi},
                                 {"contamination", f.contamination},
                                 {"score_threshold", f.score_threshold},
                                 {"train_flag_rate", f.train_flag_rate},
                                 {"n_dims", f.n_dims},
                                 {"tree_nodes", trees}});
        }
    }

    json dir = json::array();
    for (const auto& t : tensors)
        dir.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});

    return json{{"kind", "wosr-models"},
                {"fusion_rule", to_string(model.fusion_rule)},
                {"classifier",
                 {{"input_dim", c.input_dim},
                  {"embedding_tap", c.embedding_tap},
                  {"layers", layers}}},
                {"detectors", detectors},
                {"tensors", dir}};
}

struct Parsed {
    json header;
    std::vector<Tensor> tensors;
};

Parsed parse_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file: " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 20) throw ModelError(path + ": truncated container");

    uint32_t stored;
    std::memcpy(&stored, data.data() + data.size() - 4, 4);
    if (stored != crc32(data.data(), data.size() - 4))
        throw ModelError(path + ": checksum mismatch");

    size_t off = 0;
    if (std::string(data.data(), 4) != std::string(kMagic, 4))
        throw ModelError(path + ": bad magic");
    off += 4;
    uint32_t version;
    std::memcpy(&version, data.data() + off, 4);
    off += 4;
    if (version != kVersion)
        throw ModelError(path + ": unsupported container version " + std::to_string(version));
    uint64_t hlen;
    std::memcpy(&hlen, data.data() + off, 8);
    off += 8;
    if (off + hlen > data.size() - 4) throw ModelError(path + ": truncated header");

    Parsed out;
    try {
        out.header = json::parse(data.substr(off, hlen));
    } catch (const json::exception& e) {
        throw ModelError(path + ": corrupt header: " + std::string(e.what()));
    }
    off += hlen;

    try {
        for (const auto& entry : out.header.at("tensors")) {
            Tensor t;
            t.name = entry.at("name").get<std::string>();
            t.rows = entry.at("rows").get<size_t>();
            t.cols = entry.at("cols").get<size_t>();
            const size_t bytes = t.rows * t.cols * sizeof(float);
            if (off + bytes > data.size() - 4) throw ModelError(path + ": truncated payload");
            t.data.resize(t.rows * t.cols);
            std::memcpy(t.data.data(), data.data() + off, bytes);
            off += bytes;
            out.tensors.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw ModelError(path + ": corrupt tensor directory: " + std::string(e.what()));
    }
    if (off != data.size() - 4) throw ModelError(path + ": payload size mismatch");
    return out;
}
}  // namespace

void save_models(const std::string& path, const OsrModel& model, bool with_detectors) {
    if (!model.classifier.trained) throw InvalidState("save_models: classifier is not trained");
    model.classifier.check();
    if (with_detectors)
        for (size_t d = 0; d < kNumKnownClasses; ++d)
            if (!model.detectors[d].fitted)
                throw InvalidState("save_models: detectors are not all fitted");

    std::vector<Tensor> tensors;
    const std::string header = header_json(model, with_detectors, tensors).dump();

    std::string buf;
    buf.append(kMagic, 4);
    buf.append(reinterpret_cast<const char*>(&kVersion), 4);
    const auto hlen = static_cast<uint64_t>(header.size());
    buf.append(reinterpret_cast<const char*>(&hlen), 8);
    buf.append(header);
    for (const auto& t : tensors)
        buf.append(reinterpret_cast<const char*>(t.data.data()), t.data.size() * sizeof(float));
    const uint32_t crc = crc32(buf.data(), buf.size());
    buf.append(reinterpret_cast<const char*>(&crc), 4);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model file: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing model file: " + path);
}

OsrModel load_models(const std::string& path) {
    Parsed p = parse_container(path);
    OsrModel model;
    try {
        model.fusion_rule = fusion_from_string(p.header.at("fusion_rule").get<std::string>());

        const auto& cj = p.header.at("classifier");
        MlpModel& c = model.classifier;
        c.input_dim = cj.at("input_dim").get<size_t>();
        c.embedding_tap = cj.at("embedding_tap").get<size_t>();
        for (const auto& lj : cj.at("layers")) {
            LayerSpec s;
            s.width = lj.at("width").get<size_t>();
            s.activation = activation_from_string(lj.at("activation").get<std::string>());
            s.dropout_rate = lj.at("dropout_rate").get<double>();
            c.specs.push_back(s);
        }

        size_t ti = 0;
        auto next_tensor = [&](const std::string& name, size_t rows, size_t cols) -> Tensor& {
            if (ti >= p.tensors.size()) throw ModelError(path + ": missing tensor " + name);
            Tensor& t = p.tensors[ti++];
            if (t.name != name || t.rows != rows || t.cols != cols)
                throw ModelError(path + ": tensor mismatch at " + name);
            return t;
        };

        size_t fan_in = c.input_dim;
        for (size_t l = 0; l < c.specs.size(); ++l) {
            const Tensor& wt = next_tensor("cls.w" + std::to_string(l), c.specs[l].width, fan_in);
            c.w.emplace_back(wt.data.begin(), wt.data.end());
            const Tensor& bt = next_tensor("cls.b" + std::to_string(l), c.specs[l].width, 1);
            c.b.emplace_back(bt.data.begin(), bt.data.end());
            fan_in = c.specs[l].width;
        }
        c.trained = true;
        c.revision = 1;
        c.check();

        const auto& dets = p.header.at("detectors");
        if (!dets.empty() && dets.size() != kNumKnownClasses)
            throw ModelError(path + ": detector block must cover all known classes");
        for (size_t d = 0; d < dets.size(); ++d) {
            const auto& dj = dets[d];
            IsolationForestModel f;
            const auto cls = waveform_class_from_string(dj.at("class").get<std::string>());
            if (!cls || static_cast<size_t>(*cls) != d)
                throw ModelError(path + ": detector class order mismatch");
            f.class_tag = *cls;
            f.psi = dj.at("psi").get<size_t>();
            f.contamination = dj.at("contamination").get<double>();
            f.score_threshold = dj.at("score_threshold").get<double>();
            f.train_flag_rate = dj.at("train_flag_rate").get<double>();
            f.n_dims = dj.at("n_dims").get<size_t>();
            for (size_t t = 0; t < dj.at("tree_nodes").size(); ++t) {
                const auto n_nodes = dj.at("tree_nodes")[t].get<size_t>();
                const Tensor& tt = next_tensor(
                    "det." + std::to_string(d) + ".t" + std::to_string(t), n_nodes, 5);
                ITree tree;
                tree.nodes.resize(n_nodes);
                for (size_t k = 0; k < n_nodes; ++k) {
                    ITreeNode& nd = tree.nodes[k];
                    nd.split_dim = static_cast<int32_t>(tt.data[k * 5 + 0]);
                    nd.split_value = static_cast<double>(tt.data[k * 5 + 1]);
                    nd.left = static_cast<int32_t>(tt.data[k * 5 + 2]);
                    nd.right = static_cast<int32_t>(tt.data[k * 5 + 3]);
                    nd.size = static_cast<int32_t>(tt.data[k * 5 + 4]);
                    const auto limit = static_cast<int32_t>(n_nodes);
                    if (nd.split_dim >= 0 &&
                        (nd.left < 0 || nd.right < 0 || nd.left >= limit || nd.right >= limit ||
                         nd.split_dim >= static_cast<int32_t>(f.n_dims)))
                        throw ModelError(path + ": corrupt tree structure");
                }
                f.trees.push_back(std::move(tree));
            }
            if (f.trees.empty()) throw ModelError(path + ": detector has no trees");
            f.fitted = true;
            model.detectors[d] = std::move(f);
        }
        if (ti != p.tensors.size()) throw ModelError(path + ": unused tensors in payload");
    } catch (const json::exception& e) {
        throw ModelError(path + ": corrupt header field: " + std::string(e.what()));
    }
    return model;
}

bool container_has_detectors(const std::string& path) {
    Parsed p = parse_container(path);
    try {
        return !p.header.at("detectors").empty();
    } catch (const json::exception&) {
        throw ModelError(path + ": corrupt header");
    }
}

std::string describe_container(const std::string& path) {
    Parsed p = parse_container(path);
    std::ostringstream os;
    try {
        const auto& cj = p.header.at("classifier");
        os << "container: " << path << "\n";
        os << "fusion rule: " << p.header.at("fusion_rule").get<std::string>() << "\n";
        os << "classifier: input " << cj.at("input_dim").get<size_t>() << ", layers";
        for (const auto& lj : cj.at("layers"))
            os << " " << lj.at("width").get<size_t>() << ":"
               << lj.at("activation").get<std::string>();
        os << ", embedding tap " << cj.at("embedding_tap").get<size_t>() << "\n";
        const auto& dets = p.header.at("detectors");
        if (dets.empty()) {
            os << "detectors: none\n";
        } else {
            for (const auto& dj : dets)
                os << "detector " << dj.at("class").get<std::string>() << ": "
                   << dj.at("tree_nodes").size() << " trees, psi " << dj.at("psi").get<size_t>()
                   << ", contamination " << dj.at("contamination").get<double>()
                   << ", threshold " << dj.at("score_threshold").get<double>()
                   << ", train flag rate " << dj.at("train_flag_rate").get<double>() << "\n";
        }
        size_t n_tensors = p.tensors.size(), n_values = 0;
        for (const auto& t : p.tensors) n_values += t.data.size();
        os << "tensors: " << n_tensors << " (" << n_values << " f32 values)\n";
    } catch (const json::exception& e) {
        throw ModelError(path + ": corrupt header field: " + std::string(e.what()));
    }
    return os.str();
}

}  // namespace wosr
