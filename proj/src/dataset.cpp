#include "wosr/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "json.hpp"
#include "wosr/channel.hpp"
#include "wosr/wavegen.hpp"

static_assert(std::endian::native == std::endian::little, "file formats are little-endian");

namespace wosr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr char kRecordMagic[4] = {'W', 'I', 'Q', 'R'};
constexpr char kDatasetMagic[4] = {'W', 'D', 'S', '1'};
constexpr char kFeatureMagic[4] = {'W', 'F', 'T', '1'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void put(std::string& buf, const T& v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

struct Reader {
    const char* p;
    size_t len;
    size_t off = 0;
    std::string what;

    template <typename T>
    T get() {
        if (off + sizeof(T) > len) throw IoError(what + ": truncated file");
        T v;
        std::memcpy(&v, p + off, sizeof(T));
        off += sizeof(T);
        return v;
    }
    std::string get_bytes(size_t n) {
        if (off + n > len) throw IoError(what + ": truncated file");
        std::string s(p + off, n);
        off += n;
        return s;
    }
    void expect_magic(const char (&magic)[4]) {
        if (get_bytes(4) != std::string(magic, 4)) throw IoError(what + ": bad magic");
        const auto version = get<uint32_t>();
        if (version != kFormatVersion)
            throw IoError(what + ": unsupported version " + std::to_string(version));
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write: " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("failed writing: " + path);
}

void append_record_blob(std::string& buf, const IqRecord& rec) {
    const size_t start = buf.size();
    buf.append(kRecordMagic, 4);
    put(buf, kFormatVersion);
    put(buf, rec.sample_rate_hz);
    put(buf, static_cast<uint64_t>(rec.samples.size()));
    put(buf, static_cast<int32_t>(rec.label));
    const std::string meta = json(rec.meta).dump();
    put(buf, static_cast<uint32_t>(meta.size()));
    buf.append(meta);
    for (const auto& s : rec.samples) {
        put(buf, static_cast<float>(s.real()));
        put(buf, static_cast<float>(s.imag()));
    }
    put(buf, crc32(buf.data() + start, buf.size() - start));
}

IqRecord read_record_blob(Reader& r) {
    const size_t start = r.off;
    r.expect_magic(kRecordMagic);
    IqRecord rec;
    rec.sample_rate_hz = r.get<double>();
    const auto n = r.get<uint64_t>();
    const auto label = r.get<int32_t>();
    if (label < 0 || label >= static_cast<int32_t>(kNumClasses))
        throw IoError(r.what + ": bad class label");
    rec.label = static_cast<WaveformClass>(label);
    const auto meta_len = r.get<uint32_t>();
    const std::string meta = r.get_bytes(meta_len);
    try {
        const json parsed = json::parse(meta);  // keep alive: items() holds a reference
        for (const auto& [k, v] : parsed.items()) rec.meta[k] = v.get<std::string>();
    } catch (const json::exception&) {
        throw IoError(r.what + ": corrupt record metadata");
    }
    rec.samples.resize(n);
    for (auto& s : rec.samples) {
        const float re = r.get<float>();
        const float im = r.get<float>();
        s = {static_cast<double>(re), static_cast<double>(im)};
    }
    const uint32_t want = crc32(r.p + start, r.off - start);
    if (r.get<uint32_t>() != want) throw IoError(r.what + ": checksum mismatch");
    return rec;
}
}  // namespace

std::vector<SpectrumFeature> FeatureSet::features() const {
    std::vector<SpectrumFeature> out;
    out.reserve(items.size());
    for (const auto& it : items) out.push_back(it.feat);
    return out;
}

void save_record(const IqRecord& rec, const std::string& path) {
    std::string buf;
    append_record_blob(buf, rec);
    write_file(path, buf);
}

IqRecord load_record(const std::string& path) {
    const std::string data = read_file(path);
    Reader r{data.data(), data.size(), 0, path};
    IqRecord rec = read_record_blob(r);
    if (r.off != data.size()) throw IoError(path + ": trailing bytes");
    return rec;
}

std::vector<IqRecord> load_records(const std::string& path) {
    const std::string data = read_file(path);
    Reader r{data.data(), data.size(), 0, path};
    r.expect_magic(kDatasetMagic);
    const auto count = r.get<uint64_t>();
    std::vector<IqRecord> out;
    out.reserve(count);
    for (uint64_t i = 0; i < count; ++i) out.push_back(read_record_blob(r));
    if (r.off != data.size()) throw IoError(path + ": trailing bytes");
    return out;
}

void save_features(const FeatureSet& fsys, const std::string& path) {
    std::string buf;
    buf.append(kFeatureMagic, 4);
    put(buf, kFormatVersion);
    put(buf, static_cast<uint64_t>(fsys.items.size()));
    put(buf, static_cast<uint64_t>(fsys.dim));
    for (const auto& it : fsys.items) {
        if (it.feat.values.size() != fsys.dim)
            throw InvalidInput("save_features: inconsistent feature dimension");
        put(buf, static_cast<int32_t>(it.feat.label));
        put(buf, it.snr_db);
        buf.append(reinterpret_cast<const char*>(it.feat.values.data()),
                   fsys.dim * sizeof(float));
    }
    put(buf, crc32(buf.data(), buf.size()));
    write_file(path, buf);
}

FeatureSet load_features(const std::string& path) {
    const std::string data = read_file(path);
    if (data.size() < 4) throw IoError(path + ": truncated file");
    Reader r{data.data(), data.size() - 4, 0, path};
    r.expect_magic(kFeatureMagic);
    const auto count = r.get<uint64_t>();
    const auto dim = r.get<uint64_t>();
    FeatureSet out;
    out.dim = dim;
    out.items.resize(count);
    for (auto& it : out.items) {
        const auto label = r.get<int32_t>();
        if (label < 0 || label >= static_cast<int32_t>(kNumClasses))
            throw IoError(path + ": bad class label");
        it.feat.label = static_cast<WaveformClass>(label);
        it.snr_db = r.get<float>();
        it.feat.values.resize(dim);
        const std::string raw = r.get_bytes(dim * sizeof(float));
        std::memcpy(it.feat.values.data(), raw.data(), raw.size());
    }
    if (r.off != r.len) throw IoError(path + ": trailing bytes");
    uint32_t stored;
    std::memcpy(&stored, data.data() + data.size() - 4, 4);
    if (stored != crc32(data.data(), data.size() - 4))
        throw IoError(path + ": checksum mismatch");
    return out;
}

IqRecord make_record(const DatasetManifest& m, WaveformClass cls, size_t index) {
    if (m.split == "train" && !is_known(cls))
        throw InvalidParams("make_record: training splits hold only the known classes");
    const uint64_t rec_seed =
        mix_seed(mix_seed(m.seed, fnv1a64(m.split)), static_cast<uint64_t>(cls), index);
    Rng prng(mix_seed(rec_seed, fnv1a64("params")));

    WaveParams p;
    p.sample_rate_hz = m.sample_rate_hz;
    p.record_len = m.record_len;
    p.seed = mix_seed(rec_seed, fnv1a64("wave"));

    auto pick = [&](const std::vector<double>& v) {
        return v[static_cast<size_t>(prng.uniform_int(0, static_cast<int64_t>(v.size()) - 1))];
    };
    auto pick_scheme = [&] {
        return m.mod_schemes[static_cast<size_t>(
            prng.uniform_int(0, static_cast<int64_t>(m.mod_schemes.size()) - 1))];
    };

    IqRecord rec;
    switch (cls) {
        case WaveformClass::SC:
            p.bandwidth_hz = pick(m.sc_bandwidths_hz);
            rec = synth_single_carrier(p, pick_scheme());
            break;
        case WaveformClass::SCFDMA:
        case WaveformClass::OFDM: {
            p.bandwidth_hz = pick(m.bandwidths_hz);
            const double scs = pick(m.scs_hz);
            const auto kind = cls == WaveformClass::OFDM ? MulticarrierKind::OFDM
                                                         : MulticarrierKind::SCFDMA;
            rec = synth_multicarrier(p, kind, scs, pick_scheme());
            break;
        }
        case WaveformClass::LFM: {
            p.bandwidth_hz = pick(m.bandwidths_hz);
            const auto sweep = prng.uniform() < 0.5 ? SweepDir::Up : SweepDir::Down;
            const double duty = prng.uniform(0.3, 0.8);
            const int n_pulses = 1 << prng.uniform_int(0, 2);  // 1, 2, 4
            rec = synth_lfm(p, sweep, duty, n_pulses);
            break;
        }
        case WaveformClass::AM: {
            p.bandwidth_hz = pick(m.bandwidths_hz);
            AnalogOpts opts;
            opts.sideband = prng.uniform() < 0.5 ? Sideband::DSB : Sideband::SSB;
            opts.mod_index = prng.uniform(0.3, 0.9);
            rec = synth_analog(p, AnalogKind::AM, opts);
            break;
        }
        case WaveformClass::FM:
            p.bandwidth_hz = pick(m.bandwidths_hz);
            rec = synth_analog(p, AnalogKind::FM, {});
            break;
        case WaveformClass::PhaseCoded: {
            p.bandwidth_hz = pick(m.bandwidths_hz);
            const int spc = std::max(2, static_cast<int>(std::lround(m.sample_rate_hz /
                                                                     p.bandwidth_hz)));
            const double duty = prng.uniform(0.3, 0.8);
            const int family = static_cast<int>(prng.uniform_int(0, 2));
            if (family == 0) {
                static const int barker[] = {5, 7, 11, 13};
                rec = synth_phase_coded(p, CodeKind::Barker,
                                        barker[prng.uniform_int(0, 3)], spc, 1, duty);
            } else if (family == 1) {
                static const int frank[] = {4, 6, 8};
                rec = synth_phase_coded(p, CodeKind::Frank, frank[prng.uniform_int(0, 2)],
                                        spc, 1, duty);
            } else {
                const int nzc = prng.uniform() < 0.5 ? 63 : 127;
                int root = static_cast<int>(prng.uniform_int(1, nzc - 1));
                while (std::gcd(root, nzc) != 1) root = root % (nzc - 1) + 1;
                rec = synth_phase_coded(p, CodeKind::ZadoffChu, nzc, spc, root, duty);
            }
            break;
        }
        case WaveformClass::UnknownFH: {
            p.bandwidth_hz = 80e6;  // hopping span
            FhOpts opts;
            opts.n_hops = static_cast<int>(prng.uniform_int(4, 12));
            rec = synth_unknown(p, WaveformClass::UnknownFH, opts);
            break;
        }
        case WaveformClass::UnknownNoise:
            p.bandwidth_hz = m.sample_rate_hz;
            rec = synth_unknown(p, WaveformClass::UnknownNoise, {});
            break;
    }

    Rng crng(mix_seed(rec_seed, fnv1a64("chan")));
    ImpairmentSpec spec;
    if (m.snr.enabled) {
        spec.snr_db = m.snr.grid_db.empty()
                          ? crng.uniform(m.snr.lo_db, m.snr.hi_db)
                          : m.snr.grid_db[static_cast<size_t>(crng.uniform_int(
                                0, static_cast<int64_t>(m.snr.grid_db.size()) - 1))];
    }
    if (m.imp_cfo)
        spec.cfo_hz = m.cfo_fixed_hz ? *m.cfo_fixed_hz : crng.uniform(-5000.0, 5000.0);
    if (m.imp_phase)
        spec.phase_rad = m.phase_fixed_rad ? *m.phase_fixed_rad
                                           : crng.uniform(-std::numbers::pi, std::numbers::pi);
    if (m.imp_iq) spec.iq_imbalance_db = m.iq_fixed_db ? *m.iq_fixed_db : crng.uniform(0.0, 3.0);
    if (m.imp_fading) {
        const auto kind = crng.uniform_int(0, 2);
        spec.fading = kind == 0 ? FadingModel::None
                                : kind == 1 ? FadingModel::Rayleigh : FadingModel::Rician;
        spec.rician_k = m.rician_k;
    }
    spec.seed = mix_seed(rec_seed, fnv1a64("noise"));
    return impair(rec, spec);
}

FeatureSet build_dataset(const DatasetManifest& m, const std::string& out_dir) {
    m.validate();

    struct Slot {
        WaveformClass cls;
        size_t index;
    };
    std::vector<Slot> slots;
    for (size_t c = 0; c < kNumKnownClasses; ++c)
        for (size_t i = 0; i < m.per_class_count; ++i)
            slots.push_back({static_cast<WaveformClass>(c), i});
    if (m.split == "test") {
        for (size_t i = 0; i < m.unknown_per_kind; ++i)
            slots.push_back({WaveformClass::UnknownFH, i});
        for (size_t i = 0; i < m.unknown_per_kind; ++i)
            slots.push_back({WaveformClass::UnknownNoise, i});
    }

    const bool writing = !out_dir.empty();
    std::ofstream records;
    if (writing) {
        fs::create_directories(out_dir);
        m.save((fs::path(out_dir) / "manifest.json").string());
        records.open((fs::path(out_dir) / "records.bin").string(),
                     std::ios::binary | std::ios::trunc);
        if (!records) throw IoError("cannot write: " + out_dir + "/records.bin");
        std::string head;
        head.append(kDatasetMagic, 4);
        put(head, kFormatVersion);
        put(head, static_cast<uint64_t>(slots.size()));
        records.write(head.data(), static_cast<std::streamsize>(head.size()));
    }

    FeatureSet out;
    out.dim = m.n_fft;
    out.items.resize(slots.size());

    const size_t chunk = 128;
    std::vector<IqRecord> recs(std::min(chunk, slots.size()));
    for (size_t lo = 0; lo < slots.size(); lo += chunk) {
        const size_t hi = std::min(slots.size(), lo + chunk);
        parallel_for(hi - lo, [&](size_t i0, size_t i1) {
            for (size_t i = i0; i < i1; ++i) {
                const Slot& s = slots[lo + i];
                recs[i] = make_record(m, s.cls, s.index);
                FeatureRecord& fr = out.items[lo + i];
                fr.feat = featurize(recs[i], m.n_fft);
                const auto& snr = recs[i].meta.at("snr_db");
                fr.snr_db = snr == "none" ? std::nanf("") : std::stof(snr);
            }
        });
        if (writing) {
            std::string buf;
            for (size_t i = 0; i < hi - lo; ++i) {
                append_record_blob(buf, recs[i]);
                if (lo + i == 0)
                    save_record(recs[i], (fs::path(out_dir) / "sample.iq").string());
            }
            records.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            if (!records) throw IoError("failed writing: " + out_dir + "/records.bin");
        }
    }
    if (writing) {
        records.close();
        save_features(out, (fs::path(out_dir) / "features.bin").string());
    }
    return out;
}

}  // namespace wosr
