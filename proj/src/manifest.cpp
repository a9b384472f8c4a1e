#include "wosr/manifest.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"

namespace wosr {

using nlohmann::json;

std::vector<double> default_snr_grid() { return {-10, -5, 0, 5, 10, 15, 20}; }

namespace {
std::vector<ModScheme> all_mod_schemes() {
    std::vector<ModScheme> v;
    for (size_t i = 0; i < kNumModSchemes; ++i) v.push_back(static_cast<ModScheme>(i));
    return v;
}

DatasetManifest base_manifest(uint64_t seed) {
    DatasetManifest m;
    m.seed = seed;
    m.bandwidths_hz = {25e6, 50e6, 60e6, 75e6, 80e6, 100e6};
    m.sc_bandwidths_hz = {25e6, 50e6};
    m.mod_schemes = all_mod_schemes();
    return m;
}
}  // namespace

DatasetManifest DatasetManifest::desk_train(uint64_t seed) {
    DatasetManifest m = base_manifest(seed);
    m.profile = "desk";
    m.split = "train";
    m.record_len = 4096;
    m.n_fft = 4096;
    m.per_class_count = 1000;
    m.unknown_per_kind = 0;
    m.snr = {true, -20.0, 20.0, {}};
    // Spacings scaled so records hold whole multicarrier symbols at this
    // record length (full profile keeps the LTE-style spacings).
    m.scs_hz = {m.sample_rate_hz / 4096, m.sample_rate_hz / 2048, m.sample_rate_hz / 1024};
    return m;
}

DatasetManifest DatasetManifest::desk_test(uint64_t seed) {
    DatasetManifest m = desk_train(seed);
    m.split = "test";
    m.per_class_count = 400;
    m.unknown_per_kind = 400;
    m.snr = {true, 0.0, 0.0, default_snr_grid()};
    return m;
}

DatasetManifest DatasetManifest::full_train(uint64_t seed) {
    DatasetManifest m = base_manifest(seed);
    m.profile = "full";
    m.split = "train";
    m.record_len = 65536;
    m.n_fft = 65536;
    m.per_class_count = 10000;
    m.unknown_per_kind = 0;
    m.snr = {true, -20.0, 20.0, {}};
    m.scs_hz = {15e3, 30e3, 60e3};
    return m;
}

DatasetManifest DatasetManifest::full_test(uint64_t seed) {
    DatasetManifest m = full_train(seed);
    m.split = "test";
    m.per_class_count = 400;
    m.unknown_per_kind = 400;
    m.snr = {true, 0.0, 0.0, default_snr_grid()};
    return m;
}

void DatasetManifest::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw InvalidParams("manifest." + field + ": " + why);
    };
    if (profile != "desk" && profile != "full") fail("profile", "must be 'desk' or 'full'");
    if (split != "train" && split != "test") fail("split", "must be 'train' or 'test'");
    if (!(sample_rate_hz > 0)) fail("sample_rate_hz", "must be positive");
    if (record_len < 64) fail("record_len", "must be >= 64");
    if (n_fft == 0 || (n_fft & (n_fft - 1)) != 0) fail("n_fft", "must be a power of two");
    if (per_class_count == 0) fail("per_class_count", "must be positive");
    if (split == "train" && unknown_per_kind != 0)
        fail("unknown_per_kind", "training sets hold only the 7 known classes");
    if (snr.enabled && snr.grid_db.empty() && !(snr.lo_db <= snr.hi_db))
        fail("snr", "lo_db must not exceed hi_db");
    if (!(rician_k > 0)) fail("rician_k", "must be positive");
    if (cfo_fixed_hz) {
        if (!imp_cfo) fail("cfo_fixed_hz", "requires impairments.cfo enabled");
        if (!(*cfo_fixed_hz >= -5000.0 && *cfo_fixed_hz <= 5000.0))
            fail("cfo_fixed_hz", "must be in [-5000, 5000]");
    }
    if (phase_fixed_rad) {
        if (!imp_phase) fail("phase_fixed_rad", "requires impairments.phase enabled");
        if (!(*phase_fixed_rad >= -std::numbers::pi && *phase_fixed_rad <= std::numbers::pi))
            fail("phase_fixed_rad", "must be in [-pi, pi]");
    }
    if (iq_fixed_db) {
        if (!imp_iq) fail("iq_fixed_db", "requires impairments.iq enabled");
        if (!(*iq_fixed_db >= 0.0 && *iq_fixed_db <= 3.0))
            fail("iq_fixed_db", "must be in [0, 3]");
    }
    if (bandwidths_hz.empty()) fail("bandwidths_hz", "must be non-empty");
    if (sc_bandwidths_hz.empty()) fail("sc_bandwidths_hz", "must be non-empty");
    if (scs_hz.empty()) fail("scs_hz", "must be non-empty");
    if (mod_schemes.empty()) fail("mod_schemes", "must be non-empty");
    for (double b : bandwidths_hz)
        if (!(b > 0 && b <= sample_rate_hz)) fail("bandwidths_hz", "entries must be in (0, fs]");
    for (double b : sc_bandwidths_hz) {
        if (!(b > 0 && b <= sample_rate_hz)) fail("sc_bandwidths_hz", "entries must be in (0, fs]");
        if (std::lround(sample_rate_hz / b) < 2)
            fail("sc_bandwidths_hz", "single carrier needs >= 2 samples per symbol");
    }
    for (double s : scs_hz) {
        if (!(s > 0)) fail("scs_hz", "entries must be positive");
        for (double b : bandwidths_hz)
            if (std::floor(b / s) < 12) fail("scs_hz", "grid yields < 12 occupied subcarriers");
    }
}

std::string DatasetManifest::to_json() const {
    json j;
    j["profile"] = profile;
    j["split"] = split;
    j["seed"] = seed;
    j["sample_rate_hz"] = sample_rate_hz;
    j["record_len"] = record_len;
    j["n_fft"] = n_fft;
    j["per_class_count"] = per_class_count;
    j["unknown_per_kind"] = unknown_per_kind;
    j["snr"] = {{"enabled", snr.enabled},
                {"lo_db", snr.lo_db},
                {"hi_db", snr.hi_db},
                {"grid_db", snr.grid_db}};
    j["impairments"] = {{"cfo", imp_cfo},
                        {"phase", imp_phase},
                        {"iq", imp_iq},
                        {"fading", imp_fading},
                        {"rician_k", rician_k}};
    if (cfo_fixed_hz) j["impairments"]["cfo_fixed_hz"] = *cfo_fixed_hz;
    if (phase_fixed_rad) j["impairments"]["phase_fixed_rad"] = *phase_fixed_rad;
    if (iq_fixed_db) j["impairments"]["iq_fixed_db"] = *iq_fixed_db;
    j["bandwidths_hz"] = bandwidths_hz;
    j["sc_bandwidths_hz"] = sc_bandwidths_hz;
    j["scs_hz"] = scs_hz;
    std::vector<std::string> schemes;
    for (auto s : mod_schemes) schemes.emplace_back(to_string(s));
    j["mod_schemes"] = schemes;
    return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidParams(std::string("manifest: invalid JSON: ") + e.what());
    }
    DatasetManifest m;
    try {
        j.at("profile").get_to(m.profile);
        j.at("split").get_to(m.split);
        j.at("seed").get_to(m.seed);
        j.at("sample_rate_hz").get_to(m.sample_rate_hz);
        j.at("record_len").get_to(m.record_len);
        j.at("n_fft").get_to(m.n_fft);
        j.at("per_class_count").get_to(m.per_class_count);
        j.at("unknown_per_kind").get_to(m.unknown_per_kind);
        const auto& s = j.at("snr");
        s.at("enabled").get_to(m.snr.enabled);
        s.at("lo_db").get_to(m.snr.lo_db);
        s.at("hi_db").get_to(m.snr.hi_db);
        s.at("grid_db").get_to(m.snr.grid_db);
        const auto& imp = j.at("impairments");
        imp.at("cfo").get_to(m.imp_cfo);
        imp.at("phase").get_to(m.imp_phase);
        imp.at("iq").get_to(m.imp_iq);
        imp.at("fading").get_to(m.imp_fading);
        imp.at("rician_k").get_to(m.rician_k);
        if (imp.contains("cfo_fixed_hz")) m.cfo_fixed_hz = imp.at("cfo_fixed_hz").get<double>();
        if (imp.contains("phase_fixed_rad"))
            m.phase_fixed_rad = imp.at("phase_fixed_rad").get<double>();
        if (imp.contains("iq_fixed_db")) m.iq_fixed_db = imp.at("iq_fixed_db").get<double>();
        j.at("bandwidths_hz").get_to(m.bandwidths_hz);
        j.at("sc_bandwidths_hz").get_to(m.sc_bandwidths_hz);
        j.at("scs_hz").get_to(m.scs_hz);
        m.mod_schemes.clear();
        for (const auto& name : j.at("mod_schemes")) {
            const auto text_name = name.get<std::string>();
            const auto scheme = mod_scheme_from_string(text_name);
            if (!scheme) throw InvalidParams("manifest.mod_schemes: unknown scheme " + text_name);
            m.mod_schemes.push_back(*scheme);
        }
    } catch (const json::exception& e) {
        throw InvalidParams(std::string("manifest: missing or mistyped field: ") + e.what());
    }
    m.validate();
    return m;
}

DatasetManifest DatasetManifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

void DatasetManifest::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << to_json();
    if (!out) throw IoError("failed writing manifest: " + path);
}

}  // namespace wosr
