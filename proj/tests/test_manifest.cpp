#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "wosr/manifest.hpp"

using namespace wosr;

TEST_CASE("canonical profiles carry the published corpus sizes") {
    // [DERIVED] desk scale 1/10 of the full corpus; [PAPER] full-scale counts.
    auto dt = DatasetManifest::desk_train(1);
    dt.validate();
    CHECK(dt.per_class_count == 1000);
    CHECK(dt.total_count() == 7000);
    CHECK(dt.n_fft == 4096);
    CHECK(dt.unknown_per_kind == 0);

    auto ft = DatasetManifest::full_train(1);
    ft.validate();
    CHECK(ft.per_class_count == 10000);
    CHECK(ft.total_count() == 70000);
    CHECK(ft.n_fft == 65536);

    auto fe = DatasetManifest::full_test(1);
    fe.validate();
    CHECK(fe.total_count() == 3600);  // 2800 known + 800 unknown
    CHECK(fe.unknown_per_kind == 400);

    auto de = DatasetManifest::desk_test(1);
    de.validate();
    CHECK(de.total_count() == 3600);
    CHECK(de.snr.grid_db == default_snr_grid());
}

TEST_CASE("SNR evaluation bins match the figures") {
    CHECK(default_snr_grid() == std::vector<double>{-10, -5, 0, 5, 10, 15, 20});
}

TEST_CASE("manifest JSON round-trips every field") {
    // [TRIVIAL] serialization contract.
    auto m = DatasetManifest::desk_test(99);
    m.cfo_fixed_hz = 5000.0;
    m.phase_fixed_rad = 3.0;
    m.iq_fixed_db = 3.0;
    m.imp_fading = false;
    auto back = DatasetManifest::from_json(m.to_json());
    CHECK(back.profile == m.profile);
    CHECK(back.split == m.split);
    CHECK(back.seed == m.seed);
    CHECK(back.sample_rate_hz == m.sample_rate_hz);
    CHECK(back.record_len == m.record_len);
    CHECK(back.n_fft == m.n_fft);
    CHECK(back.per_class_count == m.per_class_count);
    CHECK(back.unknown_per_kind == m.unknown_per_kind);
    CHECK(back.snr.enabled == m.snr.enabled);
    CHECK(back.snr.grid_db == m.snr.grid_db);
    CHECK(back.imp_cfo == m.imp_cfo);
    CHECK(back.imp_fading == m.imp_fading);
    CHECK(back.cfo_fixed_hz == m.cfo_fixed_hz);
    CHECK(back.phase_fixed_rad == m.phase_fixed_rad);
    CHECK(back.iq_fixed_db == m.iq_fixed_db);
    CHECK(back.bandwidths_hz == m.bandwidths_hz);
    CHECK(back.sc_bandwidths_hz == m.sc_bandwidths_hz);
    CHECK(back.scs_hz == m.scs_hz);
    CHECK(back.mod_schemes == m.mod_schemes);
    // And the canonical text itself is stable.
    CHECK(back.to_json() == m.to_json());
}

TEST_CASE("manifest save/load round-trips through a file") {
    const auto path = (std::filesystem::temp_directory_path() / "wosr_manifest_test.json").string();
    auto m = DatasetManifest::desk_train(7);
    m.save(path);
    auto back = DatasetManifest::load(path);
    CHECK(back.to_json() == m.to_json());
    std::remove(path.c_str());
    CHECK_THROWS_AS(DatasetManifest::load(path), IoError);
    CHECK_THROWS_AS(DatasetManifest::from_json("{not json"), InvalidParams);
}

TEST_CASE("manifest validation names the offending field") {
    auto good = DatasetManifest::desk_train(1);

    auto m = good;
    m.profile = "huge";
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("manifest.profile"), InvalidParams);
    m = good;
    m.split = "holdout";
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.n_fft = 1000;
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("manifest.n_fft"), InvalidParams);
    m = good;
    m.per_class_count = 0;
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.unknown_per_kind = 5;  // unknowns in a training split
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.snr.lo_db = 10.0;
    m.snr.hi_db = -10.0;
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.bandwidths_hz.clear();
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.sc_bandwidths_hz = {80e6};  // sps < 2
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.scs_hz = {50e6};  // < 12 occupied subcarriers
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.mod_schemes.clear();
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.cfo_fixed_hz = 9999.0;
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("cfo_fixed_hz"), InvalidParams);
    m = good;
    m.imp_phase = false;
    m.phase_fixed_rad = 1.0;  // fixed value with the stage disabled
    CHECK_THROWS_AS(m.validate(), InvalidParams);
    m = good;
    m.iq_fixed_db = 3.5;
    CHECK_THROWS_AS(m.validate(), InvalidParams);
}

TEST_CASE("unknown mod scheme names are rejected") {
    auto m = DatasetManifest::desk_train(1);
    auto text = m.to_json();
    const auto pos = text.find("\"BPSK\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 6, "\"PSK3\"");
    CHECK_THROWS_AS(DatasetManifest::from_json(text), InvalidParams);
}
