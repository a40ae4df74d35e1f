#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mramsim/config.hpp"
#include "mramsim/errors.hpp"

using namespace mramsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / ("mramsim_cfg_" + std::string(name));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(Config, RoundTripDefaults) {
    const auto cfg = MacroConfig::defaults();
    EXPECT_EQ(config_from_json(to_json(cfg)), cfg);
}

TEST(Config, RoundTripOddValues) {
    auto cfg = MacroConfig::ideal();
    cfg.seed = 0xFFFFFFFFFFFFull;
    cfg.latch.gain_k = 372.4650644279276;
    cfg.integrator.droop_lambda_per_v = 0.8357909834398849;
    cfg.integrator.c1_ff = 1234.5;
    cfg.engine.other_fj = 68.94154994695785;
    cfg.adc.v_ref_mv = 700.0;
    const auto back = config_from_json(Json::parse(to_json(cfg).dump()));
    EXPECT_EQ(back, cfg);
}

TEST(Config, UnknownKeysRejected) {
    Json j = to_json(MacroConfig::defaults());
    j["latch"]["gain"] = 3;
    EXPECT_THROW((void)config_from_json(j), ConfigError);
    Json top = Json::object();
    top["sed"] = 1;
    EXPECT_THROW((void)config_from_json(top), ConfigError);
}

TEST(Config, MissingKeysKeepDefaults) {
    const Json j = Json::parse(R"({"latch": {"r_ref_ohm": 8500}})");
    const auto cfg = config_from_json(j);
    EXPECT_EQ(cfg.latch.r_ref_ohm, 8500.0);
    EXPECT_EQ(cfg.latch.v_l_mv, MacroConfig::defaults().latch.v_l_mv);
}

TEST(Config, TypeErrorsNameTheKey) {
    const Json j = Json::parse(R"({"adc": {"bits": "four"}})");
    try {
        (void)config_from_json(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("adc.bits"), std::string::npos);
    }
}

TEST(Config, ValidationRunsAtLoad) {
    EXPECT_THROW((void)config_from_json(Json::parse(R"({"latch": {"v_l_mv": 1200}})")), ConfigError);
    EXPECT_THROW((void)config_from_json(Json::parse(R"({"device": {"sigma_r": -1}})")), ConfigError);
    EXPECT_THROW((void)config_from_json(Json::parse(R"({"adc": {"cap_weights": [8, 4, 2, 1]}})")), ConfigError);
}

TEST(Config, MagnifiedTmrPreset) {
    const auto a = config_from_json(Json::parse(R"({"device": {"m_tmr_preset": 15000}})"));
    EXPECT_DOUBLE_EQ(a.device.r_off_ohm, 1000.0 * 15001.0);
    EXPECT_THROW((void)config_from_json(Json::parse(R"({"device": {"m_tmr_preset": 9000}})")), ConfigError);
}

TEST(Config, DerivedQuantities) {
    const auto cfg = MacroConfig::defaults();
    EXPECT_DOUBLE_EQ(cfg.i_a(), 50e-6);
    // One conducting row over one quantum equals a fifteenth of v_max.
    EXPECT_NEAR(cfg.unit_voltage(), 0.650 / 15.0, 1e-12);
    EXPECT_NEAR(cfg.adc_params().v_ref, 0.650 * 16.0 / 15.0, 1e-12);
}

TEST(Config, CalibrationFileResolvedRelativeToConfig) {
    const auto dir = scratch_dir("rel");
    write(dir / "cal.json", R"({"constants": {"latch": {"gain_k": 321}, "engine": {"other_fj": 12}},
                                "residuals": {"x": 0.5}})");
    write(dir / "cfg.json", R"({"calibration_file": "cal.json", "seed": 9})");
    const auto loaded = load_config((dir / "cfg.json").string());
    EXPECT_EQ(loaded.config.latch.gain_k, 321.0);
    EXPECT_EQ(loaded.config.engine.other_fj, 12.0);
    EXPECT_EQ(loaded.config.seed, 9u);
    EXPECT_TRUE(loaded.config.calibration_file.empty());
    EXPECT_EQ(loaded.calibration_source, "cal.json");
    EXPECT_EQ(loaded.calibration_residuals.at("x"), 0.5);
}

TEST(Config, CalibrationUnknownConstantRejected) {
    auto cfg = MacroConfig::defaults();
    EXPECT_THROW(apply_calibration(cfg, Json::parse(R"({"constants": {"latch": {"gainz": 1}}})")), ConfigError);
    EXPECT_THROW(apply_calibration(cfg, Json::parse(R"({"nothing": 1})")), ConfigError);
}

TEST(Config, MissingAndMalformedFiles) {
    EXPECT_THROW((void)load_config("/nonexistent/mramsim.json"), ConfigError);
    const auto dir = scratch_dir("bad");
    write(dir / "bad.json", "{ not json");
    EXPECT_THROW((void)load_config((dir / "bad.json").string()), ConfigError);
}
