#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mramsim/commands.hpp"
#include "mramsim/errors.hpp"

namespace fs = std::filesystem;
using namespace mramsim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavioral simulator of an in-MRAM analog matrix-vector macro"};
    app.require_subcommand(1);
    app.fallthrough();

    ContextOptions copts;
    int threads = 0;
    std::string out_dir = ".";
    std::string report_path;
    app.add_option("-c,--config", copts.config_path, "Config file (JSON)")->check(CLI::ExistingFile);
    app.add_option("--calibration", copts.calibration_path, "Calibration file; overrides the config's")
        ->check(CLI::ExistingFile);
    app.add_option("--threads", threads, "Worker cap for sweeps")->check(CLI::PositiveNumber);
    app.add_option("-o,--out-dir", out_dir, "Directory for CSV artifacts");
    app.add_option("--report", report_path, "Write the JSON report here instead of stdout");

    MvmArgs mvm;
    std::string weights_path, inputs_path, mvm_mode = "cmf";
    auto* c_mvm = app.add_subcommand("mvm", "One MVM on a local BCA (or the whole macro above 64 rows)");
    c_mvm->add_option("-w,--weights", weights_path, "0/1 weight grid, one row per line")->required();
    c_mvm->add_option("-x,--inputs", inputs_path, "Activations 0..3, one per line")->required();
    c_mvm->add_option("-m,--mode", mvm_mode, "tcm or cmf");
    c_mvm->add_flag("--sequential", mvm.sequential, "Disable the latch/convert pipeline");
    c_mvm->add_flag("--trace", mvm.trace, "Write trace.csv");

    SweepArgs sweep;
    int sweep_trials = 0;
    auto* c_sweep = app.add_subcommand("sweep", "Latch yield/energy sweep and reference table");
    c_sweep->add_option("--r-ref-ohm", sweep.grid.r_ref_ohm, "Reference resistances")->delimiter(',');
    c_sweep->add_option("--v-l-mv", sweep.grid.v_l_mv, "Latch voltages")->delimiter(',');
    c_sweep->add_option("--tmr", sweep.grid.tmr, "TMR values (ratio, 2 = 200%)")->delimiter(',');
    c_sweep->add_option("--trials", sweep_trials, "Trials per state and point")->check(CLI::PositiveNumber);

    std::string inl_mode = "both";
    auto* c_inl = app.add_subcommand("inl", "Integrator transfer curve and INL");
    c_inl->add_option("-m,--mode", inl_mode, "tcm, cmf or both");

    int energy_rows = 64;
    auto* c_energy = app.add_subcommand("energy", "Energy breakdown and efficiency (needs calibration)");
    c_energy->add_option("--rows", energy_rows, "Active rows")->check(CLI::Range(1, 64));

    int adc_grid = 256;
    auto* c_adc = app.add_subcommand("adc-test", "Converter against the arithmetic quantizer");
    c_adc->add_option("--grid", adc_grid, "Input points on [0, V_REF)")->check(CLI::PositiveNumber);

    std::string cal_out;
    auto* c_cal = app.add_subcommand("calibrate", "Fit model constants to the reference targets");
    c_cal->add_option("--output", cal_out, "Calibration file path (default <out-dir>/calibration.json)");

    std::vector<double> cmp_tmr;
    int cmp_rows = 4;
    auto* c_cmp = app.add_subcommand("compare-conventional", "Weight/input mismatch against a 1T-1M cell");
    c_cmp->add_option("--tmr", cmp_tmr, "TMR values")->delimiter(',');
    c_cmp->add_option("--rows", cmp_rows, "Rows")->check(CLI::Range(1, 64));

    CLI11_PARSE(app, argc, argv);

    try {
        if (const char* env = std::getenv("MRAMSIM_SEED")) copts.seed_env = std::string(env);
        if (threads > 0) copts.threads = threads;
        const RunContext ctx = make_context(copts);

        CommandOutput out;
        if (*c_mvm) {
            mvm.weights_text = slurp(weights_path);
            mvm.inputs_text = slurp(inputs_path);
            mvm.mode = parse_mode(mvm_mode);
            out = cmd_mvm(ctx, mvm);
        } else if (*c_sweep) {
            if (sweep_trials > 0) sweep.trials = sweep_trials;
            out = cmd_sweep(ctx, sweep);
        } else if (*c_inl) {
            out = cmd_inl(ctx, parse_inl_mode(inl_mode));
        } else if (*c_energy) {
            out = cmd_energy(ctx, energy_rows);
        } else if (*c_adc) {
            out = cmd_adc_test(ctx, adc_grid);
        } else if (*c_cal) {
            out = cmd_calibrate(ctx);
        } else if (*c_cmp) {
            out = cmd_compare_conventional(ctx, cmp_tmr, cmp_rows);
        }

        for (const auto& [name, text] : out.files) {
            const fs::path p = (*c_cal && name == "calibration.json" && !cal_out.empty()) ? fs::path(cal_out)
                                                                                          : fs::path(out_dir) / name;
            write_file(p, text);
        }
        if (report_path.empty()) {
            std::cout << out.report_text();
        } else {
            write_file(report_path, out.report_text());
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UncalibratedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CalibrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
