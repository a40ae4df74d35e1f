#include "mramsim/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "mramsim/errors.hpp"
#include "mramsim/rng.hpp"

namespace mramsim {

// ---------------------------------------------------------------------------
// Latch Monte-Carlo

void SweepGrid::validate() const {
    if (r_ref_ohm.empty() || v_l_mv.empty() || tmr.empty()) throw std::invalid_argument("SweepGrid: empty axis");
    if (trials < 100) throw std::invalid_argument("SweepGrid: trials must be >= 100");
}

std::vector<LatchReferencePoint> published_latch_points() {
    return {
        {0.5, 7700.0, 700.0, 97.8, 75.8},
        {1.0, 8500.0, 600.0, 78.4, 86.8},
        {1.5, 9000.0, 600.0, 74.3, 93.8},
        {2.0, 9500.0, 600.0, 70.8, 95.2},
        {2.5, 9500.0, 600.0, 68.8, 97.5},
    };
}

namespace {

YieldRow evaluate_point(double r_ref, double v_l_mv, double tmr0, const MacroConfig& cfg, int trials,
                        std::uint64_t seed) {
    MacroConfig c = cfg;
    c.latch.r_ref_ohm = r_ref;
    c.latch.v_l_mv = v_l_mv;
    c.device.tmr0 = tmr0;
    const LatchParams lp = c.latch_params();
    const auto energy = energy_model(lp, tmr0);
    YieldRow row;
    row.r_ref_ohm = r_ref;
    row.v_l_mv = v_l_mv;
    row.tmr = tmr0;
    row.yield = yield_estimate(c.mtj_params(), lp, trials, seed);
    row.power_fj = energy.energy_j * 1e15;
    row.power_extrapolated = energy.extrapolated;
    return row;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers; fn writes slot i.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

std::vector<YieldRow> yield_sweep(const SweepGrid& grid, const MacroConfig& cfg, std::uint64_t seed, int threads) {
    grid.validate();
    struct Point {
        double r_ref, v_l, tmr;
    };
    std::vector<Point> points;
    points.reserve(grid.size());
    for (double r : grid.r_ref_ohm)
        for (double v : grid.v_l_mv)
            for (double t : grid.tmr) points.push_back({r, v, t});

    std::vector<YieldRow> rows(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        rows[i] = evaluate_point(points[i].r_ref, points[i].v_l, points[i].tmr, cfg, grid.trials,
                                 derive_seed(seed, {i}));
    });
    return rows;
}

std::vector<YieldRow> latch_table(std::span<const LatchReferencePoint> points, const MacroConfig& cfg, int trials,
                                  std::uint64_t seed, int threads) {
    if (trials < 1) throw std::invalid_argument("latch_table: trials must be >= 1");
    std::vector<YieldRow> rows(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        rows[i] = evaluate_point(points[i].r_ref_ohm, points[i].v_l_mv, points[i].tmr, cfg, trials,
                                 derive_seed(seed, {i}));
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Linearity

InlReport compute_inl(std::span<const CurvePoint> curve) {
    if (curve.size() < 2) throw std::domain_error("compute_inl: need at least 2 points");
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (!(curve[i].code > curve[i - 1].code)) throw std::domain_error("compute_inl: codes must strictly increase");
    }
    const CurvePoint& first = curve.front();
    const CurvePoint& last = curve.back();
    InlReport r;
    r.curve.assign(curve.begin(), curve.end());
    r.lsb = (last.value - first.value) / (last.code - first.code);
    if (r.lsb == 0.0) throw std::domain_error("compute_inl: flat curve has no LSB");
    r.inl.reserve(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        double inl = 0.0;
        if (i != 0 && i + 1 != curve.size()) {
            const double ideal = first.value + (curve[i].code - first.code) * r.lsb;
            inl = (curve[i].value - ideal) / r.lsb;
        }
        r.inl.push_back(inl);
        r.max_abs_inl = std::max(r.max_abs_inl, std::abs(inl));
    }
    return r;
}

ColumnCurrentTrace thermometer_trace(int units, int rows, double i_a) {
    if (units < 0 || units > kMaxActivation * rows) throw std::domain_error("thermometer_trace: units out of range");
    ColumnCurrentTrace t;
    t.i_a = i_a;
    for (int q = 0; q < kChargeQuanta; ++q) {
        t.active_rows[static_cast<std::size_t>(q)] = (units + kChargeQuanta - 1 - q) / kChargeQuanta;
    }
    return t;
}

std::vector<CurvePoint> transfer_curve(const MacroConfig& cfg, MirrorMode mode, int codes) {
    if (codes < 2) throw std::domain_error("transfer_curve: need at least 2 codes");
    const MirrorParams mp = cfg.mirror_params();
    const double i_a = cfg.i_a();
    const double v_a = mp.unit_voltage(i_a);
    const int rows = (codes - 1 + kMaxActivation - 1) / kMaxActivation;
    std::vector<CurvePoint> curve;
    curve.reserve(static_cast<std::size_t>(codes));
    Integrator integrator(mp);
    for (int n = 0; n < codes; ++n) {
        integrator.reset();
        const auto tr = integrator.integrate(thermometer_trace(n, rows, i_a), mode);
        curve.push_back({static_cast<double>(n), tr.v_final / v_a});
    }
    return curve;
}

double max_inl(const MacroConfig& cfg, MirrorMode mode, int codes) {
    return compute_inl(transfer_curve(cfg, mode, codes)).max_abs_inl;
}

QuantizedSweep quantized_sweep(const MacroConfig& cfg, MirrorMode mode, int rows) {
    if (rows < 1 || rows > kMaxRowsPerBca) throw std::domain_error("quantized_sweep: rows out of range");
    MacroConfig c = cfg;
    c.device.sigma_r = 0.0;
    c.latch.sigma_offset = 0.0;
    c.adc.comparator_offset_sigma_mv = 0.0;
    const auto bca = LocalBca::load_weights(BitMatrix(rows, 1, 1), c.mtj_params());

    QuantizedSweep s;
    for (int n = 0; n <= kMaxActivation * rows; ++n) {
        InputVector x;
        x.activations.assign(static_cast<std::size_t>(rows), 0);
        int left = n;
        for (auto& a : x.activations) {
            a = static_cast<std::uint8_t>(std::min(left, kMaxActivation));
            left -= a;
        }
        const auto run = run_mvm(bca, x, c, mode, c.seed);
        const auto& col = run.columns.front();
        s.curve.push_back({static_cast<double>(col.oracle), static_cast<double>(col.code)});
        s.max_abs_error = std::max(s.max_abs_error, std::labs(static_cast<long>(col.code) - col.oracle));
    }
    s.inl = compute_inl(s.curve);
    return s;
}

// ---------------------------------------------------------------------------
// Conventional comparison

namespace {

/// Curves for a cell whose weight-1 and weight-0 currents are i1 and i0.
InfluenceCurves influence_curves(double i1, double i0, int rows) {
    InfluenceCurves c;
    const double leak = i0 / i1;
    for (int j = 0; j <= rows; ++j) {
        const double ideal = kMaxActivation * j;
        c.ideal.push_back(ideal);
        c.w_sweep.push_back(kMaxActivation * (j + (rows - j) * leak));
        c.x_sweep.push_back(ideal);
        c.mismatch_lsb = std::max(c.mismatch_lsb, std::abs(c.w_sweep.back() - c.x_sweep.back()));
    }
    return c;
}

}  // namespace

std::vector<ConventionalComparison> compare_conventional(std::span<const double> tmr_values, const MacroConfig& cfg,
                                                         int rows) {
    if (tmr_values.empty()) throw std::invalid_argument("compare_conventional: no TMR values");
    if (rows < 1) throw std::invalid_argument("compare_conventional: rows must be >= 1");
    const SwitchParams sw = cfg.switch_params();
    sw.validate();
    const double v_cl = cfg.array.v_cl_mv / 1e3;
    const double r_p = cfg.device.r_p_nominal_ohm;

    std::vector<ConventionalComparison> out;
    for (double t : tmr_values) {
        if (!(t > 0.0)) throw std::domain_error("compare_conventional: TMR must be > 0");
        ConventionalComparison c;
        c.tmr = t;
        // Low-resistance P conducts more and stores 1 in the conventional cell.
        const double r_ap = r_p * (1.0 + t);
        c.conventional = influence_curves(v_cl / (r_p + sw.r_on_ohm), v_cl / (r_ap + sw.r_on_ohm), rows);
        // The latched weight drives N1; the MTJ is out of the current path.
        c.proposed = influence_curves(v_cl / (2.0 * sw.r_on_ohm), v_cl / (sw.r_off_ohm + sw.r_on_ohm), rows);
        c.mismatch_factor = c.conventional.mismatch_lsb / c.proposed.mismatch_lsb;
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Calibration

CalibrationTargets CalibrationTargets::published() {
    CalibrationTargets t;
    t.latch_points = published_latch_points();
    t.inl_tcm_lsb = 1.014;
    t.inl_cmf_lsb = 0.430;
    t.efficiency_rows = 64;
    t.tops_per_watt = 25.4;
    t.baseline_ratio = 3.05;
    t.delay_ratio = 0.838;
    return t;
}

void CalibrationTargets::validate() const {
    if (latch_points.empty()) throw CalibrationError("calibration target 'latch_points' is empty");
    for (const auto& p : latch_points) {
        if (!(p.tmr > 0.0 && p.r_ref_ohm > 0.0 && p.v_l_mv > 0.0 && p.power_fj > 0.0 && p.yield_pct > 0.0 &&
              p.yield_pct <= 100.0)) {
            throw CalibrationError("calibration target 'latch_points' has a non-positive entry");
        }
    }
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw CalibrationError(std::string("calibration target '") + name + "' must be > 0");
    };
    positive(inl_tcm_lsb, "inl_tcm_lsb");
    positive(inl_cmf_lsb, "inl_cmf_lsb");
    positive(efficiency_rows, "efficiency_rows");
    positive(tops_per_watt, "tops_per_watt");
    positive(baseline_ratio, "baseline_ratio");
    positive(delay_ratio, "delay_ratio");
}

namespace {

struct YieldKnobs {
    double log_gain = 0.0;
    double sigma_offset = 0.0;
    double sigma_r = 0.0;
};

constexpr double kLogGainMin = 0.0;      // gain 1
constexpr double kLogGainMax = 8.5;      // gain ~5000
constexpr double kSigmaOffsetMax = 0.5;
constexpr double kSigmaRMax = 0.3;

YieldKnobs clamp_knobs(YieldKnobs k) {
    k.log_gain = std::clamp(k.log_gain, kLogGainMin, kLogGainMax);
    k.sigma_offset = std::clamp(k.sigma_offset, 0.0, kSigmaOffsetMax);
    k.sigma_r = std::clamp(k.sigma_r, 0.0, kSigmaRMax);
    return k;
}

std::vector<double> yield_residuals_pts(const YieldKnobs& k, std::span<const LatchReferencePoint> pts,
                                        const MacroConfig& base) {
    std::vector<double> res;
    res.reserve(pts.size());
    for (const auto& p : pts) {
        MacroConfig c = base;
        c.device.tmr0 = p.tmr;
        c.device.sigma_r = k.sigma_r;
        c.latch.r_ref_ohm = p.r_ref_ohm;
        c.latch.v_l_mv = p.v_l_mv;
        c.latch.gain_k = std::exp(k.log_gain);
        c.latch.sigma_offset = k.sigma_offset;
        res.push_back(100.0 * expected_yield(c.mtj_params(), c.latch_params()).yield_avg - p.yield_pct);
    }
    return res;
}

double sse(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

/// Coarse grid, then compass search with step halving.
YieldKnobs fit_yield(std::span<const LatchReferencePoint> pts, const MacroConfig& base) {
    auto cost = [&](const YieldKnobs& k) { return sse(yield_residuals_pts(clamp_knobs(k), pts, base)); };

    YieldKnobs best{};
    double best_cost = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= 17; ++a) {
        for (int b = 0; b <= 25; ++b) {
            for (int c = 0; c <= 15; ++c) {
                const YieldKnobs k{kLogGainMin + a * 0.5, b * 0.02, c * 0.02};
                const double v = cost(k);
                if (v < best_cost) {
                    best_cost = v;
                    best = k;
                }
            }
        }
    }

    std::array<double, 3> step{0.25, 0.01, 0.01};
    for (int iter = 0; iter < 4000 && step[0] > 1e-7; ++iter) {
        bool improved = false;
        for (int d = 0; d < 3; ++d) {
            for (double sign : {1.0, -1.0}) {
                YieldKnobs k = best;
                double* field = d == 0 ? &k.log_gain : d == 1 ? &k.sigma_offset : &k.sigma_r;
                *field += sign * step[static_cast<std::size_t>(d)];
                k = clamp_knobs(k);
                const double v = cost(k);
                if (v < best_cost) {
                    best_cost = v;
                    best = k;
                    improved = true;
                }
            }
        }
        if (!improved) {
            for (auto& s : step) s *= 0.5;
        }
    }
    return clamp_knobs(best);
}

/// Bisection for a monotone increasing f on [lo, hi] with f(lo) <= target <= f(hi).
template <typename Fn>
double bisect(Fn f, double lo, double hi, double target, const char* name) {
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!(flo <= target && target <= fhi)) {
        throw CalibrationError(std::string("calibration target '") + name + "' is unreachable within [" +
                               std::to_string(flo) + ", " + std::to_string(fhi) + "]");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Json CalibrationResult::to_json(const CalibrationTargets& targets) const {
    Json t;
    Json pts = Json::array();
    for (const auto& p : targets.latch_points) {
        pts.push_back({{"tmr", p.tmr},
                       {"r_ref_ohm", p.r_ref_ohm},
                       {"v_l_mv", p.v_l_mv},
                       {"power_fj", p.power_fj},
                       {"yield_pct", p.yield_pct}});
    }
    t["latch_points"] = pts;
    t["inl_tcm_lsb"] = targets.inl_tcm_lsb;
    t["inl_cmf_lsb"] = targets.inl_cmf_lsb;
    t["efficiency_rows"] = targets.efficiency_rows;
    t["tops_per_watt"] = targets.tops_per_watt;
    t["baseline_ratio"] = targets.baseline_ratio;
    t["delay_ratio"] = targets.delay_ratio;

    Json j;
    j["kind"] = "mramsim-calibration";
    j["targets"] = t;
    j["constants"] = {
        {"device", {{"sigma_r", sigma_r}}},
        {"latch", {{"gain_k", gain_k}, {"sigma_offset", sigma_offset}, {"energy_c0", energy_c0}}},
        {"integrator", {{"droop_lambda_per_v", droop_lambda_per_v}, {"feedback_factor", feedback_factor}}},
        {"engine",
         {{"other_fj", other_fj},
          {"baseline_energy_per_row_fj", baseline_energy_per_row_fj},
          {"baseline_delay_per_row_ps", baseline_delay_per_row_ps}}},
    };
    j["residuals"] = residuals;
    return j;
}

void CalibrationResult::apply(MacroConfig& cfg) const {
    cfg.device.sigma_r = sigma_r;
    cfg.latch.gain_k = gain_k;
    cfg.latch.sigma_offset = sigma_offset;
    cfg.latch.energy_c0 = energy_c0;
    cfg.integrator.droop_lambda_per_v = droop_lambda_per_v;
    cfg.integrator.feedback_factor = feedback_factor;
    cfg.engine.other_fj = other_fj;
    cfg.engine.baseline_energy_per_row_fj = baseline_energy_per_row_fj;
    cfg.engine.baseline_delay_per_row_ps = baseline_delay_per_row_ps;
}

CalibrationResult calibrate(const CalibrationTargets& targets, const MacroConfig& base) {
    targets.validate();
    base.validate();
    CalibrationResult r;
    MacroConfig cfg = base;

    // Latch energy: minimax relative error over the anchor points.
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& p : targets.latch_points) {
            MacroConfig c = cfg;
            c.latch.r_ref_ohm = p.r_ref_ohm;
            c.latch.v_l_mv = p.v_l_mv;
            c.latch.energy_c0 = 1.0;
            const double unit = energy_model(c.latch_params(), p.tmr).energy_j * 1e15;
            const double ratio = p.power_fj / unit;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        r.energy_c0 = 2.0 * lo * hi / (lo + hi);
        cfg.latch.energy_c0 = r.energy_c0;
        Json rel = Json::array();
        for (const auto& p : targets.latch_points) {
            MacroConfig c = cfg;
            c.latch.r_ref_ohm = p.r_ref_ohm;
            c.latch.v_l_mv = p.v_l_mv;
            rel.push_back(energy_model(c.latch_params(), p.tmr).energy_j * 1e15 / p.power_fj - 1.0);
        }
        r.residuals["latch_power_rel"] = rel;
    }

    // Latch yield: analytic expectation of the Monte-Carlo model.
    {
        const YieldKnobs k = fit_yield(targets.latch_points, cfg);
        const auto res = yield_residuals_pts(k, targets.latch_points, cfg);
        for (std::size_t i = 0; i < res.size(); ++i) {
            if (std::abs(res[i]) > 1.5) {
                throw CalibrationError("calibration target 'latch_points[" + std::to_string(i) +
                                       "].yield_pct' is unreachable (residual " + std::to_string(res[i]) + " pts)");
            }
        }
        r.gain_k = std::exp(k.log_gain);
        r.sigma_offset = k.sigma_offset;
        r.sigma_r = k.sigma_r;
        cfg.latch.gain_k = r.gain_k;
        cfg.latch.sigma_offset = r.sigma_offset;
        cfg.device.sigma_r = r.sigma_r;
        r.residuals["latch_yield_pts"] = res;
    }

    // Droop: TCM first, then the feedback share that gives the CMF target.
    {
        const double v_full = 15.0 * cfg.unit_voltage();
        const double lambda_hi = 0.999 / v_full;
        auto inl_at = [&](double lambda, double ff, MirrorMode mode) {
            MacroConfig c = cfg;
            c.integrator.droop_lambda_per_v = lambda;
            c.integrator.feedback_factor = ff;
            return max_inl(c, mode);
        };
        r.droop_lambda_per_v = bisect([&](double l) { return inl_at(l, 1.0, MirrorMode::TCM); }, 0.0, lambda_hi,
                                      targets.inl_tcm_lsb, "inl_tcm_lsb");
        r.feedback_factor =
            bisect([&](double f) { return inl_at(r.droop_lambda_per_v, f, MirrorMode::CMF); }, 0.0, 1.0,
                   targets.inl_cmf_lsb, "inl_cmf_lsb");
        cfg.integrator.droop_lambda_per_v = r.droop_lambda_per_v;
        cfg.integrator.feedback_factor = r.feedback_factor;
        const double tcm = max_inl(cfg, MirrorMode::TCM);
        const double cmf = max_inl(cfg, MirrorMode::CMF);
        r.residuals["inl_tcm_lsb"] = tcm - targets.inl_tcm_lsb;
        r.residuals["inl_cmf_lsb"] = cmf - targets.inl_cmf_lsb;
    }

    // Engine constants: closed form at the efficiency anchor.
    {
        const int m = targets.efficiency_rows;
        cfg.engine.other_fj = 0.0;
        cfg.engine.baseline_energy_per_row_fj = 1.0;
        cfg.engine.baseline_delay_per_row_ps = 1.0;
        const EfficiencyPoint bare = tops_per_watt(m, cfg);
        const double target_j = static_cast<double>(mac_ops(m)) / (targets.tops_per_watt * 1e12);
        const double other_j = target_j - bare.ledger.energy.total();
        if (!(other_j >= 0.0)) {
            throw CalibrationError("calibration target 'tops_per_watt' is unreachable: fixed blocks already use " +
                                   std::to_string(bare.ledger.energy.total() * 1e15) + " fJ per column");
        }
        r.other_fj = other_j * 1e15;
        r.baseline_energy_per_row_fj = targets.baseline_ratio * target_j / m * 1e15;
        const double delay_ps = bare.delay_s * 1e12;
        const double per_row = (delay_ps / targets.delay_ratio - cfg.engine.baseline_delay_fixed_ps) / m;
        if (!(per_row > 0.0)) throw CalibrationError("calibration target 'delay_ratio' is unreachable");
        r.baseline_delay_per_row_ps = per_row;

        r.apply(cfg);
        const EfficiencyPoint fitted = tops_per_watt(m, cfg);
        r.residuals["tops_per_watt_rel"] = fitted.tops_per_watt / targets.tops_per_watt - 1.0;
        r.residuals["baseline_ratio"] = fitted.efficiency_ratio - targets.baseline_ratio;
        r.residuals["delay_ratio"] = fitted.delay_ratio - targets.delay_ratio;
    }
    return r;
}

}  // namespace mramsim
