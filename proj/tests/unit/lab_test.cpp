#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "testing.hpp"

#include "kagents/errors.hpp"
#include "kagents/lab/device.hpp"
#include "kagents/lab/fit.hpp"
#include "kagents/lab/hooks.hpp"
#include "kagents/lab/lab.hpp"
#include "kagents/lab/physics.hpp"
#include "kagents/lab/stark_search.hpp"
#include "kagents/llm/rules_backend.hpp"

using namespace kagents;
using namespace kagents::lab;

namespace {

DeviceSpec device() { return load_device(kagents::testing::data_path("devices/default.json")); }

} // namespace

TEST(Device, JsonRoundTrip) {
    auto d = device();
    auto back = device_from_json(to_json(d));
    EXPECT_EQ(to_json(back), to_json(d));
    EXPECT_EQ(back.qubits.at("Q0").pi_amp, 0.2);
    EXPECT_EQ(back.calibration.at("Q0").f01, 4887.5);
    EXPECT_EQ(calibration_from_json(calibration_to_json(d.calibration)).at("Q1").drag, -0.005);
    EXPECT_ANY_THROW(load_device("/nonexistent/device.json"));
}

TEST(Physics, ZzRateKnownValue) {
    // zz_static + 2 J a0 a1 W0 W1 cos(phi) / (D0 D1 (D0 + a0)(D1 + a1))
    double v = zz_rate(3, -200, -200, 10, 10, 0, -100, -50, 0.02);
    double expect = 0.02 + 2.0 * 3 * 200 * 200 * 100 / (-100.0 * -50.0 * -300.0 * -250.0);
    EXPECT_NEAR(v, expect, 1e-15);
    EXPECT_NEAR(zz_rate(3, -200, -200, 10, 10, std::numbers::pi / 2, -100, -50, 0.02), 0.02, 1e-15);
    EXPECT_THROW(zz_rate(3, -200, -200, 10, 10, 0, 0, -50, 0), SingularDetuning);
    EXPECT_THROW(zz_rate(3, -200, -200, 10, 10, 0, 200, -50, 0), SingularDetuning);
}

TEST(Physics, RbInfidelity) {
    auto r = rb_infidelity(0.9952);
    EXPECT_NEAR(r.per_clifford, 0.0024, 1e-12);
    EXPECT_NEAR(r.per_gate, 0.0024 / 1.833, 1e-12);
    EXPECT_NEAR(rb_infidelity(0.9, 4).per_clifford, 0.075, 1e-12);
}

TEST(Physics, GateErrorGrowsWithMiscalibration) {
    auto d = device();
    const auto& q = d.qubits.at("Q0");
    QubitCalibration perfect{q.f01, q.pi_amp, q.drag_opt};
    QubitCalibration off{q.f01 - 0.5, q.pi_amp * 1.1, q.drag_opt + 0.0015};
    EXPECT_LT(single_gate_error(q, perfect), single_gate_error(q, off));
    EXPECT_GT(rb_decay(q, perfect), rb_decay(q, off));
    EXPECT_LE(rb_decay(q, perfect), 1.0);
}

TEST(Physics, GhzDensity) {
    auto rho = ghz_density(0.9);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
    EXPECT_NEAR(rho(0, 7), 0.45, 1e-12);
    EXPECT_NEAR(ghz_fidelity(rho), 0.9 + 0.1 / 8, 1e-12);
    EXPECT_NEAR(ghz_fidelity(ghz_density(1.0)), 1.0, 1e-12);
}

TEST(Fit, SinusoidRecoversFrequencyFromNoisyData) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0, 0.02);
    inspection::Series s{"d", {}, {}};
    for (int i = 0; i < 151; ++i) {
        double t = i * 0.002;
        s.x.push_back(t);
        s.y.push_back(0.5 - 0.45 * std::cos(2 * std::numbers::pi * 17.6 * t) + n(rng));
    }
    auto f = fit_model(FitKind::sinusoid, {s});
    EXPECT_TRUE(f.success);
    EXPECT_NEAR(f.value("frequency"), 17.6, 0.05);
    EXPECT_GT(f.error("frequency"), 0.0);
    EXPECT_NEAR(dominant_frequency(s.x, s.y), 17.6, 0.3);
    EXPECT_NEAR(oscillation_count(f, 0.3), 17.6 * 0.3, 0.02);
}

TEST(Fit, TwoLinesIntersection) {
    inspection::Series a{"a", {0, 1, 2}, {0, 1, 2}}, b{"b", {0, 1, 2}, {2, 1, 0}};
    auto f = fit_model(FitKind::two_lines, {a, b});
    ASSERT_TRUE(f.intersection);
    EXPECT_NEAR(*f.intersection, 1.0, 1e-12);
    EXPECT_TRUE(in_central_half(1.0, 0.0, 2.0));
    EXPECT_FALSE(in_central_half(0.2, 0.0, 2.0));
}

TEST(Fit, InsufficientData) {
    inspection::Series s{"d", {0, 1}, {0, 1}};
    EXPECT_THROW(fit_model(FitKind::sinusoid, {s}), InsufficientData);
    EXPECT_THROW(fit_model(FitKind::two_lines, {s}), InsufficientData);
}

TEST(LabSim, FineRamseyCorrectsSmallFrequencyError) {
    Lab lab(device(), 7);
    auto c = lab.calibration("Q0");
    c.f01 = 4887.95;
    lab.set_calibration("Q0", c);
    RamseyArgs a;
    a.qubit = "Q0";
    a.set_offset = 0.1;
    a.stop = 35;
    a.step = 0.5;
    auto r = lab.ramsey(a);
    EXPECT_TRUE(r.success()) << r.analysis.text;
    EXPECT_NEAR(lab.calibration("Q0").f01, 4888.0, 0.01);
    ASSERT_FALSE(r.figures.empty());
    EXPECT_EQ(r.figures[0].figure_id, "ramsey.plot");
}

TEST(LabSim, ShortRamseyFailsAndAsksForLongerSweep) {
    Lab lab(device(), 7);
    RamseyArgs a;
    a.qubit = "Q0";
    a.stop = 1.5;
    a.step = 0.02;
    auto r = lab.ramsey(a);
    EXPECT_FALSE(r.success());
    ASSERT_TRUE(r.analysis.suggested_updates.count("stop"));
    EXPECT_GT(r.analysis.suggested_updates.at("stop"), 1.5);
    EXPECT_EQ(lab.calibration("Q0").f01, 4887.5);
}

TEST(LabSim, SameSeedSameData) {
    Lab a(device(), 3), b(device(), 3);
    EXPECT_EQ(a.rabi({"Q0"}).datasets[0].y, b.rabi({"Q0"}).datasets[0].y);
}

TEST(LabSim, UnknownQubitAndMissingPairCalibration) {
    Lab lab(device(), 1);
    EXPECT_THROW(lab.truth("Q9"), LabError);
    EXPECT_THROW(lab.pair("Q0", "Q2"), LabError);
    EXPECT_THROW(lab.ghz({"Q0", "Q1", "Q2"}), MissingCalibration);
    EXPECT_THROW(lab.ghz({"Q0", "Q1"}), LabError);
}

TEST(LabSim, StarkOutcomes) {
    Lab lab(device(), 1);
    StarkArgs a;
    a.control = "Q0";
    a.target = "Q1";
    a.frequency = 4870; // inside delta_min of Q0
    a.amp_control = 0.2;
    auto r = lab.stark_tomography(a);
    EXPECT_FALSE(r.success());
    ASSERT_EQ(lab.stark_attempts().size(), 1u);
    EXPECT_EQ(lab.stark_attempts()[0].outcome, "unstable");
    a.frequency = 4798;
    auto ok = lab.stark_tomography(a);
    EXPECT_TRUE(ok.success()) << ok.analysis.text;
    EXPECT_TRUE(lab.pair_calibration("Q0", "Q1")->calibrated);
    EXPECT_EQ(distinct_frequencies(lab.stark_attempts()), 2);
}

TEST(Hooks, TableAndDispatch) {
    EXPECT_TRUE(find_hook("ramsey"));
    EXPECT_FALSE(find_hook("nope"));
    Lab lab(device(), 1);
    EXPECT_THROW(run_hook("nope", nlohmann::json::object(), lab, nullptr), NotFound);
    auto r = run_hook("t1", {{"dut", "Q0"}}, lab, nullptr);
    EXPECT_EQ(r.experiment, "t1");
    EXPECT_TRUE(r.success()) << r.analysis.text;
}

TEST(StarkSearch, ProposalsRespectFrequencyCap) {
    llm::Gateway g(std::make_unique<llm::RulesBackend>());
    Lab lab(device(), 1);
    SearchSettings s;
    auto p = propose_stark_params(g, lab, "Q0", "Q1", "frequency", std::nullopt, s);
    EXPECT_GT(p.amp_control, 0.0);
    EXPECT_LE(p.amp_control, s.max_amplitude);
    s.max_frequencies = 0;
    EXPECT_THROW(propose_stark_params(g, lab, "Q0", "Q1", "frequency", std::nullopt, s), SearchBudgetExceeded);
}
