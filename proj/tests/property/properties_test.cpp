#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"

#include "kagents/bench/bench.hpp"
#include "kagents/execution/state_machine.hpp"
#include "kagents/inspection/features.hpp"
#include "kagents/lab/fit.hpp"
#include "kagents/lab/physics.hpp"
#include "kagents/llm/embedding.hpp"
#include "kagents/llm/rules_backend.hpp"
#include "kagents/procedure/procedure_doc.hpp"
#include "kagents/text.hpp"
#include "kagents/translation/translator.hpp"

using namespace kagents;

namespace {

std::mt19937_64 rng_for(const char* name) { return std::mt19937_64(std::hash<std::string>{}(name)); }

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace

// The perturbative rate, written term by term: the product of the two drive-induced level shifts
// scaled by the coupling, plus the static part.
TEST(ZzRate, MatchesTermwiseOracle) {
    auto rng = rng_for("zz");
    for (int i = 0; i < 1000; ++i) {
        double J = uniform(rng, 0.5, 6), a0 = uniform(rng, -260, -140), a1 = uniform(rng, -260, -140);
        double w0 = uniform(rng, 0, 50), w1 = uniform(rng, 0, 50), phi = uniform(rng, -4, 4);
        double d0 = uniform(rng, 15, 130) * (i % 2 ? 1 : -1), d1 = uniform(rng, 15, 130) * (i % 3 ? -1 : 1);
        double zz0 = uniform(rng, -0.1, 0.1);
        long double s0 = (long double)a0 * w0 / ((long double)d0 * (d0 + a0));
        long double s1 = (long double)a1 * w1 / ((long double)d1 * (d1 + a1));
        long double want = zz0 + 2.0L * J * s0 * s1 * std::cos((long double)phi);
        double got = lab::zz_rate(J, a0, a1, w0, w1, phi, d0, d1, zz0);
        ASSERT_LE(std::abs((got - want) / want), 1e-12) << "draw " << i;
    }
}

TEST(GhzDensity, PhysicalForEveryFidelity) {
    auto rng = rng_for("ghz");
    for (int i = 0; i <= 200; ++i) {
        double F = i < 101 ? i / 100.0 : uniform(rng, 0, 1);
        auto rho = lab::ghz_density(F);
        ASSERT_NEAR(rho.trace(), 1.0, 1e-12);
        ASSERT_LE((rho - rho.transpose()).cwiseAbs().maxCoeff(), 1e-15);
        Eigen::SelfAdjointEigenSolver<lab::DensityMatrix8> es(rho);
        ASSERT_GE(es.eigenvalues().minCoeff(), -1e-12) << F;
        ASSERT_NEAR(lab::ghz_fidelity(rho), F + (1 - F) / 8, 1e-12);
    }
}

TEST(RbInfidelity, LinearInDecay) {
    auto rng = rng_for("rb");
    for (int i = 0; i < 500; ++i) {
        double p = uniform(rng, 0.5, 1), g = uniform(rng, 1, 3);
        auto r = lab::rb_infidelity(p, 2, g);
        ASSERT_NEAR(r.per_clifford, (1 - p) / 2, 1e-15);
        ASSERT_NEAR(r.per_gate * g, r.per_clifford, 1e-15);
    }
}

TEST(Fit, NoiselessRecoveryAndOscillationCount) {
    auto rng = rng_for("fit");
    for (int i = 0; i < 100; ++i) {
        double A = uniform(rng, 0.2, 0.5), f = uniform(rng, 2, 9), phi = uniform(rng, -3, 3), c = uniform(rng, 0.3, 0.7);
        inspection::Series s{"d", {}, {}};
        for (int k = 0; k < 201; ++k) {
            double t = k * 0.005;
            s.x.push_back(t);
            s.y.push_back(A * std::cos(2 * std::numbers::pi * f * t + phi) + c);
        }
        auto fit = lab::fit_model(lab::FitKind::sinusoid, {s});
        ASSERT_NEAR(fit.value("frequency"), f, 1e-6) << i;
        ASSERT_NEAR(fit.value("amplitude"), A, 1e-6) << i;
        ASSERT_NEAR(fit.value("offset"), c, 1e-6) << i;
        ASSERT_NEAR(std::remainder(fit.value("phase") - phi, 2 * std::numbers::pi), 0.0, 1e-6) << i;
        double span = s.x.back() - s.x.front();
        ASSERT_DOUBLE_EQ(lab::oscillation_count(fit, span), fit.value("frequency") * span);
    }
    for (int i = 0; i < 100; ++i) {
        double A = uniform(rng, 0.3, 1), tau = uniform(rng, 0.2, 2), c = uniform(rng, 0, 0.3);
        inspection::Series s{"d", {}, {}};
        for (int k = 0; k < 101; ++k) {
            double t = k * 0.04;
            s.x.push_back(t);
            s.y.push_back(A * std::exp(-t / tau) + c);
        }
        auto fit = lab::fit_model(lab::FitKind::exponential, {s});
        ASSERT_NEAR(fit.value("decay"), tau, 1e-6) << i;
        ASSERT_NEAR(fit.value("amplitude"), A, 1e-6) << i;
    }
}

// Every generated case carries the label the visual thresholds give it, for any seed.
TEST(InspectionCorpus, LabelsArePure) {
    for (std::uint64_t seed : {1ull, 2ull, 99ull, 123456789ull}) {
        for (const auto& kind : bench::inspection_kinds()) {
            for (const auto& c : bench::generate_inspection_corpus(kind, 15, 15, seed)) {
                bool verdict = llm::visual_rule_verdict(c.figure.kind, inspection::feature_digest(c.figure), nullptr);
                ASSERT_EQ(verdict, c.label_success) << kind << " seed " << seed;
            }
        }
    }
}

TEST(Retrieval, AgentsAndBaselineSeeTheSameScores) {
    auto f = kagents::testing::escalation_fixture(true);
    translation::Translator t(*f.registry, *f.gateway);
    for (const std::string instr : {f.instruction, std::string("Sweep the readout resonator"),
                                    std::string("Measure a Ramsey fringe on `dut`")}) {
        translation::TranslationContext ctx;
        ctx.instruction = instr;
        ctx.available_variables = f.table.listing();
        auto rag = t.rag_translate(ctx);
        auto direct = t.score(instr);
        ASSERT_EQ(rag.scores.size(), direct.size());
        for (std::size_t i = 0; i < direct.size(); ++i) {
            ASSERT_EQ(rag.scores[i].agent_id, direct[i].agent_id);
            ASSERT_EQ(rag.scores[i].score, direct[i].score);
        }
    }
}

TEST(Embedding, UnitNormForRandomText) {
    auto rng = rng_for("embed");
    const std::vector<std::string> vocab = {"ramsey", "rabi", "drag", "qubit", "pulse", "amplitude", "sweep", "fit"};
    for (int i = 0; i < 200; ++i) {
        std::string s;
        int n = 1 + static_cast<int>(rng() % 8);
        for (int k = 0; k < n; ++k) s += vocab[rng() % vocab.size()] + " ";
        auto v = llm::hashed_embedding(s);
        ASSERT_NEAR(v.norm(), 1.0, 1e-12);
        ASSERT_NEAR(v.dot(llm::hashed_embedding(s)), 1.0, 1e-12);
    }
}

TEST(Procedure, RenderParseRoundTrip) {
    auto rng = rng_for("procedure");
    for (int i = 0; i < 200; ++i) {
        procedure::ProcedureDoc d;
        d.title = "Procedure " + std::to_string(i) + " on `dut`";
        if (rng() % 2) d.background = "Background line " + std::to_string(rng() % 1000) + ".";
        int steps = 1 + static_cast<int>(rng() % 5);
        for (int k = 0; k < steps; ++k) d.steps.push_back("Step " + std::to_string(k) + " with x=" + std::to_string(rng() % 50));
        if (rng() % 2) d.results = "- value " + std::to_string(rng() % 7);
        ASSERT_EQ(procedure::parse(procedure::render(d)), d);
    }
}

TEST(NumericVars, UpdatesRenderBackExactly) {
    auto rng = rng_for("numeric");
    for (int i = 0; i < 300; ++i) {
        execution::Stage st;
        st.instruction = "Ramsey with stop time=1.5 us, step size=0.02 us and frequency offset=1 MHz";
        st.numeric_vars = execution::extract_numeric_vars(st.instruction);
        double stop = std::round(uniform(rng, 0.1, 100) * 1000) / 1000;
        execution::apply_parameter_updates(st, {{"stop_time", stop}});
        execution::Stage back;
        back.instruction = st.rendered_instruction();
        back.numeric_vars = execution::extract_numeric_vars(back.instruction);
        auto m = back.numeric_map();
        ASSERT_EQ(m.size(), 3u);
        ASSERT_DOUBLE_EQ(m.at("stop_time"), stop);
        ASSERT_DOUBLE_EQ(m.at("step_size"), 0.02);
        ASSERT_DOUBLE_EQ(m.at("frequency_offset"), 1.0);
    }
}
