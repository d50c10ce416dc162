#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dqs/neutrino.hpp"
#include "dqs/qubit.hpp"

namespace dqs::neutrino {
namespace {

constexpr double pi = std::numbers::pi;

std::vector<SpectrumPoint> synthetic(const OscillationParams& p, std::size_t count, double baseline,
                                     double loe_lo = 1.0e4, double loe_hi = 1.2e5) {
  std::vector<SpectrumPoint> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double loe = loe_lo + (loe_hi - loe_lo) * k / (count - 1);
    out.push_back({loe, survival_probability(p, baseline, baseline / loe), 1.0});
  }
  return out;
}

TEST(PhaseConstantTest, IndependentUnitOracle) {
  // ħc = 197.3269804 MeV·fm. Phase = Δm² L / (4 ħc E) with Δm² in eV²,
  // L in km (1e18 fm), E in GeV (1e9 eV) and ħc in eV·fm (1e6 × MeV·fm):
  // K = 1e18 / (4 · 197.3269804e6 · 1e9).
  const double k_oracle = 1e18 / (4.0 * 197.3269804e6 * 1e9);
  EXPECT_NEAR(constants::phase_constant, 1.26693, 1e-4);
  EXPECT_NEAR(constants::phase_constant, k_oracle, 1e-8);
}

TEST(PhaseTest, Examples) {
  EXPECT_EQ(oscillation_phase(7.9e-5, 0.0, 1.0), 0.0);
  const double loe = (pi / 2) / (constants::phase_constant * 7.9e-5);
  EXPECT_NEAR(oscillation_phase(7.9e-5, loe * 2.0, 2.0), pi / 2, 1e-14);
  EXPECT_THROW(oscillation_phase(7.9e-5, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(oscillation_phase(7.9e-5, 1.0, -1.0), std::invalid_argument);
}

TEST(ThetaTest, Tan2Conversion) {
  const double theta = theta_from_tan2(0.40);
  const double s2 = std::pow(std::sin(2 * theta), 2);
  EXPECT_NEAR(s2, 4 * 0.40 / (1.40 * 1.40), 1e-15);
  EXPECT_NEAR(s2, 0.8163, 1e-4);
  EXPECT_THROW(theta_from_tan2(-1.0), std::invalid_argument);
}

TEST(ProbabilityTest, StandardFormulaWithoutDamping) {
  const OscillationParams p{7.9e-5, theta_from_tan2(0.40), 0.0};
  for (double loe = 100.0; loe <= 1e5; loe *= 1.3) {
    const double l = 180.0, e = l / loe;
    const double s2 = std::pow(std::sin(2 * p.theta_rad), 2);
    const double standard = 1.0 - s2 * std::pow(std::sin(1.26693 * p.dm2_ev2 * loe), 2);
    // The 6-digit constant differs from K; |d sin²φ/dφ| ≤ 1 bounds the effect.
    const double rounding = s2 * std::abs(constants::phase_constant - 1.26693) * p.dm2_ev2 * loe;
    EXPECT_NEAR(survival_probability(p, l, e), standard, rounding + 1e-14);
    const double exact = 1.0 - s2 * std::pow(std::sin(constants::phase_constant * p.dm2_ev2 * loe), 2);
    EXPECT_NEAR(survival_probability(p, l, e), exact, 1e-14);
  }
}

TEST(ProbabilityTest, FirstMaximum) {
  const OscillationParams p{7.9e-5, theta_from_tan2(0.40), 0.0};
  const double loe = (pi / 2) / (constants::phase_constant * p.dm2_ev2);
  EXPECT_NEAR(transition_probability(p, 100.0, 100.0 / loe), 4 * 0.40 / (1.40 * 1.40), 1e-13);
}

TEST(ProbabilityTest, Limits) {
  const OscillationParams p{7.9e-5, 0.5, 2e-3};
  EXPECT_EQ(survival_probability(p, 0.0, 1.0), 1.0);
  EXPECT_EQ(transition_probability(p, 0.0, 1.0), 0.0);
  const double s2 = std::pow(std::sin(1.0), 2);
  OscillationParams strong = p;
  strong.lambda_per_km = 10.0;
  for (double e : {0.001, 0.01, 3.0}) {
    EXPECT_NEAR(survival_probability(strong, 10.0, e), 1.0 - 0.5 * s2, 1e-15);
    EXPECT_NEAR(transition_probability(strong, 10.0, e), 0.5 * s2, 1e-15);
  }
}

TEST(ProbabilityTest, BoundsAndComplementarityProperty) {
  for (double lambda : {0.0, 1e-5, 1e-3, 0.1}) {
    for (double loe = 1.0; loe < 1e6; loe *= 1.7) {
      for (double theta : {0.0, 0.3, pi / 4, 1.2, pi / 2}) {
        const OscillationParams p{2.4e-3, theta, lambda};
        const double ps = survival_probability(p, 500.0, 500.0 / loe);
        const double pt = transition_probability(p, 500.0, 500.0 / loe);
        EXPECT_EQ(ps + pt, 1.0);
        EXPECT_GE(pt, 0.0);
        EXPECT_LE(pt, 1.0);
      }
    }
  }
}

TEST(ProbabilityTest, ConsistentWithQubitModel) {
  // φ = Δt/2 with t = L  ⇒  Δ = 2 K Δm² / E.
  for (double e : {0.002, 0.004, 0.01}) {
    for (double l : {10.0, 180.0, 1000.0}) {
      const OscillationParams p{7.9e-5, 0.6, 3e-4};
      const qubit::DispersiveQubitParams q{.e0 = 0.0,
                                           .e1 = 2 * constants::phase_constant * p.dm2_ev2 / e,
                                           .lambda = p.lambda_per_km};
      EXPECT_NEAR(survival_probability(p, l, e), qubit::surviving_probability(q, p.theta_rad, l), 1e-12);
    }
  }
}

TEST(OscillationParamsTest, Validation) {
  EXPECT_THROW((OscillationParams{0.0, 0.1, 0.0}).validate(), std::invalid_argument);
  EXPECT_THROW((OscillationParams{1e-5, -0.1, 0.0}).validate(), std::invalid_argument);
  EXPECT_THROW((OscillationParams{1e-5, 0.1, -1.0}).validate(), std::invalid_argument);
  EXPECT_NO_THROW((OscillationParams{1e-5, pi / 2, 0.0}).validate());
}

TEST(SpectrumCsvTest, ParsesWithAndWithoutWeights) {
  std::istringstream two("# comment\nL_over_E_km_per_GeV,P_survival\n100,0.5\n\n2.5e4, 0.75\n");
  const auto a = read_spectrum_csv(two);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1].l_over_e, 2.5e4);
  EXPECT_EQ(a[1].p, 0.75);
  EXPECT_EQ(a[1].weight, 1.0);
  std::istringstream three("L_over_E_km_per_GeV,P_survival,weight\r\n100,0.5,2\r\n");
  const auto b = read_spectrum_csv(three);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].weight, 2.0);
  std::istringstream header_only("L_over_E_km_per_GeV,P_survival\n");
  EXPECT_TRUE(read_spectrum_csv(header_only).empty());
}

TEST(SpectrumCsvTest, ReportsLineNumbers) {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_spectrum_csv(in);
    } catch (const std::runtime_error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message(""), "missing header");
  EXPECT_EQ(message("L,P\n").rfind("line 1:", 0), 0u);
  EXPECT_EQ(message("L_over_E_km_per_GeV,P_survival\n1,0.5\n1,abc\n").rfind("line 3:", 0), 0u);
  EXPECT_EQ(message("L_over_E_km_per_GeV,P_survival\n1,1.5\n").rfind("line 2:", 0), 0u);
  EXPECT_EQ(message("L_over_E_km_per_GeV,P_survival\n-1,0.5\n").rfind("line 2:", 0), 0u);
  EXPECT_EQ(message("L_over_E_km_per_GeV,P_survival\n1,0.5,3\n").rfind("line 2:", 0), 0u);
}

TEST(FitTest, RecoversUndampedParameters) {
  const OscillationParams truth{7.9e-5, theta_from_tan2(0.40), 0.0};
  const auto data = synthetic(truth, 50, constants::default_baseline_km);
  const auto r = fit_parameters(data);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.params.lambda_per_km, 1e-6);
  EXPECT_NEAR(r.params.dm2_ev2, truth.dm2_ev2, 1e-3 * truth.dm2_ev2);
  EXPECT_NEAR(r.params.theta_rad, truth.theta_rad, 1e-3 * truth.theta_rad);
  EXPECT_LT(r.sse, 1e-12);
  EXPECT_LE(r.sse, r.grid_best_sse);
}

TEST(FitTest, RecoversDampedParameters) {
  const OscillationParams truth{7.9e-5, theta_from_tan2(0.40), 5e-5};
  const auto data = synthetic(truth, 50, constants::default_baseline_km);
  const auto r = fit_parameters(data);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.params.lambda_per_km, truth.lambda_per_km, 1e-2 * truth.lambda_per_km);
  EXPECT_NEAR(r.params.dm2_ev2, truth.dm2_ev2, 1e-3 * truth.dm2_ev2);
  EXPECT_NEAR(r.params.theta_rad, truth.theta_rad, 1e-3 * truth.theta_rad);
}

TEST(FitTest, Idempotent) {
  const OscillationParams truth{6.5e-5, 0.55, 2e-4};
  const auto first = fit_parameters(synthetic(truth, 40, 180.0));
  const auto again = fit_parameters(synthetic(first.params, 40, 180.0));
  const FitConfig cfg;
  EXPECT_NEAR(again.params.dm2_ev2, first.params.dm2_ev2, 1e-5 * cfg.bounds[0].width());
  EXPECT_NEAR(again.params.theta_rad, first.params.theta_rad, 1e-5 * cfg.bounds[1].width());
  EXPECT_NEAR(again.params.lambda_per_km, first.params.lambda_per_km, 1e-4 * cfg.bounds[2].width());
}

TEST(FitTest, Deterministic) {
  const auto data = synthetic({7.0e-5, 0.6, 1e-4}, 30, 180.0);
  const auto a = fit_parameters(data);
  const auto b = fit_parameters(data);
  EXPECT_EQ(a.params.dm2_ev2, b.params.dm2_ev2);
  EXPECT_EQ(a.params.theta_rad, b.params.theta_rad);
  EXPECT_EQ(a.params.lambda_per_km, b.params.lambda_per_km);
  EXPECT_EQ(a.sse, b.sse);
}

TEST(FitTest, FixedParameterIsRespected) {
  const OscillationParams truth{7.9e-5, theta_from_tan2(0.40), 1e-4};
  FitConfig cfg;
  cfg.fixed[static_cast<std::size_t>(Axis::dm2)] = 7.9e-5;
  const auto r = fit_parameters(synthetic(truth, 30, 180.0), cfg);
  EXPECT_EQ(r.params.dm2_ev2, 7.9e-5);
  EXPECT_NEAR(r.params.theta_rad, truth.theta_rad, 1e-4);
  EXPECT_NEAR(r.params.lambda_per_km, 1e-4, 1e-6);
  // One free axis fewer in the grid.
  EXPECT_EQ(r.grid_evaluations, 41u * 21u);
}

TEST(FitTest, DegenerateBoundsActAsFixed) {
  FitConfig cfg;
  cfg.bounds[2] = {0.0, 0.0};
  const auto r = fit_parameters(synthetic({7.9e-5, 0.6, 0.0}, 20, 180.0), cfg);
  EXPECT_EQ(r.params.lambda_per_km, 0.0);
  EXPECT_EQ(r.grid_evaluations, 160u * 41u);
}

TEST(FitTest, Errors) {
  EXPECT_THROW(fit_parameters({}), std::invalid_argument);
  EXPECT_THROW(fit_parameters({{100.0, 0.5, 1.0}, {200.0, 0.4, 1.0}}), std::invalid_argument);
  FitConfig bad;
  bad.bounds[0] = {2e-4, 1e-5};
  EXPECT_THROW(fit_parameters(synthetic({7.9e-5, 0.6, 0.0}, 10, 180.0), bad), std::invalid_argument);
}

TEST(FitTest, MaxSweepsFlag) {
  FitConfig cfg;
  cfg.max_sweeps = 1;
  cfg.grid = {5, 5, 5};
  const auto r = fit_parameters(synthetic({7.9e-5, 0.6, 1e-4}, 30, 180.0), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.sweeps, 1);
  EXPECT_LE(r.sse, r.grid_best_sse);
}

}  // namespace
}  // namespace dqs::neutrino
