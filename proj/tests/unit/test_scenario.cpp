#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qlitho/errors.hpp"
#include "qlitho/report.hpp"
#include "qlitho/scenario.hpp"

using namespace qlitho;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qlitho_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool mentions(const ValidationError& e, const std::string& text) {
  for (const auto& v : e.violations())
    if (v.find(text) != std::string::npos) return true;
  return false;
}

RunOptions quiet() {
  RunOptions o;
  o.write_files = false;
  return o;
}

}  // namespace

TEST(ScenarioParse, YamlAndJsonAgree) {
  const auto y = parse_scenario("kind: gaussian_tradeoff\nparameters:\n  n_values: [2, 3]\n  r_points: 50\n", false);
  const auto j = parse_scenario(R"({"kind": "gaussian_tradeoff", "parameters": {"n_values": [2, 3], "r_points": 50}})", true);
  EXPECT_EQ(y.kind, ScenarioKind::gaussian_tradeoff);
  EXPECT_EQ(y.parameters, j.parameters);
  EXPECT_TRUE(y.parameters["r_points"].is_number_integer());
}

TEST(ScenarioParse, QuotedScalarsStayStrings) {
  const auto s = parse_scenario("kind: noon_compare\nparameters:\n  envelope: \"rect\"\n  regime: '1'\n", false);
  EXPECT_TRUE(s.parameters["regime"].is_string());
  EXPECT_EQ(s.parameters["envelope"], "rect");
}

TEST(ScenarioParse, YamlSyntaxErrorHasLineAndColumn) {
  try {
    parse_scenario("kind: noon_compare\nparameters:\n  n_photons: [1, 2\n  kappa0: 1\n", false);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GE(e.line(), 3);
    EXPECT_GE(e.column(), 1);
  }
}

TEST(ScenarioParse, JsonSyntaxErrorHasLineAndColumn) {
  try {
    parse_scenario("{\n  \"kind\": \"noon_compare\",\n  \"parameters\": {,}\n}\n", true);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 18);
  }
}

TEST(ScenarioParse, DuplicateKeyRejected) {
  try {
    parse_scenario("kind: noon_compare\nparameters:\n  kappa0: 1\n  kappa0: 2\n", false);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(ScenarioParse, TopLevelLayout) {
  EXPECT_THROW(parse_scenario("parameters: {}\n", false), ValidationError);
  EXPECT_THROW(parse_scenario("kind: nonsense\n", false), ValidationError);
  EXPECT_THROW(parse_scenario("kind: noon_compare\nextra: 1\n", false), ValidationError);
  EXPECT_THROW(parse_scenario("- 1\n- 2\n", false), ValidationError);
  const auto s = parse_scenario("kind: bound_audit\n", false);
  EXPECT_TRUE(s.parameters.is_object());
  EXPECT_EQ(default_output_dir(s), std::filesystem::path("qlitho_out") / "bound_audit");
}

TEST(ScenarioValidate, ViolationsAreAggregated) {
  const auto s = parse_scenario(
      "kind: noon_compare\nparameters:\n  kappa0: -1\n  delta_kappa: 0\n  envelope: triangle\n"
      "  grid: {points: 3}\n  colour: blue\n",
      false);
  try {
    validate_scenario(s);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_GE(e.violations().size(), 5u);
    EXPECT_TRUE(mentions(e, "kappa0"));
    EXPECT_TRUE(mentions(e, "delta_kappa"));
    EXPECT_TRUE(mentions(e, "envelope"));
    EXPECT_TRUE(mentions(e, "points per fringe"));
    EXPECT_TRUE(mentions(e, "colour"));
  }
}

TEST(ScenarioValidate, TypeErrorsReported) {
  const auto s = parse_scenario("kind: gaussian_tradeoff\nparameters:\n  n_values: two\n  r_points: 1.5\n", false);
  try {
    validate_scenario(s);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(mentions(e, "n_values"));
    EXPECT_TRUE(mentions(e, "r_points"));
  }
}

TEST(ScenarioValidate, UnitsRules) {
  EXPECT_THROW(validate_scenario(parse_scenario("kind: rotation_audit\nparameters: {units: si}\n", false)),
               ValidationError);
  EXPECT_THROW(validate_scenario(parse_scenario(
                   "kind: rotation_audit\nparameters: {wavelength: 2.0}\n", false)),
               ValidationError);
  const auto eff = validate_scenario(
      parse_scenario("kind: noon_compare\nparameters: {units: si, wavelength: 5.0e-7}\n", false));
  EXPECT_NEAR(eff["kappa0"].get<double>(), 1.0 / 5.0e-7, 1e-3);
  EXPECT_NEAR(eff["grid"]["x_max"].get<double>(), 4.0 * 3.141592653589793 * 5.0e-7, 1e-18);
}

TEST(ScenarioValidate, EffectiveParametersEchoDefaults) {
  const auto eff = validate_scenario(parse_scenario("kind: bound_audit\n", false));
  EXPECT_EQ(eff["draws"], 50);
  EXPECT_EQ(eff["seed"], 7);
  EXPECT_EQ(eff["units"], "wavelength");
  EXPECT_DOUBLE_EQ(eff["tolerances"]["bound"].get<double>(), 1e-9);
}

TEST(ScenarioRun, SummaryCarriesChecks) {
  const auto s = parse_scenario("kind: gaussian_tradeoff\nparameters: {n_values: [2], r_points: 20}\n", false);
  const auto b = run_scenario(s, quiet());
  const auto* c = b.find_check("R_at_r1_N2");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->pass);
  EXPECT_DOUBLE_EQ(c->expected, 1.0);
  const auto j = summary_json(b);
  EXPECT_EQ(j["schema"], "qlitho.summary/1");
  EXPECT_EQ(j["kind"], "gaussian_tradeoff");
  EXPECT_EQ(j["all_passed"], b.all_passed());
  EXPECT_EQ(j["checks"].size(), b.checks.size());
  EXPECT_TRUE(j["files"].empty());
}

TEST(ScenarioRun, ToleranceScaleMultipliesTolerances) {
  const auto s = parse_scenario("kind: rotation_audit\nparameters: {trials: 10, curve_points: 8}\n", false);
  auto o = quiet();
  const auto base = run_scenario(s, o);
  o.tolerance_scale = 10.0;
  const auto scaled = run_scenario(s, o);
  ASSERT_EQ(base.checks.size(), scaled.checks.size());
  for (std::size_t i = 0; i < base.checks.size(); ++i)
    EXPECT_DOUBLE_EQ(scaled.checks[i].tolerance, 10.0 * base.checks[i].tolerance);
  EXPECT_EQ(summary_json(scaled)["options"]["tolerance_scale"], 10.0);
}

TEST(ScenarioRun, SeedOverrideChangesDraws) {
  const auto s = parse_scenario(
      "kind: bound_audit\nparameters: {states: [jointly_gaussian], draws: 3}\n", false);
  auto o = quiet();
  const auto a = run_scenario(s, o);
  o.seed_override = 99;
  const auto b = run_scenario(s, o);
  EXPECT_EQ(b.parameters["seed"], 99);
  EXPECT_NE(a.checks[0].measured, b.checks[0].measured);
}

TEST(ScenarioRun, PreconditionsCheckedBeforeCompute) {
  // A spectrum reaching past the light cone is rejected with the grid problem
  // in the same report.
  const auto s = parse_scenario(
      "kind: noon_compare\nparameters: {regime: nonparaxial, kappa0: 6.0, delta_kappa: 0.2, n_photons: [2]}\n",
      false);
  try {
    run_scenario(s, quiet());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
    EXPECT_TRUE(mentions(e, "light cone"));
    EXPECT_TRUE(mentions(e, "points per fringe"));
  }
}

TEST(ScenarioRun, ByteIdenticalRerun) {
  const auto dir = scratch("determinism");
  const auto s = parse_scenario(
      "kind: gaussian_pattern\nparameters: {mc_samples: 20000, oracle_draws: 2}\n", false);
  RunOptions o;
  o.output_dir = dir / "a";
  o.workers = 1;
  const auto a = run_scenario(s, o);
  o.output_dir = dir / "b";
  o.workers = 3;
  const auto b = run_scenario(s, o);
  ASSERT_EQ(a.files, b.files);
  ASSERT_FALSE(a.files.empty());
  for (const auto& f : a.files) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  std::filesystem::remove_all(dir);
}

TEST(ScenarioRun, FormatsSelectFiles) {
  const auto dir = scratch("formats");
  const auto s = parse_scenario("kind: gaussian_tradeoff\nparameters: {n_values: [2], r_points: 20}\n", false);
  RunOptions o;
  o.output_dir = dir;
  o.formats = {ReportFormat::plotdata};
  const auto b = run_scenario(s, o);
  for (const auto& f : b.files) EXPECT_EQ(std::filesystem::path(f).extension(), ".dat");
  EXPECT_FALSE(std::filesystem::exists(dir / "summary.json"));
  std::ifstream dat(dir / "fig4_R_N2.dat");
  std::string first;
  std::getline(dat, first);
  EXPECT_EQ(first.rfind("# ", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(ScenarioRun, UnwritableDirectory) {
  const auto dir = scratch("unwritable");
  {
    std::ofstream block(dir / "file");
    block << "x";
  }
  const auto s = parse_scenario("kind: gaussian_tradeoff\nparameters: {n_values: [2], r_points: 20}\n", false);
  RunOptions o;
  o.output_dir = dir / "file" / "sub";
  EXPECT_THROW(run_scenario(s, o), IoError);
  std::filesystem::remove_all(dir);
}

TEST(ScenarioLoad, FileErrorsNamePath) {
  const auto dir = scratch("load");
  {
    std::ofstream f(dir / "bad.yaml");
    f << "kind: noon_compare\nparameters: [\n";
  }
  try {
    load_scenario(dir / "bad.yaml");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.yaml:"), std::string::npos);
  }
  EXPECT_THROW(load_scenario(dir / "missing.yaml"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Report, CheckModes) {
  EXPECT_TRUE(make_check("a", 1.05, 1.0, 0.1, CheckMode::abs).pass);
  EXPECT_FALSE(make_check("a", 1.2, 1.0, 0.1, CheckMode::abs).pass);
  EXPECT_TRUE(make_check("r", 101.0, 100.0, 0.02, CheckMode::rel).pass);
  EXPECT_FALSE(make_check("r", 103.0, 100.0, 0.02, CheckMode::rel).pass);
  EXPECT_TRUE(make_check("x", 0.5, 1.0, 0.0, CheckMode::max).pass);
  EXPECT_FALSE(make_check("x", 1.5, 1.0, 0.1, CheckMode::max).pass);
  EXPECT_TRUE(make_check("n", 0.95, 1.0, 0.1, CheckMode::min).pass);
  EXPECT_FALSE(make_check("n", std::nan(""), 1.0, 1e9, CheckMode::abs).pass);
}
