#include "thermopiezo/cli.hpp"
#include "thermopiezo/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace thermopiezo;
namespace fs = std::filesystem;

namespace {

const fs::path kSamples = SAMPLES_DIR;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "thermopiezo");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "thermopiezo_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_json(const std::string &name, const json &j) {
  const auto p = scratch(name);
  std::ofstream(p) << j.dump();
  return p;
}

json fixture_json() { return to_json(default_fixture()); }

} // namespace

TEST(MaterialIO, IsotropicRoundTrip) {
  const auto mv = load_material(kSamples / "default_material.json");
  ASSERT_TRUE(std::holds_alternative<IsoMaterial>(mv));
  EXPECT_EQ(std::get<IsoMaterial>(mv), default_fixture());
  EXPECT_EQ(std::get<IsoMaterial>(parse_material(fixture_json())), default_fixture());
}

TEST(MaterialIO, MissingRhoIsNamed) {
  auto j = fixture_json();
  j.erase("rho");
  try {
    parse_material(j);
    FAIL();
  } catch (const MissingFieldError &e) {
    EXPECT_EQ(e.field(), "rho");
  }
}

TEST(MaterialIO, Alpha4DefaultsToZero) {
  auto j = fixture_json();
  j.erase("alpha4");
  EXPECT_EQ(std::get<IsoMaterial>(parse_material(j)).alpha4, 0.0);
}

TEST(MaterialIO, UnknownKeyRejected) {
  auto j = fixture_json();
  j["lamda"] = 1.0;
  EXPECT_THROW(parse_material(j), ParseError);
}

TEST(MaterialIO, AnisotropicSampleLoadsAndIsSymmetric) {
  const auto mv = load_material(kSamples / "anisotropic_material.json");
  ASSERT_TRUE(std::holds_alternative<AnisoMaterial>(mv));
  const auto &m = std::get<AnisoMaterial>(mv);
  EXPECT_DOUBLE_EQ(m.a11(0, 0, 0, 0), 3.5);
  EXPECT_TRUE(check_numeric(m).all_pass());
}

TEST(MaterialIO, AsymmetricA11Rejected) {
  auto j = to_json(expand_isotropic(default_fixture()));
  j["a11"][FullTensor<4>::offset(0, 1, 0, 0)] = 0.7;
  EXPECT_THROW(parse_material(j), SymmetryViolationError);
}

TEST(MaterialIO, WrongTensorLengthRejected) {
  auto j = to_json(expand_isotropic(default_fixture()));
  j["a33"] = json::array({1, 2, 3});
  EXPECT_THROW(parse_material(j), ParseError);
}

TEST(MaterialIO, SyntaxErrorReportsPosition) {
  const auto p = scratch("broken.json");
  std::ofstream(p) << "{\n  \"kind\": \"isotropic\",\n  \"rho\": 1.0,,\n}";
  try {
    load_material(p);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(StateIO, UnknownKeyNamed) {
  try {
    parse_state(json{{"thetta", 1.0}});
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("thetta"), std::string::npos);
  }
}

TEST(SimConfigIO, ProfilesAndSizes) {
  const auto cfg = load_sim_config(kSamples / "decay.json");
  EXPECT_EQ(cfg.grid.N, 64);
  EXPECT_EQ(cfg.steps, 2000);
  EXPECT_EQ(cfg.initial.u0.size(), 64);
  EXPECT_TRUE(cfg.initial.thetaDot0.has_value());
  EXPECT_EQ(cfg.initial.u0, random_clamped_profile(cfg.grid, 1, 4));

  json bad{{"material", fixture_json()}, {"grid", {{"N", 10}}}, {"dt", 1e-3}, {"steps", 1},
           {"initial", {{"u0", json::array({1, 2})}}}};
  EXPECT_THROW(parse_sim_config(bad), ParseError);
  bad["initial"] = {{"u0", {{"profile", "square"}}}};
  EXPECT_THROW(parse_sim_config(bad), ParseError);
  bad["initial"] = json::object();
  bad["grid"]["N"] = 4;
  EXPECT_THROW(parse_sim_config(bad), ConfigError);
}

TEST(TraceCsv, HeaderAndPrecision) {
  std::ostringstream os;
  write_trace_csv(os, {TraceRow{0, 0.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0}});
  const auto s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "step,time,lyapunov,dissipation,max_u,max_theta,max_phi");
  EXPECT_NE(s.find("0.33333333333333331"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Exit-code contract

TEST(CliCheck, DefaultFixturePasses) {
  const auto r = invoke({"check", (kSamples / "default_material.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["all_pass"].get<bool>());
  EXPECT_TRUE(j["theorem2_hypotheses"].get<bool>());
}

TEST(CliCheck, FlippedMuFailsW1) {
  const auto r = invoke({"check", (kSamples / "mu_flipped.json").string()});
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.out);
  bool flagged = false;
  for (const auto &c : j["conditions"])
    if (c["name"] == "mu >= 0") flagged = !c["pass"].get<bool>() && c["group"] == "W1";
  EXPECT_TRUE(flagged);
}

TEST(CliCheck, AnisotropicUsesNumericRoute) {
  const auto r = invoke({"check", (kSamples / "anisotropic_material.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["method"], "numeric");
}

TEST(CliCheck, MissingFileAndBadArgs) {
  EXPECT_EQ(invoke({"check", "/nonexistent/material.json"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"check", (kSamples / "default_material.json").string(), "--tol", "abc"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(CliCheck, OutFileAndTolerance) {
  const auto p = scratch("report.json");
  const auto r = invoke({"check", (kSamples / "default_material.json").string(), "--out", p.string(), "--tol", "1e-8"});
  EXPECT_EQ(r.code, 0);
  std::ifstream in(p);
  const auto j = json::parse(in);
  EXPECT_DOUBLE_EQ(j["tolerance"].get<double>(), 1e-8);
}

TEST(CliCheck, EnvironmentTolerance) {
  ::setenv("THERMOPIEZO_TOL", "1e-6", 1);
  auto r = invoke({"check", (kSamples / "default_material.json").string()});
  EXPECT_DOUBLE_EQ(json::parse(r.out)["tolerance"].get<double>(), 1e-6);
  ::setenv("THERMOPIEZO_TOL", "tiny", 1);
  r = invoke({"check", (kSamples / "default_material.json").string()});
  EXPECT_EQ(r.code, 2);
  ::unsetenv("THERMOPIEZO_TOL");
}

TEST(CliEval, ZeroStateGivesZeroResponse) {
  const auto r = invoke({"eval", (kSamples / "default_material.json").string(), (kSamples / "zero_state.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  for (const auto &part : j["response"])
    if (part.is_array())
      for (const auto &v : part) EXPECT_EQ(v.get<double>(), 0.0);
  EXPECT_EQ(j["response"]["rhoEta"].get<double>(), 0.0);
  EXPECT_EQ(j["forms"]["lyapunov_density"].get<double>(), 0.0);
}

TEST(CliEval, GradThetaOnlyChangesHeatFlux) {
  const auto r =
      invoke({"eval", (kSamples / "default_material.json").string(), (kSamples / "grad_theta_state.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out)["response"];
  for (const auto &key : {"tau", "mu", "sigma", "Q"})
    for (const auto &v : j[key]) EXPECT_EQ(v.get<double>(), 0.0) << key;
  EXPECT_EQ(j["rhoEta"].get<double>(), 0.0);
  EXPECT_NE(j["q"][0].get<double>(), 0.0);
}

TEST(CliEval, UnknownStateKeyExits2) {
  const auto p = write_json("bad_state.json", json{{"temperature", 1.0}});
  const auto r = invoke({"eval", (kSamples / "default_material.json").string(), p.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("temperature"), std::string::npos);
}

TEST(CliSimulate, ZeroDataTraceIsZero) {
  const auto csv = scratch("zero.csv");
  const auto r = invoke({"simulate", (kSamples / "zero_data.json").string(), "--out", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) EXPECT_EQ(std::stod(cell), 0.0);
  }
  EXPECT_EQ(rows, 101);
}

TEST(CliSimulate, EntropyInitialisedRunDecays) {
  const auto csv = scratch("entropy.csv");
  const auto r = invoke({"simulate", (kSamples / "entropy_init.json").string(), "--out", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_LT(j["final_lyapunov"].get<double>(), j["initial_lyapunov"].get<double>());
  EXPECT_TRUE(j["monotone"].get<bool>());
}

TEST(CliSimulate, InadmissibleNeedsForce) {
  const auto csv = scratch("forced.csv");
  auto r = invoke({"simulate", (kSamples / "inadmissible.json").string(), "--out", csv.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(json::parse(r.out)["admissibility"]["all_pass"].get<bool>());
  r = invoke({"simulate", (kSamples / "inadmissible.json").string(), "--out", csv.string(), "--force"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliSimulate, BadConfigExits2) {
  const auto p = write_json("bad_sim.json", json{{"material", fixture_json()}, {"grid", {{"N", 3}}}, {"dt", 1e-3},
                                                 {"steps", 1}});
  EXPECT_EQ(invoke({"simulate", p.string(), "--out", scratch("x.csv").string()}).code, 2);
  EXPECT_EQ(invoke({"simulate", "/nonexistent.json"}).code, 2);
}

TEST(CliOracle, ZeroSamples) {
  const auto r = invoke({"oracle", "--samples", "0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("0 tested"), std::string::npos);
}

TEST(CliOracle, NegativeSamplesIsUsageError) { EXPECT_EQ(invoke({"oracle", "--samples", "-5"}).code, 2); }

TEST(CliOracle, SmallSweepReportsSeed) {
  const auto r = invoke({"oracle", "--samples", "200", "--seed", "3"});
  EXPECT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 3u);
  EXPECT_TRUE(j["all_agree"].get<bool>());
}
