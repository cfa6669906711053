#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "holepoint/cli/config.hpp"
#include "holepoint/cli/report.hpp"
#include "holepoint/cli/run.hpp"
#include "holepoint/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace holepoint;
using namespace holepoint::cli;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("holepoint_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode config_error(const json& j) {
  try {
    ExperimentConfig::from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

json predict_config() {
  return {{"command", "predict"},
          {"local_data",
           {{"N", 2},
            {"P", {0.3, 0.0}},
            {"u0P", 0.2275},
            {"grad0P", {-0.15, 0.0}},
            {"hess0P", {-0.5, 0.0, 0.0, -0.5}},
            {"fu0P", 1.0},
            {"HPP", -0.015010}}},
          {"eps_list", {0.04, 0.02, 0.01}}};
}

int run_quiet(const json& j, Command cmd, const fs::path& out) {
  std::ostringstream o, e;
  return run(ExperimentConfig::from_json(j), cmd, {out.string(), true}, o, e);
}

}  // namespace

TEST(Config, RejectsUnknownKeysAtEveryLevel) {
  EXPECT_EQ(config_error({{"bogus", 1}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"domain", {{"kind", "disc"}, {"radius2", 1.0}}}}),
            ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"report", {{"verbose", true}}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"domain", {{"hole", {{"centre", {0, 0}}}}}}}), ErrorCode::ConfigInvalid);
}

TEST(Config, ValidatesValues) {
  EXPECT_EQ(config_error({{"eps_list", {0.0}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"eps_list", {1.5}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"eps_list", {0.1, 0.1}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"eps_list", {"0.1"}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"h", "eps*4"}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"h", -0.1}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"domain", {{"kind", "square"}}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"domain", {{"kind", "ellipse"}, {"a", 1.5}}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"domain", {{"hole", {{"center", {2.0, 0.0}}}}}}}),
            ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"nonlinearity", {{"kind", "custom"}, {"form", "cubic"}}}}),
            ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"command", "plot"}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"radial", {{"N", 1}}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"radial", {{"n", -5}}}}), ErrorCode::ConfigInvalid);
  EXPECT_EQ(config_error({{"seed", 1.5}}), ErrorCode::ConfigInvalid);
}

TEST(Config, RoundTripsThroughJson) {
  json j = predict_config();
  j["h"] = "eps/4";
  j["domain"] = {{"kind", "ellipse"}, {"a", 1.5}, {"b", 1.0}, {"hole", {{"center", {0.0, 0.0}}}}};
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  EXPECT_DOUBLE_EQ(c.h.at(0.04), 0.01);
  const ExperimentConfig again = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(again.to_json(), c.to_json());
}

TEST(Config, MissingFileIsIoError) {
  try {
    load_config("/nonexistent/holepoint.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(Report, FormatsWithSeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(-2.5e-7).find(','), std::string::npos);
}

TEST(Report, EmptyReportHasHeaderOnly) {
  const fs::path dir = scratch("empty");
  SweepReport rep;
  rep.command = "sweep";
  emit_csv(rep, (dir / "r.csv").string());
  EXPECT_EQ(slurp(dir / "r.csv"),
            "eps,h,crit_count,index_sum,sad_x,sad_y,pred_x,pred_y,err_abs,err_rel,align_deg,"
            "runtime_s\n");
}

TEST(Report, MissingValuesLeaveEmptyCells) {
  const fs::path dir = scratch("cells");
  SweepReport rep;
  SweepRecord r;
  r.eps = 0.01;
  r.h = 0.5;
  r.error = "NoConvergence: test";
  rep.records.push_back(r);
  emit_csv(rep, (dir / "r.csv").string());
  const std::string text = slurp(dir / "r.csv");
  EXPECT_NE(text.find("\n0.01,0.5,,,,,,,,,,0\n"), std::string::npos) << text;
}

TEST(Report, JsonRoundTrip) {
  const fs::path dir = scratch("json");
  SweepReport rep;
  rep.command = "sweep";
  rep.version = "v";
  rep.build_hash = "abc";
  SweepRecord r;
  r.eps = 0.02;
  r.h = 0.005;
  r.crit_count = 2;
  r.index_sum = 0;
  r.audit = "PASS";
  r.saddle = Vec2{0.5, 1e-17};
  r.err_rel = 0.123456789012345678;
  r.runtime_s = 1.25;
  rep.records.push_back(r);
  rep.records.push_back(SweepRecord{});
  rep.records.back().error = "Oops: x";
  FitRecord f;
  f.law = "eps^(1/2)";
  f.exponent = 0.5;
  f.c = {1.0, 0.0};
  f.residual = 1e-3;
  f.c_predicted = {1.5, 0.0};
  rep.fit = f;
  emit_json(rep, (dir / "r.json").string());
  const SweepReport back = read_json_report((dir / "r.json").string());
  EXPECT_EQ(back.to_json(), rep.to_json());
  EXPECT_TRUE(back.has_failures());
}

TEST(Run, PredictIsFastAndWritesJson) {
  const fs::path dir = scratch("predict");
  json j = predict_config();
  j["output"] = {{"json", "p.json"}};
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(run_quiet(j, Command::Predict, dir), 0);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 1.0);
  const json out = json::parse(slurp(dir / "p.json"));
  ASSERT_EQ(out["records"].size(), 3u);
  for (const auto& rec : out["records"]) {
    EXPECT_TRUE(rec["error"].is_null());
    EXPECT_FALSE(rec["prediction"].is_null());
  }
}

TEST(Run, ConfigProblemsExitOne) {
  const fs::path dir = scratch("exit1");
  // predict without local data
  EXPECT_EQ(run_quiet({{"eps_list", {0.1}}}, Command::Predict, dir), 1);
  // command in the file disagrees with the one requested
  EXPECT_EQ(run_quiet(predict_config(), Command::Sweep, dir), 1);
}

TEST(Run, FailedEpsExitsTwoAndKeepsGoing) {
  // h = 0.05 resolves a hole of radius 0.3 but not one of radius 0.1.
  const fs::path dir = scratch("exit2");
  json j{{"command", "solve"},
         {"domain", {{"kind", "disc"}, {"hole", {{"center", {0.0, 0.0}}}}}},
         {"eps_list", {0.1, 0.3}},
         {"h", 0.05},
         {"report", {{"fields", false}}}};
  EXPECT_EQ(run_quiet(j, Command::Solve, dir), 2);
  const SweepReport rep = read_json_report((dir / "report.json").string());
  ASSERT_EQ(rep.records.size(), 2u);
  int failed = 0;
  for (const auto& r : rep.records) failed += r.error.has_value();
  EXPECT_EQ(failed, 1);
}

TEST(Run, NonexistentSolutionIsRecorded) {
  // Above the fold of the disc Gelfand problem no solution exists.
  const fs::path dir = scratch("gelfand");
  json j{{"command", "solve"},
         {"domain", {{"kind", "disc"}, {"hole", {{"center", {0.3, 0.0}}}}}},
         {"nonlinearity", {{"kind", "custom"}, {"form", "exponential"}, {"a", 5.0}, {"b", 1.0}}},
         {"eps_list", {0.2}},
         {"h", 0.025},
         {"report", {{"fields", false}}}};
  EXPECT_EQ(run_quiet(j, Command::Solve, dir), 2);
  const SweepReport rep = read_json_report((dir / "report.json").string());
  ASSERT_EQ(rep.records.size(), 1u);
  ASSERT_TRUE(rep.records[0].error.has_value());
  const std::string& what = *rep.records[0].error;
  EXPECT_TRUE(what.rfind("NewtonStalled", 0) == 0 || what.rfind("NoConvergence", 0) == 0) << what;
}

TEST(Run, RadialReportsAreByteIdentical) {
  json j{{"command", "radial-sweep"},
         {"eps_list", {1e-2, 1e-3}},
         {"radial", {{"N", 3}, {"n", 2000}}},
         {"report", {{"runtime", false}}}};
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run_quiet(j, Command::RadialSweep, a), 0);
  ASSERT_EQ(run_quiet(j, Command::RadialSweep, b), 0);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "report.csv"), slurp(b / "report.csv"));
}

TEST(Run, CritpointsReportsAreByteIdentical) {
  json j{{"command", "critpoints"},
         {"domain", {{"hole", {{"center", {0.3, 0.0}}}}}},
         {"eps_list", {0.08}},
         {"h", "eps/4"},
         {"report", {{"runtime", false}}}};
  const fs::path a = scratch("detc_a"), b = scratch("detc_b");
  ASSERT_EQ(run_quiet(j, Command::Critpoints, a), 0);
  ASSERT_EQ(run_quiet(j, Command::Critpoints, b), 0);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "report.csv"), slurp(b / "report.csv"));
}
