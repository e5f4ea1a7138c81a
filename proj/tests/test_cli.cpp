#include "rogue/cli.hpp"

#include <doctest.h>

#include <sstream>

using namespace rogue;
using namespace rogue::cli;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_config(const RunConfig& c) {
  std::ostringstream out, err;
  int code = run(c, out, err);
  return {code, out.str(), err.str()};
}

std::string params_file(const char* name) { return std::string(ROGUE_PARAMS_DIR) + "/" + name; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("verify reports identically zero") {
    RunConfig c;
    c.command = "verify";
    c.params_path = params_file("center_0_0.json");
    for (int order : {1, 2}) {
      c.order = order;
      Outcome o = run_config(c);
      CHECK(o.code == kOk);
      Json j = Json::parse(o.out);
      CHECK(j["status"] == "identically zero");
      CHECK(j["config"]["order"] == order);
    }
  }

  TEST_CASE("typeset order-2 ansatz fails verification") {
    RunConfig c;
    c.command = "verify";
    c.order = 2;
    c.form = "printed";
    c.params_path = params_file("center_100_100.json");
    Outcome o = run_config(c);
    CHECK(o.code == kVerificationFailed);
    CHECK(Json::parse(o.out)["status"] == "nonzero");
  }

  TEST_CASE("exit codes for bad input") {
    RunConfig c;
    c.command = "verify";
    c.params_path = params_file("singular.json");
    CHECK(run_config(c).code == kSingular);
    c.params_path = params_file("missing.json");
    CHECK(run_config(c).code == kUsage);
    c.params_path.clear();
    c.order = 4;
    CHECK(run_config(c).code == kUsage);
    c.order = 1;
    c.command = "bogus";
    Outcome o = run_config(c);
    CHECK(o.code == kUsage);
    CHECK(o.err.find("unknown command") != std::string::npos);
    c.command = "field";
    c.grid = "1x5";
    CHECK(run_config(c).code == kUsage);
    c.grid = "5x5";
    c.xrange = "3:1";
    CHECK(run_config(c).code == kUsage);
    c.xrange = "-1:1";
    c.form = "sideways";
    CHECK(run_config(c).code == kUsage);
    c.form = "corrected";
    c.order = 2;
    c.free = "z21";
    CHECK(run_config(c).code == kUsage);
  }

  TEST_CASE("field output is reproducible") {
    RunConfig c;
    c.command = "field";
    c.order = 2;
    c.grid = "21x11";
    Outcome a = run_config(c);
    c.threads = 1;
    Outcome b = run_config(c);
    CHECK(a.code == kOk);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("# order=2 ", 0) == 0);
  }

  TEST_CASE("solve") {
    RunConfig c;
    c.command = "solve";
    Outcome o = run_config(c);
    REQUIRE(o.code == kOk);
    Json j = Json::parse(o.out);
    CHECK(j["result"]["converged"] == true);
    CHECK(j["max_relative_error"].get<double>() < 1e-10);

    c.start = "z0=1";
    CHECK(run_config(c).code == kUsage);
    c.start.clear();
    c.max_iter = 1;
    c.start = "z0=-9,z1=9";
    CHECK(run_config(c).code == kNotConverged);
  }

  TEST_CASE("extrema") {
    RunConfig c;
    c.command = "extrema";
    c.grid = "101x101";
    Outcome o = run_config(c);
    REQUIRE(o.code == kOk);
    Json j = Json::parse(o.out);
    CHECK(j["counts"]["max"] == 1);
    CHECK(j["counts"]["min"] == 2);
    CHECK(std::fabs(j["extrema"][0]["u"].get<double>() - 7.0 / 3.0) < 1e-9);
  }

  TEST_CASE("fdcheck") {
    RunConfig c;
    c.command = "fdcheck";
    c.points = "0.5,0.5,0;1,-1,0.2";
    Outcome o = run_config(c);
    REQUIRE(o.code == kOk);
    Json j = Json::parse(o.out);
    REQUIRE(j["points"].size() == 2);
    for (const auto& pt : j["points"]) {
      REQUIRE(pt["table"].size() == 3);
      CHECK(pt["table"][1]["ratio"].get<double>() > 3);
    }
    c.steps = "0.1,-1";
    CHECK(run_config(c).code == kUsage);
  }

  TEST_CASE("derive") {
    RunConfig c;
    c.command = "derive";
    c.order = 1;
    Outcome o = run_config(c);
    REQUIRE(o.code == kOk);
    Json j = Json::parse(o.out);
    CHECK(j["verification"]["pass"] == true);
    CHECK(j["clearing_power"] == 6);
    CHECK(j["numeric"]["converged"] == true);
  }
}
