#include "catch_amalgamated.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("tanaka_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Run run(const std::string& args, const std::string& env = "") {
  fs::path o = scratch() / "stdout", e = scratch() / "stderr";
  std::string cmd = env + (env.empty() ? "" : " ") + TANAKA_CLI_PATH + std::string(" ") + args + " >" + o.string() +
                    " 2>" + e.string();
  int st = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

Json run_json(const std::string& args, int expect_code = 0) {
  Run r = run(args + " --format json");
  INFO(args << "\n" << r.err);
  REQUIRE(r.code == expect_code);
  return Json::parse(r.out);
}

}  // namespace

TEST_CASE("prolong reports dimensions and levels") {
  Json j = run_json("prolong --family skn --k 0 --n 6");
  CHECK(j["basis"].size() == 11);
  CHECK(j["terminated"] == true);
  CHECK(j["levels"].back() == Json({{"dim", 2}, {"weight", 1}}));
  CHECK(run_json("prolong --family symp --n 5")["basis"].size() == 14);
  // a cap below the top level leaves the run unterminated
  Json capped = run_json("prolong --family symp --n 5 --max-level 2", 2);
  CHECK(capped["terminated"] == false);
}

TEST_CASE("family output feeds back into prolong") {
  fs::path f = scratch() / "s16.json";
  REQUIRE(run("family --family skn --k 1 --n 6 --format json --out " + f.string()).code == 0);
  Json a = Json::parse(slurp(f));
  CHECK(a["basis"].size() == 7);  // 11 minus levels 0 and 1
  Json j = run_json("prolong --in " + f.string());
  CHECK(j["basis"].size() == 11);
  // the relative --out path lands under TANAKA_OUT_DIR
  REQUIRE(run("family --family monge1 --n 6 --format json --out m1.json", "TANAKA_OUT_DIR=" + scratch().string()).code ==
          0);
  Json m = Json::parse(slurp(scratch() / "m1.json"));
  CHECK(m["coords"].size() == 6);
  CHECK(m["fields"].size() == 2);
}

TEST_CASE("malformed algebra files are usage errors with a position") {
  fs::path f = scratch() / "bad.json";
  std::ofstream(f) << "{\n  \"basis\": [\n    {\"label\": \"x\" \"weight\": -1}\n  ]\n}\n";
  Run r = run("prolong --in " + f.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("line 3, column") != std::string::npos);
  std::ofstream(f, std::ios::trunc) << R"({"basis":[{"label":"x","weight":-1}],"brackets":[{"i":0,"j":0,"result":[]}]})";
  r = run("prolong --in " + f.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("brackets[0]") != std::string::npos);
  CHECK(run("prolong --in " + (scratch() / "missing.json").string()).code == 3);
}

TEST_CASE("normcheck decisions") {
  Json e = run_json("normcheck --family skn --k 2 --n 6");
  CHECK(e["exists"] == true);
  CHECK(e["witness"]["complement_dim"] == 215);
  CHECK(e["dim_c2"].get<int>() - e["dim_image"].get<int>() == 215);

  Json ne = run_json("normcheck --family skn --k 1 --n 6");
  CHECK(ne["exists"] == false);
  REQUIRE(ne.contains("certificate"));
  CHECK(ne["certificate"]["eigenvalue"] == "8");
  CHECK(ne["certificate"]["chain"].size() == 3);
  CHECK(ne["obstruction"]["result"].size() > 0);

  CHECK(run_json("normcheck --family skn --k 0 --n 7")["exists"] == false);
  CHECK(run_json("normcheck --family symp --n 6")["status"] == "exists");
  CHECK(run("normcheck --family skn --k 3 --n 6").code == 3);
}

TEST_CASE("vf growth, symbol and involutivity") {
  Json g = run_json("vf growth --family monge1 --n 6 --seed 0");
  CHECK(g["growth"] == Json({2, 3, 5, 6}));
  CHECK(g["equiregular"] == true);

  Json s = run_json("vf symbol --family flat-skn --k 0 --n 6 --prolong 1 --recognize 1,6");
  CHECK(s["recognized"] == "true");
  Json wrong = run_json("vf symbol --family flat-skn --k 0 --n 6 --prolong 1 --recognize 2,6", 1);
  CHECK(wrong["recognized"] == "false");

  Json inv = run_json("vf involutivity --family flat-skn --k 0 --n 6 --prolong 2");
  CHECK(inv["ok"] == true);
  CHECK(inv["points"].size() == 3);
  CHECK(inv["tower"]["levels"].size() == 2);

  // the flat model at the origin, with coordinates named by the symbol basis
  Json o = run_json("vf growth --family flat-skn --k 0 --n 6 --point X=0");
  CHECK(o["growth"] == Json({2, 3, 5, 6}));
  CHECK(run("vf growth --family flat-skn --k 0 --n 6 --point q=1").code == 3);
  CHECK(run("vf growth --family flat-skn --k 0 --n 6 --point X=1/0").code == 3);
  CHECK(run("vf involutivity --family monge1 --n 6").code == 3);
  CHECK(run("vf spin --family monge1 --n 6").code == 3);
}

TEST_CASE("verify-paper reports") {
  Run a = run("verify-paper --n 6 --format json");
  REQUIRE(a.code == 0);
  Json j = Json::parse(a.out);
  REQUIRE(j["checks"].size() > 10);
  std::vector<std::string> ids;
  for (const auto& c : j["checks"]) {
    CHECK(c["status"] == "pass");
    CHECK(c["ms"].is_null());
    CHECK(!c["anchor"].get<std::string>().empty());
    ids.push_back(c["id"]);
  }
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(run("verify-paper --n 6 --format json").out == a.out);

  Json t = run_json("verify-paper --n 6 --timings");
  for (const auto& c : t["checks"]) CHECK(c["ms"].is_number_integer());

  Json five = run_json("verify-paper --n 5");
  bool skipped = false, g2 = false;
  for (const auto& c : five["checks"]) {
    if (c["status"] == "skipped" && c["witness"] == "n=5 parabolic case out of scope") skipped = true;
    if (c["id"] == "prolong.g2" && c["status"] == "pass") g2 = true;
  }
  CHECK(skipped);
  CHECK(g2);

  Run nine = run("verify-paper --n 9");
  CHECK(nine.code == 3);
  CHECK(nine.err.find("range error") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run("").code == 3);
  CHECK(run("prolong --family skn").code == 3);
  CHECK(run("prolong --family skn --n 6 --k 7").code == 3);
  CHECK(run("prolong --family nope --n 6").code == 3);
  CHECK(run("verify-paper --n 6 --format yaml").code == 3);
  CHECK(run("--help").code == 0);
}
