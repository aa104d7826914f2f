#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "dosc/io.hpp"

using namespace dosc;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  const fs::path dir = fs::path(DOSC_TEST_TMP) / "cli";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string phase(const std::string& name) { return (fs::path(DOSC_TEST_DATA) / "phases" / name).string(); }

Result run(const std::string& args, const std::string& cache = "cli_cache") {
  const fs::path dir = work_dir();
  const std::string cmd = "cd '" + dir.string() + "' && OSC_CACHE_DIR='" + (dir / cache).string() + "' '" +
                          DOSC_CLI_PATH + "' " + args + " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

std::string body_without_manifest_line(const fs::path& p) {
  const std::string s = slurp(p);
  return s.substr(s.find('\n') + 1);
}

}  // namespace

TEST_CASE("cli analyze") {
  Result r = run("analyze --phase " + phase("model_n3.json"));
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["d"] == "3/2");
  CHECK(j["regime"] == "LA");

  r = run("analyze --phase " + phase("nla_m2_n7_polynomial.json"));
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["m"] == 2);
  CHECK(j["n"] == 7);
  CHECK(j["regime"] == "NLA");

  r = run("analyze --phase " + phase("x2_cubed.json"));
  CHECK(r.code == 2);
  CHECK(r.err.find("NotDType") != std::string::npos);
}

TEST_CASE("cli integrate") {
  fs::remove_all(work_dir() / "int_cache");
  Result r = run("integrate --phase " + phase("model_n3.json") + " --lambda 1e-6", "int_cache");
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["abs"].get<double>() == doctest::Approx(0.5625).epsilon(1e-8));

  const std::string args = "integrate --phase " + phase("model_n3.json") + " --lambda 300 --s1 0.2 --s2 -0.1";
  const Result first = run(args, "int_cache");
  const Result second = run(args, "int_cache");
  REQUIRE(first.code == 0);
  CHECK(first.out == second.out);
  CHECK(slurp(work_dir() / "int_cache" / "samples.csv").find(",300,") != std::string::npos);

  r = run("integrate --phase " + phase("model_n3.json") + " --lambda 100 --s1 0.1 --engine both", "int_cache");
  REQUIRE(r.code == 0);
  const Json both = Json::parse(r.out);
  CHECK(both["difference"].get<double>() < 1e-9);
  CHECK(both["direct"]["engine"] == "DIRECT2D");
  CHECK(both["reduced"]["engine"] == "REDUCED1D");

  r = run("integrate --phase " + phase("model_n3.json") +
          " --lambda 1000 --s1 100 --engine direct --max-depth 10", "int_cache");
  CHECK(r.code == 3);
  CHECK(Json::parse(r.out).contains("re"));

  r = run("integrate --phase " + phase("model_n3.json") + " --lambda -1", "int_cache");
  CHECK(r.code == 1);
}

TEST_CASE("cli rejects malformed phase files with exit code 1") {
  const std::regex anchored(R"(error: Config: .+\.json:[0-9]+: )");
  int count = 0;
  for (const auto& e : fs::directory_iterator(fs::path(DOSC_TEST_DATA) / "malformed")) {
    const Result r = run("analyze --phase " + e.path().string());
    CHECK_MESSAGE(r.code == 1, e.path().string());
    CHECK_MESSAGE(std::regex_search(r.err, anchored), r.err);
    ++count;
  }
  CHECK(count == 20);
}

TEST_CASE("cli grid errors") {
  CHECK(run("decay --phase " + phase("model_n3.json") + " --levels 0 --out d.csv").code == 1);
  CHECK(run("randol --phase " + phase("model_n3.json") + " --gamma 0.5 --out r.csv").code == 1);
  CHECK(run("lp-probe --phase " + phase("model_n3.json") + " --q-grid 1:2 --out r.csv").code == 1);
  CHECK(run("bogus").code == 1);
}

TEST_CASE("cli decay writes CSV and manifest") {
  const Result r = run("decay --phase " + phase("model_n3.json") + " --lambda0 64 --levels 6 --out decay/d.csv");
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["slope"].get<double>() == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
  const std::string csv = slurp(work_dir() / "decay" / "d.csv");
  CHECK(csv.rfind("# manifest: d.manifest.json\nlambda,abs_I,fit\n", 0) == 0);
  const Json m = Json::parse(slurp(work_dir() / "decay" / "d.manifest.json"));
  CHECK(m["command"] == "decay");
  CHECK(m["outputs"][0] == "d.csv");
}

TEST_CASE("cli lp-probe and report replay from the cache") {
  fs::remove_all(work_dir() / "lp_cache");
  const std::string args = "lp-probe --phase " + phase("model_n3.json") +
                           " --jmin 2 --jmax 7 --cells-per-annulus 4 --levels 7 --q-grid 1:12:0.5 --out lp/lp.csv";
  const Result r = run(args, "lp_cache");
  REQUIRE((r.code == 0 || r.code == 4));
  const Json rep = Json::parse(r.out);
  CHECK(rep["p_star"] == "4");
  CHECK(rep["regime"] == "LA");
  const std::string field = slurp(work_dir() / "lp" / "lp.csv");
  CHECK(field.find("j,q,S_j\n") != std::string::npos);

  const Result again = run("report --manifest lp/lp.manifest.json --out lp/replay.csv", "lp_cache");
  CHECK(again.code == r.code);
  CHECK(again.out == r.out);
  CHECK(body_without_manifest_line(work_dir() / "lp" / "replay.csv") ==
        body_without_manifest_line(work_dir() / "lp" / "lp.csv"));

  const Result offline = run("report --manifest lp/lp.manifest.json --out lp/x.csv", "empty_cache");
  CHECK(offline.code == 1);
  CHECK(offline.err.find("offline") != std::string::npos);
}

TEST_CASE("cli randol field columns") {
  const Result r = run("randol --phase " + phase("model_n3.json") +
                       " --jmin 2 --jmax 3 --cells-per-annulus 4 --levels 5 --out field/f.csv");
  REQUIRE(r.code == 0);
  const std::string csv = slurp(work_dir() / "field" / "f.csv");
  CHECK(csv.find("s1,s2,rho,M_gamma,argmax_lambda,flag\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 8);
}

TEST_CASE("cli NLA probe predicts 7/2") {
  const Result r = run("lp-probe --phase " + phase("nla_m2_n7.json") +
                       " --jmin 3 --jmax 8 --cells-per-annulus 4 --levels 5 --q-grid 1:10:0.5 --out nla/lp.csv");
  REQUIRE((r.code == 0 || r.code == 4));
  const Json rep = Json::parse(r.out);
  CHECK(rep["p_star"] == "7/2");
  CHECK(rep["regime"] == "NLA");
}
