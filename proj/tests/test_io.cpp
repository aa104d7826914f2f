#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "dosc/cache.hpp"
#include "dosc/io.hpp"

using namespace dosc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(DOSC_TEST_TMP) / "io";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

std::uint64_t bits(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace

TEST_CASE("hex and decimal round trips") {
  CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
  CHECK(hex64(1) == "0000000000000001");
  CHECK(parse_hex64("AF63dc4c8601ec8c") == 0xaf63dc4c8601ec8cULL);
  CHECK_THROWS_AS(parse_hex64("xyz"), Error);
  CHECK_THROWS_AS(parse_hex64("00000000000000000"), Error);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::exp2(static_cast<int>(rng() % 60) - 30);
    CHECK(bits(std::strtod(format_double(v).c_str(), nullptr)) == bits(v));
  }
}

TEST_CASE("exact decimal parsing") {
  CHECK(parse_rational_or_decimal("0.7") == Rational(7, 10));
  CHECK(parse_rational_or_decimal("-1.25") == Rational(-5, 4));
  CHECK(parse_rational_or_decimal(".5") == Rational(1, 2));
  CHECK(parse_rational_or_decimal("3/9") == Rational(1, 3));
  CHECK(parse_rational_or_decimal("2") == 2);
  CHECK_THROWS_AS(parse_rational_or_decimal("1.2.3"), Error);
  CHECK_THROWS_AS(parse_rational_or_decimal("."), Error);
  CHECK_THROWS_AS(parse_rational_or_decimal("1e-3"), Error);
}

TEST_CASE("cache record round trip") {
  CacheKey k{0x1234, 0xabcdef, 1024.0, 0.1, -1.0 / 3.0, Engine::REDUCED1D};
  OscSample s;
  s.value = {0.123456789012345678, -2.5e-17};
  s.err_est = 3.3e-13;
  const std::string line = SampleCache::format_record(k, s);
  const auto [k2, s2] = SampleCache::parse_record(line);
  CHECK(k2 == k);
  CHECK(bits(s2.value.real()) == bits(s.value.real()));
  CHECK(bits(s2.value.imag()) == bits(s.value.imag()));
  CHECK(bits(s2.err_est) == bits(s.err_est));
  CHECK(SampleCache::format_record(k2, s2) == line);
  CHECK_THROWS_AS(SampleCache::parse_record("1,2,3"), Error);
  CHECK_THROWS_AS(SampleCache::parse_record("1,2,3,4,5,6,7,8,FAST"), Error);
  CHECK_THROWS_AS(SampleCache::parse_record("1,2,x,4,5,6,7,8,DIRECT2D"), Error);
}

TEST_CASE("cache file persists and never duplicates keys") {
  const fs::path p = scratch("samples.csv");
  CacheKey k{1, 2, 8.0, 0.0, 0.0, Engine::DIRECT2D};
  OscSample s;
  s.value = {0.5, 0.25};
  {
    SampleCache c(p.string());
    CHECK(!c.lookup(k));
    c.insert(k, s);
    c.insert(k, s);
    k.lambda = 16.0;
    c.insert(k, s);
  }
  CHECK(count_lines(p) == 3);
  SampleCache again(p.string());
  CHECK(again.size() == 2);
  const auto hit = again.lookup(k);
  REQUIRE(hit);
  CHECK(hit->value == s.value);
  CHECK(hit->lambda == 16.0);
  CHECK(again.hits() == 1);

  std::ofstream(p, std::ios::app) << "garbage\n";
  CHECK_THROWS_AS(SampleCache(p.string()), Error);
}

TEST_CASE("default cache location follows OSC_CACHE_DIR") {
  const char* old = std::getenv("OSC_CACHE_DIR");
  const std::string saved = old ? old : "";
  setenv("OSC_CACHE_DIR", "/some/dir", 1);
  CHECK(SampleCache::default_path() == "/some/dir/samples.csv");
  unsetenv("OSC_CACHE_DIR");
  CHECK(SampleCache::default_path() == ".dosc_cache/samples.csv");
  if (old) setenv("OSC_CACHE_DIR", saved.c_str(), 1);
}

TEST_CASE("valid phase files") {
  const PhaseInput model = parse_phase_input(R"({"kind": "model", "n": 3, "sign": -1})");
  CHECK(model.phase.mode == PhaseMode::Model);
  CHECK(model.phase.sign == -1);
  CHECK(model.exact == Polynomial::monomial(1, 2) - Polynomial::monomial(3, 0));
  CHECK(model.amplitude.r1 == 0.5);

  const PhaseInput nf = parse_phase_input(
      R"({"kind": "normal_form", "n": 7, "m": 2, "omega0": "1/2", "beta0": 3, "b1_0": "2", "b2_0": "0"})");
  // 2 x1 (x2 - x1^2/2)^2 + 3 x1^7 expanded by hand
  Polynomial expect;
  expect.add_term(1, 2, 2);
  expect.add_term(3, 1, -2);
  expect.add_term(5, 0, Rational(1, 2));
  expect.add_term(7, 0, 3);
  CHECK(nf.exact == expect);
  CHECK(nf.amplitude.shear == 0.5);
  CHECK(nf.amplitude.shear_power == 2);

  const PhaseInput poly = parse_phase_input(
      R"({"kind": "polynomial", "terms": [[1, 2, "1"], [4, 0, "-3/6"]], "amplitude": {"kind": "smooth", "radius": 0.25}})");
  CHECK(poly.exact.coeff(4, 0) == Rational(-1, 2));
  CHECK(poly.amplitude.kind == Amplitude::Kind::SmoothBump);
  CHECK(poly.amplitude.r1 == 0.25);

  const PhaseInput dinf = parse_phase_input(R"({"kind": "model", "n": null, "sign": 1})");
  CHECK(!dinf.phase.n);
}

TEST_CASE("malformed phase files are rejected with a line number") {
  const std::map<std::string, int> expected{
      {"01_trailing_comma.json", 5},      {"02_not_object.json", 1},          {"03_missing_kind.json", 1},
      {"04_unknown_kind.json", 2},        {"05_kind_not_string.json", 3},     {"06_model_missing_n.json", 1},
      {"07_model_small_n.json", 3},       {"08_model_bad_sign.json", 4},      {"09_model_fractional_n.json", 3},
      {"10_unknown_key.json", 5},         {"11_nf_missing_b1.json", 1},       {"12_nf_zero_b1.json", 7},
      {"13_nf_small_m.json", 4},          {"14_nf_zero_denominator.json", 5}, {"15_poly_missing_terms.json", 1},
      {"16_poly_empty_terms.json", 3},    {"17_poly_short_term.json", 3},     {"18_poly_bad_coefficient.json", 3},
      {"19_poly_duplicate_term.json", 3}, {"20_amplitude_negative_radius.json", 7}};
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(DOSC_TEST_DATA) / "malformed")) {
    const std::string name = entry.path().filename().string();
    REQUIRE(expected.count(name));
    ++seen;
    try {
      load_phase_input(entry.path().string());
      FAIL("accepted " << name);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      const std::string anchor = entry.path().string() + ":" + std::to_string(expected.at(name)) + ":";
      CHECK_MESSAGE(std::string(e.what()).find(anchor) != std::string::npos, e.what());
    }
  }
  CHECK(seen == 20);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorKind::Config) == 1);
  CHECK(exit_code(ErrorKind::GammaOutOfRange) == 1);
  CHECK(exit_code(ErrorKind::NotDType) == 2);
  CHECK(exit_code(ErrorKind::ReductionFailed) == 2);
  CHECK(exit_code(ErrorKind::AccuracyNotReached) == 3);
  CHECK(exit_code(ErrorKind::InsufficientData) == 4);
}

TEST_CASE("analysis report") {
  const Json a = analysis_json(parse_phase_input(R"({"kind": "model", "n": 3, "sign": 1})"));
  CHECK(a["d"] == "3/2");
  CHECK(a["regime"] == "LA");
  CHECK(a["n"] == 3);
  CHECK(a["m"].is_null());

  const Json b = analysis_json(
      parse_phase_input(R"({"kind": "polynomial", "terms": [[1, 2, "1"], [3, 1, "-2"], [5, 0, "1"], [7, 0, "1"]]})"));
  CHECK(b["m"] == 2);
  CHECK(b["n"] == 7);
  CHECK(b["regime"] == "NLA");

  try {
    analysis_json(parse_phase_input(R"({"kind": "polynomial", "terms": [[0, 3, "1"]]})"));
    FAIL("expected NotDType");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotDType);
  }
}

TEST_CASE("phase invariants") {
  const auto inv = phase_invariants(
      parse_phase_input(R"({"kind": "normal_form", "n": 7, "m": 2, "omega0": 1, "beta0": 1, "b1_0": 1})"));
  CHECK(inv.m == 2);
  CHECK(inv.n == 7);
  CHECK(inv.regime == Regime::NLA);
  CHECK(phase_invariants(parse_phase_input(R"({"kind": "model", "n": 4, "sign": 1})")).regime == Regime::LA);
}

TEST_CASE("manifest round trip and companion paths") {
  RunManifest m;
  m.tool_version = kToolVersion;
  m.command = "randol";
  m.config = {{"gamma", "1"}};
  m.grids = {{"levels", 13}};
  m.seconds = 1.5;
  m.flagged_cells = {0, 1};
  m.verdicts = {{"verdict", "CONSISTENT"}};
  m.outputs = {"field.csv"};
  const RunManifest r = RunManifest::from_json(Json::parse(m.to_json().dump()));
  CHECK(r.to_json() == m.to_json());
  CHECK_THROWS_AS(RunManifest::from_json(Json::object()), Error);
  CHECK(manifest_path_for("out/field.csv") == "out/field.manifest.json");

  const fs::path p = scratch("x.csv");
  write_csv(p.string(), "x.manifest.json", "a,b\n1,2\n");
  CHECK(read_text(p.string()) == "# manifest: x.manifest.json\na,b\n1,2\n");
}
