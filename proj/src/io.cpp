#include "dosc/io.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dosc/cache.hpp"
#include "dosc/newton.hpp"

namespace dosc {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.empty() || s.size() > 16) throw Error(ErrorKind::Config, "malformed hash '" + s + "'");
  std::uint64_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw Error(ErrorKind::Config, "malformed hash '" + s + "'");
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double parse_double(const std::string& s) {
  if (s.empty()) throw Error(ErrorKind::Config, "empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw Error(ErrorKind::Config, "malformed number '" + s + "'");
  return v;
}

Engine parse_engine(const std::string& s) {
  if (s == "DIRECT2D") return Engine::DIRECT2D;
  if (s == "REDUCED1D") return Engine::REDUCED1D;
  throw Error(ErrorKind::Config, "unknown engine '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

SampleCache::SampleCache(std::string path) : path_(std::move(path)) {
  if (!path_.empty()) load();
}

std::string SampleCache::default_path() {
  const char* dir = std::getenv("OSC_CACHE_DIR");
  const std::string base = dir && *dir ? dir : ".dosc_cache";
  return (std::filesystem::path(base) / "samples.csv").string();
}

const char* SampleCache::header() { return "phase_hash,cfg_hash,lambda,s1,s2,re,im,err_est,engine"; }

std::string SampleCache::format_record(const CacheKey& k, const OscSample& s) {
  return hex64(k.phase_hash) + "," + hex64(k.cfg_hash) + "," + format_double(k.lambda) + "," + format_double(k.s1) +
         "," + format_double(k.s2) + "," + format_double(s.value.real()) + "," + format_double(s.value.imag()) + "," +
         format_double(s.err_est) + "," + to_string(k.engine);
}

std::pair<CacheKey, OscSample> SampleCache::parse_record(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != 9) throw Error(ErrorKind::Config, "cache record needs 9 fields: '" + line + "'");
  CacheKey k{parse_hex64(f[0]), parse_hex64(f[1]), parse_double(f[2]), parse_double(f[3]), parse_double(f[4]),
             parse_engine(f[8])};
  OscSample s;
  s.lambda = k.lambda;
  s.s = Eigen::Vector2d(k.s1, k.s2);
  s.value = {parse_double(f[5]), parse_double(f[6])};
  s.err_est = parse_double(f[7]);
  s.engine = k.engine;
  s.cfg_hash = k.cfg_hash;
  return {k, s};
}

void SampleCache::load() {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == header()) continue;
    try {
      auto rec = parse_record(line);
      records_.emplace(rec.first, rec.second);
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, path_ + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::optional<OscSample> SampleCache::lookup(const CacheKey& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = records_.find(key);
  if (it == records_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void SampleCache::insert(const CacheKey& key, const OscSample& sample) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!records_.emplace(key, sample).second) return;
  if (path_.empty()) return;
  const auto parent = std::filesystem::path(path_).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw Error(ErrorKind::Config, "cannot open cache " + path_ + ": " + std::strerror(errno));
  ::flock(fd, LOCK_EX);
  std::string text;
  struct stat st {};
  if (::fstat(fd, &st) == 0 && st.st_size == 0) text = std::string(header()) + "\n";
  text += format_record(key, sample) + "\n";
  const ssize_t written = ::write(fd, text.data(), text.size());
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (written != static_cast<ssize_t>(text.size())) throw Error(ErrorKind::Config, "short write to cache " + path_);
}

std::size_t SampleCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return records_.size();
}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" in the source text.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 1 : line_of_offset(text, pos);
}

struct SchemaReader {
  const std::string& text;
  const std::string& source;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw Error(ErrorKind::Config, source + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail_at(const std::string& key, const std::string& msg) const { fail(line_of_key(text, key), msg); }

  const Json& need(const Json& obj, const std::string& key) const {
    if (!obj.contains(key)) fail(1, "missing key \"" + key + "\"");
    return obj.at(key);
  }

  std::optional<int> int_or_null(const Json& obj, const std::string& key, int min) const {
    const Json& v = need(obj, key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number_integer()) fail_at(key, "\"" + key + "\" must be an integer or null");
    const auto x = v.get<long long>();
    if (x < min || x > kMaxSupportDegree) fail_at(key, "\"" + key + "\" out of range");
    return static_cast<int>(x);
  }

  Rational exact(const Json& obj, const std::string& key) const {
    const Json& v = need(obj, key);
    try {
      if (v.is_string()) return parse_rational_or_decimal(v.get<std::string>());
      if (v.is_number()) return parse_rational_or_decimal(v.dump());
    } catch (const Error&) {
    }
    fail_at(key, "\"" + key + "\" must be an exact rational");
  }
};

Polynomial model_polynomial(std::optional<int> n, int sign) {
  Polynomial p = Polynomial::monomial(1, 2);
  if (n) p.add_term(*n, 0, Rational(sign));
  return p;
}

Polynomial normal_form_polynomial(std::optional<int> n, std::optional<int> m, const Rational& w, const Rational& beta,
                                  const Rational& b1, const Rational& b2) {
  Polynomial shift = Polynomial::x2();
  if (m) shift -= Polynomial::monomial(*m, 0, w);
  Polynomial b = Polynomial::monomial(1, 0, b1) + Polynomial::monomial(0, 2, b2);
  Polynomial p = b * shift.pow(2);
  if (n) p.add_term(*n, 0, beta);
  return p;
}

}  // namespace

PhaseInput parse_phase_input(const std::string& text, const std::string& source) {
  SchemaReader r{text, source};
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    r.fail(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "invalid JSON");
  }
  if (!doc.is_object()) r.fail(1, "phase file must be a JSON object");
  static const std::set<std::string> allowed{"kind", "n", "sign", "m", "omega0", "beta0", "b1_0", "b2_0", "terms",
                                             "amplitude"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!allowed.count(it.key())) r.fail_at(it.key(), "unknown key \"" + it.key() + "\"");
  const Json& kind = r.need(doc, "kind");
  if (!kind.is_string()) r.fail_at("kind", "\"kind\" must be a string");
  const std::string k = kind.get<std::string>();

  PhaseInput input;
  input.source = source;
  if (k == "model") {
    const auto n = r.int_or_null(doc, "n", 3);
    const Json& sign = r.need(doc, "sign");
    if (!sign.is_number_integer() || (sign.get<long long>() != 1 && sign.get<long long>() != -1))
      r.fail_at("sign", "\"sign\" must be 1 or -1");
    const int sg = sign.get<int>();
    input.phase = DPhase::model(n, sg);
    input.exact = model_polynomial(n, sg);
  } else if (k == "normal_form") {
    const auto n = r.int_or_null(doc, "n", 3);
    const auto m = r.int_or_null(doc, "m", 2);
    const Rational w = m ? r.exact(doc, "omega0") : Rational(0);
    const Rational beta = n ? r.exact(doc, "beta0") : Rational(0);
    const Rational b1 = r.exact(doc, "b1_0");
    const Rational b2 = doc.contains("b2_0") ? r.exact(doc, "b2_0") : Rational(0);
    if (b1 == 0) r.fail_at("b1_0", "\"b1_0\" must be nonzero");
    if (n && beta == 0) r.fail_at("beta0", "\"beta0\" must be nonzero when n is finite");
    if (m && w == 0) r.fail_at("omega0", "\"omega0\" must be nonzero when m is finite");
    input.phase = DPhase::normal_form(n, m, to_double(w), to_double(beta), to_double(b1), to_double(b2));
    input.exact = normal_form_polynomial(n, m, w, beta, b1, b2);
  } else if (k == "polynomial") {
    const Json& terms = r.need(doc, "terms");
    if (!terms.is_array() || terms.empty()) r.fail_at("terms", "\"terms\" must be a nonempty array");
    Polynomial p;
    std::set<Exponent> seen;
    for (const auto& t : terms) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() || !t[2].is_string())
        r.fail_at("terms", "each term must be [i, j, \"p/q\"]");
      const auto i = t[0].get<long long>(), j = t[1].get<long long>();
      if (i < 0 || j < 0 || i + j > kMaxSupportDegree) r.fail_at("terms", "term exponents out of range");
      if (i + j < 2) r.fail_at("terms", "constant and linear terms are not allowed");
      if (!seen.insert({static_cast<int>(i), static_cast<int>(j)}).second)
        r.fail_at("terms", "duplicate term [" + std::to_string(i) + ", " + std::to_string(j) + "]");
      Rational c;
      try {
        c = parse_rational(t[2].get<std::string>());
      } catch (const Error&) {
        r.fail_at("terms", "malformed coefficient \"" + t[2].get<std::string>() + "\"");
      }
      p.add_term(static_cast<int>(i), static_cast<int>(j), c);
    }
    if (p.is_zero()) r.fail_at("terms", "phase is identically zero");
    input.phase = DPhase::polynomial(p);
    input.exact = p;
  } else {
    r.fail_at("kind", "unknown kind \"" + k + "\"");
  }

  input.amplitude = Amplitude::product(0.5);
  const bool shear = input.phase.mode == PhaseMode::NormalForm && input.phase.m && input.phase.omega0 != 0.0;
  if (shear) input.amplitude = Amplitude::adapted(0.5, input.phase.omega0, *input.phase.m);
  if (doc.contains("amplitude")) {
    const Json& a = doc.at("amplitude");
    if (!a.is_object()) r.fail_at("amplitude", "\"amplitude\" must be an object");
    for (auto it = a.begin(); it != a.end(); ++it)
      if (it.key() != "kind" && it.key() != "radius") r.fail_at(it.key(), "unknown amplitude key \"" + it.key() + "\"");
    double radius = 0.5;
    if (a.contains("radius")) {
      if (!a.at("radius").is_number()) r.fail_at("radius", "\"radius\" must be a number");
      radius = a.at("radius").get<double>();
      if (!(radius > 0.0) || radius > 1.0) r.fail_at("radius", "\"radius\" must lie in (0, 1]");
    }
    const std::string ak = a.contains("kind") && a.at("kind").is_string() ? a.at("kind").get<std::string>() : "";
    if (ak == "product") input.amplitude = Amplitude::product(radius);
    else if (ak == "smooth") input.amplitude = Amplitude::smooth(radius);
    else if (ak == "adapted" && shear) input.amplitude = Amplitude::adapted(radius, input.phase.omega0, *input.phase.m);
    else if (ak == "adapted") r.fail_at("kind", "\"adapted\" amplitude needs a normal form with finite m");
    else r.fail_at(a.contains("kind") ? "kind" : "amplitude", "amplitude kind must be product, smooth or adapted");
  }
  return input;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
  out << text;
}

PhaseInput load_phase_input(const std::string& path) { return parse_phase_input(read_text(path), path); }

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotDType:
    case ErrorKind::ReductionFailed:
    case ErrorKind::InvalidInvariants:
    case ErrorKind::AmbiguousClassification:
    case ErrorKind::WitnessNotFound:
    case ErrorKind::ZeroForm:
      return 2;
    case ErrorKind::AccuracyNotReached:
    case ErrorKind::AnnulusUnreliable:
      return 3;
    case ErrorKind::InsufficientData:
      return 4;
    default:
      return 1;
  }
}

namespace {

Json opt_int(std::optional<int> v) { return v ? Json(*v) : Json(nullptr); }

Json terms_json(const Polynomial& p) {
  Json out = Json::array();
  for (const auto& [e, c] : p.terms()) out.push_back({e.first, e.second, format_rational(c)});
  return out;
}

}  // namespace

Json analysis_json(const PhaseInput& input) {
  Json j;
  j["kind"] = to_string(input.phase.mode);
  j["phase_hash"] = hex64(fnv1a64(input.phase.canonical() + "|" + input.amplitude.canonical()));
  j["polynomial"] = terms_json(input.exact);
  const TaylorSupport support = taylor_support(input.exact);
  Json pts = Json::array();
  for (const auto& p : support.points) pts.push_back({p.t1, p.t2});
  j["taylor_support"] = pts;
  const NewtonPolygon poly = newton_polygon(support);
  Json verts = Json::array();
  for (const auto& v : poly.vertices) verts.push_back({v.t1, v.t2});
  Json edges = Json::array();
  for (const auto& e : poly.edges)
    edges.push_back({{"from", {e.from.t1, e.from.t2}},
                     {"to", {e.to.t1, e.to.t2}},
                     {"k1", format_rational(e.weight.k1)},
                     {"k2", format_rational(e.weight.k2)}});
  j["polygon"] = {{"vertices", verts}, {"edges", edges}};
  const NewtonDistanceResult dist = newton_distance(poly, input.exact);
  j["d"] = format_rational(dist.d);
  j["principal_face"] = to_string(dist.principal_face.kind);
  j["principal_part"] = terms_json(dist.principal_part);

  const NormalFormData nf = normal_form(input.exact);
  j["m"] = opt_int(nf.m);
  j["n"] = opt_int(nf.n);
  j["omega0"] = format_rational(nf.omega0);
  j["beta0"] = format_rational(nf.beta0);
  j["b1_0"] = format_rational(nf.b1_0);
  const auto& A = nf.linear_change;
  j["linear_change"] = {{format_rational(A.a11), format_rational(A.a12)}, {format_rational(A.a21), format_rational(A.a22)}};
  if (nf.m || nf.n) j["regime"] = to_string(classify_regime(nf.m, nf.n));
  else j["regime"] = "UNDETERMINED";
  const HeightReport h = height_report(nf);
  j["height"] = {{"d", format_rational(h.d_given)},
                 {"h", h.h_is_dinf ? Json("inf") : Json(format_rational(h.h))},
                 {"h_linear", format_rational(h.h_lin_reference)},
                 {"adapted_linear", h.adapted_linear}};
  return j;
}

PhaseInvariants phase_invariants(const PhaseInput& input) {
  PhaseInvariants inv;
  const DPhase& p = input.phase;
  switch (p.mode) {
    case PhaseMode::Model:
      inv.n = p.n;
      break;
    case PhaseMode::NormalForm:
      if (p.m && p.omega0 != 0.0) inv.m = p.m;
      if (p.n && p.beta0 != 0.0) inv.n = p.n;
      break;
    case PhaseMode::Polynomial: {
      const NormalFormData nf = normal_form(input.exact);
      inv.m = nf.m;
      inv.n = nf.n;
      break;
    }
  }
  inv.regime = classify_regime(inv.m, inv.n);
  return inv;
}

Json sample_json(const OscSample& s) {
  return {{"lambda", s.lambda}, {"s", {s.s(0), s.s(1)}},   {"re", s.value.real()},       {"im", s.value.imag()},
          {"abs", std::abs(s.value)}, {"err_est", s.err_est}, {"engine", to_string(s.engine)}, {"cfg_hash", hex64(s.cfg_hash)}};
}

Json report_json(const ExponentReport& r) {
  return {{"regime", to_string(r.regime)},
          {"gamma", r.gamma},
          {"p_star", r.p_star_predicted ? Json(format_rational(*r.p_star_predicted)) : Json(nullptr)},
          {"p_hat", r.p_hat_empirical ? Json(*r.p_hat_empirical) : Json(nullptr)},
          {"verdict", to_string(r.verdict)},
          {"note", r.note},
          {"fit_residual", r.fit_residual},
          {"j_lo", r.j_lo},
          {"j_hi", r.j_hi}};
}

Json witness_json(const A3Witness& w) {
  return {{"t", w.t},
          {"sigma0", {w.sigma0(0), w.sigma0(1)}},
          {"point", {w.point(0), w.point(1)}},
          {"gradient_norm", w.gradient_norm},
          {"hess_det", w.hess_det},
          {"cubic", w.cubic},
          {"quartic", w.quartic}};
}

Json RunManifest::to_json() const {
  return {{"tool", "dosc"},       {"version", tool_version},     {"command", command}, {"config", config},
          {"grids", grids},       {"seconds", seconds},          {"flagged_cells", flagged_cells},
          {"verdicts", verdicts}, {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m;
  try {
    m.tool_version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.grids = j.at("grids");
    m.seconds = j.at("seconds").get<double>();
    m.flagged_cells = j.at("flagged_cells").get<std::vector<int>>();
    m.verdicts = j.at("verdicts");
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string manifest_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".manifest.json");
  return p.string();
}

void write_csv(const std::string& path, const std::string& manifest_name, const std::string& body) {
  write_text(path, "# manifest: " + manifest_name + "\n" + body);
}

}  // namespace dosc
