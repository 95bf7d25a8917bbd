#include "ngconv/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ngconv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void fail(const std::string& what) { throw InvalidArgument("config: " + what); }

Real to_real(const std::string& s, const std::string& key) {
  Real v = 0;
  const std::string t = trim(s);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) fail("`" + key + "` expects a number, got `" + s + "`");
  return v;
}

template <typename Int>
Int to_int(const std::string& s, const std::string& key) {
  Int v = 0;
  const std::string t = trim(s);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    fail("`" + key + "` expects an integer, got `" + s + "`");
  return v;
}

Complex to_complex(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() == 1) return {to_real(parts[0], "state"), 0.0};
  if (parts.size() == 2) return {to_real(parts[0], "state"), to_real(parts[1], "state")};
  fail("complex amplitude must be `re` or `re,im`, got `" + s + "`");
}

std::string format_grid(const std::vector<Real>& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += ',';
    out += format_real(g[i]);
  }
  return out;
}

}  // namespace

std::string format_real(Real x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

StateSpec parse_state(const std::string& text) {
  const std::string t = trim(text);
  StateSpec s;
  const auto colon = t.find(':');
  const std::string head = t.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string() : t.substr(colon + 1);
  s.has_param = colon != std::string::npos;
  if (head == "fock") {
    s.family = StateSpec::Family::Fock;
    if (s.has_param) {
      s.n = to_int<int>(rest, "state");
      if (s.n < 0) fail("Fock photon number must be >= 0");
    }
  } else if (head == "coherent") {
    s.family = StateSpec::Family::Coherent;
    if (s.has_param) s.z = to_complex(rest);
  } else if (head == "cat") {
    s.family = StateSpec::Family::Cat;
    if (!s.has_param) fail("cat needs a sign: cat:+ or cat:-");
    const auto c2 = rest.find(':');
    const std::string sign = rest.substr(0, c2);
    if (sign == "+") s.sign = +1;
    else if (sign == "-") s.sign = -1;
    else fail("cat sign must be + or -, got `" + sign + "`");
    s.has_param = c2 != std::string::npos;
    if (s.has_param) s.z = to_complex(rest.substr(c2 + 1));
  } else if (head == "file") {
    s.family = StateSpec::Family::File;
    if (rest.empty()) fail("file state needs a path");
    s.path = rest;
  } else {
    fail("unknown state family `" + head + "`");
  }
  return s;
}

std::string format_state(const StateSpec& s) {
  auto z = [](Complex c) { return c.imag() == 0 ? format_real(c.real()) : format_real(c.real()) + "," + format_real(c.imag()); };
  switch (s.family) {
    case StateSpec::Family::Fock: return s.has_param ? "fock:" + std::to_string(s.n) : "fock";
    case StateSpec::Family::Coherent: return s.has_param ? "coherent:" + z(s.z) : "coherent";
    case StateSpec::Family::Cat: {
      const std::string head = std::string("cat:") + (s.sign > 0 ? "+" : "-");
      return s.has_param ? head + ":" + z(s.z) : head;
    }
    case StateSpec::Family::File: return "file:" + s.path;
  }
  return {};
}

std::vector<Real> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return {};
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) fail("range grid must be start:stop:step, got `" + t + "`");
    const Real a = to_real(parts[0], "grid"), b = to_real(parts[1], "grid"), h = to_real(parts[2], "grid");
    if (!(h > 0) || !std::isfinite(a) || !std::isfinite(b) || b < a) fail("range grid needs finite start <= stop and step > 0");
    const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
    if (count > 1000000) fail("range grid has too many points");
    std::vector<Real> g;
    for (long i = 0; i < count; ++i) g.push_back(a + static_cast<Real>(i) * h);
    return g;
  }
  std::vector<Real> g;
  for (const auto& p : split(t, ',')) g.push_back(to_real(p, "grid"));
  return g;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::string> seen;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(lineno) + " is not `key = value`");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (seen.count(key)) fail("duplicate key `" + key + "`");
    seen[key] = val;
    if (key == "command") c.command = val;
    else if (key == "state") c.state = val;
    else if (key == "cutoff") c.cutoff = to_int<int>(val, key);
    else if (key == "tau") c.tau = to_real(val, key);
    else if (key == "measure") c.measure = val;
    else if (key == "noise.sigma_d2") c.noise.displacement_variance = to_real(val, key);
    else if (key == "noise.sigma_p2") c.noise.dephasing_variance = to_real(val, key);
    else if (key == "noise.gamma") c.noise.gamma = to_real(val, key);
    else if (key == "noise.sigma_b2") c.noise.bs_variance = to_real(val, key);
    else if (key == "noise.eps_p") c.noise.readout_flip = to_real(val, key);
    else if (key == "noise.order") c.noise.order = to_int<int>(val, key);
    else if (key == "state_grid") c.state_grid = parse_grid(val);
    else if (key == "noise_grid") c.noise_grid = parse_grid(val);
    else if (key == "noise_axis") c.noise_axis = val;
    else if (key == "output") c.output = val;
    else if (key == "format") c.format = val;
    else if (key == "seed") c.seed = to_int<std::uint64_t>(val, key);
    else if (key == "shots") c.shots = to_int<std::int64_t>(val, key);
    else if (key == "only") c.only = val;
    else if (key == "tolerance") c.tolerance = to_real(val, key);
    else fail("unknown key `" + key + "`");
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot read `" + path + "`");
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config(os.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "command = " << c.command << '\n'
     << "state = " << c.state << '\n'
     << "cutoff = " << c.cutoff << '\n'
     << "tau = " << format_real(c.tau) << '\n'
     << "measure = " << c.measure << '\n'
     << "noise.sigma_d2 = " << format_real(c.noise.displacement_variance) << '\n'
     << "noise.sigma_p2 = " << format_real(c.noise.dephasing_variance) << '\n'
     << "noise.gamma = " << format_real(c.noise.gamma) << '\n'
     << "noise.sigma_b2 = " << format_real(c.noise.bs_variance) << '\n'
     << "noise.eps_p = " << format_real(c.noise.readout_flip) << '\n'
     << "noise.order = " << c.noise.order << '\n'
     << "state_grid = " << format_grid(c.state_grid) << '\n'
     << "noise_grid = " << format_grid(c.noise_grid) << '\n'
     << "noise_axis = " << c.noise_axis << '\n'
     << "output = " << c.output << '\n'
     << "format = " << c.format << '\n'
     << "seed = " << c.seed << '\n'
     << "shots = " << c.shots << '\n'
     << "only = " << c.only << '\n'
     << "tolerance = " << format_real(c.tolerance) << '\n';
  return os.str();
}

void validate(const RunConfig& c) {
  if (c.command != "measure" && c.command != "sweep" && c.command != "oracle-check")
    fail("command must be measure, sweep or oracle-check");
  const StateSpec s = parse_state(c.state);
  if (c.command == "measure" && !s.has_param && s.family != StateSpec::Family::File)
    fail("measure needs a parameterized state, e.g. fock:1");
  if (c.cutoff < 0) fail("cutoff must be >= 0");
  if (!(c.tau > 0 && c.tau < 1)) fail("tau must lie in (0, 1)");
  const auto parts = split(c.measure, ':');
  const std::string& m = parts[0];
  if (m == "nge") {
    if (parts.size() != 3) fail("measure nge expects nge:ALPHA:K");
    if (!(to_real(parts[1], "measure") >= 0)) fail("nge alpha must be >= 0");
    if (to_int<int>(parts[2], "measure") < 1) fail("nge k must be >= 1");
  } else if (m == "ming") {
    if (parts.size() != 2) fail("measure ming expects ming:ALPHA");
    const Real a = to_real(parts[1], "measure");
    if (!(a >= 0.5) || std::isinf(a)) fail("ming alpha must be finite and >= 1/2");
  } else if (m == "dF" || m == "parity" || m == "zero-mean-parity") {
    if (parts.size() != 1) fail("measure `" + m + "` takes no arguments");
  } else {
    fail("unknown measure `" + c.measure + "`");
  }
  c.noise.validate();
  if (c.noise_axis != "eps" && c.noise_axis != "gamma") fail("noise_axis must be eps or gamma");
  for (Real x : c.state_grid)
    if (!std::isfinite(x)) fail("state grid values must be finite");
  for (Real x : c.noise_grid)
    if (!(x >= 0 && x <= 1)) fail("noise grid values must lie in [0, 1]");
  if (c.format != "csv" && c.format != "jsonl") fail("format must be csv or jsonl");
  if (c.shots < 0) fail("shots must be >= 0");
  if (c.only != "all" && c.only != "fock" && c.only != "lossy-fock" && c.only != "cat")
    fail("only must be all, fock, lossy-fock or cat");
  if (!(c.tolerance > 0)) fail("tolerance must be > 0");
  if (c.output.find('\n') != std::string::npos) fail("output path must be one line");
}

}  // namespace ngconv
