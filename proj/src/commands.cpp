#include "ngconv/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ngconv/channels.hpp"
#include "ngconv/linalg.hpp"
#include "ngconv/oracles.hpp"
#include "ngconv/protocol.hpp"

namespace ngconv {

namespace {

using Json = nlohmann::ordered_json;

Json json_real(Real x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

std::vector<Complex> read_amplitudes(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot read amplitude file `" + path + "`");
  std::vector<Complex> amp;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    Real re = 0, im = 0;
    if (!(is >> re)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw InvalidArgument("amplitude file `" + path + "`: bad line `" + line + "`");
    }
    if (!(is >> im)) im = 0;
    amp.emplace_back(re, im);
  }
  if (amp.empty()) throw InvalidArgument("amplitude file `" + path + "` is empty");
  return amp;
}

Real state_param_of(const StateSpec& s) {
  switch (s.family) {
    case StateSpec::Family::Fock: return s.n;
    case StateSpec::Family::Coherent:
    case StateSpec::Family::Cat: return s.z.imag() == 0 ? s.z.real() : std::abs(s.z);
    case StateSpec::Family::File: return 0;
  }
  return 0;
}

struct MeasureSelector {
  std::string kind;
  Real alpha = 1;
  int k = 1;
};

MeasureSelector parse_measure(const std::string& m) {
  MeasureSelector sel;
  std::vector<std::string> parts;
  std::istringstream is(m);
  std::string p;
  while (std::getline(is, p, ':')) parts.push_back(p);
  if (parts.empty()) throw InvalidArgument("empty measure");
  sel.kind = parts[0];
  if (sel.kind == "nge" && parts.size() == 3) {
    sel.alpha = std::stod(parts[1]);
    sel.k = std::stoi(parts[2]);
  } else if (sel.kind == "ming" && parts.size() == 2) {
    sel.alpha = std::stod(parts[1]);
  } else if ((sel.kind == "dF" || sel.kind == "parity" || sel.kind == "zero-mean-parity") && parts.size() == 1) {
  } else {
    throw InvalidArgument("unknown measure `" + m + "`");
  }
  return sel;
}

int quadrature_of(const NoiseConfig& n) {
  return n.displacement_variance > 0 || n.bs_variance > 0 ? n.order : 0;
}

MeasureRecord evaluate_once(const PreparedState& prep, const MeasureSelector& sel, const NoiseConfig& noise,
                            std::int64_t shots, std::uint64_t seed) {
  MeasureRecord r;
  r.cutoff = prep.cutoff;
  r.auto_cutoff = prep.auto_cutoff;
  r.leakage = prep.psi.leakage();
  r.seed = seed;
  r.shots = shots;
  const bool protocol = sel.kind == "parity" || sel.kind == "zero-mean-parity" ||
                        (sel.kind == "nge" && !noise.noiseless());
  if (shots > 0 && !protocol) throw InvalidArgument("shots apply only to circuit measures");
  if (protocol) {
    if (sel.kind == "nge" && !(sel.alpha == 2 && sel.k == 1))
      throw InvalidArgument("noisy circuits exist only for nge:2:1");
    r.quadrature_order = quadrature_of(noise);
    r.output_cutoff = 2 * prep.cutoff - 1;
    Real p = sel.kind == "zero-mean-parity" ? run_zero_mean_protocol(prep.psi, noise)
                                            : run_nge21_protocol(prep.psi, noise);
    if (shots > 0) {
      const ShotEstimate s = sample_shots(p, ShotPlan{shots, seed});
      p = s.estimate;
      r.stderr_ = s.stderr_;
    }
    r.value = sel.kind == "nge" ? (p > 0 ? -std::log2(p) : kInfinity) : p;
    return r;
  }
  MeasureOptions opts;
  if (sel.kind == "nge") {
    const MeasureReport m = nge(prep.psi, sel.alpha, sel.k, opts);
    r.value = m.value;
    r.leakage = m.leakage;
    r.clipped_mass = m.clipped_mass;
    r.output_cutoff = m.cutoffs.empty() ? 0 : m.cutoffs.front();
    return r;
  }
  if (noise.displacement_variance > 0 || noise.dephasing_variance > 0 || noise.bs_variance > 0 ||
      noise.readout_flip > 0)
    throw InvalidArgument("ming and dF take only the loss rate as state noise");
  DensityMatrix rho = prep.psi.density();
  if (noise.gamma > 0) rho = apply(loss_channel(noise.gamma), rho);
  const MeasureReport m = sel.kind == "ming" ? ming(rho, sel.alpha, opts) : MeasureReport(d_frobenius(rho, opts));
  r.value = m.value;
  r.leakage = m.leakage;
  r.clipped_mass = m.clipped_mass;
  r.projected_mass = m.projected_mass;
  r.output_cutoff = m.cutoffs.empty() ? 0 : m.cutoffs.front();
  return r;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InvalidArgument("cannot write output `" + path + "`");
  return f;
}

}  // namespace

PreparedState prepare_state(const StateSpec& spec, int cutoff, Real tau) {
  if (!spec.has_param && spec.family != StateSpec::Family::File)
    throw InvalidArgument("state `" + format_state(spec) + "` needs a parameter");
  Tolerances tol;
  tol.truncation = tau;
  const bool automatic = cutoff <= 0;
  switch (spec.family) {
    case StateSpec::Family::Fock: {
      const int d = automatic ? spec.n + 1 : cutoff;
      if (d <= spec.n) throw TruncationError("cutoff " + std::to_string(d) + " cannot hold |" + std::to_string(spec.n) + ">");
      return {fock_state(spec.n, d), d, automatic};
    }
    case StateSpec::Family::Coherent: {
      const int d = automatic ? minimal_coherent_cutoff(spec.z, tau) : cutoff;
      return {coherent_state(spec.z, d, tol), d, automatic};
    }
    case StateSpec::Family::Cat: {
      const int d = automatic ? minimal_cat_cutoff(spec.z, spec.sign, tau) : cutoff;
      return {cat_state(spec.z, spec.sign, d, tol), d, automatic};
    }
    case StateSpec::Family::File: {
      const std::vector<Complex> amp = read_amplitudes(spec.path);
      const int len = static_cast<int>(amp.size());
      const int d = automatic ? len : cutoff;
      VectorXc v = VectorXc::Zero(std::max(d, len));
      for (int i = 0; i < len; ++i) v(i) = amp[static_cast<std::size_t>(i)];
      const Real norm2 = v.squaredNorm();
      if (!(norm2 > 0)) throw InvalidArgument("amplitude file holds the zero vector");
      v /= std::sqrt(norm2);
      const Real tail = v.tail(v.size() - d).squaredNorm();
      if (tail > tau) throw TruncationError("cutoff " + std::to_string(d) + " drops amplitude mass " + std::to_string(tail));
      VectorXc head = v.head(d);
      head /= head.norm();
      return {PureState(FockSpec::uniform(1, d), head, tail, tol), d, automatic};
    }
  }
  throw InvalidArgument("unknown state family");
}

MeasureRecord evaluate_measure(const StateSpec& spec, const std::string& measure, const NoiseConfig& noise,
                               int cutoff, Real tau, std::int64_t shots, std::uint64_t seed) {
  noise.validate();
  const MeasureSelector sel = parse_measure(measure);
  // d_F is the square root of a quadratic form, so its error scales as
  // sqrt(leakage); the auto policy squares the bound for it.
  if (sel.kind == "dF") tau = std::max(tau * tau, 1e-16);
  PreparedState prep = prepare_state(spec, cutoff, tau);
  MeasureRecord r = evaluate_once(prep, sel, noise, shots, seed);
  // Auto policy: widen until the convolution-stage leakage is below 10 tau.
  for (int bump = 1; prep.auto_cutoff && r.leakage >= 10 * tau; ++bump) {
    if (bump > 8) {
      std::ostringstream os;
      os << "auto cutoff: leakage " << r.leakage << " stays above " << 10 * tau;
      throw NumericalError(os.str());
    }
    PreparedState wider = prepare_state(spec, prep.cutoff + 2, tau);
    wider.auto_cutoff = true;
    prep = std::move(wider);
    r = evaluate_once(prep, sel, noise, shots, seed);
  }
  r.state = format_state(spec);
  r.state_param = state_param_of(spec);
  r.noise_param = noise.gamma;
  r.measure = measure;
  return r;
}

std::string csv_header() { return "state_param,noise_param,measure,value,leakage,cutoff"; }

std::string csv_row(const MeasureRecord& r) {
  return format_real(r.state_param) + "," + format_real(r.noise_param) + "," + r.measure + "," +
         format_real(r.value) + "," + format_real(r.leakage) + "," + std::to_string(r.cutoff);
}

std::string jsonl_row(const MeasureRecord& r) {
  Json j;
  j["state_param"] = json_real(r.state_param);
  j["noise_param"] = json_real(r.noise_param);
  j["measure"] = r.measure;
  j["value"] = json_real(r.value);
  j["leakage"] = json_real(r.leakage);
  j["cutoff"] = r.cutoff;
  return j.dump();
}

std::string json_record(const MeasureRecord& r) {
  Json j;
  j["state"] = r.state;
  j["state_param"] = json_real(r.state_param);
  j["noise_param"] = json_real(r.noise_param);
  j["measure"] = r.measure;
  j["value"] = json_real(r.value);
  j["leakage"] = json_real(r.leakage);
  j["cutoff"] = r.cutoff;
  j["cutoff_policy"] = r.auto_cutoff ? "auto" : "explicit";
  j["output_cutoff"] = r.output_cutoff;
  j["clipped_mass"] = json_real(r.clipped_mass);
  j["projected_mass"] = json_real(r.projected_mass);
  j["quadrature_order"] = r.quadrature_order;
  j["seed"] = r.seed;
  j["shots"] = r.shots;
  if (r.shots > 0) j["stderr"] = json_real(r.stderr_);
  return j.dump();
}

int cmd_measure(const RunConfig& c, std::ostream& out, std::ostream&) {
  const MeasureRecord r =
      evaluate_measure(parse_state(c.state), c.measure, c.noise, c.cutoff, c.tau, c.shots, c.seed);
  out << json_record(r) << '\n';
  if (!c.output.empty()) {
    std::ofstream f = open_output(c.output);
    if (c.format == "csv") f << "#schema=1\n" << csv_header() << '\n' << csv_row(r) << '\n';
    else f << jsonl_row(r) << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream&) {
  StateSpec family = parse_state(c.state);
  if (family.family == StateSpec::Family::File) throw InvalidArgument("sweep needs a parameterized family");
  for (Real x : c.state_grid)
    if (family.family == StateSpec::Family::Fock && (x < 0 || x != std::floor(x)))
      throw InvalidArgument("Fock sweep grid must hold nonnegative integers");

  std::ostringstream table;
  if (c.format == "csv") table << "#schema=1\n" << csv_header() << '\n';
  auto point = [&](Real s, Real x) {
    StateSpec sp = family;
    sp.has_param = true;
    if (sp.family == StateSpec::Family::Fock) sp.n = static_cast<int>(s);
    else sp.z = Complex(s, 0);
    NoiseConfig noise = c.noise;
    if (c.noise_axis == "eps") noise = NoiseConfig::uniform(x, c.noise.order);
    else noise.gamma = x;
    MeasureRecord r = evaluate_measure(sp, c.measure, noise, c.cutoff, c.tau, c.shots, c.seed);
    r.noise_param = x;
    return r;
  };
  std::vector<MeasureRecord> records;
  sweep(c.state_grid, c.noise_grid, [&](Real s, Real x) {
    records.push_back(point(s, x));
    const MeasureRecord& r = records.back();
    return SweepRow{r.state_param, r.noise_param, r.measure, r.value, r.leakage, r.cutoff};
  }, [&](const SweepRow&) {
    const MeasureRecord& r = records.back();
    table << (c.format == "csv" ? csv_row(r) : jsonl_row(r)) << '\n';
  });

  if (c.output.empty()) {
    out << table.str();
  } else {
    std::ofstream f = open_output(c.output);
    f << table.str();
    int qmax = 0;
    for (const auto& r : records) qmax = std::max(qmax, r.quadrature_order);
    out << "# sweep rows=" << records.size() << " quadrature_order=" << qmax << " seed=" << c.seed
        << " shots=" << c.shots << " output=" << c.output << '\n';
  }
  return kExitOk;
}

namespace {

StateSpec fock_spec(int n) {
  StateSpec s;
  s.n = n;
  return s;
}

struct OracleCheck {
  std::string name;
  std::string params;
  Real simulated = 0;
  Real oracle = 0;
  Real delta() const { return std::abs(simulated - oracle); }
};

}  // namespace

int cmd_oracle_check(const RunConfig& c, std::ostream& out, std::ostream&) {
  std::vector<OracleCheck> checks;
  const bool all = c.only == "all";
  MeasureOptions opts;
  auto params = [](const std::string& k1, Real v1, const std::string& k2 = {}, Real v2 = 0) {
    std::string s = k1 + "=" + format_real(v1);
    if (!k2.empty()) s += " " + k2 + "=" + format_real(v2);
    return s;
  };
  if (all || c.only == "fock") {
    for (int n = 0; n <= 6; ++n) {
      const PreparedState p = prepare_state(fock_spec(n), c.cutoff, c.tau);
      checks.push_back({"fock.nge_2_1", params("n", n), nge(p.psi, 2.0, 1, opts).value,
                        oracles::nge_fock_closed_form(n, 2.0)});
      checks.push_back({"fock.ming_1", params("n", n), ming(p.psi.density(), 1.0, opts).value,
                        2.0 * oracles::ming_fock(n)});
    }
  }
  if (all || c.only == "lossy-fock") {
    for (int n = 0; n <= 6; ++n)
      for (Real g : {0.1, 0.3, 0.6}) {
        const PreparedState p = prepare_state(fock_spec(n), c.cutoff, c.tau);
        const DensityMatrix rho = apply(loss_channel(g), p.psi.density());
        checks.push_back({"lossy_fock.ming_1", params("n", n, "gamma", g), ming(rho, 1.0, opts).value,
                          oracles::ming_lossy_fock(n, g)});
      }
  }
  if (all || c.only == "cat") {
    for (Real z : {0.5, 1.0, 2.0})
      for (Real g : {0.0, 0.25, 0.5, 0.75}) {
        StateSpec s;
        s.family = StateSpec::Family::Cat;
        s.z = z;
        s.sign = +1;
        const PreparedState p = prepare_state(s, c.cutoff, c.tau);
        DensityMatrix rho = p.psi.density();
        if (g > 0) rho = apply(loss_channel(g), rho);
        checks.push_back({"cat.ming_1", params("z", z, "gamma", g), ming(rho, 1.0, opts).value,
                          oracles::ming_lossy_cat(z, g)});
        checks.push_back({"cat.dF", params("z", z, "gamma", g), d_frobenius(rho, opts).value,
                          oracles::dF_lossy_cat(z, g)});
      }
  }
  Real worst = 0;
  for (const auto& k : checks) {
    out << k.name << ' ' << k.params << " simulated=" << format_real(k.simulated)
        << " oracle=" << format_real(k.oracle) << " delta=" << format_real(k.delta()) << '\n';
    worst = std::max(worst, k.delta());
  }
  std::vector<const OracleCheck*> order;
  for (const auto& k : checks) order.push_back(&k);
  std::stable_sort(order.begin(), order.end(), [](auto a, auto b) { return a->delta() > b->delta(); });
  out << "worst cases:\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(5, order.size()); ++i)
    out << "  " << order[i]->name << ' ' << order[i]->params << " delta=" << format_real(order[i]->delta()) << '\n';
  out << "checks=" << checks.size() << " max_abs_delta=" << format_real(worst) << " tolerance=" << format_real(c.tolerance)
      << ' ' << (worst < c.tolerance ? "PASS" : "FAIL") << '\n';
  return worst < c.tolerance ? kExitOk : kExitOracleBreach;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    if (config.command == "measure") return cmd_measure(config, out, err);
    if (config.command == "sweep") return cmd_sweep(config, out, err);
    return cmd_oracle_check(config, out, err);
  } catch (const MemoryGuardError& e) {
    err << "error[memory-guard]: " << e.what() << '\n';
    return kExitMemoryGuard;
  } catch (const InvalidArgument& e) {
    err << "error[config]: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const Error& e) {
    err << "error[numerical]: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::bad_alloc&) {
    err << "error[memory-guard]: allocation failed\n";
    return kExitMemoryGuard;
  } catch (const std::exception& e) {
    err << "error[numerical]: " << e.what() << '\n';
    return kExitNumerical;
  }
}

namespace {

struct Flags {
  std::string config, state, measure, output, format, noise_axis, only, state_grid, noise_grid;
  int cutoff = 0, order = 0;
  double tau = 0, eps = 0, gamma = 0, sigma_d2 = 0, sigma_p2 = 0, sigma_b2 = 0, eps_p = 0, tolerance = 0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  bool print_config = false;
};

struct Bound {
  CLI::App* app;
  std::map<std::string, CLI::Option*> opt;
  bool given(const std::string& name) const { return opt.at(name)->count() > 0; }
};

Bound bind(CLI::App* sub, Flags& f) {
  Bound b{sub, {}};
  b.opt["config"] = sub->add_option("--config", f.config, "key = value config file; flags override it");
  b.opt["state"] = sub->add_option("--state", f.state, "fock:N | coherent:Z | cat:+:Z | cat:-:Z | file:PATH");
  b.opt["cutoff"] = sub->add_option("--cutoff", f.cutoff, "Fock cutoff; 0 selects the auto policy");
  b.opt["tau"] = sub->add_option("--tau", f.tau, "construction leakage bound of the auto policy");
  b.opt["measure"] = sub->add_option("--measure", f.measure, "nge:A:K | ming:A | dF | parity | zero-mean-parity");
  b.opt["eps"] = sub->add_option("--eps", f.eps, "uniform noise level");
  b.opt["gamma"] = sub->add_option("--gamma", f.gamma, "loss rate");
  b.opt["sigma-d2"] = sub->add_option("--sigma-d2", f.sigma_d2, "displacement noise variance");
  b.opt["sigma-p2"] = sub->add_option("--sigma-p2", f.sigma_p2, "dephasing variance");
  b.opt["sigma-b2"] = sub->add_option("--sigma-b2", f.sigma_b2, "beam splitter angle variance");
  b.opt["eps-p"] = sub->add_option("--eps-p", f.eps_p, "ancilla phase-flip probability");
  b.opt["order"] = sub->add_option("--order", f.order, "Gauss-Hermite order");
  b.opt["state-grid"] = sub->add_option("--state-grid", f.state_grid, "a,b,c or start:stop:step");
  b.opt["noise-grid"] = sub->add_option("--noise-grid", f.noise_grid, "a,b,c or start:stop:step");
  b.opt["noise-axis"] = sub->add_option("--noise-axis", f.noise_axis, "eps | gamma");
  b.opt["out"] = sub->add_option("--out", f.output, "output path");
  b.opt["format"] = sub->add_option("--format", f.format, "csv | jsonl");
  b.opt["shots"] = sub->add_option("--shots", f.shots, "sampled shots; 0 reports exact expectations");
  b.opt["seed"] = sub->add_option("--seed", f.seed, "sampling seed");
  b.opt["only"] = sub->add_option("--only", f.only, "fock | lossy-fock | cat");
  b.opt["tolerance"] = sub->add_option("--tolerance", f.tolerance, "oracle-check pass bound");
  b.opt["print-config"] = sub->add_flag("--print-config", f.print_config, "print the resolved config and exit");
  return b;
}

RunConfig resolve(const Bound& b, const Flags& f, const std::string& command) {
  RunConfig c = b.given("config") ? load_config_file(f.config) : RunConfig{};
  c.command = command;
  if (b.given("state")) c.state = f.state;
  if (b.given("cutoff")) c.cutoff = f.cutoff;
  if (b.given("tau")) c.tau = f.tau;
  if (b.given("measure")) c.measure = f.measure;
  if (b.given("order")) c.noise.order = f.order;
  if (b.given("eps")) c.noise = NoiseConfig::uniform(f.eps, c.noise.order);
  if (b.given("gamma")) c.noise.gamma = f.gamma;
  if (b.given("sigma-d2")) c.noise.displacement_variance = f.sigma_d2;
  if (b.given("sigma-p2")) c.noise.dephasing_variance = f.sigma_p2;
  if (b.given("sigma-b2")) c.noise.bs_variance = f.sigma_b2;
  if (b.given("eps-p")) c.noise.readout_flip = f.eps_p;
  if (b.given("state-grid")) c.state_grid = parse_grid(f.state_grid);
  if (b.given("noise-grid")) c.noise_grid = parse_grid(f.noise_grid);
  if (b.given("noise-axis")) c.noise_axis = f.noise_axis;
  if (b.given("out")) c.output = f.output;
  if (b.given("format")) c.format = f.format;
  if (b.given("shots")) c.shots = f.shots;
  if (b.given("seed")) c.seed = f.seed;
  if (b.given("only")) c.only = f.only;
  if (b.given("tolerance")) c.tolerance = f.tolerance;
  return c;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bosonic non-Gaussianity simulator", "ngconv"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::pair<std::string, Bound>> subs;
  for (const char* name : {"measure", "sweep", "oracle-check"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run ") + name);
    subs.emplace_back(name, bind(sub, f));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    for (const auto& [name, b] : subs)
      if (b.app->parsed()) {
        err << "error[config]: " << e.what() << '\n';
        return kExitBadConfig;
      }
    err << "error[config]: " << e.what() << '\n' << app.help();
    return kExitBadConfig;
  }
  for (const auto& [name, b] : subs) {
    if (!b.app->parsed()) continue;
    RunConfig c;
    try {
      c = resolve(b, f, name);
      if (f.print_config) {
        validate(c);
        out << serialize_config(c);
        return kExitOk;
      }
    } catch (const Error& e) {
      err << "error[config]: " << e.what() << '\n';
      return kExitBadConfig;
    }
    return run_command(c, out, err);
  }
  return kExitBadConfig;
}

}  // namespace ngconv
