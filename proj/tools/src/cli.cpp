#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "tlsthermo/bloch_gain.hpp"
#include "tlsthermo/classical.hpp"
#include "tlsthermo/errors.hpp"
#include "tlsthermo/laser.hpp"
#include "tlsthermo/parameters.hpp"
#include "tlsthermo/quantum.hpp"
#include "tlsthermo/thermo_audit.hpp"

namespace tlsthermo::cli {
namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<std::string> sweeps;
  std::vector<std::string> randoms;
  std::optional<std::size_t> samples;
  std::optional<int> fock_cutoff;
  std::optional<double> tolerance;
  std::string treatment;

  std::string equal_occ;
  std::string upper_occ;
  std::string lower_occ;
  std::string grid = "-1:1:201";
  double e_k0 = 0.3;
  double gamma_u = 0.05;
  double gamma_l = 0.05;
};

// Thrown for malformed command-line values; maps to the config exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::string kNan = "nan";

std::string num(double v) { return std::isfinite(v) ? format_number(v) : (std::isnan(v) ? kNan : (v > 0 ? "inf" : "-inf")); }

double to_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw UsageError(what + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

// key=a:b:n for grids, key=a:b for random ranges.
ParameterRange parse_range(const std::string& text, bool with_count) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("range '" + text + "' must look like key=a:b" + (with_count ? ":n" : ""));
  ParameterRange r;
  r.key = canonical_parameter(std::string_view(text).substr(0, eq));
  const auto parts = split(std::string_view(text).substr(eq + 1), ':');
  if (parts.size() != (with_count ? 3u : 2u)) {
    throw UsageError("range '" + text + "' must look like key=a:b" + (with_count ? ":n" : ""));
  }
  r.lo = to_double(parts[0], text);
  r.hi = to_double(parts[1], text);
  if (with_count) {
    const double n = to_double(parts[2], text);
    if (n < 1 || n != std::floor(n)) throw UsageError("range '" + text + "': point count must be a positive integer");
    r.count = static_cast<int>(n);
  }
  return r;
}

// fermi:T=..,mu=.. | linear:f0=..,slope=..[,e_ref=..] | table:PATH
SubbandOccupation parse_subband(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "table") {
    std::ifstream in(rest);
    if (!in) throw UsageError("cannot open occupation table '" + rest + "'");
    std::vector<std::pair<double, double>> nodes;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto parts = split(line, ',');
      if (parts.size() != 2) throw UsageError("occupation table lines must be 'energy,value'");
      nodes.emplace_back(to_double(parts[0], "table energy"), to_double(parts[1], "table value"));
    }
    return SubbandOccupation::tabulated(std::move(nodes));
  }

  std::map<std::string, double> fields;
  for (auto item : split(rest, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw UsageError("occupation field '" + std::string(item) + "' needs name=value");
    fields[std::string(item.substr(0, eq))] = to_double(item.substr(eq + 1), std::string(item));
  }
  auto take = [&](const char* name, std::optional<double> fallback = {}) {
    auto it = fields.find(name);
    if (it == fields.end()) {
      if (fallback) return *fallback;
      throw UsageError("occupation '" + text + "' is missing '" + name + "'");
    }
    const double v = it->second;
    fields.erase(it);
    return v;
  };
  SubbandOccupation occ;
  if (kind == "fermi") {
    const double t = take("T");
    occ = SubbandOccupation::fermi(t, take("mu"));
  } else if (kind == "linear") {
    const double f0 = take("f0");
    const double slope = take("slope");
    occ = SubbandOccupation::linear(f0, slope, take("e_ref", 0.0));
  } else {
    throw UsageError("occupation kind must be fermi, linear or table, got '" + kind + "'");
  }
  if (!fields.empty()) throw UsageError("occupation '" + text + "' has unknown field '" + fields.begin()->first + "'");
  return occ;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) buf_ << (i ? "," : "") << fields[i];
    buf_ << '\n';
  }
  std::size_t width() const { return width_; }
  std::string str() const { return buf_.str(); }

 private:
  std::size_t width_;
  std::ostringstream buf_;
};

std::vector<std::string> flux_header(const std::vector<std::string>& params) {
  std::vector<std::string> h{"sample_id"};
  h.insert(h.end(), params.begin(), params.end());
  for (const char* c : {"R_ss", "Ndot_u", "Ndot_l", "Edot_u", "Edot_l", "Edot_b_or_P_S", "Eeff_u", "Eeff_l", "Eeff_ph",
                        "Sdot_total", "law1_residual", "flags"}) {
    h.emplace_back(c);
  }
  return h;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? std::string(1, sep) : "") + items[i];
  return s;
}

std::vector<std::string> flux_row(const SweepResult& r, std::vector<std::string> flags) {
  std::vector<std::string> row{std::to_string(r.sample_id)};
  for (const auto& p : r.parameters) row.push_back(num(p.second));
  const AuditRecord& rec = r.record;
  if (!rec.flux) {
    for (int i = 0; i < 11; ++i) row.push_back(kNan);
    flags.insert(flags.begin(), rec.convergence_failure ? "no_convergence" : "model_error");
    row.push_back(join(flags, ';'));
    return row;
  }
  const FluxReport& f = *rec.flux;
  const EffectiveEnergies e = f.measured.value_or(f.predicted);
  for (double v : {f.rate, f.ndot_u, f.ndot_l, f.edot_u, f.edot_l, f.edot_b_or_power, e.upper, e.lower, e.photon,
                   rec.entropy->total, f.law1_residual}) {
    row.push_back(num(v));
  }
  std::vector<std::string> tags{to_string(rec.entropy->regime)};
  if (!f.measured) tags.emplace_back("eeff_predicted");
  if (rec.violation) tags.emplace_back("violation");
  if (rec.regime->sign_law_applicable && !rec.regime->sign_law_ok) tags.emplace_back("sign_law_fail");
  if (rec.regime->carnot_applicable) tags.emplace_back(rec.regime->carnot_ok ? "carnot_ok" : "carnot_fail");
  if (rec.regime->electroluminescent_cooling) tags.emplace_back("el_cooling");
  if (rec.sign && !rec.sign->agree) tags.emplace_back("hf_sign_mismatch");
  if (rec.fock_cutoff_used > 0 && rec.fock_cutoff_used != rec.spec.cavity.fock_cutoff) {
    tags.push_back("fock_cutoff=" + std::to_string(rec.fock_cutoff_used));
  }
  tags.insert(tags.end(), flags.begin(), flags.end());
  row.push_back(join(tags, ';'));
  return row;
}

ScenarioConfig load(const Options& o) {
  ScenarioConfig cfg = o.config.empty() ? default_scenario() : load_config(o.config);
  if (o.fock_cutoff) {
    if (*o.fock_cutoff < 1) throw UsageError("--fock-cutoff must be >= 1");
    cfg.spec.cavity.fock_cutoff = *o.fock_cutoff;
    cfg.solver.max_fock_cutoff = std::max(cfg.solver.max_fock_cutoff, *o.fock_cutoff);
  }
  if (o.tolerance) cfg.solver.tolerance = *o.tolerance;
  if (!o.treatment.empty()) {
    if (o.treatment == "classical") cfg.treatment = Treatment::Classical;
    else if (o.treatment == "quantum") cfg.treatment = Treatment::Quantum;
    else throw UsageError("--treatment must be classical or quantum");
  }
  return cfg;
}

AuditOptions audit_options(const ScenarioConfig& cfg, Treatment treatment) {
  AuditOptions a;
  a.treatment = treatment;
  a.tolerance = cfg.solver.tolerance;
  a.quantum.max_fock_cutoff = cfg.solver.max_fock_cutoff;
  a.quantum.ordering = cfg.solver.ordering;
  return a;
}

SweepPlan plan_from(const Options& o, std::size_t default_samples) {
  SweepPlan plan;
  if (!o.sweeps.empty() && !o.randoms.empty()) throw UsageError("--sweep and --random cannot be combined");
  if (!o.randoms.empty()) {
    plan.sampler = Sampler::UniformRandom;
    for (const auto& r : o.randoms) plan.ranges.push_back(parse_range(r, false));
    plan.samples = o.samples.value_or(default_samples);
  } else {
    for (const auto& s : o.sweeps) plan.ranges.push_back(parse_range(s, true));
  }
  plan.seed = o.seed;
  return plan;
}

std::vector<std::string> range_keys(const SweepPlan& plan) {
  std::vector<std::string> keys;
  for (const auto& r : plan.ranges) keys.push_back(r.key);
  return keys;
}

// Shared by classical-ss, quantum-ss and audit.
int run_flux_sweep(const Options& o, std::optional<Treatment> forced, bool fail_on_nonconvergence, std::string& csv,
                   std::ostream& err) {
  const ScenarioConfig cfg = load(o);
  const Treatment treatment = forced.value_or(cfg.treatment);
  const SweepPlan plan = plan_from(o, 1000);
  const auto results = sweep(cfg.spec, plan, audit_options(cfg, treatment));

  Csv table(flux_header(range_keys(plan)));
  bool failed = false;
  std::vector<std::string> extra;
  if (plan.sampler == Sampler::UniformRandom) extra.push_back("seed=" + std::to_string(plan.seed));
  for (const auto& r : results) {
    table.row(flux_row(r, extra));
    if (!r.record.error.empty()) {
      err << "sample " << r.sample_id << ": " << r.record.error << '\n';
      failed = failed || r.record.convergence_failure;
    }
  }
  csv = table.str();
  return failed && fail_on_nonconvergence ? kExitNoConvergence : kExitOk;
}

int run_classical_evolve(const Options& o, std::string& csv) {
  const ScenarioConfig cfg = load(o);
  const Occupations occ = resolve_occupations(cfg.spec, Treatment::Classical);
  const BlochState start{cfg.initial.sigma_uu, cfg.initial.sigma_ll, {0.0, 0.0}};
  const auto traj = evolve(start, cfg.spec, occ,
                           {cfg.solver.t_final, cfg.solver.dt, static_cast<std::size_t>(cfg.solver.record_every)});
  Csv table({"t", "sigma_uu", "sigma_ll", "sigma_ul_re", "sigma_ul_im", "R"});
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    const double rate = 2.0 * (std::conj(cfg.spec.drive.epsilon) * s.sigma_ul).imag();
    table.row({num(traj.times[i]), num(s.sigma_uu), num(s.sigma_ll), num(s.sigma_ul.real()), num(s.sigma_ul.imag()),
               num(rate)});
  }
  csv = table.str();
  return kExitOk;
}

int run_quantum_evolve(const Options& o, std::string& csv) {
  const ScenarioConfig cfg = load(o);
  const Occupations occ = resolve_occupations(cfg.spec, Treatment::Quantum);
  const HilbertLayout layout(cfg.spec.cavity.fock_cutoff, cfg.solver.ordering);
  const OperatorSet ops = build_operators(layout, cfg.spec);
  const Liouvillian l = build_liouvillian(layout, ops, cfg.spec, occ, Frame::Interaction);

  // Uncorrelated fermion populations, empty cavity.
  QuantumState rho0{DenseMatrix::Zero(layout.dim(), layout.dim())};
  const double pu = cfg.initial.sigma_uu, pl = cfg.initial.sigma_ll;
  for (int nl = 0; nl < 2; ++nl) {
    for (int nu = 0; nu < 2; ++nu) {
      const int i = layout.index(nl, nu, 0);
      rho0.rho(i, i) = (nu ? pu : 1.0 - pu) * (nl ? pl : 1.0 - pl);
    }
  }

  Csv table({"t", "sigma_uu", "sigma_ll", "n_ph", "Y_re", "Y_im", "R", "trace"});
  auto emit = [&](double t, const QuantumState& s) {
    const auto ob = observables(s.rho, ops, cfg.spec);
    table.row({num(t), num(ob.sigma_uu), num(ob.sigma_ll), num(ob.n_ph), num(ob.y.real()), num(ob.y.imag()),
               num(ob.rate), num(s.rho.trace().real())});
  };
  emit(0.0, rho0);
  QuantumEvolveOptions opt{cfg.solver.t_final, cfg.solver.dt, static_cast<std::size_t>(cfg.solver.record_every)};
  double last_t = 0.0;
  const QuantumState final_state = evolve_quantum(rho0, l, opt, [&](double t, const QuantumState& s) {
    emit(t, s);
    last_t = t;
  });
  if (last_t < cfg.solver.t_final) emit(cfg.solver.t_final, final_state);
  csv = table.str();
  return kExitOk;
}

int run_laser(const Options& o, std::string& csv, std::ostream& err) {
  const ScenarioConfig cfg = load(o);
  const SweepPlan plan = plan_from(o, 100);
  const auto points = sample_parameters(plan);
  std::vector<std::string> header{"sample_id"};
  for (const auto& k : range_keys(plan)) header.push_back(k);
  for (const char* c : {"omega", "intensity", "a_ss_re", "a_ss_im", "sigma_ul_re", "sigma_ul_im", "f_u", "f_l",
                        "threshold_inversion", "A", "flags"}) {
    header.emplace_back(c);
  }
  Csv table(header);
  int code = kExitOk;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    SystemSpec spec = cfg.spec;
    for (const auto& [k, v] : points[i]) {
      set_parameter(spec, k, v);
      row.push_back(num(v));
    }
    try {
      validate(spec);
      // Effective energies are taken at the pulled frequency.
      const Occupations occ = resolve_occupations(at_pulled_frequency(spec), Treatment::Classical);
      const LaserSolution sol = solve_lasing(spec, occ);
      for (double v : {sol.omega, sol.intensity, sol.a_ss.real(), sol.a_ss.imag(), sol.sigma_ul_ss.real(),
                       sol.sigma_ul_ss.imag(), occ.f_u, occ.f_l, sol.threshold_inversion, sol.a_coefficient}) {
        row.push_back(num(v));
      }
      row.emplace_back(sol.above_threshold ? "above_threshold" : "below_threshold");
    } catch (const ModelError& e) {
      err << "sample " << i << ": " << e.what() << '\n';
      for (int k = 0; k < 10; ++k) row.push_back(kNan);
      row.emplace_back("model_error");
      code = kExitConfig;
    }
    table.row(row);
  }
  csv = table.str();
  return code;
}

int run_bloch_gain(const Options& o, std::string& csv) {
  if (!o.equal_occ.empty() && (!o.upper_occ.empty() || !o.lower_occ.empty())) {
    throw UsageError("--equal-occupations cannot be combined with --upper/--lower");
  }
  const std::string up_text = o.equal_occ.empty() ? o.upper_occ : o.equal_occ;
  const std::string lo_text = o.equal_occ.empty() ? o.lower_occ : o.equal_occ;
  if (up_text.empty() || lo_text.empty()) throw UsageError("give --equal-occupations or both --upper and --lower");
  const SubbandOccupation fu = parse_subband(up_text);
  const SubbandOccupation fl = parse_subband(lo_text);
  const ParameterRange grid = parse_range("delta=" + o.grid, true);
  const GainRates gammas{o.gamma_u, o.gamma_l};

  const auto detunings = linear_grid(grid.lo, grid.hi, grid.count);
  const GainSpectrum spectrum = gain_spectrum(o.e_k0, detunings, gammas, fu, fl);
  Csv table({"delta", "rate", "bracket", "E_upper_avg", "E_lower_avg", "avg_energy_difference"});
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    const auto cmp = average_energy_equivalence(o.e_k0, detunings[i], gammas, fu, fl);
    table.row({num(detunings[i]), num(spectrum.rates[i]), num(cmp.bracket_value), num(cmp.e_upper_avg),
               num(cmp.e_lower_avg), num(cmp.difference)});
  }
  csv = table.str();
  return kExitOk;
}

int run_find_violation(const Options& o, std::string& csv, std::ostream& err) {
  const ScenarioConfig cfg = load(o);
  if (!o.sweeps.empty()) throw UsageError("find-violation samples randomly; use --random");
  std::vector<ParameterRange> ranges;
  for (const auto& r : o.randoms) ranges.push_back(parse_range(r, false));
  if (ranges.empty()) {
    ranges = {{"drive.delta", -1.0, 1.0, 1},       {"reservoir_u.temperature", 0.05, 0.5, 1},
              {"reservoir_l.temperature", 0.05, 0.5, 1}, {"reservoir_u.mu", -1.0, 2.0, 1},
              {"reservoir_l.mu", -1.0, 2.0, 1},    {"reservoir_u.gamma", 0.05, 0.5, 1},
              {"reservoir_l.gamma", 0.05, 0.5, 1}};
  }
  const std::size_t budget = o.samples.value_or(20000);
  const auto search =
      find_violation_with_bare_energies(cfg.spec, ranges, o.seed, budget, audit_options(cfg, cfg.treatment));

  std::vector<std::string> keys;
  for (const auto& r : ranges) keys.push_back(r.key);
  Csv table(flux_header(keys));
  const std::string seed_tag = "seed=" + std::to_string(o.seed);
  if (!search.bare) {
    err << "no violation in " << search.samples_tried << " samples (seed " << o.seed << ")\n";
    csv = table.str();
    return kExitNothingFound;
  }
  table.row(flux_row(*search.bare, {"thermal-bare", seed_tag}));
  table.row(flux_row(*search.effective, {"thermal-effective", seed_tag}));
  err << "violation at sample " << search.bare->sample_id << " after " << search.samples_tried << " samples\n";
  csv = table.str();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermodynamic audit of a driven two-level system", "tlsthermo"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool sweepable) {
    sub->add_option("--config", o.config, "Scenario file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Write CSV here instead of stdout");
    sub->add_option("--fock-cutoff", o.fock_cutoff, "Photon-number cutoff N");
    sub->add_option("--tolerance", o.tolerance, "Entropy violation tolerance");
    if (sweepable) sub->add_option("--sweep", o.sweeps, "Grid range key=a:b:n (repeatable)");
  };

  auto* classical_ss = app.add_subcommand("classical-ss", "Closed-form steady state with a classical field");
  common(classical_ss, true);
  auto* classical_evolve = app.add_subcommand("classical-evolve", "RK4 trajectory of the driven system");
  common(classical_evolve, false);
  auto* quantum_ss = app.add_subcommand("quantum-ss", "Steady state of the cavity master equation");
  common(quantum_ss, true);
  auto* quantum_evolve = app.add_subcommand("quantum-evolve", "RK4 trajectory of the cavity master equation");
  common(quantum_evolve, false);
  auto* laser = app.add_subcommand("laser", "Mean-field lasing solution and pulled frequency");
  common(laser, true);

  auto* audit = app.add_subcommand("audit", "First/second-law audit over a grid or random sample");
  common(audit, true);
  audit->add_option("--random", o.randoms, "Random range key=a:b (repeatable)");
  audit->add_option("--samples", o.samples, "Random sample count");
  audit->add_option("--seed", o.seed, "64-bit seed of the random sampler");
  audit->add_option("--treatment", o.treatment, "classical or quantum (overrides the config)");

  auto* find = app.add_subcommand("find-violation", "Search for negative entropy production with bare energies");
  common(find, false);
  find->add_option("--random", o.randoms, "Random range key=a:b (repeatable)");
  find->add_option("--samples", o.samples, "Sample budget");
  find->add_option("--seed", o.seed, "64-bit seed");
  find->add_option("--treatment", o.treatment, "classical or quantum (overrides the config)");

  auto* gain = app.add_subcommand("bloch-gain", "Detuned inter-subband transition rate spectrum");
  gain->add_option("--out", o.out, "Write CSV here instead of stdout");
  gain->add_option("--equal-occupations", o.equal_occ, "Same occupation for both subbands");
  gain->add_option("--upper", o.upper_occ, "Upper subband occupation");
  gain->add_option("--lower", o.lower_occ, "Lower subband occupation");
  gain->add_option("--grid", o.grid, "Detuning grid a:b:n");
  gain->add_option("--e-k0", o.e_k0, "In-plane energy E_k0");
  gain->add_option("--gamma-u", o.gamma_u, "Upper broadening");
  gain->add_option("--gamma-l", o.gamma_l, "Lower broadening");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string csv;
  int code = kExitOk;
  try {
    if (*classical_ss) code = run_flux_sweep(o, Treatment::Classical, true, csv, err);
    else if (*quantum_ss) code = run_flux_sweep(o, Treatment::Quantum, true, csv, err);
    else if (*audit) code = run_flux_sweep(o, std::nullopt, false, csv, err);
    else if (*classical_evolve) code = run_classical_evolve(o, csv);
    else if (*quantum_evolve) code = run_quantum_evolve(o, csv);
    else if (*laser) code = run_laser(o, csv, err);
    else if (*gain) code = run_bloch_gain(o, csv);
    else if (*find) code = run_find_violation(o, csv, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver did not converge: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNoConvergence;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (o.out.empty()) {
    out << csv;
  } else {
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << o.out << "'\n";
      return kExitConfig;
    }
    file << csv;
  }
  return code;
}

}  // namespace tlsthermo::cli
