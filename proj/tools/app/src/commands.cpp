#include "vibron_app/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "vibron/errors.hpp"

namespace vibron::app {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::string tag_of(double mhz) {
  std::string s = fmt::format("{:.3f}", mhz);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

int precision(const ScenarioConfig& cfg) { return cfg.integer("output.precision"); }

SecularFrequencies freqs_at(const TrapContext& ctx, double omega_x) {
  return {omega_x, ctx.omega_z};
}

double mhz(double rad) { return units::rad_to_mhz(rad); }

std::vector<std::string> surfaces_of(const std::string& choice) {
  if (choice == "both") return {"ground", "rydberg"};
  return {choice};
}

PesModel surface_pes(const TrapContext& ctx, double omega_x, const std::string& surface) {
  return make_pes(ctx.ions, freqs_at(ctx, omega_x), ctx.omega_rf, ctx.pol, surface == "rydberg");
}

double fc_norm(const DuschinskyMap& map) { return map.displacement.norm(); }

}  // namespace

TrapContext trap_context(const ScenarioConfig& cfg) {
  TrapContext ctx;
  ctx.ions = IonConstants::from_mass_amu(cfg.real("ion.mass_amu"));
  ctx.omega_z = cfg.angular("trap.omega_z_mhz");
  ctx.omega_rf = cfg.angular("trap.omega_rf_mhz");
  if (cfg.text("polarisability.units") == "si") {
    ctx.pol = Polarisability{cfg.real("polarisability.value")};
  } else {
    const double target = cfg.angular("polarisability.value");
    if (!(target > 0.0)) {
      throw ConfigError("polarisability.value", "critical frequency target must be positive");
    }
    ctx.pol = polarisability_for_critical_frequency(target, ctx.omega_z, ctx.omega_rf, ctx.ions);
  }
  return ctx;
}

EquilibriumResult stable_equilibrium(const PesModel& pes) {
  if (lowest_radial_eigenvalue(pes) > 0.0) return equilibrium_linear_analytic(pes);
  return equilibrium_zigzag_analytic(pes);
}

DressedState dressed_state(const ScenarioConfig& cfg) {
  DressedState d;
  d.theta = mixing_angle(cfg.angular("dressing.omega_mw_mhz"), cfg.angular("dressing.delta_mw_mhz"));
  const double ratio = cfg.real("dressing.pol_p_over_pol_s");
  d.pol_p_over_pol_s =
      ratio != 0.0 ? ratio : calibrate_pol_p(d.theta, cfg.real("dressing.residual_fraction"), 1.0);
  d.residual_fraction = dressed_polarisability(d.theta, 1.0, d.pol_p_over_pol_s).value;
  return d;
}

void run_equilibrium(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  const double wx = cfg.angular("trap.omega_x_mhz");
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.integer("seed")));
  std::uniform_real_distribution<double> jitter(-1e-8, 1e-8);
  CsvTable t({"surface", "method", "configuration", "ion_index", "x_m", "z_m", "residual_m"}, precision(cfg));
  for (const auto& s : surfaces_of(cfg.text("equilibrium.surface"))) {
    const PesModel pes = surface_pes(ctx, wx, s);
    const EquilibriumResult analytic = stable_equilibrium(pes);
    IonPositions seed = analytic.positions;
    for (std::size_t i = 0; i < 3; ++i) {
      seed.x[i] += jitter(rng);
      seed.z[i] += jitter(rng);
    }
    EquilibriumResult numeric = equilibrium_numeric(pes, seed);
    if (numeric.positions.x[0] < 0.0) {
      for (auto& x : numeric.positions.x) x = -x;
    }
    double worst = 0.0;
    for (const EquilibriumResult* eq : {&analytic, static_cast<const EquilibriumResult*>(&numeric)}) {
      const bool is_numeric = eq == &numeric;
      for (std::size_t i = 0; i < 3; ++i) {
        const double r = std::hypot(numeric.positions.x[i] - analytic.positions.x[i],
                                    numeric.positions.z[i] - analytic.positions.z[i]);
        worst = std::max(worst, r);
        t.row().add(s).add(is_numeric ? "numeric" : "analytic").add(to_string(eq->configuration))
            .add(static_cast<int>(i)).add(eq->positions.x[i]).add(eq->positions.z[i]).add(is_numeric ? r : 0.0);
      }
    }
    out.result(s + ".configuration", to_string(analytic.configuration));
    out.result(s + ".analytic_gradient_norm", analytic.gradient_norm);
    out.result(s + ".numeric_gradient_norm", numeric.gradient_norm);
    out.result(s + ".max_residual_m", worst);
  }
  out.result("polarisability", ctx.pol.value);
  out.write("equilibrium.csv", t);
}

void run_modes(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  const double wx = cfg.angular("trap.omega_x_mhz");
  CsvTable t({"surface", "mode_label", "frequency_mhz", "v_x0", "v_x1", "v_x2", "v_z0", "v_z1", "v_z2"},
             precision(cfg));
  for (const auto& s : surfaces_of(cfg.text("modes.surface"))) {
    const PesModel pes = surface_pes(ctx, wx, s);
    const EquilibriumResult eq = stable_equilibrium(pes);
    const ModeSet modes = full_mode_analysis(pes, eq.positions);
    for (std::size_t k = 0; k < modes.size(); ++k) {
      t.row().add(s).add(modes.labels[k]).add(mhz(modes.frequencies[k]));
      const Vector6 v = modes.vector(k);
      for (int c = 0; c < 6; ++c) t.add(v(c));
    }
    out.result(s + ".configuration", to_string(eq.configuration));
  }
  out.write("modes.csv", t);
}

void run_soften(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  const auto grid_mhz = linspace(cfg.real("soften.omega_x_min_mhz"), cfg.real("soften.omega_x_max_mhz"),
                                 cfg.integer("soften.points"));
  std::vector<double> grid;
  for (double g : grid_mhz) grid.push_back(units::mhz_to_rad(g));
  CsvTable t({"surface", "omega_x_mhz", "min_eigensq"}, precision(cfg));
  for (const auto& s : surfaces_of(cfg.text("soften.surface"))) {
    const PesBuilder build = [&](double wx) { return surface_pes(ctx, wx, s); };
    for (double wx : grid) {
      t.row().add(s).add(mhz(wx)).add(lowest_radial_eigenvalue(build(wx)));
    }
    const double crit = softening_scan(ctx.omega_z, grid, build);
    out.result(s + ".critical_mhz", mhz(crit));
    if (s == "rydberg") {
      const double ground_crit = critical_frequency_exact3(ctx.omega_z);
      const auto grad = gradients_from_frequencies({ground_crit, ctx.omega_z}, ctx.omega_rf, ctx.ions);
      out.result("rydberg.critical_approx_mhz",
                 mhz(critical_frequency_rydberg(ground_crit, grad, ctx.pol, ctx.ions)));
    }
  }
  out.write("soften.csv", t);
}

void run_fc(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  const SurfacePair sp = make_surface_pair(ctx.ions, freqs_at(ctx, cfg.angular("trap.omega_x_mhz")),
                                           ctx.omega_rf, ctx.pol);
  const int n_cm = cfg.integer("fc.n_cm");
  const int n_zz = cfg.integer("fc.n_zz");
  const int n_max = std::max({cfg.integer("fc.n_max"), n_cm, n_zz});
  const double bound = cfg.real("fc.completeness_bound");
  const FCMatrix fc = fc_matrix(sp.map, n_max, cfg.integer("fc.m_max"), bound);
  const std::string marginal = cfg.text("fc.marginal");
  if (marginal == "none") {
    CsvTable t({"m1", "m2", "coeff", "coeff_sq"}, precision(cfg));
    for (int m1 = 0; m1 <= fc.m_max(); ++m1) {
      for (int m2 = 0; m2 <= fc.m_max(); ++m2) {
        const double c = fc(n_cm, n_zz, m1, m2);
        t.row().add(m1).add(m2).add(c).add(c * c);
      }
    }
    out.write("fc.csv", t);
  } else {
    const int mode = marginal == "m1" ? 1 : 2;
    const auto dist = fc_marginal(fc, {n_cm, n_zz}, mode);
    CsvTable t({marginal, "fc_factor"}, precision(cfg));
    for (std::size_t m = 0; m < dist.size(); ++m) t.row().add(m).add(dist[m]);
    out.write("fc_marginal_" + marginal + ".csv", t);
    const auto peak = std::max_element(dist.begin(), dist.end()) - dist.begin();
    out.result("marginal_peak", fmt::format("{}", peak));
  }
  const double defect = fc.completeness_defect(n_cm, n_zz);
  out.result("rydberg_configuration", to_string(sp.excited_equilibrium.configuration));
  out.result("displacement_norm", fc_norm(sp.map));
  out.result("completeness_defect", defect);
  out.result("completeness_ok", defect < bound ? "true" : "false");
  out.result("omega_1_mhz", mhz(sp.map.frequencies_excited(0)));
  out.result("omega_2_mhz", mhz(sp.map.frequencies_excited(1)));
  if (!(defect < bound)) {
    out.warn(fmt::format("FC completeness defect {:.3g} exceeds bound {:.3g}; raise fc.m_max",
                         defect, bound));
  }
}

SpectrumResult spectrum_at(const ScenarioConfig& cfg, const TrapContext& ctx, double omega_x,
                           const std::string& tag, RunManifest& out, const std::string& file) {
  Polarisability pol = ctx.pol;
  double omega_pr = cfg.angular("dynamics.omega_pr_mhz");
  if (cfg.flag("dynamics.dressed")) {
    const DressedState d = dressed_state(cfg);
    pol = dressed_polarisability(d.theta, ctx.pol.value, d.pol_p_over_pol_s * ctx.pol.value);
    const double c = std::cos(d.theta);
    omega_pr *= c * c;
  }
  const SurfacePair sp = make_surface_pair(ctx.ions, freqs_at(ctx, omega_x), ctx.omega_rf, pol);
  if (sp.excited_equilibrium.configuration != Configuration::Linear) {
    throw PhysicsError(ErrorCode::Unstable,
                       fmt::format("spectrum at omega_x = {:.4f} MHz: the excited crystal is zigzag; "
                                   "density-matrix spectra are limited to the linear regime",
                                   mhz(omega_x)));
  }
  const int n1 = cfg.integer("dynamics.n1_max");
  const int n2 = cfg.integer("dynamics.n2_max");
  const CompositeSpace space(n1, n2);
  const FCMatrix fc = fc_matrix(sp.map, std::max(n1, n2) - 1, cfg.integer("dynamics.fc_m_max"),
                                cfg.real("fc.completeness_bound"));
  const LaserParams laser{0.0, cfg.angular("dynamics.omega_gp_mhz"), omega_pr};
  const DecayRates rates{cfg.real("dynamics.gamma_sp_mhz") * 1e6, cfg.real("dynamics.gamma_gp_mhz") * 1e6,
                         1.0 / (cfg.real("dynamics.tau_us") * 1e-6)};
  const LindbladModel base = build_hamiltonian(
      space, laser, rates, {sp.map.frequencies_ground(0), sp.map.frequencies_ground(1)},
      {sp.map.frequencies_excited(0), sp.map.frequencies_excited(1)}, fc,
      cfg.real("fc.completeness_bound"));
  const ThermalPhononState th = thermal_state(space, cfg.real("dynamics.nbar_cm"), cfg.real("dynamics.nbar_zz"));
  const Eigen::MatrixXcd rho0 = product_state(space, ElectronicLevel::g, th);

  EvolveOptions opts;
  opts.integrator.rtol = cfg.real("dynamics.rtol");
  if (cfg.text("dynamics.integrator") == "fixed") {
    opts.integrator.mode = IntegratorOptions::Mode::FixedStep;
    opts.integrator.fixed_step = cfg.real("dynamics.fixed_step_ns") * 1e-9;
  }
  const auto grid_mhz = linspace(cfg.real("dynamics.delta_min_mhz"), cfg.real("dynamics.delta_max_mhz"),
                                 cfg.integer("dynamics.delta_points"));
  std::vector<double> grid;
  for (double g : grid_mhz) grid.push_back(units::mhz_to_rad(g));
  const ModelBuilder builder = [&base](double delta) { return base.with_detuning(delta); };
  const SpectrumResult res = spectrum(builder, grid, rho0, cfg.real("dynamics.t_probe_us") * 1e-6, opts,
                                      static_cast<unsigned>(cfg.integer("dynamics.workers")));
  const auto signal = fluorescence_signal(res, cfg.real("dynamics.branching"));

  CsvTable t({"delta_mhz", "p_r", "p_s", "p_g", "p_p", "trace_defect", "p_r_time_avg",
              "positivity_defect", "signal"},
             precision(cfg));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = res.populations[i];
    t.row().add(grid_mhz[i]).add(p.r).add(p.s).add(p.g).add(p.p).add(res.trace_defect[i])
        .add(res.rydberg_time_average[i]).add(res.positivity_defect[i]).add(signal[i]);
  }
  out.write(file, t);

  const auto pr = res.rydberg();
  const PeakEstimate pk = locate_peak(grid, pr);
  const PeakEstimate pk_avg = locate_peak(grid, res.rydberg_time_average);
  const PeakEstimate pk_sig = locate_peak(grid, signal);
  out.result(tag + "peak_delta_mhz", mhz(pk.delta));
  out.result(tag + "peak_height", pk.height);
  out.result(tag + "peak_delta_time_avg_mhz", mhz(pk_avg.delta));
  out.result(tag + "signal_peak_delta_mhz", mhz(pk_sig.delta));
  out.result(tag + "max_trace_defect", res.max_trace_defect());
  out.result(tag + "max_positivity_defect", res.max_positivity_defect());
  out.result(tag + "fc_completeness_defect", fc.max_completeness_defect(n1, n2));
  return res;
}

void run_spectrum(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  spectrum_at(cfg, ctx, cfg.angular("trap.omega_x_mhz"), "", out, "spectrum.csv");
}

namespace {

using MeasurementGroups = std::map<double, std::vector<ShiftMeasurement>>;

struct DressingAnalysis {
  std::vector<double> delta;  ///< rad/s
  std::vector<PolarisabilityFit> fits;
  CurveFit curve;
  double zero_detuning = 0.0;
  double residual_at_working = 0.0;  ///< relative to P_S
};

// Polarisabilities are reported relative to the bare S value in Stark units.
double stark_pol_s(const ScenarioConfig& cfg, double alpha, double hbar) {
  return cfg.real("dressing.shift_scale_khz") * 1e3 * hbar / (alpha * alpha * 1e-12);
}

double alpha_of(const ScenarioConfig& cfg, const TrapContext& ctx) {
  return gradients_from_frequencies({cfg.angular("trap.omega_x_mhz"), ctx.omega_z}, ctx.omega_rf, ctx.ions).alpha;
}

DressingAnalysis analyse(const ScenarioConfig& cfg, const MeasurementGroups& groups, double alpha,
                         double hbar, double pol_s, double ratio) {
  DressingAnalysis a;
  std::vector<CurvePoint> points;
  for (const auto& [delta, ms] : groups) {
    a.delta.push_back(delta);
    a.fits.push_back(fit_polarisability(ms, alpha, hbar));
    points.push_back({delta, a.fits.back().value});
  }
  const double omega_mw = cfg.angular("dressing.omega_mw_mhz");
  a.curve = fit_polarisability_curve(points, omega_mw, pol_s, ratio * pol_s);
  DressingParams params{omega_mw, 0.0, pol_s, ratio * pol_s};
  a.zero_detuning = ratio < 0.0 ? zero_polarisability_detuning(params) - a.curve.detuning_offset
                                : std::nan("");
  const double th = mixing_angle(omega_mw, cfg.angular("dressing.delta_mw_mhz") + a.curve.detuning_offset);
  a.residual_at_working = a.curve.scale * dressed_polarisability(th, 1.0, ratio).value;
  return a;
}

void emit_analysis(const ScenarioConfig& cfg, const DressingAnalysis& a, double pol_s, double ratio,
                   RunManifest& out, const std::string& fits_file, const std::string& curve_file) {
  CsvTable t({"delta_mw_mhz", "pol_rel", "pol_err_rel", "reduced_chi2"}, precision(cfg));
  for (std::size_t i = 0; i < a.delta.size(); ++i) {
    t.row().add(mhz(a.delta[i])).add(a.fits[i].value / pol_s).add(a.fits[i].std_error / pol_s)
        .add(a.fits[i].reduced_chi2);
  }
  out.write(fits_file, t);

  const double omega_mw = cfg.angular("dressing.omega_mw_mhz");
  CsvTable c({"delta_mw_mhz", "theta", "pol_two_level_rel", "pol_fit_rel"}, precision(cfg));
  for (double d : linspace(cfg.real("dressing.delta_min_mhz"), cfg.real("dressing.delta_max_mhz"),
                           cfg.integer("dressing.points"))) {
    const double delta = units::mhz_to_rad(d);
    const double th = mixing_angle(omega_mw, delta);
    const double th_fit = mixing_angle(omega_mw, delta + a.curve.detuning_offset);
    c.row().add(d).add(th).add(dressed_polarisability(th, 1.0, ratio).value)
        .add(a.curve.scale * dressed_polarisability(th_fit, 1.0, ratio).value);
  }
  out.write(curve_file, c);

  out.result("fit_scale", a.curve.scale);
  out.result("fit_detuning_offset_mhz", mhz(a.curve.detuning_offset));
  out.result("zero_polarisability_detuning_mhz", mhz(a.zero_detuning));
  out.result("residual_at_working_detuning", a.residual_at_working);
  out.result("pol_p_over_pol_s", ratio);
}

MeasurementGroups read_measurements(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("dressing.measurements", "cannot read '" + path + "'");
  MeasurementGroups groups;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.find("delta_mw_mhz") != std::string::npos) continue;
    std::array<double, 4> v{};
    std::string_view rest = line;
    for (int k = 0; k < 4; ++k) {
      const auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      const auto r = std::from_chars(item.data(), item.data() + item.size(), v[static_cast<std::size_t>(k)]);
      if (r.ec != std::errc() || (k < 3 && comma == std::string_view::npos)) {
        throw ConfigError("dressing.measurements",
                          fmt::format("{}:{}: expected delta_mw_mhz,dx_um,shift_khz,err_khz", path, lineno));
      }
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    groups[units::mhz_to_rad(v[0])].push_back({v[1] * 1e-6, v[2] * 1e3, v[3] * 1e3});
  }
  if (groups.size() < 3) {
    throw ConfigError("dressing.measurements", "need measurements at three or more detunings");
  }
  return groups;
}

}  // namespace

void run_dressing(const ScenarioConfig& cfg, RunManifest& out) {
  const std::string path = cfg.text("dressing.measurements");
  if (path.empty()) throw ConfigError("dressing.measurements", "no measurement file given");
  const TrapContext ctx = trap_context(cfg);
  const double alpha = alpha_of(cfg, ctx);
  const double pol_s = stark_pol_s(cfg, alpha, ctx.ions.hbar());
  const double ratio = dressed_state(cfg).pol_p_over_pol_s;
  const DressingAnalysis a = analyse(cfg, read_measurements(path), alpha, ctx.ions.hbar(), pol_s, ratio);
  emit_analysis(cfg, a, pol_s, ratio, out, "dressing_fit.csv", "dressing_curve.csv");
}

namespace {

void scenario_fig1(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  const int prec = precision(cfg);
  const double gamma = cfg.real("fig1.linewidth_mhz");
  const auto deltas = linspace(cfg.real("fig1.delta_min_mhz"), cfg.real("fig1.delta_max_mhz"),
                               cfg.integer("fig1.points"));
  CsvTable prof({"omega_x_mhz", "delta_mhz", "signal"}, prec);
  CsvTable lines({"omega_x_mhz", "m1", "m2", "delta_mhz", "fc_factor"}, prec);
  CsvTable summary({"omega_x_mhz", "rydberg_configuration", "omega_cm_mhz", "omega_zz_mhz",
                    "omega_1_mhz", "omega_2_mhz", "displacement_norm", "zpl_strength",
                    "completeness_defect"},
                   prec);
  for (double wx_mhz : cfg.list("trap.omega_x_list_mhz")) {
    const SurfacePair sp = make_surface_pair(ctx.ions, freqs_at(ctx, units::mhz_to_rad(wx_mhz)),
                                             ctx.omega_rf, ctx.pol);
    const FCMatrix fc = fc_matrix(sp.map, 0, cfg.integer("fc.m_max"), cfg.real("fc.completeness_bound"));
    const auto& wg = sp.map.frequencies_ground;
    const auto& we = sp.map.frequencies_excited;
    const double e0 = 0.5 * (wg(0) + wg(1));
    struct Line { double delta; double weight; };
    std::vector<Line> sticks;
    for (int m1 = 0; m1 <= fc.m_max(); ++m1) {
      for (int m2 = 0; m2 <= fc.m_max(); ++m2) {
        const double c = fc(0, 0, m1, m2);
        if (c * c < 1e-8) continue;
        const double d = mhz(we(0) * (m1 + 0.5) + we(1) * (m2 + 0.5) - e0);
        sticks.push_back({d, c * c});
        lines.row().add(wx_mhz).add(m1).add(m2).add(d).add(c * c);
      }
    }
    for (double d : deltas) {
      double s = 0.0;
      for (const auto& l : sticks) {
        const double x = (d - l.delta) / (0.5 * gamma);
        s += l.weight / (1.0 + x * x);
      }
      prof.row().add(wx_mhz).add(d).add(s);
    }
    const double c00 = fc(0, 0, 0, 0);
    summary.row().add(wx_mhz).add(to_string(sp.excited_equilibrium.configuration)).add(mhz(wg(0)))
        .add(mhz(wg(1))).add(mhz(we(0))).add(mhz(we(1))).add(fc_norm(sp.map)).add(c00 * c00)
        .add(fc.completeness_defect(0, 0));
    out.result(fmt::format("zpl_strength_{}", tag_of(wx_mhz)), c00 * c00);
  }
  out.write("fig1_spectra.csv", prof);
  out.write("fig1_lines.csv", lines);
  out.write("fig1_summary.csv", summary);
}

void drop_table(const ScenarioConfig& cfg, const TrapContext& ctx, const Polarisability& pol,
                double strength_factor, CsvTable& t) {
  for (double wx_mhz : linspace(cfg.real("drop.omega_x_min_mhz"), cfg.real("drop.omega_x_max_mhz"),
                                cfg.integer("drop.points"))) {
    const SurfacePair sp = make_surface_pair(ctx.ions, freqs_at(ctx, units::mhz_to_rad(wx_mhz)),
                                             ctx.omega_rf, pol);
    const FCMatrix fc = fc_matrix(sp.map, 0, 0, 1.0);
    const double c00 = fc(0, 0, 0, 0);
    t.row().add(wx_mhz).add(to_string(sp.excited_equilibrium.configuration))
        .add(mhz(sp.map.frequencies_excited(1))).add(fc_norm(sp.map)).add(c00 * c00)
        .add(strength_factor * c00 * c00);
  }
}

void scenario_fig2b(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  CsvTable t({"omega_x_mhz", "rydberg_configuration", "omega_2_mhz", "displacement_norm",
              "zpl_strength", "excitation_strength"},
             precision(cfg));
  drop_table(cfg, ctx, ctx.pol, 1.0, t);
  out.write("fig2b_drop.csv", t);
}

void scenario_fig2d(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  const DressedState d = dressed_state(cfg);
  const Polarisability dressed =
      dressed_polarisability(d.theta, ctx.pol.value, d.pol_p_over_pol_s * ctx.pol.value);
  const double c = std::cos(d.theta);
  CsvTable bare({"omega_x_mhz", "rydberg_configuration", "omega_2_mhz", "displacement_norm",
                 "zpl_strength", "excitation_strength"},
                precision(cfg));
  CsvTable dres = bare;
  drop_table(cfg, ctx, ctx.pol, 1.0, bare);
  drop_table(cfg, ctx, dressed, c * c, dres);
  out.write("fig2d_bare.csv", bare);
  out.write("fig2d_dressed.csv", dres);
  out.result("theta", d.theta);
  out.result("residual_fraction", d.residual_fraction);
  out.result("dressed_critical_approx_mhz",
             mhz(critical_frequency_rydberg(
                 critical_frequency_exact3(ctx.omega_z),
                 gradients_from_frequencies({critical_frequency_exact3(ctx.omega_z), ctx.omega_z},
                                            ctx.omega_rf, ctx.ions),
                 dressed, ctx.ions)));
}

void scenario_fig2c(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  CsvTable t({"omega_z_mhz", "omega_x_crit_ground_mhz", "omega_x_crit_rydberg_mhz",
              "omega_x_crit_approx_mhz", "omega_x_crit_scaling_mhz", "ratio_ground", "ratio_rydberg"},
             precision(cfg));
  for (double wz_mhz : cfg.list("phase.omega_z_list_mhz")) {
    const double wz = units::mhz_to_rad(wz_mhz);
    std::vector<double> grid;
    for (double r : linspace(1.0, 2.5, 61)) grid.push_back(r * wz);
    const PesBuilder ground = [&](double wx) {
      return make_pes(ctx.ions, {wx, wz}, ctx.omega_rf, ctx.pol, false);
    };
    const PesBuilder excited = [&](double wx) {
      return make_pes(ctx.ions, {wx, wz}, ctx.omega_rf, ctx.pol, true);
    };
    const double g = softening_scan(wz, grid, ground);
    const double r = softening_scan(wz, grid, excited);
    const double approx = critical_frequency_rydberg(
        g, gradients_from_frequencies({g, wz}, ctx.omega_rf, ctx.ions), ctx.pol, ctx.ions);
    t.row().add(wz_mhz).add(mhz(g)).add(mhz(r)).add(mhz(approx))
        .add(mhz(critical_frequency_scaling(3, wz))).add(g / wz).add(r / wz);
    out.result(fmt::format("rydberg_critical_mhz_{}", tag_of(wz_mhz)), mhz(r));
  }
  out.write("fig2c_phase_diagram.csv", t);
}

void scenario_fig3(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  const double alpha = alpha_of(cfg, ctx);
  const double hbar = ctx.ions.hbar();
  const double pol_s = stark_pol_s(cfg, alpha, hbar);
  const double ratio = dressed_state(cfg).pol_p_over_pol_s;
  const double omega_mw = cfg.angular("dressing.omega_mw_mhz");
  const double noise = cfg.real("dressing.noise");
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.integer("seed")));
  std::normal_distribution<double> gauss(0.0, 1.0);

  MeasurementGroups groups;
  CsvTable raw({"delta_mw_mhz", "dx_um", "shift_khz", "err_khz"}, precision(cfg));
  for (double d : linspace(cfg.real("dressing.delta_min_mhz"), cfg.real("dressing.delta_max_mhz"),
                           cfg.integer("dressing.points"))) {
    const double delta = units::mhz_to_rad(d);
    const double th = mixing_angle(omega_mw, delta + units::mhz_to_rad(cfg.real("dressing.truth_offset_mhz")));
    const Polarisability truth{cfg.real("dressing.truth_scale") *
                               dressed_polarisability(th, pol_s, ratio * pol_s).value};
    for (double dx_um : cfg.list("dressing.dx_um_list")) {
      const double dx = dx_um * 1e-6;
      const double sigma = std::max(noise, 1e-9) * std::abs(stark_shift({pol_s}, alpha, dx, hbar));
      double shift = stark_shift(truth, alpha, dx, hbar);
      if (noise > 0.0) shift += sigma * gauss(rng);
      groups[delta].push_back({dx, shift, sigma});
      raw.row().add(d).add(dx_um).add(shift * 1e-3).add(sigma * 1e-3);
    }
  }
  out.write("sm_fig3a_shifts.csv", raw);
  const DressingAnalysis a = analyse(cfg, groups, alpha, hbar, pol_s, ratio);
  emit_analysis(cfg, a, pol_s, ratio, out, "sm_fig3b_polarisability.csv", "sm_fig3b_curve.csv");
}

void scenario_fig4(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  const int prec = precision(cfg);
  const int m_max = cfg.integer("fc.m_max");
  CsvTable summary({"omega_x_mhz", "rydberg_configuration", "peak_m2", "peak_fc_factor", "odd_weight",
                    "completeness_defect"},
                   prec);
  // Thermal rows cover the configured occupations to the same tail bound as the dynamics.
  const CompositeSpace thermal_space(6, 6);
  const ThermalPhononState th =
      thermal_state(thermal_space, cfg.real("dynamics.nbar_cm"), cfg.real("dynamics.nbar_zz"));
  for (double wx_mhz : cfg.list("trap.omega_x_list_mhz")) {
    const SurfacePair sp = make_surface_pair(ctx.ions, freqs_at(ctx, units::mhz_to_rad(wx_mhz)),
                                             ctx.omega_rf, ctx.pol);
    const FCMatrix fc = fc_matrix(sp.map, std::max(cfg.integer("fc.n_max"), 5), m_max,
                                  cfg.real("fc.completeness_bound"));
    const auto dist = fc_marginal(fc, {0, 0}, 2);
    CsvTable t({"m2", "fc_factor", "fc_factor_thermal_nonpaper"}, prec);
    double odd = 0.0;
    for (int m = 0; m <= m_max; ++m) {
      double thermal = 0.0;
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          double row = 0.0;
          for (int m1 = 0; m1 <= m_max; ++m1) {
            const double c = fc(a, b, m1, m);
            row += c * c;
          }
          thermal += th.weights_cm(a) * th.weights_zz(b) * row;
        }
      }
      t.row().add(m).add(dist[static_cast<std::size_t>(m)]).add(thermal);
      if (m % 2 == 1) odd += dist[static_cast<std::size_t>(m)];
    }
    out.write(fmt::format("sm_fig4_fc_{}.csv", tag_of(wx_mhz)), t);
    const auto peak = std::max_element(dist.begin(), dist.end()) - dist.begin();
    summary.row().add(wx_mhz).add(to_string(sp.excited_equilibrium.configuration))
        .add(static_cast<long long>(peak)).add(dist[static_cast<std::size_t>(peak)]).add(odd)
        .add(fc.completeness_defect(0, 0));
    out.result(fmt::format("peak_m2_{}", tag_of(wx_mhz)), fmt::format("{}", peak));
  }
  out.write("sm_fig4_summary.csv", summary);
}

void scenario_fig5(const ScenarioConfig& cfg, RunManifest& out) {
  const TrapContext ctx = trap_context(cfg);
  CsvTable summary({"omega_x_mhz", "peak_delta_mhz", "peak_height", "peak_delta_time_avg_mhz",
                    "peak_height_time_avg", "signal_peak_delta_mhz", "max_trace_defect",
                    "max_positivity_defect"},
                   precision(cfg));
  for (double wx_mhz : cfg.list("trap.omega_x_list_mhz")) {
    const std::string tag = tag_of(wx_mhz);
    const SpectrumResult res = spectrum_at(cfg, ctx, units::mhz_to_rad(wx_mhz), tag + ".", out,
                                           fmt::format("sm_fig5_spectrum_{}.csv", tag));
    std::vector<double> grid = res.delta;
    const PeakEstimate pk = locate_peak(grid, res.rydberg());
    const PeakEstimate pa = locate_peak(grid, res.rydberg_time_average);
    const PeakEstimate ps = locate_peak(grid, fluorescence_signal(res, cfg.real("dynamics.branching")));
    summary.row().add(wx_mhz).add(mhz(pk.delta)).add(pk.height).add(mhz(pa.delta)).add(pa.height)
        .add(mhz(ps.delta)).add(res.max_trace_defect()).add(res.max_positivity_defect());
  }
  out.write("sm_fig5_summary.csv", summary);
}

}  // namespace

void run_scenario(const ScenarioConfig& cfg, RunManifest& out) {
  const std::string& name = cfg.scenario();
  if (name == "fig1_spectra") return scenario_fig1(cfg, out);
  if (name == "fig2b_drop") return scenario_fig2b(cfg, out);
  if (name == "fig2c_phase_diagram") return scenario_fig2c(cfg, out);
  if (name == "fig2d_dressed") return scenario_fig2d(cfg, out);
  if (name == "sm_fig3_dressing") return scenario_fig3(cfg, out);
  if (name == "sm_fig4_fc") return scenario_fig4(cfg, out);
  if (name == "sm_fig5_spectrum") return scenario_fig5(cfg, out);
  throw ConfigError("scenario", "the scenario command needs scenario = one of {" +
                                    fmt::format("{}", fmt::join(scenario_names(), ", ")) + "}");
}

}  // namespace vibron::app
