#include "nsdi/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "nsdi/errors.hpp"
#include "nsdi/perturbative.hpp"
#include "nsdi/svg.hpp"
#include "nsdi/tdse.hpp"
#include "nsdi/units.hpp"

namespace nsdi::cli {

namespace {

struct BuiltinAtom {
  const char* name;
  double binding_outer_ev;
  double binding_inner_ev;
  const char* outer_file;
  const char* inner_file;
};

constexpr BuiltinAtom kBuiltins[] = {
    {"he", 24.587, 54.418, "he.csv", "heplus.csv"},
    {"ne", 21.6, 40.9, "ne.csv", "neplus.csv"},
};

constexpr double kToyOuter = 1.0;
constexpr double kToyInner = 2.0;
constexpr double kToyCoverage = 10.0;

std::string num(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string e6(double v) { return num("%.6e", v); }
std::string f6(double v) { return num("%.6f", v); }
std::string g9(double v) { return num("%.9g", v); }

double dsde_to_cm4s_per_ev(double au) { return au * units::kGenXsecCm4s / units::kHartreeEV; }

std::filesystem::path data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("NSDI_DATA_DIR"); env && *env) return env;
  throw NotFound("no data directory: pass --data-dir or set NSDI_DATA_DIR");
}

// Each curve must reach the largest photon energy the computation evaluates.
void require_coverage(const AtomModel& atom, double omega, double outer_needed, double inner_needed) {
  const auto check = [&](const CrossSectionCurve& curve, double needed, const char* which) {
    if (curve.max_energy() < needed) {
      throw CoverageError(needed, std::string(which) + " cross section '" + curve.label() + "' ends at " +
                                      g9(units::au_to_ev(curve.max_energy())) + " eV but photon energy " +
                                      g9(units::au_to_ev(omega)) + " eV needs it up to " +
                                      g9(units::au_to_ev(needed)) + " eV");
    }
  };
  check(atom.sigma_outer, outer_needed, "outer");
  check(atom.sigma_inner, inner_needed, "inner");
}

void require_window(const AtomModel& atom, double omega) {
  const Window w = nonseq_window(atom);
  if (!w.contains(omega)) {
    throw WindowError("photon energy " + g9(units::au_to_ev(omega)) + " eV outside the nonsequential window (" +
                      g9(units::au_to_ev(w.omega_min)) + ", " + g9(units::au_to_ev(w.omega_max)) + ") eV of " +
                      atom.name);
  }
}

std::string sdcs_rows(const SdcsCurve& curve) {
  std::ostringstream out;
  out << "electron_energy_eV,dsdE_cm4_s_per_eV,normalized\n";
  const double peak = curve.values.size() ? curve.values.maxCoeff() : 0.0;
  for (Eigen::Index k = 0; k < curve.values.size(); ++k) {
    out << f6(units::au_to_ev(curve.energies[k])) << ',' << e6(dsde_to_cm4s_per_ev(curve.values[k])) << ','
        << f6(peak > 0.0 ? curve.values[k] / peak : 0.0) << '\n';
  }
  return out.str();
}

SvgStyle sdcs_style(const AtomModel& atom, double omega, const char* route) {
  return SvgStyle{atom.name + " " + route + " SDCS at " + num("%.2f", units::au_to_ev(omega)) + " eV",
                  "electron energy (eV)", "dsigma/dE (cm^4 s / eV)", {}};
}

}  // namespace

AtomModel resolve_atom(const AtomSelector& selector) {
  if (selector.name == "toy") {
    const double ia = selector.binding_outer_ev ? units::ev_to_au(*selector.binding_outer_ev) : kToyOuter;
    const double ib = selector.binding_inner_ev ? units::ev_to_au(*selector.binding_inner_ev) : kToyInner;
    auto outer = selector.sigma_outer_path.empty()
                     ? CrossSectionCurve::constant("toy outer", ia, kToyCoverage, 1.0)
                     : load_table(selector.sigma_outer_path);
    auto inner = selector.sigma_inner_path.empty()
                     ? CrossSectionCurve::constant("toy inner", ib, kToyCoverage, 1.0)
                     : load_table(selector.sigma_inner_path);
    return make_atom("toy", ia, ib, std::move(outer), std::move(inner), selector.threshold_tolerance);
  }

  const BuiltinAtom* builtin = nullptr;
  for (const auto& b : kBuiltins)
    if (selector.name == b.name) builtin = &b;
  if (!builtin && selector.name != "custom")
    throw std::invalid_argument("unknown atom '" + selector.name + "' (expected he, ne, toy or custom)");

  const auto energy = [&](const std::optional<double>& flag, double fallback, const char* what) {
    if (flag) return units::ev_to_au(*flag);
    if (!builtin) throw std::invalid_argument(std::string("custom atom needs ") + what);
    return units::ev_to_au(fallback);
  };
  const double ia = energy(selector.binding_outer_ev, builtin ? builtin->binding_outer_ev : 0.0, "--ia-ev");
  const double ib = energy(selector.binding_inner_ev, builtin ? builtin->binding_inner_ev : 0.0, "--ib-ev");

  const auto curve_path = [&](const std::string& flag, const char* file, const char* what) {
    if (!flag.empty()) return std::filesystem::path(flag);
    if (!builtin) throw std::invalid_argument(std::string("custom atom needs ") + what);
    return data_dir(selector.data_dir) / file;
  };
  auto outer = load_table(curve_path(selector.sigma_outer_path, builtin ? builtin->outer_file : "", "--sigma-outer"));
  auto inner = load_table(curve_path(selector.sigma_inner_path, builtin ? builtin->inner_file : "", "--sigma-inner"));
  return make_atom(selector.name, ia, ib, std::move(outer), std::move(inner), selector.threshold_tolerance);
}

ValidateReport cmd_validate(const std::filesystem::path& path) {
  ValidateReport report;
  try {
    const CrossSectionCurve curve = load_table(path);
    std::ostringstream out;
    out << "file: " << path.string() << '\n'
        << "nodes: " << curve.size() << '\n'
        << "threshold_eV: " << g9(units::au_to_ev(curve.threshold())) << '\n'
        << "span_eV: " << g9(units::au_to_ev(curve.energies()[0])) << " .. " << g9(units::au_to_ev(curve.max_energy()))
        << '\n'
        << "sigma_Mb: " << g9(units::au_to_mb(curve.sigmas().minCoeff())) << " .. "
        << g9(units::au_to_mb(curve.sigmas().maxCoeff())) << '\n';
    report.ok = true;
    report.text = out.str();
  } catch (const NotFound& e) {
    report.text = std::string("not-found: ") + e.what() + '\n';
  } catch (const OrderingError& e) {
    report.text = std::string("ordering-error: ") + e.what() + '\n';
  } catch (const ParseError& e) {
    report.text = std::string("parse-error: ") + e.what() + '\n';
  } catch (const DomainError& e) {
    report.text = std::string("domain-error: ") + e.what() + '\n';
  } catch (const std::exception& e) {
    report.text = std::string("error: ") + e.what() + '\n';
  }
  return report;
}

std::vector<double> photon_grid_ev(double min_ev, double max_ev, double step_ev) {
  if (!(std::isfinite(min_ev) && std::isfinite(max_ev) && max_ev >= min_ev))
    throw std::invalid_argument("photon-energy range must satisfy min <= max");
  if (!(step_ev > 0.0)) throw std::invalid_argument("photon-energy step must be positive");
  const auto n = static_cast<std::size_t>(std::floor((max_ev - min_ev) / step_ev + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = min_ev + static_cast<double>(k) * step_ev;
  return grid;
}

CommandOutput cmd_total(const TotalConfig& config) {
  const AtomModel atom = resolve_atom(config.atom);
  const auto grid_ev = photon_grid_ev(config.omega_min_ev, config.omega_max_ev, config.omega_step_ev);
  std::vector<double> omegas(grid_ev.size());
  std::transform(grid_ev.begin(), grid_ev.end(), omegas.begin(), units::ev_to_au);

  const Window window = nonseq_window(atom);
  for (double omega : omegas) {
    if (!window.contains(omega)) continue;
    require_coverage(atom, omega, 2.0 * omega - atom.binding_inner, 2.0 * omega - atom.binding_outer);
  }
  const ScanTable table = scan(omegas, atom);

  CommandOutput output;
  std::ostringstream csv;
  csv << "# atom=" << atom.name << '\n'
      << "# window_eV=" << g9(units::au_to_ev(window.omega_min)) << ',' << g9(units::au_to_ev(window.omega_max))
      << '\n'
      << "photon_energy_eV,sigma_cm4_s,window_flag\n";
  std::size_t outside = 0;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const ScanRow& row = table.rows[k];
    csv << f6(grid_ev[k]) << ',' << (row.total ? e6(units::gen_xsec_to_cm4s(*row.total)) : std::string()) << ','
        << (row.in_window ? "in" : "out") << '\n';
    outside += row.in_window ? 0 : 1;
  }
  if (outside) output.warnings.push_back(std::to_string(outside) + " photon energies outside the window");
  output.csv = csv.str();

  if (config.svg) {
    SvgStyle style{atom.name + " generalized total cross section", "photon energy (eV)", "sigma (cm^4 s)",
                   {units::au_to_ev(window.omega_min), units::au_to_ev(window.omega_max)}};
    output.svg = render_svg(output.csv, style);
  }
  return output;
}

CommandOutput cmd_sdcs(const SdcsConfig& config) {
  const AtomModel atom = resolve_atom(config.atom);
  const double omega = units::ev_to_au(config.omega_ev);
  require_window(atom, omega);
  require_coverage(atom, omega, 2.0 * omega - atom.binding_inner, 2.0 * omega - atom.binding_outer);
  const SdcsCurve curve = sdcs(omega, atom, config.points);

  CommandOutput output;
  std::ostringstream csv;
  csv << "# atom=" << atom.name << '\n'
      << "# photon_energy_eV=" << g9(config.omega_ev) << '\n'
      << "# excess_energy_eV=" << g9(units::au_to_ev(curve.excess_energy)) << '\n'
      << "# total_cm4_s=" << e6(units::gen_xsec_to_cm4s(curve.total)) << '\n'
      << "# shape=" << to_string(classify_shape(curve)) << '\n'
      << sdcs_rows(curve);
  output.csv = csv.str();
  if (config.svg) output.svg = render_svg(output.csv, sdcs_style(atom, omega, "lowest-order"));
  return output;
}

CommandOutput cmd_tdse(const TdseConfig& config) {
  const AtomModel atom = resolve_atom(config.atom);
  const double omega = units::ev_to_au(config.omega_ev);
  require_window(atom, omega);
  require_coverage(atom, omega, 2.0 * omega, 2.0 * omega);

  tdse::TdseParams params;
  params.omega = omega;
  params.peak_field = config.e0_au;
  params.n_cycles = config.cycles;
  params.grid_outer = config.grid_outer;
  params.grid_inner = config.grid_inner;
  params.dt = config.dt_au;
  const tdse::TdseRun run = tdse::simulate(atom, params);
  const tdse::ShellStatistics shell = tdse::shell_statistics(run.joint);

  CommandOutput output;
  std::ostringstream csv;
  csv << "# atom=" << atom.name << '\n'
      << "# photon_energy_eV=" << g9(config.omega_ev) << '\n'
      << "# e0_au=" << g9(config.e0_au) << '\n'
      << "# cycles=" << config.cycles << '\n'
      << "# grid=" << config.grid_outer << 'x' << config.grid_inner << '\n'
      << "# steps=" << run.steps << '\n'
      << "# prob_double=" << e6(run.joint.total_probability()) << '\n'
      << "# prob_ionized=" << e6(run.joint.ionized_probability) << '\n'
      << "# norm_drift=" << e6(run.norm_drift) << '\n'
      << "# shell_mean_eV=" << g9(units::au_to_ev(shell.mean)) << '\n'
      << "# shell_sd_eV=" << g9(units::au_to_ev(shell.sd)) << '\n'
      << "# peak_density_per_eV2=" << e6(run.joint.density.maxCoeff() / (units::kHartreeEV * units::kHartreeEV))
      << '\n'
      << "# total_cm4_s=" << e6(units::gen_xsec_to_cm4s(run.sdcs.total)) << '\n';
  if (run.sdcs.warning) {
    csv << "# warning=" << *run.sdcs.warning << '\n';
    output.warnings.push_back(*run.sdcs.warning);
  }
  csv << sdcs_rows(run.sdcs);
  output.csv = csv.str();
  if (config.svg) output.svg = render_svg(output.csv, sdcs_style(atom, omega, "propagated"));
  return output;
}

Comparison compare_paths(std::span<const double> omegas, const AtomModel& atom, const TotalPath& first,
                         const TotalPath& second) {
  if (omegas.empty()) throw std::invalid_argument("compare: empty photon-energy list");
  const Window window = nonseq_window(atom);
  Comparison result;
  for (double omega : omegas) {
    ComparisonRow row{omega, window.contains(omega), std::nullopt, std::nullopt, std::nullopt};
    if (row.in_window) {
      row.first = first(omega);
      row.second = second(omega);
      const double scale = std::abs(*row.first);
      row.rel_deviation = scale > 0.0 ? std::abs(*row.second - *row.first) / scale
                                      : (*row.second == *row.first ? 0.0 : INFINITY);
      result.max_deviation = std::max(result.max_deviation, *row.rel_deviation);
    }
    result.rows.push_back(row);
  }
  return result;
}

CommandOutput cmd_compare(const CompareConfig& config) {
  if (!(config.tolerance >= 0.0)) throw std::invalid_argument("compare: tolerance must be non-negative");
  const AtomModel atom = resolve_atom(config.tdse.atom);
  std::vector<double> omegas(config.omegas_ev.size());
  std::transform(config.omegas_ev.begin(), config.omegas_ev.end(), omegas.begin(), units::ev_to_au);
  const Window window = nonseq_window(atom);
  for (double omega : omegas)
    if (window.contains(omega)) require_coverage(atom, omega, 2.0 * omega, 2.0 * omega);

  const TotalPath lowest_order = [&](double omega) { return total_xsec(omega, atom); };
  const TotalPath propagated = [&](double omega) {
    tdse::TdseParams params;
    params.omega = omega;
    params.peak_field = config.tdse.e0_au;
    params.n_cycles = config.tdse.cycles;
    params.grid_outer = config.tdse.grid_outer;
    params.grid_inner = config.tdse.grid_inner;
    params.dt = config.tdse.dt_au;
    return tdse::simulate(atom, params).sdcs.total;
  };
  const Comparison comparison = compare_paths(omegas, atom, lowest_order, propagated);

  CommandOutput output;
  std::ostringstream csv;
  csv << "# atom=" << atom.name << '\n'
      << "# tolerance=" << g9(config.tolerance) << '\n'
      << "# max_rel_deviation=" << e6(comparison.max_deviation) << '\n'
      << "photon_energy_eV,sigma_pert_cm4_s,sigma_tdse_cm4_s,rel_deviation,window_flag\n";
  for (std::size_t k = 0; k < comparison.rows.size(); ++k) {
    const ComparisonRow& row = comparison.rows[k];
    csv << f6(config.omegas_ev[k]) << ',' << (row.first ? e6(units::gen_xsec_to_cm4s(*row.first)) : "") << ','
        << (row.second ? e6(units::gen_xsec_to_cm4s(*row.second)) : "") << ','
        << (row.rel_deviation ? e6(*row.rel_deviation) : "") << ',' << (row.in_window ? "in" : "out") << '\n';
    if (!row.in_window) output.warnings.push_back("photon energy " + g9(config.omegas_ev[k]) + " eV outside window");
  }
  output.csv = csv.str();
  if (comparison.max_deviation > config.tolerance) output.exit_code = 3;
  return output;
}

}  // namespace nsdi::cli
