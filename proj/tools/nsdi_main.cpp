// nsdi: two-photon double-ionization cross sections from the command line.
//
//   nsdi validate data/he.csv
//   nsdi --atom he --data-dir data total --omega-min-ev 40 --omega-max-ev 54 --svg he.svg
//   nsdi --atom toy tdse --omega-ev 47.62

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nsdi/commands.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw std::invalid_argument("bad number in list: " + item);
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("empty photon-energy list");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nsdi::cli;

  CLI::App app{"Nonsequential two-photon double ionization: cross sections and model propagation"};
  app.set_config("--config", "", "key=value config file; [section] headers select subcommands");
  app.require_subcommand(1);
  app.fallthrough();

  AtomSelector atom;
  std::string out_path;
  std::string svg_path;
  std::optional<double> ia_ev, ib_ev;
  app.add_option("--atom", atom.name, "he, ne, toy or custom")->capture_default_str();
  app.add_option("--data-dir", atom.data_dir, "directory with he.csv, heplus.csv, ne.csv, neplus.csv (default $NSDI_DATA_DIR)");
  app.add_option("--sigma-outer", atom.sigma_outer_path, "cross-section table of the outer electron");
  app.add_option("--sigma-inner", atom.sigma_inner_path, "cross-section table of the inner electron");
  app.add_option("--ia-ev", ia_ev, "outer binding energy (eV)");
  app.add_option("--ib-ev", ib_ev, "inner binding energy (eV)");
  app.add_option("--threshold-tolerance", atom.threshold_tolerance, "relative threshold/binding mismatch allowed")
      ->capture_default_str();
  app.add_option("--out", out_path, "output CSV path (default stdout)");
  app.add_option("--svg", svg_path, "also write an SVG plot here");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a cross-section table");
  validate->add_option("path", validate_path, "table file")->required();

  TotalConfig total;
  auto* total_cmd = app.add_subcommand("total", "generalized total cross section over a photon-energy range");
  total_cmd->add_option("--omega-min-ev", total.omega_min_ev)->required();
  total_cmd->add_option("--omega-max-ev", total.omega_max_ev)->required();
  total_cmd->add_option("--omega-step-ev", total.omega_step_ev)->capture_default_str();

  SdcsConfig sdcs;
  auto* sdcs_cmd = app.add_subcommand("sdcs", "energy-differential cross section at one photon energy");
  sdcs_cmd->add_option("--omega-ev", sdcs.omega_ev)->required();
  sdcs_cmd->add_option("--points", sdcs.points)->capture_default_str();

  TdseConfig tdse;
  std::optional<double> dt_au;
  const auto add_tdse_options = [&](CLI::App* cmd) {
    cmd->add_option("--e0-au", tdse.e0_au, "peak field (a.u.)")->capture_default_str();
    cmd->add_option("--cycles", tdse.cycles)->capture_default_str();
    cmd->add_option("--grid-outer", tdse.grid_outer)->capture_default_str();
    cmd->add_option("--grid-inner", tdse.grid_inner)->capture_default_str();
    cmd->add_option("--dt-au", dt_au, "time step (default: cycle/200)");
  };
  auto* tdse_cmd = app.add_subcommand("tdse", "propagate the model and extract cross sections");
  tdse_cmd->add_option("--omega-ev", tdse.omega_ev)->required();
  add_tdse_options(tdse_cmd);

  CompareConfig compare;
  std::string omegas_text;
  auto* compare_cmd = app.add_subcommand("compare", "closed-form totals against propagation");
  compare_cmd->add_option("--omegas-ev", omegas_text, "comma-separated photon energies (eV)")->required();
  compare_cmd->add_option("--tolerance", compare.tolerance)->capture_default_str();
  add_tdse_options(compare_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  atom.binding_outer_ev = ia_ev;
  atom.binding_inner_ev = ib_ev;
  tdse.dt_au = dt_au;

  try {
    if (validate->parsed()) {
      const ValidateReport report = cmd_validate(validate_path);
      (report.ok ? std::cout : std::cerr) << report.text;
      return report.ok ? 0 : 1;
    }

    CommandOutput output;
    if (total_cmd->parsed()) {
      total.atom = atom;
      total.svg = !svg_path.empty();
      output = cmd_total(total);
    } else if (sdcs_cmd->parsed()) {
      sdcs.atom = atom;
      sdcs.svg = !svg_path.empty();
      output = cmd_sdcs(sdcs);
    } else if (tdse_cmd->parsed()) {
      tdse.atom = atom;
      tdse.svg = !svg_path.empty();
      output = cmd_tdse(tdse);
    } else if (compare_cmd->parsed()) {
      compare.tdse = tdse;
      compare.tdse.atom = atom;
      compare.omegas_ev = parse_list(omegas_text);
      output = cmd_compare(compare);
    }

    if (out_path.empty())
      std::cout << output.csv;
    else
      write_file(out_path, output.csv);
    if (output.svg) write_file(svg_path, *output.svg);
    for (const auto& warning : output.warnings) std::cerr << "warning: " << warning << '\n';
    if (output.exit_code == 3) std::cerr << "error: deviation above tolerance\n";
    return output.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
