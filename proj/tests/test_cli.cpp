#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nsdi/commands.hpp"
#include "nsdi/errors.hpp"
#include "nsdi/svg.hpp"
#include "nsdi/units.hpp"

using namespace nsdi;
using namespace nsdi::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("nsdi_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Smooth falling table from threshold to 200 eV.
std::string synthetic_table(double threshold_ev, double sigma_mb) {
  std::ostringstream out;
  out << "# synthetic\nphoton_energy_eV,sigma_Mb\n";
  char line[64];
  for (double e = threshold_ev; e < 200.0; e += 0.5) {
    std::snprintf(line, sizeof line, "%.3f,%.6f\n", e, sigma_mb * std::pow(threshold_ev / e, 2.5));
    out << line;
  }
  return out.str();
}

fs::path fixture_dir() {
  static const fs::path dir = [] {
    const fs::path d = scratch_dir() / "data";
    fs::create_directories(d);
    write(d / "he.csv", synthetic_table(24.587, 7.4));
    write(d / "heplus.csv", synthetic_table(54.418, 1.6));
    write(d / "ne.csv", synthetic_table(21.6, 6.0));
    write(d / "neplus.csv", synthetic_table(40.9, 5.0));
    return d;
  }();
  return dir;
}

AtomSelector builtin(const std::string& name) {
  AtomSelector s;
  s.name = name;
  s.data_dir = fixture_dir().string();
  return s;
}

std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

std::string header_line(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') return line;
  return {};
}

double metadata(const std::string& csv, const std::string& key) {
  const std::string tag = "# " + key + "=";
  const auto pos = csv.find(tag);
  REQUIRE(pos != std::string::npos);
  return std::stod(csv.substr(pos + tag.size()));
}

int run_cli(const std::string& args) {
  const std::string command = std::string("\"") + NSDI_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("resolve_atom") {
  const AtomModel toy = resolve_atom(AtomSelector{});
  CHECK(toy.binding_outer == 1.0);
  CHECK(toy.binding_inner == 2.0);
  CHECK(toy.sigma_outer(1.5) == 1.0);

  const AtomModel he = resolve_atom(builtin("he"));
  CHECK(units::au_to_ev(he.binding_outer) == doctest::Approx(24.587));
  CHECK(units::au_to_ev(he.binding_inner) == doctest::Approx(54.418));
  const AtomModel ne = resolve_atom(builtin("ne"));
  CHECK(units::au_to_ev(ne.binding_outer) == doctest::Approx(21.6));
  CHECK(units::au_to_ev(ne.binding_inner) == doctest::Approx(40.9));

  AtomSelector custom;
  custom.name = "custom";
  custom.sigma_outer_path = (fixture_dir() / "ne.csv").string();
  CHECK_THROWS_AS(resolve_atom(custom), std::invalid_argument);
  custom.sigma_inner_path = (fixture_dir() / "neplus.csv").string();
  custom.binding_outer_ev = 21.6;
  custom.binding_inner_ev = 40.9;
  CHECK(resolve_atom(custom).binding_inner == ne.binding_inner);
  custom.binding_inner_ev = 45.0;
  CHECK_THROWS_AS(resolve_atom(custom), ConsistencyError);

  AtomSelector missing = builtin("he");
  missing.data_dir = (scratch_dir() / "nowhere").string();
  CHECK_THROWS_AS(resolve_atom(missing), NotFound);
  CHECK_THROWS_AS(resolve_atom(builtin("argon")), std::invalid_argument);
}

TEST_CASE("cmd_validate") {
  const ValidateReport good = cmd_validate(fixture_dir() / "he.csv");
  CHECK(good.ok);
  CHECK(good.text.find("nodes: ") != std::string::npos);
  CHECK(good.text.find("span_eV: 24.587") != std::string::npos);

  const fs::path descending = scratch_dir() / "descending.csv";
  write(descending, "photon_energy_eV,sigma_Mb\n25,1\n27,1\n26,1\n");
  const ValidateReport bad = cmd_validate(descending);
  CHECK_FALSE(bad.ok);
  CHECK(bad.text.rfind("ordering-error: line 4", 0) == 0);

  const ValidateReport missing = cmd_validate(scratch_dir() / "absent.csv");
  CHECK_FALSE(missing.ok);
  CHECK(missing.text.rfind("not-found", 0) == 0);

  const fs::path negative = scratch_dir() / "negative.csv";
  write(negative, "photon_energy_eV,sigma_Mb\n25,1\n26,-1\n");
  CHECK(cmd_validate(negative).text.rfind("domain-error", 0) == 0);

  const fs::path garbled = scratch_dir() / "garbled.csv";
  write(garbled, "photon_energy_eV,sigma_Mb\n25,1\n26;1\n");
  CHECK(cmd_validate(garbled).text.rfind("parse-error: line 3", 0) == 0);
}

TEST_CASE("photon_grid_ev") {
  CHECK(photon_grid_ev(40.0, 54.0, 0.5).size() == 29);
  CHECK(photon_grid_ev(40.0, 40.0, 0.5).size() == 1);
  CHECK(photon_grid_ev(1.0, 2.0, 0.3).back() == doctest::Approx(1.9));
  CHECK_THROWS_AS(photon_grid_ev(2.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(photon_grid_ev(1.0, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("cmd_total scans") {
  TotalConfig he;
  he.atom = builtin("he");
  he.omega_min_ev = 40.0;
  he.omega_max_ev = 54.0;
  const CommandOutput he_out = cmd_total(he);
  CHECK(header_line(he_out.csv) == "photon_energy_eV,sigma_cm4_s,window_flag");
  const auto he_rows = data_rows(he_out.csv);
  REQUIRE(he_rows.size() == 29);
  for (const auto& row : he_rows) {
    CHECK(row[2] == "in");
    CHECK(std::stod(row[1]) > 0.0);
  }
  // The closed form diverges as omega approaches I_B, so the last 3 eV rise.
  for (std::size_t k = he_rows.size() - 7; k < he_rows.size(); ++k)
    CHECK(std::stod(he_rows[k][1]) > std::stod(he_rows[k - 1][1]));
  CHECK(metadata(he_out.csv, "window_eV") == doctest::Approx(39.5025).epsilon(1e-6));

  TotalConfig ne;
  ne.atom = builtin("ne");
  ne.omega_min_ev = 31.5;
  ne.omega_max_ev = 40.5;
  const auto ne_rows = data_rows(cmd_total(ne).csv);
  REQUIRE(ne_rows.size() == 19);
  for (const auto& row : ne_rows) CHECK(row[2] == "in");

  TotalConfig below;
  below.atom = builtin("ne");
  below.omega_min_ev = 25.0;
  below.omega_max_ev = 30.0;
  const CommandOutput below_out = cmd_total(below);
  for (const auto& row : data_rows(below_out.csv)) {
    CHECK(row[2] == "out");
    CHECK(row[1].empty());
  }
  CHECK_FALSE(below_out.warnings.empty());
  CHECK(below_out.exit_code == 0);

  // Outer table ending at 50 eV cannot serve photon energies above 52.2 eV.
  const fs::path short_table = scratch_dir() / "short.csv";
  write(short_table, "photon_energy_eV,sigma_Mb\n24.587,7\n50,1\n");
  TotalConfig beyond;
  beyond.atom = builtin("he");
  beyond.atom.sigma_outer_path = short_table.string();
  beyond.omega_min_ev = 50.0;
  beyond.omega_max_ev = 54.0;
  try {
    cmd_total(beyond);
    FAIL("expected a coverage error");
  } catch (const CoverageError& e) {
    CHECK(units::au_to_ev(e.photon_energy()) == doctest::Approx(2 * 52.5 - 54.418));
    CHECK(std::string(e.what()).find("photon energy 52.5 eV") != std::string::npos);
  }
}

TEST_CASE("cmd_total svg carries the window markers") {
  TotalConfig config;
  config.atom = builtin("he");
  config.omega_min_ev = 35.0;
  config.omega_max_ev = 54.0;
  config.svg = true;
  const CommandOutput out = cmd_total(config);
  REQUIRE(out.svg.has_value());
  std::size_t markers = 0;
  for (auto pos = out.svg->find("class=\"marker\""); pos != std::string::npos;
       pos = out.svg->find("class=\"marker\"", pos + 1))
    ++markers;
  CHECK(markers == 2);
}

TEST_CASE("cmd_sdcs") {
  SdcsConfig config;
  config.omega_ev = units::au_to_ev(1.75);
  config.points = 51;
  config.svg = true;
  const CommandOutput out = cmd_sdcs(config);
  CHECK(header_line(out.csv) == "electron_energy_eV,dsdE_cm4_s_per_eV,normalized");
  const auto rows = data_rows(out.csv);
  REQUIRE(rows.size() == 51);
  double peak = 0.0;
  for (const auto& row : rows) {
    peak = std::max(peak, std::stod(row[2]));
    CHECK(std::stod(row[2]) <= 1.0);
  }
  CHECK(peak == 1.0);
  CHECK(std::stod(rows.front()[1]) == doctest::Approx(std::stod(rows.back()[1])).epsilon(1e-12));
  CHECK(out.csv.find("# shape=u-shaped") != std::string::npos);
  CHECK(out.svg.has_value());

  config.omega_ev = 30.0;
  CHECK_THROWS_AS(cmd_sdcs(config), WindowError);
}

TEST_CASE("cmd_tdse") {
  TdseConfig config;
  config.omega_ev = units::au_to_ev(1.65);
  config.cycles = 10;
  config.grid_outer = 40;
  config.grid_inner = 40;
  const CommandOutput out = cmd_tdse(config);
  CHECK(metadata(out.csv, "norm_drift") <= 1e-8);
  CHECK(metadata(out.csv, "prob_double") > 0.0);
  CHECK(header_line(out.csv) == "electron_energy_eV,dsdE_cm4_s_per_eV,normalized");

  config.e0_au = 0.0;
  const CommandOutput dark = cmd_tdse(config);
  CHECK(metadata(dark.csv, "prob_double") == 0.0);
  CHECK(metadata(dark.csv, "prob_ionized") == 0.0);

  config.e0_au = 0.05;
  config.cycles = 6;
  config.grid_outer = config.grid_inner = 20;
  const CommandOutput strong = cmd_tdse(config);
  CHECK(strong.exit_code == 0);
  CHECK(strong.csv.find("# warning=") != std::string::npos);
  CHECK_FALSE(strong.warnings.empty());

  config.dt_au = 1.0;
  CHECK_THROWS_AS(cmd_tdse(config), StabilityError);
}

TEST_CASE("default propagation total agrees with the closed form") {
  TdseConfig tdse;
  tdse.omega_ev = units::au_to_ev(1.65);
  const double propagated = metadata(cmd_tdse(tdse).csv, "total_cm4_s");
  SdcsConfig sdcs;
  sdcs.omega_ev = tdse.omega_ev;
  const double closed = metadata(cmd_sdcs(sdcs).csv, "total_cm4_s");
  CHECK(std::abs(propagated / closed - 1.0) < 0.05);
}

TEST_CASE("cmd_compare") {
  CompareConfig config;
  config.tdse.cycles = 40;
  config.tdse.grid_outer = config.tdse.grid_inner = 80;
  config.omegas_ev = {units::au_to_ev(1.6), units::au_to_ev(1.7), units::au_to_ev(1.75)};
  const CommandOutput out = cmd_compare(config);
  CHECK(header_line(out.csv) == "photon_energy_eV,sigma_pert_cm4_s,sigma_tdse_cm4_s,rel_deviation,window_flag");
  CHECK(metadata(out.csv, "max_rel_deviation") < 0.05);
  CHECK(out.exit_code == 0);

  config.tolerance = 1e-6;
  CHECK(cmd_compare(config).exit_code == 3);
}

TEST_CASE("compare_paths") {
  const AtomModel toy = resolve_atom(AtomSelector{});
  const auto same = [](double omega) { return 1.0 / (2.0 - omega); };
  const std::vector<double> omegas{1.2, 1.6, 1.9, 2.5};
  const Comparison identical = compare_paths(omegas, toy, same, same);
  CHECK(identical.max_deviation == 0.0);
  REQUIRE(identical.rows.size() == 4);
  CHECK_FALSE(identical.rows[0].in_window);
  CHECK_FALSE(identical.rows[0].rel_deviation.has_value());
  CHECK_FALSE(identical.rows[3].in_window);

  int calls = 0;
  const auto off = [&](double omega) {
    ++calls;
    return 1.1 * same(omega);
  };
  const Comparison shifted = compare_paths(omegas, toy, same, off);
  CHECK(calls == 2);
  CHECK(shifted.max_deviation == doctest::Approx(0.1));
}

TEST_CASE("outputs are deterministic") {
  TotalConfig config;
  config.atom = builtin("ne");
  config.omega_min_ev = 31.0;
  config.omega_max_ev = 40.5;
  config.svg = true;
  const CommandOutput a = cmd_total(config);
  const CommandOutput b = cmd_total(config);
  CHECK(a.csv == b.csv);
  CHECK(*a.svg == *b.svg);
}

TEST_CASE("render_svg") {
  SvgStyle style;
  style.title = "t";
  const std::string two = render_svg("x,y\n1,2\n3,4\n", style);
  CHECK(two.rfind("<svg", 0) == 0);
  std::size_t polylines = 0;
  for (auto pos = two.find("<polyline"); pos != std::string::npos; pos = two.find("<polyline", pos + 1)) ++polylines;
  CHECK(polylines == 1);
  CHECK(two.find("class=\"marker\"") == std::string::npos);

  style.markers = {1.5, 2.5};
  const std::string marked = render_svg("# meta\nx,y\n1,2\n2,\n3,4\n", style);
  std::size_t markers = 0;
  for (auto pos = marked.find("class=\"marker\""); pos != std::string::npos;
       pos = marked.find("class=\"marker\"", pos + 1))
    ++markers;
  CHECK(markers == 2);

  CHECK_THROWS_AS(render_svg("x,y\n1,2\nfoo,3\n", style), std::invalid_argument);
  CHECK_THROWS_AS(render_svg("", style), std::invalid_argument);
  CHECK_THROWS_AS(render_svg("x,y\n1,2\n", style), std::invalid_argument);
}

TEST_CASE("executable: exit codes, config file and overrides") {
  const fs::path dir = scratch_dir();
  const std::string data = " --data-dir \"" + fixture_dir().string() + "\"";

  CHECK(run_cli("validate \"" + (fixture_dir() / "he.csv").string() + "\"") == 0);
  CHECK(run_cli("validate \"" + (dir / "absent.csv").string() + "\"") != 0);
  CHECK(run_cli("--bogus") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("total") == 2);
  CHECK(run_cli("--help") == 0);

  const fs::path config = dir / "run.ini";
  write(config, "atom=ne\n[total]\nomega-min-ev=31.5\nomega-max-ev=40.5\nomega-step-ev=0.5\n");
  const fs::path from_file = dir / "from_file.csv";
  REQUIRE(run_cli("--config \"" + config.string() + "\"" + data + " --out \"" + from_file.string() + "\" total") == 0);
  CHECK(data_rows(read(from_file)).size() == 19);

  const fs::path overridden = dir / "overridden.csv";
  const fs::path svg = dir / "overridden.svg";
  REQUIRE(run_cli("--config \"" + config.string() + "\"" + data + " --out \"" + overridden.string() + "\" --svg \"" +
                  svg.string() + "\" total --omega-step-ev 1.0") == 0);
  CHECK(data_rows(read(overridden)).size() == 10);
  CHECK(read(svg).rfind("<svg", 0) == 0);

  // Warnings do not change the exit code.
  CHECK(run_cli("--atom ne" + data + " --out \"" + (dir / "below.csv").string() +
                "\" total --omega-min-ev 25 --omega-max-ev 30") == 0);
  CHECK(run_cli("--atom ne" + data + " --out \"" + (dir / "sdcs.csv").string() + "\" sdcs --omega-ev 30") == 1);
  CHECK(run_cli("--out \"" + (dir / "cmp.csv").string() +
                "\" compare --omegas-ev 45,47 --cycles 10 --grid-outer 30 --grid-inner 30 --tolerance 1e-9") == 3);
}
