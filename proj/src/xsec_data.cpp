#include "nsdi/xsec_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "nsdi/errors.hpp"
#include "nsdi/units.hpp"

namespace nsdi {

namespace {

constexpr std::string_view kHeader = "photon_energy_eV,sigma_Mb";
constexpr std::string_view kThresholdDirective = "#threshold_eV=";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_exact(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// Shortest decimal whose conversion back into atomic units lands exactly on
// `internal`; values produced by parsing always have such a preimage.
template <typename ToExternal, typename ToInternal>
std::string external_repr(double internal, ToExternal to_external, ToInternal to_internal) {
  double lo = to_external(internal), hi = lo;
  for (int step = 0; step < 4; ++step, lo = std::nextafter(lo, -INFINITY), hi = std::nextafter(hi, INFINITY)) {
    for (double candidate : {lo, hi}) {
      if (to_internal(candidate) != internal) continue;
      for (int digits = 15; digits <= 17; ++digits) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", digits, candidate);
        if (std::strtod(buf, nullptr) == candidate) return buf;
      }
    }
  }
  return format_exact(to_external(internal));
}

std::string energy_repr(double internal) { return external_repr(internal, units::au_to_ev, units::ev_to_au); }
std::string area_repr(double internal) { return external_repr(internal, units::au_to_mb, units::mb_to_au); }

}  // namespace

CrossSectionCurve::CrossSectionCurve(std::string label, double threshold, Eigen::VectorXd energies,
                                     Eigen::VectorXd sigmas)
    : label_(std::move(label)),
      threshold_(threshold),
      energies_(std::move(energies)),
      sigmas_(std::move(sigmas)) {
  if (energies_.size() == 0) throw std::invalid_argument("cross-section curve '" + label_ + "' has no nodes");
  if (energies_.size() != sigmas_.size())
    throw std::invalid_argument("cross-section curve '" + label_ + "': node arrays differ in length");
  if (!(std::isfinite(threshold_) && threshold_ > 0.0))
    throw DomainError("cross-section curve '" + label_ + "': threshold must be positive");
  if (!energies_.allFinite() || !sigmas_.allFinite())
    throw DomainError("cross-section curve '" + label_ + "': non-finite node");
  if (energies_[0] < threshold_)
    throw DomainError("cross-section curve '" + label_ + "': first node lies below the threshold");
  for (Eigen::Index i = 1; i < energies_.size(); ++i)
    if (!(energies_[i] > energies_[i - 1]))
      throw OrderingError(static_cast<std::size_t>(i + 1),
                          "cross-section curve '" + label_ + "': energies not strictly increasing");
  if ((sigmas_.array() < 0.0).any())
    throw DomainError("cross-section curve '" + label_ + "': negative cross section");
}

CrossSectionCurve CrossSectionCurve::constant(std::string label, double threshold, double upper,
                                              double sigma) {
  return CrossSectionCurve(std::move(label), threshold, Eigen::Vector2d(threshold, upper),
                           Eigen::Vector2d(sigma, sigma));
}

double CrossSectionCurve::operator()(double photon_energy) const {
  if (!std::isfinite(photon_energy))
    throw std::invalid_argument("sigma_at: non-finite photon energy");
  if (photon_energy < threshold_) return 0.0;
  const auto n = energies_.size();
  if (photon_energy > energies_[n - 1]) {
    throw CoverageError(photon_energy, "cross-section curve '" + label_ + "' does not cover " +
                                           format_exact(units::au_to_ev(photon_energy)) +
                                           " eV (last node " +
                                           format_exact(units::au_to_ev(energies_[n - 1])) + " eV)");
  }
  if (photon_energy <= energies_[0]) return sigmas_[0];

  const double* begin = energies_.data();
  const auto upper = std::upper_bound(begin, begin + n, photon_energy) - begin;
  if (upper == n) return sigmas_[n - 1];
  const auto lower = upper - 1;
  const double t = (photon_energy - energies_[lower]) / (energies_[upper] - energies_[lower]);
  return (1.0 - t) * sigmas_[lower] + t * sigmas_[upper];
}

CrossSectionCurve CrossSectionCurve::scaled(double factor) const {
  if (!(factor >= 0.0)) throw std::invalid_argument("scaled: factor must be non-negative");
  return CrossSectionCurve(label_, threshold_, energies_, sigmas_ * factor);
}

CrossSectionCurve parse_table(std::string_view content, std::string label) {
  std::vector<double> energies;
  std::vector<double> sigmas;
  std::optional<double> threshold;
  bool header_seen = false;

  std::size_t line_no = 0;
  while (!content.empty()) {
    ++line_no;
    const auto eol = content.find('\n');
    const std::string_view raw = content.substr(0, eol);
    content = eol == std::string_view::npos ? std::string_view{} : content.substr(eol + 1);

    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with(kThresholdDirective)) {
        const auto value = to_double(line.substr(kThresholdDirective.size()));
        if (!value) throw ParseError(line_no, "malformed threshold directive");
        if (!(*value > 0.0)) throw DomainError("line " + std::to_string(line_no) + ": threshold must be positive");
        threshold = units::ev_to_au(*value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader)
        throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");
      header_seen = true;
      continue;
    }

    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(line_no, "expected two comma-separated fields");
    const auto energy_ev = to_double(line.substr(0, comma));
    const auto sigma_mb = to_double(line.substr(comma + 1));
    if (!energy_ev || !sigma_mb) throw ParseError(line_no, "non-numeric field");
    if (!(*energy_ev > 0.0))
      throw DomainError("line " + std::to_string(line_no) + ": photon energy must be positive");
    if (*sigma_mb < 0.0)
      throw DomainError("line " + std::to_string(line_no) + ": negative cross section");

    const double energy = units::ev_to_au(*energy_ev);
    if (!energies.empty() && !(energy > energies.back()))
      throw OrderingError(line_no, "photon energies must be strictly increasing");
    energies.push_back(energy);
    sigmas.push_back(units::mb_to_au(*sigma_mb));
  }

  if (!header_seen) throw ParseError(line_no, "missing header '" + std::string(kHeader) + "'");
  if (energies.empty()) throw ParseError(line_no, "table has no data rows");
  if (threshold && *threshold > energies.front())
    throw DomainError("threshold directive lies above the first tabulated energy");

  const Eigen::Map<const Eigen::VectorXd> e(energies.data(), static_cast<Eigen::Index>(energies.size()));
  const Eigen::Map<const Eigen::VectorXd> s(sigmas.data(), static_cast<Eigen::Index>(sigmas.size()));
  return CrossSectionCurve(std::move(label), threshold.value_or(energies.front()), e, s);
}

std::string serialize_table(const CrossSectionCurve& curve) {
  std::ostringstream out;
  out << "# " << curve.label() << '\n';
  if (curve.threshold() != curve.energies()[0])
    out << kThresholdDirective << energy_repr(curve.threshold()) << '\n';
  out << kHeader << '\n';
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    out << energy_repr(curve.energies()[i]) << ','
        << area_repr(curve.sigmas()[i]) << '\n';
  }
  return out.str();
}

CrossSectionCurve load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open cross-section table " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_table(buffer.str(), path.stem().string());
}

double hydrogenic_sigma(int Z, double photon_energy) {
  if (Z < 1) throw std::invalid_argument("hydrogenic_sigma: Z must be >= 1");
  const double threshold = 0.5 * Z * Z;
  if (!(photon_energy > threshold))
    throw DomainError("hydrogenic_sigma: photon energy must lie above the threshold Z^2/2");
  constexpr double pi = std::numbers::pi;
  const double ratio = threshold / photon_energy;
  const double kappa = std::sqrt(photon_energy / threshold - 1.0);
  // zeta * arccot(zeta) with zeta = 1/kappa, written as atan(kappa)/kappa.
  const double zeta_arccot = kappa > 1e-8 ? std::atan(kappa) / kappa : 1.0 - kappa * kappa / 3.0;
  const double prefactor = 512.0 * pi * pi / 3.0 * units::kAlpha / (Z * Z);
  return prefactor * std::pow(ratio, 4) * std::exp(-4.0 * zeta_arccot) /
         -std::expm1(-2.0 * pi / kappa);
}

CrossSectionCurve hydrogenic_curve(int Z, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("hydrogenic_curve: empty grid");
  Eigen::VectorXd energies(static_cast<Eigen::Index>(grid.size()));
  Eigen::VectorXd sigmas(energies.size());
  for (Eigen::Index i = 0; i < energies.size(); ++i) {
    energies[i] = grid[static_cast<std::size_t>(i)];
    sigmas[i] = hydrogenic_sigma(Z, energies[i]);
  }
  return CrossSectionCurve("hydrogenic Z=" + std::to_string(Z), 0.5 * Z * Z, std::move(energies),
                           std::move(sigmas));
}

AtomModel make_atom(std::string name, double binding_outer, double binding_inner,
                    CrossSectionCurve sigma_outer, CrossSectionCurve sigma_inner,
                    double threshold_tolerance) {
  if (!(std::isfinite(binding_outer) && binding_outer > 0.0 && std::isfinite(binding_inner) &&
        binding_inner > 0.0))
    throw InvalidModel("atom '" + name + "': binding energies must be positive");
  if (!(binding_outer < binding_inner))
    throw InvalidModel("atom '" + name + "': outer binding energy must be below the inner one");
  if (!(threshold_tolerance >= 0.0)) throw std::invalid_argument("threshold tolerance must be non-negative");

  const auto check = [&](const CrossSectionCurve& curve, double binding, const char* which) {
    const double mismatch = std::abs(curve.threshold() - binding) / binding;
    if (mismatch > threshold_tolerance) {
      throw ConsistencyError("atom '" + name + "': " + which + " curve threshold " +
                             format_exact(units::au_to_ev(curve.threshold())) +
                             " eV inconsistent with binding energy " +
                             format_exact(units::au_to_ev(binding)) + " eV");
    }
  };
  check(sigma_outer, binding_outer, "outer");
  check(sigma_inner, binding_inner, "inner");

  return AtomModel{std::move(name), binding_outer, binding_inner, std::move(sigma_outer),
                   std::move(sigma_inner)};
}

}  // namespace nsdi
