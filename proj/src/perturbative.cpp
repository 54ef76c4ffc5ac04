#include "nsdi/perturbative.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nsdi/errors.hpp"
#include "nsdi/quadrature.hpp"
#include "nsdi/units.hpp"

namespace nsdi {

namespace {

void require_window(double omega, const AtomModel& atom) {
  const Window window = nonseq_window(atom);
  if (!std::isfinite(omega) || !window.contains(omega)) {
    throw WindowError("photon energy " + std::to_string(units::au_to_ev(omega)) +
                      " eV outside the nonsequential window (" +
                      std::to_string(units::au_to_ev(window.omega_min)) + ", " +
                      std::to_string(units::au_to_ev(window.omega_max)) + ") eV of " + atom.name);
  }
}

// Kernel with the outer electron at kinetic energy `outer` and the inner one
// at `inner`; outer + inner is the excess energy. Both photon energies are
// built by adding to the binding energy so the inner one never rounds below
// its threshold at the edge of the domain.
double kernel(double outer, double inner, double omega, const AtomModel& atom) {
  const double photon_a = atom.binding_outer + outer;
  const double photon_b = atom.binding_inner + inner;
  const double sigma_a = atom.sigma_outer(photon_a);
  const double sigma_b = atom.sigma_inner(photon_b);
  if (sigma_a == 0.0 || sigma_b == 0.0) return 0.0;
  const double detuning = photon_a - omega;
  return omega * omega / std::numbers::pi * sigma_a * sigma_b /
         (photon_a * photon_b * detuning * detuning);
}

double checked_share(double energy, double excess) {
  if (!(energy >= 0.0 && energy <= excess))
    throw DomainError("electron energy outside [0, excess energy]");
  return excess - energy;
}

}  // namespace

Window nonseq_window(const AtomModel& atom) {
  return Window{0.5 * (atom.binding_outer + atom.binding_inner), atom.binding_inner};
}

double f_kernel(double energy, double omega, const AtomModel& atom) {
  require_window(omega, atom);
  const double rest = checked_share(energy, excess_energy(omega, atom));
  return kernel(energy, rest, omega, atom);
}

double dsigma_de(double energy, double omega, const AtomModel& atom) {
  require_window(omega, atom);
  const double rest = checked_share(energy, excess_energy(omega, atom));
  return 0.5 * (kernel(energy, rest, omega, atom) + kernel(rest, energy, omega, atom));
}

SdcsCurve sdcs(double omega, const AtomModel& atom, int n_samples) {
  if (n_samples < 3) throw std::invalid_argument("sdcs: need at least 3 samples");
  require_window(omega, atom);
  const double excess = excess_energy(omega, atom);

  SdcsCurve curve;
  curve.photon_energy = omega;
  curve.excess_energy = excess;
  curve.energies = Eigen::VectorXd::LinSpaced(n_samples, 0.0, excess);
  curve.values.resize(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    // Pair samples so E and excess - E see identical arguments.
    const int mirror = n_samples - 1 - k;
    if (mirror < k) {
      curve.values[k] = curve.values[mirror];
      continue;
    }
    const double e = curve.energies[k];
    const double rest = excess - e;
    curve.values[k] = 0.5 * (kernel(e, rest, omega, atom) + kernel(rest, e, omega, atom));
  }
  curve.total = total_xsec(omega, atom);
  return curve;
}

double total_xsec(double omega, const AtomModel& atom, const QuadratureOptions& options) {
  require_window(omega, atom);
  const double excess = excess_energy(omega, atom);

  // Kinks of f(E) and of its mirror f(excess - E).
  std::vector<double> breaks{0.0, excess};
  const auto add_kinks = [&](const CrossSectionCurve& curve, double binding) {
    const auto add = [&](double photon) {
      const double e = photon - binding;
      if (e > 0.0 && e < excess) {
        breaks.push_back(e);
        breaks.push_back(excess - e);
      }
    };
    add(curve.threshold());
    for (Eigen::Index i = 0; i < curve.size(); ++i) add(curve.energies()[i]);
  };
  add_kinks(atom.sigma_outer, atom.binding_outer);
  add_kinks(atom.sigma_inner, atom.binding_inner);
  std::sort(breaks.begin(), breaks.end());
  const double merge = 1e-13 * excess;
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [merge](double a, double b) { return b - a <= merge; }),
               breaks.end());
  breaks.back() = excess;

  const auto integrand = [&](double e) {
    const double rest = std::max(excess - e, 0.0);
    return 0.5 * (kernel(e, rest, omega, atom) + kernel(rest, e, omega, atom));
  };

  double total = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double b = breaks[p + 1];
    int n = options.initial_nodes;
    double previous = integrate(gauss_legendre(n), integrand, a, b);
    for (;;) {
      n *= 2;
      if (n > options.max_nodes)
        throw ConvergenceError("total_xsec: quadrature did not converge within node cap");
      const double current = integrate(gauss_legendre(n), integrand, a, b);
      const bool converged = std::abs(current - previous) <= options.rel_tol * std::abs(current);
      previous = current;
      if (converged) break;
    }
    total += previous;
  }
  return std::max(total, 0.0);
}

ScanTable scan(std::span<const double> omegas, const AtomModel& atom, const QuadratureOptions& options) {
  if (omegas.empty()) throw std::invalid_argument("scan: empty photon-energy list");
  for (std::size_t i = 1; i < omegas.size(); ++i)
    if (!(omegas[i] > omegas[i - 1]))
      throw std::invalid_argument("scan: photon energies must be strictly increasing");

  const Window window = nonseq_window(atom);
  ScanTable table;
  table.rows.reserve(omegas.size());
  for (double omega : omegas) {
    if (window.contains(omega))
      table.rows.push_back({omega, total_xsec(omega, atom, options), true});
    else
      table.rows.push_back({omega, std::nullopt, false});
  }
  return table;
}

}  // namespace nsdi

namespace nsdi {

SdcsShape classify_shape(const SdcsCurve& curve) {
  const Eigen::Index n = curve.values.size();
  if (n < 3) return SdcsShape::Other;
  Eigen::Index mid = 0;
  (curve.energies.array() - 0.5 * curve.excess_energy).abs().minCoeff(&mid);
  if (mid == 0 || mid == n - 1) return SdcsShape::Other;
  const double centre = curve.values[mid];
  const auto interior = curve.values.segment(1, n - 2);
  if (centre <= interior.minCoeff() && centre < curve.values[0] && centre < curve.values[n - 1])
    return SdcsShape::UShaped;
  if (centre >= curve.values.maxCoeff() && centre > curve.values[0] && centre > curve.values[n - 1])
    return SdcsShape::PeakedAtMidpoint;
  return SdcsShape::Other;
}

const char* to_string(SdcsShape shape) {
  switch (shape) {
    case SdcsShape::UShaped: return "u-shaped";
    case SdcsShape::PeakedAtMidpoint: return "peaked";
    case SdcsShape::Other: return "other";
  }
  return "other";
}

}  // namespace nsdi
