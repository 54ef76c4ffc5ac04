#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsdi/xsec_data.hpp"

namespace nsdi {

/// Photon-energy interval in which two-photon double ionization can only
/// proceed nonsequentially. Membership is tested on the open interval.
struct Window {
  double omega_min;
  double omega_max;

  bool empty() const noexcept { return !(omega_min < omega_max); }
  bool contains(double omega) const noexcept { return omega_min < omega && omega < omega_max; }
};

/// ((I_A + I_B)/2, I_B).
Window nonseq_window(const AtomModel& atom);

/// Kinetic energy shared by both electrons, 2 omega - I_A - I_B.
inline double excess_energy(double omega, const AtomModel& atom) {
  return 2.0 * omega - atom.binding_outer - atom.binding_inner;
}

/// Energy-resolved cross section in atomic units. For the lowest-order engine
/// `total` is the quadrature of the exact integrand; for propagation results
/// it is the extracted generalized cross section.
struct SdcsCurve {
  double photon_energy = 0.0;
  double excess_energy = 0.0;
  Eigen::VectorXd energies;
  Eigen::VectorXd values;
  double total = 0.0;
  std::optional<std::string> warning;
};

struct ScanRow {
  double photon_energy;
  std::optional<double> total;  // absent outside the window
  bool in_window;
};

struct ScanTable {
  std::vector<ScanRow> rows;
};

/// Unsymmetrized kernel f(E) for the outer electron leaving first with
/// kinetic energy E and the inner one taking the rest of the excess energy:
///
///   f = (w^2/pi) sA(E + I_A) sB(2w - E - I_A)
///       / [(E + I_A)(2w - E - I_A)(E + I_A - w)^2]
///
/// Throws WindowError outside the window, DomainError when E is outside
/// [0, excess], CoverageError when a curve does not reach its argument.
double f_kernel(double energy, double omega, const AtomModel& atom);

/// Exchange-symmetrized single-differential cross section
/// (f(E) + f(excess - E)) / 2.
double dsigma_de(double energy, double omega, const AtomModel& atom);

/// dsigma/dE on `n_samples` (>= 3) uniformly spaced energies spanning
/// [0, excess], with the total from total_xsec.
SdcsCurve sdcs(double omega, const AtomModel& atom, int n_samples);

struct QuadratureOptions {
  double rel_tol = 1e-6;
  int initial_nodes = 8;
  int max_nodes = 1 << 14;
};

/// Generalized total cross section: integral of dsigma/dE over [0, excess].
///
/// The interval is split at every point where either curve has a
/// tabulation node (the integrand has kinks there), and each panel is
/// integrated with Gauss-Legendre rules whose order doubles until two
/// successive estimates agree to `rel_tol`. Throws ConvergenceError when a
/// panel needs more than `max_nodes` nodes.
double total_xsec(double omega, const AtomModel& atom, const QuadratureOptions& options = {});

/// Totals for strictly increasing photon energies. Points outside the window
/// are flagged instead of raising.
ScanTable scan(std::span<const double> omegas, const AtomModel& atom,
               const QuadratureOptions& options = {});

enum class SdcsShape { UShaped, PeakedAtMidpoint, Other };

/// U-shaped: the sample nearest equal sharing is the smallest interior value
/// and lies below both end points. PeakedAtMidpoint: it is the largest value.
SdcsShape classify_shape(const SdcsCurve& curve);

const char* to_string(SdcsShape shape);

}  // namespace nsdi
