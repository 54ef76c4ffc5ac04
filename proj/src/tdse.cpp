#include "nsdi/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nsdi/units.hpp"

namespace nsdi::tdse {

namespace {
constexpr double pi = std::numbers::pi;
}

EnergyGrid::EnergyGrid(Eigen::VectorXd nodes_in, Eigen::VectorXd weights_in)
    : nodes(std::move(nodes_in)), weights(std::move(weights_in)) {
  if (nodes.size() != weights.size()) throw std::invalid_argument("EnergyGrid: size mismatch");
  if (!nodes.allFinite() || !weights.allFinite()) throw std::invalid_argument("EnergyGrid: non-finite entry");
  if ((nodes.array() < 0.0).any()) throw std::invalid_argument("EnergyGrid: negative continuum energy");
  if ((weights.array() <= 0.0).any()) throw std::invalid_argument("EnergyGrid: non-positive cell width");
  for (Eigen::Index i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("EnergyGrid: nodes not strictly increasing");
}

EnergyGrid uniform_grid(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("uniform_grid: need at least one cell");
  if (!(lo >= 0.0 && hi > lo)) throw std::invalid_argument("uniform_grid: need 0 <= lo < hi");
  const double width = (hi - lo) / n;
  Eigen::VectorXd nodes(n);
  for (int k = 0; k < n; ++k) nodes[k] = lo + (k + 0.5) * width;
  return EnergyGrid(std::move(nodes), Eigen::VectorXd::Constant(n, width));
}

PulseSpec::PulseSpec(double peak_field_in, double omega_in, int n_cycles_in)
    : peak_field(peak_field_in), omega(omega_in), n_cycles(n_cycles_in) {
  if (!(std::isfinite(peak_field) && peak_field >= 0.0))
    throw std::invalid_argument("PulseSpec: peak field must be finite and non-negative");
  if (!(std::isfinite(omega) && omega > 0.0)) throw std::invalid_argument("PulseSpec: omega must be positive");
  if (n_cycles < 4) throw std::invalid_argument("PulseSpec: need at least 4 cycles");
}

double PulseSpec::envelope(double t) const noexcept {
  const double total = duration();
  if (t < 0.0 || t > total) return 0.0;
  const double s = std::sin(pi * t / total);
  return peak_field * s * s;
}

double field_at(const PulseSpec& pulse, double t) { return pulse.envelope(t) * std::cos(pulse.omega * t); }

double flux_squared_integral(const PulseSpec& pulse) {
  // Integral of sin^8 over one period of the envelope is 35 T / 128.
  const double e0_sq = pulse.peak_field * pulse.peak_field;
  const double flux_scale = 8.0 * pi * units::kAlpha * pulse.omega;
  return e0_sq * e0_sq * 35.0 * pulse.duration() / 128.0 / (flux_scale * flux_scale);
}

double dipole_from_xsec(const CrossSectionCurve& curve, double photon_energy, double dE) {
  if (!(dE > 0.0)) throw std::invalid_argument("dipole_from_xsec: dE must be positive");
  if (!(photon_energy > 0.0)) throw std::invalid_argument("dipole_from_xsec: photon energy must be positive");
  const double sigma = curve(photon_energy);
  return std::sqrt(sigma * dE / (4.0 * pi * pi * units::kAlpha * photon_energy));
}

ModelHamiltonian build_hamiltonian(const AtomModel& atom, const EnergyGrid& grid_outer,
                                   const EnergyGrid& grid_inner) {
  if (grid_outer.size() == 0 || grid_inner.size() == 0)
    throw std::invalid_argument("build_hamiltonian: empty continuum grid");
  const Eigen::Index na = grid_outer.size();
  const Eigen::Index nb = grid_inner.size();

  ModelHamiltonian h;
  h.ground_energy = atom.ground_energy();
  h.singly_energies = grid_outer.nodes.array() - atom.binding_inner;
  h.doubly_energies = grid_inner.nodes.replicate(1, na).rowwise() + grid_outer.nodes.transpose();
  h.d1.resize(na);
  h.d2.resize(nb);
  for (Eigen::Index i = 0; i < na; ++i)
    h.d1[i] = dipole_from_xsec(atom.sigma_outer, grid_outer.nodes[i] + atom.binding_outer, grid_outer.weights[i]);
  for (Eigen::Index j = 0; j < nb; ++j)
    h.d2[j] = dipole_from_xsec(atom.sigma_inner, grid_inner.nodes[j] + atom.binding_inner, grid_inner.weights[j]);
  return h;
}

EnergyGrid default_outer_grid(const AtomModel& atom, double omega, int n) {
  return uniform_grid(0.0, 2.0 * omega - atom.binding_outer, n);
}

EnergyGrid default_inner_grid(const AtomModel& atom, double omega, int n) {
  return uniform_grid(0.0, 2.0 * omega - atom.binding_inner, n);
}

PropagationResult propagate(const ModelHamiltonian& h, const PulseSpec& pulse, double dt) {
  const double cycle = 2.0 * pi / pulse.omega;
  if (!(dt > 0.0) || dt > cycle / 50.0 * (1.0 + 1e-12))
    throw StabilityError("propagate: time step must not exceed 1/50 of an optical cycle");
  // Reference halfway up the two-photon ladder: ground at -omega, shell at +omega.
  const double reference = h.ground_energy + pulse.omega;
  return propagate(
      h, [&pulse](double t) { return field_at(pulse, t); }, pulse.duration(), dt, ground_state(h), reference);
}

double JointDistribution::total_probability() const {
  return (grid_outer.weights.asDiagonal() * density * grid_inner.weights.asDiagonal()).sum();
}

Eigen::VectorXd JointDistribution::outer_marginal() const { return density * grid_inner.weights; }

JointDistribution extract_joint(const StateVector& state, const EnergyGrid& grid_outer,
                                const EnergyGrid& grid_inner) {
  const Eigen::Index na = grid_outer.size();
  const Eigen::Index nb = grid_inner.size();
  if (state.size() != 1 + na + na * nb) throw std::invalid_argument("extract_joint: state does not match grids");

  const Eigen::VectorXd populations = state.cwiseAbs2();
  const Eigen::Map<const Eigen::MatrixXd> doubly(populations.data() + 1 + na, nb, na);
  Eigen::MatrixXd density = doubly.transpose();
  density.array().colwise() /= grid_outer.weights.array();
  density.array().rowwise() /= grid_inner.weights.transpose().array();

  return JointDistribution{grid_outer, grid_inner, std::move(density), populations.tail(state.size() - 1).sum()};
}

ShellStatistics shell_statistics(const JointDistribution& joint) {
  const Eigen::MatrixXd cell_prob =
      joint.grid_outer.weights.asDiagonal() * joint.density * joint.grid_inner.weights.asDiagonal();
  const double total = cell_prob.sum();
  if (!(total > 0.0)) return {};
  const Eigen::MatrixXd shell =
      joint.grid_outer.nodes.replicate(1, joint.grid_inner.size()).rowwise() + joint.grid_inner.nodes.transpose();
  const double mean = (cell_prob.array() * shell.array()).sum() / total;
  const double var = (cell_prob.array() * (shell.array() - mean).square()).sum() / total;
  return {mean, std::sqrt(var)};
}

Eigen::VectorXd sharing_histogram(const JointDistribution& joint, double excess, Eigen::Index n_bins) {
  if (!(excess > 0.0) || n_bins < 1) throw std::invalid_argument("sharing_histogram: need excess > 0 and n_bins >= 1");
  const double width = excess / static_cast<double>(n_bins);
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(n_bins);
  const EnergyGrid& ga = joint.grid_outer;
  const EnergyGrid& gb = joint.grid_inner;
  for (Eigen::Index i = 0; i < ga.size(); ++i) {
    const double a0 = std::max(0.0, ga.nodes[i] - 0.5 * ga.weights[i]);
    const double a1 = ga.nodes[i] + 0.5 * ga.weights[i];
    for (Eigen::Index j = 0; j < gb.size(); ++j) {
      const double mass = joint.density(i, j) * ga.weights[i] * gb.weights[j];
      if (mass == 0.0) continue;
      const double b0 = std::max(0.0, gb.nodes[j] - 0.5 * gb.weights[j]);
      const double b1 = gb.nodes[j] + 0.5 * gb.weights[j];
      // The cell's sharing values span [s0, s1]; spread its mass evenly over them.
      const double s0 = excess * a0 / (a0 + b1);
      const double s1 = excess * a1 / (a1 + b0);
      const auto first = static_cast<Eigen::Index>(s0 / width);
      for (Eigen::Index k = std::min(first, n_bins - 1); k < n_bins && k * width < s1; ++k) {
        const double lo = std::max(s0, k * width);
        const double hi = std::min(s1, (k + 1) * width);
        if (hi > lo) hist[k] += mass * (hi - lo) / (s1 - s0);
      }
    }
  }
  return hist;
}

SdcsCurve tdse_sdcs(const JointDistribution& joint, const PulseSpec& pulse, const AtomModel& atom) {
  const double excess = excess_energy(pulse.omega, atom);
  if (!(excess > 0.0)) throw WindowError("tdse_sdcs: photon energy below the nonsequential window");

  const auto n_bins = std::max<Eigen::Index>(
      3, static_cast<Eigen::Index>(std::lround(excess / joint.grid_outer.weights.mean())));
  const double width = excess / static_cast<double>(n_bins);
  const Eigen::VectorXd hist = sharing_histogram(joint, excess, n_bins);

  const double fluence2 = flux_squared_integral(pulse);
  SdcsCurve curve;
  curve.photon_energy = pulse.omega;
  curve.excess_energy = excess;
  curve.energies = (Eigen::VectorXd::LinSpaced(n_bins, 0.0, static_cast<double>(n_bins - 1)).array() + 0.5) * width;
  if (fluence2 > 0.0) {
    curve.values = (hist + hist.reverse()) / (width * fluence2);
    curve.total = 2.0 * joint.total_probability() / fluence2;
  } else {
    curve.values = Eigen::VectorXd::Zero(n_bins);
    curve.total = 0.0;
  }

  if (joint.ionized_probability >= kPerturbativeLimit) {
    curve.warning = "nonperturbative: ionized probability " + std::to_string(joint.ionized_probability) +
                    " exceeds " + std::to_string(kPerturbativeLimit);
  }
  return curve;
}

TdseRun simulate(const AtomModel& atom, const TdseParams& params) {
  if (!nonseq_window(atom).contains(params.omega))
    throw WindowError("simulate: photon energy outside the nonsequential window of " + atom.name);
  const PulseSpec pulse(params.peak_field, params.omega, params.n_cycles);
  const EnergyGrid outer = default_outer_grid(atom, params.omega, params.grid_outer);
  const EnergyGrid inner = default_inner_grid(atom, params.omega, params.grid_inner);
  const ModelHamiltonian h = build_hamiltonian(atom, outer, inner);
  const double dt = params.dt.value_or(2.0 * pi / params.omega / 200.0);
  PropagationResult result = propagate(h, pulse, dt);
  JointDistribution joint = extract_joint(result.state, outer, inner);
  SdcsCurve curve = tdse_sdcs(joint, pulse, atom);
  return TdseRun{pulse, std::move(joint), std::move(curve), result.norm_drift, result.steps};
}

}  // namespace nsdi::tdse
