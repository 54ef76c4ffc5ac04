#pragma once

// Time propagation of the constrained two-electron model.
//
// Basis: the ground product state, singly ionized states |E_a_i> (outer
// electron in the continuum, inner still bound) and doubly ionized states
// |E_a_i, E_b_j>. The field couples ground <-> singly through d1_i, and
// singly i <-> doubly (i, j) through d2_j only at the same outer index i.
// The coupling graph is a tree, so each implicit-midpoint step is solved
// exactly by elimination from the leaves in O(dimension).

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

#include "nsdi/errors.hpp"
#include "nsdi/perturbative.hpp"
#include "nsdi/xsec_data.hpp"

namespace nsdi::tdse {

/// Discretized continuum: cell centres and widths.
struct EnergyGrid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  EnergyGrid(Eigen::VectorXd nodes, Eigen::VectorXd weights);
  Eigen::Index size() const noexcept { return nodes.size(); }
  double span() const noexcept { return weights.sum(); }
};

/// n equal cells covering [lo, hi], nodes at cell centres.
EnergyGrid uniform_grid(double lo, double hi, int n);

/// z-polarized field E0 sin^2(pi t / T) cos(omega t) with T = n_cycles 2 pi / omega.
struct PulseSpec {
  double peak_field;
  double omega;
  int n_cycles;

  PulseSpec(double peak_field, double omega, int n_cycles);
  double duration() const noexcept { return n_cycles * 2.0 * std::numbers::pi / omega; }
  double envelope(double t) const noexcept;
};

double field_at(const PulseSpec& pulse, double t);

/// Integral over the pulse of the squared photon flux, with flux
/// env(t)^2 / (8 pi alpha omega) and env = E0 sin^2(pi t / T).
double flux_squared_integral(const PulseSpec& pulse);

/// Discretized bound-continuum dipole element whose density of states
/// reproduces `curve` at `photon_energy`: sqrt(sigma dE / (4 pi^2 alpha omega)).
double dipole_from_xsec(const CrossSectionCurve& curve, double photon_energy, double dE);

template <typename Scalar>
using StateVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
using StateVector = StateVectorT<double>;

/// Diagonal energies and coupling magnitudes of the model.
///
/// Doubly ionized state (i, j) sits at flat index 1 + N_a + i N_b + j, which is
/// entry (j, i) of the column-major `doubly_energies` matrix.
template <typename Scalar>
struct ModelHamiltonianT {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Scalar ground_energy{};
  Vector singly_energies;  // N_a
  Matrix doubly_energies;  // N_b x N_a
  Vector d1;               // N_a
  Vector d2;               // N_b

  Eigen::Index n_outer() const noexcept { return singly_energies.size(); }
  Eigen::Index n_inner() const noexcept { return d2.size(); }
  Eigen::Index dimension() const noexcept { return 1 + n_outer() + n_outer() * n_inner(); }
  Eigen::Index singly_index(Eigen::Index i) const noexcept { return 1 + i; }
  Eigen::Index doubly_index(Eigen::Index i, Eigen::Index j) const noexcept {
    return 1 + n_outer() + i * n_inner() + j;
  }

  template <typename NewScalar>
  ModelHamiltonianT<NewScalar> cast() const {
    return {static_cast<NewScalar>(ground_energy), singly_energies.template cast<NewScalar>(),
            doubly_energies.template cast<NewScalar>(), d1.template cast<NewScalar>(),
            d2.template cast<NewScalar>()};
  }

  /// Dense H at a given field value; meant for small systems and tests.
  Matrix dense(Scalar field) const {
    const Eigen::Index n = dimension();
    Matrix h = Matrix::Zero(n, n);
    h(0, 0) = ground_energy;
    for (Eigen::Index i = 0; i < n_outer(); ++i) {
      const Eigen::Index s = singly_index(i);
      h(s, s) = singly_energies[i];
      h(0, s) = h(s, 0) = field * d1[i];
      for (Eigen::Index j = 0; j < n_inner(); ++j) {
        const Eigen::Index d = doubly_index(i, j);
        h(d, d) = doubly_energies(j, i);
        h(s, d) = h(d, s) = field * d2[j];
      }
    }
    return h;
  }

  /// y = H(field) x without forming the matrix.
  StateVectorT<Scalar> apply(Scalar field, const StateVectorT<Scalar>& x) const {
    StateVectorT<Scalar> y(dimension());
    const Eigen::Index na = n_outer();
    const Eigen::Index nb = n_inner();
    std::complex<Scalar> ground = ground_energy * x[0];
    for (Eigen::Index i = 0; i < na; ++i) {
      const Eigen::Index s = singly_index(i);
      const auto block = x.segment(doubly_index(i, 0), nb);
      ground += field * d1[i] * x[s];
      y[s] = singly_energies[i] * x[s] + field * d1[i] * x[0] +
             field * (d2.array().template cast<std::complex<Scalar>>() * block.array()).sum();
      y.segment(doubly_index(i, 0), nb) =
          doubly_energies.col(i).template cast<std::complex<Scalar>>().cwiseProduct(block) +
          (field * x[s]) * d2.template cast<std::complex<Scalar>>();
    }
    y[0] = ground;
    return y;
  }
};

using ModelHamiltonian = ModelHamiltonianT<double>;

/// Model for `atom` on the given continuum grids: dimension 1 + N_a + N_a N_b,
/// d1_i from sigma_outer at E_a_i + I_A and d2_j from sigma_inner at E_b_j + I_B.
ModelHamiltonian build_hamiltonian(const AtomModel& atom, const EnergyGrid& grid_outer,
                                   const EnergyGrid& grid_inner);

/// Default grids: N cells on [0, 2 omega - I_A] (outer) and [0, 2 omega - I_B] (inner).
EnergyGrid default_outer_grid(const AtomModel& atom, double omega, int n = 120);
EnergyGrid default_inner_grid(const AtomModel& atom, double omega, int n = 120);

template <typename Scalar>
struct PropagationResultT {
  StateVectorT<Scalar> state;
  Scalar norm_drift{};  // |1 - |psi(T)|^2|
  int steps = 0;
};
using PropagationResult = PropagationResultT<double>;

inline constexpr double kStabilityDriftLimit = 1e-6;

/// Crank-Nicolson (implicit midpoint) propagation of `initial` from t = 0 to
/// `duration` under H(t) = diag - energy_reference + field(t) couplings.
/// The step actually taken is duration / ceil(duration / dt). The energy
/// reference only changes the global phase; placing it near the middle of the
/// relevant spectrum reduces the phase error of the Cayley map.
template <typename Scalar, typename Field>
PropagationResultT<Scalar> propagate(const ModelHamiltonianT<Scalar>& h, Field&& field, Scalar duration,
                                     Scalar dt, StateVectorT<Scalar> initial,
                                     Scalar energy_reference = Scalar(0)) {
  using Complex = std::complex<Scalar>;
  using CVector = StateVectorT<Scalar>;
  if (!(dt > 0) || !(duration >= 0)) throw std::invalid_argument("propagate: need dt > 0 and duration >= 0");
  if (initial.size() != h.dimension()) throw std::invalid_argument("propagate: state dimension mismatch");

  const Eigen::Index na = h.n_outer();
  const Eigen::Index nb = h.n_inner();
  const int steps = static_cast<int>(std::ceil(duration / dt - Scalar(1e-12)));
  const Scalar step = steps > 0 ? duration / steps : Scalar(0);
  const Scalar tau = step / 2;
  const Complex itau(0, tau);

  // Time-independent parts of (1 + i tau H).
  const Complex a_ground = Scalar(1) + itau * (h.ground_energy - energy_reference);
  const CVector a_singly =
      (Scalar(1) + itau * (h.singly_energies.array() - energy_reference).template cast<Complex>()).matrix();
  const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> inv_a_doubly =
      (Scalar(1) + itau * (h.doubly_energies.array() - energy_reference).template cast<Complex>()).inverse();
  // S_i = sum_j d2_j^2 / a_ij.
  const CVector d2_sq = h.d2.array().square().template cast<Complex>().matrix();
  const CVector s_sum = inv_a_doubly.transpose() * d2_sq;
  const CVector d2c = h.d2.template cast<Complex>();

  CVector psi = std::move(initial);
  const Scalar norm0 = psi.squaredNorm();
  CVector rhs(psi.size());
  CVector alpha(na), beta(na);

  for (int n = 0; n < steps; ++n) {
    const Scalar f = static_cast<Scalar>(field((n + Scalar(0.5)) * step));
    const Complex c = itau * f;

    rhs = psi - itau * (h.apply(f, psi) - energy_reference * psi);

    // Eliminate doubly states into their singly parent.
    Complex ground_diag = a_ground;
    Complex ground_rhs = rhs[0];
    for (Eigen::Index i = 0; i < na; ++i) {
      const Eigen::Index off = h.doubly_index(i, 0);
      const Complex coupled =
          (d2c.array() * inv_a_doubly.col(i).array() * rhs.segment(off, nb).array()).sum();
      alpha[i] = a_singly[i] - c * c * s_sum[i];
      beta[i] = rhs[h.singly_index(i)] - c * coupled;
      const Complex g = c * h.d1[i];
      ground_diag -= g * g / alpha[i];
      ground_rhs -= g * beta[i] / alpha[i];
    }

    // Back substitution.
    const Complex x0 = ground_rhs / ground_diag;
    psi[0] = x0;
    for (Eigen::Index i = 0; i < na; ++i) {
      const Complex xs = (beta[i] - c * h.d1[i] * x0) / alpha[i];
      psi[h.singly_index(i)] = xs;
      const Eigen::Index off = h.doubly_index(i, 0);
      psi.segment(off, nb) =
          ((rhs.segment(off, nb) - (c * xs) * d2c).array() * inv_a_doubly.col(i).array()).matrix();
    }

    if ((n & 63) == 63 && std::abs(psi.squaredNorm() - norm0) > kStabilityDriftLimit)
      throw StabilityError("propagate: norm drift exceeded " + std::to_string(kStabilityDriftLimit) +
                           " at step " + std::to_string(n + 1));
  }

  const Scalar drift = std::abs(norm0 - psi.squaredNorm());
  if (drift > kStabilityDriftLimit)
    throw StabilityError("propagate: norm drift " + std::to_string(drift) + " at end of run");
  return {std::move(psi), drift, steps};
}

/// Pure ground state of a model.
template <typename Scalar>
StateVectorT<Scalar> ground_state(const ModelHamiltonianT<Scalar>& h) {
  StateVectorT<Scalar> psi = StateVectorT<Scalar>::Zero(h.dimension());
  psi[0] = Scalar(1);
  return psi;
}

/// Propagate the ground state through `pulse`. Requires dt <= (2 pi / omega) / 50,
/// otherwise StabilityError.
PropagationResult propagate(const ModelHamiltonian& h, const PulseSpec& pulse, double dt);

/// Population density over the grid product, P_ij = |c_ij|^2 / (dE_i dE_j).
struct JointDistribution {
  EnergyGrid grid_outer;
  EnergyGrid grid_inner;
  Eigen::MatrixXd density;  // N_a x N_b
  double ionized_probability = 0.0;  // singly + doubly

  double total_probability() const;
  /// dP/dE_a at each outer node.
  Eigen::VectorXd outer_marginal() const;
};

JointDistribution extract_joint(const StateVector& state, const EnergyGrid& grid_outer,
                                const EnergyGrid& grid_inner);

/// Probability-weighted mean and standard deviation of E_a + E_b over the
/// doubly ionized states (both zero when nothing is populated).
struct ShellStatistics {
  double mean = 0.0;
  double sd = 0.0;
};

ShellStatistics shell_statistics(const JointDistribution& joint);

inline constexpr double kPerturbativeLimit = 1e-4;

/// Distribution of double-ionization probability over the energy sharing
/// excess * E_a / (E_a + E_b), histogrammed into n_bins equal bins on
/// [0, excess]. Each grid cell's mass is spread evenly over the sharing range
/// its corners span, so every doubly ionized cell is counted, including those
/// off the shell E_a + E_b = excess.
Eigen::VectorXd sharing_histogram(const JointDistribution& joint, double excess, Eigen::Index n_bins);

/// Generalized single-differential cross section from a propagation run, on
/// bins of the outer-grid spacing across [0, excess]. Only the "outer
/// electron leaves first" ordering is propagated; the interchanged ordering
/// contributes the mirror image, so both exchange-symmetrized orderings sum
/// to g(E) + g(excess - E) with g the sharing density, divided by the
/// integrated squared photon flux. `total` is twice the double-ionization
/// probability over the same flux integral and equals the integral of the
/// curve. A warning is attached when the ionized probability leaves the
/// perturbative regime.
SdcsCurve tdse_sdcs(const JointDistribution& joint, const PulseSpec& pulse, const AtomModel& atom);

/// Full pipeline for one photon energy: default grids, ground-state
/// propagation, extraction.
struct TdseParams {
  double omega = 0.0;
  double peak_field = 1e-3;
  int n_cycles = 20;
  int grid_outer = 120;
  int grid_inner = 120;
  std::optional<double> dt;  // default: one optical cycle / 200
};

struct TdseRun {
  PulseSpec pulse;
  JointDistribution joint;
  SdcsCurve sdcs;
  double norm_drift;
  int steps;
};

/// Throws WindowError unless omega lies inside the nonsequential window.
TdseRun simulate(const AtomModel& atom, const TdseParams& params);

}  // namespace nsdi::tdse
