#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace nsdi {

/// Tabulated one-photon single-ionization cross section sigma(photon energy).
///
/// Energies are in hartree and areas in atomic units (bohr^2). The curve is
/// exactly zero below `threshold()`, flat from the threshold up to the first
/// node when the two differ, and linearly interpolated between nodes. Queries
/// above the last node throw CoverageError: the table does not cover them.
class CrossSectionCurve {
 public:
  CrossSectionCurve(std::string label, double threshold, Eigen::VectorXd energies,
                    Eigen::VectorXd sigmas);

  /// Curve holding a constant value from `threshold` to `upper`.
  static CrossSectionCurve constant(std::string label, double threshold, double upper,
                                    double sigma);

  const std::string& label() const noexcept { return label_; }
  double threshold() const noexcept { return threshold_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }
  const Eigen::VectorXd& sigmas() const noexcept { return sigmas_; }
  Eigen::Index size() const noexcept { return energies_.size(); }
  double max_energy() const noexcept { return energies_[energies_.size() - 1]; }

  double operator()(double photon_energy) const;

  /// Same curve with every sigma multiplied by `factor` (>= 0).
  CrossSectionCurve scaled(double factor) const;

 private:
  std::string label_;
  double threshold_;
  Eigen::VectorXd energies_;
  Eigen::VectorXd sigmas_;
};

inline double sigma_at(const CrossSectionCurve& curve, double photon_energy) {
  return curve(photon_energy);
}

/// Parse the text table format:
///
///     # comment
///     #threshold_eV=24.587
///     photon_energy_eV,sigma_Mb
///     30.0,5.0
///
/// Throws ParseError / OrderingError (with line numbers) and DomainError.
CrossSectionCurve parse_table(std::string_view content, std::string label);

/// Inverse of parse_table. For a curve obtained from parse_table, parsing the
/// output reproduces the stored atomic-unit doubles bit for bit.
std::string serialize_table(const CrossSectionCurve& curve);

/// Read and parse a table file; throws NotFound when the file cannot be opened.
CrossSectionCurve load_table(const std::filesystem::path& path);

/// Exact nonrelativistic 1s photoionization cross section of a hydrogenic ion
/// with nuclear charge Z at photon energy `photon_energy` (hartree).
double hydrogenic_sigma(int Z, double photon_energy);

/// Curve tabulating hydrogenic_sigma on `grid`; every grid point must lie
/// strictly above the threshold Z^2/2.
CrossSectionCurve hydrogenic_curve(int Z, std::span<const double> grid);

/// Two-electron atom for the nonsequential model: outer electron A (bound by
/// I_A) and inner electron B (bound by I_B > I_A) with their one-photon curves.
struct AtomModel {
  std::string name;
  double binding_outer;
  double binding_inner;
  CrossSectionCurve sigma_outer;
  CrossSectionCurve sigma_inner;

  double ground_energy() const noexcept { return -(binding_outer + binding_inner); }
};

inline constexpr double kDefaultThresholdTolerance = 0.02;

/// Validated AtomModel. Throws InvalidModel when I_A >= I_B or a binding
/// energy is not positive, ConsistencyError when a curve threshold differs
/// from its binding energy by more than `threshold_tolerance` (relative).
AtomModel make_atom(std::string name, double binding_outer, double binding_inner,
                    CrossSectionCurve sigma_outer, CrossSectionCurve sigma_inner,
                    double threshold_tolerance = kDefaultThresholdTolerance);

}  // namespace nsdi
