#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nsdi/errors.hpp"
#include "nsdi/perturbative.hpp"
#include "nsdi/units.hpp"
#include "oracles/brute_force.hpp"

using namespace nsdi;

namespace {

AtomModel toy_atom(double sigma_a = 1.0, double sigma_b = 1.0) {
  return make_atom("toy", 1.0, 2.0, CrossSectionCurve::constant("a", 1.0, 10.0, sigma_a),
                   CrossSectionCurve::constant("b", 2.0, 10.0, sigma_b));
}

// Curve sampling a random cubic (kept non-negative) on a fine grid.
CrossSectionCurve polynomial_curve(std::mt19937_64& rng, double threshold, double upper) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c0 = 1.0 + 0.5 * u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng);
  const int n = 64;
  Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(n, threshold, upper);
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) {
    const double x = (e[i] - threshold) / (upper - threshold);
    s[i] = std::max(0.0, c0 + x * (c1 + x * (c2 + x * c3)));
  }
  return CrossSectionCurve("poly", threshold, e, s);
}

}  // namespace

TEST_CASE("nonseq_window") {
  const auto he = make_atom("he", units::ev_to_au(24.587), units::ev_to_au(54.418),
                            CrossSectionCurve::constant("a", units::ev_to_au(24.587), 5.0, 1.0),
                            CrossSectionCurve::constant("b", units::ev_to_au(54.418), 5.0, 1.0));
  const Window w = nonseq_window(he);
  CHECK(units::au_to_ev(w.omega_min) == doctest::Approx(39.50).epsilon(1e-4));
  CHECK(units::au_to_ev(w.omega_max) == doctest::Approx(54.42).epsilon(1e-4));

  const auto ne = make_atom("ne", units::ev_to_au(21.6), units::ev_to_au(40.9),
                            CrossSectionCurve::constant("a", units::ev_to_au(21.6), 5.0, 1.0),
                            CrossSectionCurve::constant("b", units::ev_to_au(40.9), 5.0, 1.0));
  CHECK(units::au_to_ev(nonseq_window(ne).omega_min) == doctest::Approx(31.25).epsilon(1e-9));
  CHECK(units::au_to_ev(nonseq_window(ne).omega_max) == doctest::Approx(40.9).epsilon(1e-9));

  AtomModel degenerate = toy_atom();
  degenerate.binding_inner = degenerate.binding_outer;
  const Window empty = nonseq_window(degenerate);
  CHECK(empty.omega_min == empty.omega_max);
  CHECK(empty.empty());
  CHECK_FALSE(empty.contains(empty.omega_min));
}

TEST_CASE("f_kernel spot values") {
  const auto atom = toy_atom();
  // Frozen from the hand-arithmetic oracle on the closed form.
  const double at_quarter = 1.75 * 1.75 / std::numbers::pi / (1.25 * 2.25 * 0.25);
  const double at_edge = 3.0625 / std::numbers::pi / (1.5 * 2.0 * 0.0625);
  CHECK(at_quarter == doctest::Approx(1.3864163931560660).epsilon(1e-15));
  CHECK(f_kernel(0.25, 1.75, atom) == doctest::Approx(at_quarter).epsilon(1e-13));
  CHECK(f_kernel(0.5, 1.75, atom) == doctest::Approx(at_edge).epsilon(1e-13));
  CHECK(f_kernel(0.5, 1.75, atom) == doctest::Approx(5.1988).epsilon(1e-4));

  // sigma_A vanishing below a raised threshold.
  const auto zero_a = make_atom("z", 1.0, 2.0, CrossSectionCurve::constant("a", 1.01, 10.0, 1.0),
                                CrossSectionCurve::constant("b", 2.0, 10.0, 1.0));
  CHECK(f_kernel(0.005, 1.75, zero_a) == 0.0);
  CHECK(f_kernel(0.25, 1.75, toy_atom(0.0, 1.0)) == 0.0);
}

TEST_CASE("f_kernel errors") {
  const auto atom = toy_atom();
  CHECK_THROWS_AS(f_kernel(0.1, 1.5, atom), WindowError);
  CHECK_THROWS_AS(f_kernel(0.1, 1.4, atom), WindowError);
  CHECK_THROWS_AS(f_kernel(0.1, 2.0, atom), WindowError);
  CHECK_THROWS_AS(f_kernel(-0.01, 1.75, atom), DomainError);
  CHECK_THROWS_AS(f_kernel(0.51, 1.75, atom), DomainError);
  const auto short_b = make_atom("s", 1.0, 2.0, CrossSectionCurve::constant("a", 1.0, 10.0, 1.0),
                                 CrossSectionCurve::constant("b", 2.0, 2.2, 1.0));
  CHECK_THROWS_AS(f_kernel(0.0, 1.75, short_b), CoverageError);
}

TEST_CASE("sdcs") {
  const auto atom = toy_atom();
  const SdcsCurve curve = sdcs(1.75, atom, 101);
  CHECK(curve.excess_energy == doctest::Approx(0.5));
  CHECK(curve.energies[0] == 0.0);
  CHECK(curve.energies[100] == doctest::Approx(0.5));
  CHECK(curve.values[50] == doctest::Approx(1.3864163931560660).epsilon(1e-12));
  for (int k = 0; k < 101; ++k) CHECK(curve.values[k] == curve.values[100 - k]);
  CHECK(curve.total == doctest::Approx(total_xsec(1.75, atom)));
  CHECK(classify_shape(curve) == SdcsShape::UShaped);
  CHECK_THROWS_AS(sdcs(1.75, atom, 2), std::invalid_argument);
}

TEST_CASE("exchange symmetry over random atoms") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double ia = 0.3 + u(rng);
    const double ib = ia + 0.2 + u(rng);
    const auto atom = make_atom("r", ia, ib, polynomial_curve(rng, ia, 2.0 * ib + 1.0),
                                polynomial_curve(rng, ib, 2.0 * ib + 1.0));
    const Window w = nonseq_window(atom);
    const double omega = w.omega_min + (0.02 + 0.96 * u(rng)) * (w.omega_max - w.omega_min);
    const double excess = excess_energy(omega, atom);
    const double e = u(rng) * excess;
    const double a = dsigma_de(e, omega, atom);
    const double b = dsigma_de(excess - e, omega, atom);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(a, b));
  }
}

TEST_CASE("detuning pole stays outside the domain") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto atom = toy_atom();
  for (int k = 0; k < 1000; ++k) {
    const double omega = 1.5 + (1e-6 + u(rng) * (1.0 - 2e-6)) * 0.5;
    const double excess = excess_energy(omega, atom);
    const double pole = omega - atom.binding_outer;
    CHECK((pole < 0.0 || pole > excess));
    const double e = (1e-9 + u(rng) * (1.0 - 2e-9)) * excess;
    CHECK(std::isfinite(f_kernel(e, omega, atom)));
  }
}

TEST_CASE("total_xsec against a midpoint-rule oracle") {
  const auto atom = toy_atom();
  const double oracle_total = oracle::midpoint_total(1.75, atom, 1000000);
  CHECK(total_xsec(1.75, atom) == doctest::Approx(oracle_total).epsilon(1e-6));
  CHECK(total_xsec(1.75, atom) > 0.0);
  CHECK_THROWS_AS(total_xsec(1.49, atom), WindowError);
  CHECK_THROWS_AS(total_xsec(2.01, atom), WindowError);
  CHECK_THROWS_AS(total_xsec(2.0, atom), WindowError);
}

TEST_CASE("total_xsec on kinked polynomial curves") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double ia = 0.5 + u(rng);
    const double ib = ia + 0.3 + u(rng);
    const auto atom = make_atom("p", ia, ib, polynomial_curve(rng, ia, 2.0 * ib),
                                polynomial_curve(rng, ib, 2.0 * ib));
    const Window w = nonseq_window(atom);
    const double omega = w.omega_min + (0.1 + 0.8 * u(rng)) * (w.omega_max - w.omega_min);
    CHECK(total_xsec(omega, atom) == doctest::Approx(oracle::midpoint_total(omega, atom, 200000)).epsilon(1e-5));
  }
}

TEST_CASE("quadrature reports non-convergence at the node cap") {
  const auto atom = toy_atom();
  QuadratureOptions tight;
  tight.rel_tol = 0.0;
  tight.max_nodes = 64;
  CHECK_THROWS_AS(total_xsec(1.75, atom, tight), ConvergenceError);
}

TEST_CASE("bilinearity in the cross sections") {
  const auto atom = toy_atom(0.7, 1.3);
  for (double c : {0.5, 3.0, 10.0}) {
    const auto scaled = make_atom("s", 1.0, 2.0, atom.sigma_outer.scaled(c), atom.sigma_inner.scaled(c));
    CHECK(f_kernel(0.1, 1.8, scaled) == doctest::Approx(c * c * f_kernel(0.1, 1.8, atom)).epsilon(1e-14));
    CHECK(dsigma_de(0.3, 1.8, scaled) == doctest::Approx(c * c * dsigma_de(0.3, 1.8, atom)).epsilon(1e-14));
    CHECK(total_xsec(1.8, scaled) == doctest::Approx(c * c * total_xsec(1.8, atom)).epsilon(1e-12));
  }
}

TEST_CASE("unit conversion of totals holds no hidden state") {
  const auto atom = toy_atom();
  const double au = total_xsec(1.7, atom);
  const double cgs = units::gen_xsec_to_cm4s(au);
  CHECK(cgs / units::kGenXsecCm4s == doctest::Approx(au).epsilon(1e-15));
  CHECK(total_xsec(1.7, atom) == au);
}

TEST_CASE("scan") {
  const auto atom = toy_atom();
  const std::vector<double> omegas{1.55, 1.7, 1.85};
  const ScanTable table = scan(omegas, atom);
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) {
    CHECK(row.in_window);
    CHECK(*row.total > 0.0);
  }
  // Rise toward the sequential threshold.
  CHECK(*table.rows[2].total > *table.rows[1].total);
  CHECK(*table.rows[1].total > *table.rows[0].total);

  const std::vector<double> below{1.0, 1.2, 1.4};
  for (const auto& row : scan(below, atom).rows) {
    CHECK_FALSE(row.in_window);
    CHECK_FALSE(row.total.has_value());
  }

  const std::vector<double> single{1.7};
  CHECK(*scan(single, atom).rows[0].total == total_xsec(1.7, atom));

  CHECK_THROWS_AS(scan(std::vector<double>{}, atom), std::invalid_argument);
  CHECK_THROWS_AS(scan(std::vector<double>{1.7, 1.6}, atom), std::invalid_argument);
}

TEST_CASE("shape classification") {
  SdcsCurve curve;
  curve.excess_energy = 1.0;
  curve.energies = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  curve.values = (Eigen::VectorXd(5) << 3, 2, 1, 2, 3).finished();
  CHECK(classify_shape(curve) == SdcsShape::UShaped);
  curve.values = (Eigen::VectorXd(5) << 1, 2, 3, 2, 1).finished();
  CHECK(classify_shape(curve) == SdcsShape::PeakedAtMidpoint);
  curve.values = (Eigen::VectorXd(5) << 1, 2, 3, 4, 5).finished();
  CHECK(classify_shape(curve) == SdcsShape::Other);
}
