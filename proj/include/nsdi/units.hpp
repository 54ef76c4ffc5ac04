#pragma once

// Physical constants (CODATA 2018, 8 significant digits) and the handful of
// conversions used at the library boundary. Everything internal is in
// atomic units: hbar = e = m_e = 1.

namespace nsdi::units {

struct Constants {
  double fine_structure_alpha;
  double hartree_in_eV;
  double bohr_in_cm;
  double atomic_time_in_s;
  double megabarn_in_au_area;
  double gen_xsec_au_in_cm4s;
};

inline constexpr double kAlpha = 7.2973526e-3;
inline constexpr double kHartreeEV = 27.211386;
inline constexpr double kBohrCm = 5.2917721e-9;
inline constexpr double kAtomicTimeS = 2.4188843e-17;
inline constexpr double kMegabarnCm2 = 1e-18;
inline constexpr double kMegabarnAu = kMegabarnCm2 / (kBohrCm * kBohrCm);
inline constexpr double kGenXsecCm4s = kBohrCm * kBohrCm * kBohrCm * kBohrCm * kAtomicTimeS;

inline constexpr Constants kConstants{kAlpha,         kHartreeEV,  kBohrCm,
                                      kAtomicTimeS,   kMegabarnAu, kGenXsecCm4s};

double ev_to_au(double ev);
double au_to_ev(double hartree);
double mb_to_au(double mb);
double au_to_mb(double area_au);
double gen_xsec_to_cm4s(double x_au);

}  // namespace nsdi::units
