#include "nsdi/units.hpp"

#include <cmath>
#include <stdexcept>

namespace nsdi::units {

double ev_to_au(double ev) {
  if (!std::isfinite(ev)) throw std::invalid_argument("ev_to_au: non-finite energy");
  return ev / kHartreeEV;
}

double au_to_ev(double hartree) {
  if (!std::isfinite(hartree)) throw std::invalid_argument("au_to_ev: non-finite energy");
  return hartree * kHartreeEV;
}

double mb_to_au(double mb) {
  if (!(mb >= 0.0)) throw std::invalid_argument("mb_to_au: area must be non-negative");
  return mb * kMegabarnAu;
}

double au_to_mb(double area_au) {
  if (!(area_au >= 0.0)) throw std::invalid_argument("au_to_mb: area must be non-negative");
  return area_au / kMegabarnAu;
}

double gen_xsec_to_cm4s(double x_au) {
  if (!(x_au >= 0.0)) throw std::invalid_argument("gen_xsec_to_cm4s: cross section must be non-negative");
  return x_au * kGenXsecCm4s;
}

}  // namespace nsdi::units
