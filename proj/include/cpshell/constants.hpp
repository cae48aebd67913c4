#pragma once

#include <numbers>

namespace cpshell {

// CODATA 2018; h, c, k_B and e are exact in the SI.
namespace codata {
inline constexpr double planck = 6.62607015e-34;  // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double electron_volt = 1.602176634e-19;  // J
inline constexpr double angstrom = 1e-10;                 // m
inline constexpr double nanometre = 1e-9;                 // m
}  // namespace codata

/// The three constants every formula needs, expressed in one unit system.
/// Energies come out in the system's energy unit, entropies in energy/K.
struct UnitSystem {
  double hbar = codata::hbar;
  double c = codata::speed_of_light;
  double k_B = codata::boltzmann;
};

inline constexpr UnitSystem si_units() { return {}; }

}  // namespace cpshell
