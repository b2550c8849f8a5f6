#pragma once

#include <cstdint>
#include <stdexcept>

namespace drugsim {

/// First-order radio energy model. Transmitting k bits over distance d costs
/// electronics energy plus an amplifier term growing with d^2; receiving k
/// bits costs electronics energy only. All values are joules, bits, meters.
struct EnergyModel {
  double e_elec = 50e-9;    ///< electronics energy per bit (J/bit)
  double eps_amp = 100e-12; ///< amplifier energy per bit per m^2 (J/bit/m^2)
  double initial_energy = 0.5;          ///< per-node starting battery (J)
  double participation_threshold = 0.05; ///< minimum residual to relay (J)

  bool valid() const {
    return e_elec > 0.0 && eps_amp > 0.0 && initial_energy > 0.0 &&
           participation_threshold > 0.0 &&
           participation_threshold < initial_energy;
  }
};

namespace detail {

inline void require_bits(std::int64_t k) {
  if (k < 0) {
    throw std::domain_error("bit count must be non-negative");
  }
}

inline void require_hops(std::int64_t n) {
  if (n < 1) {
    throw std::domain_error("hop count must be at least 1");
  }
}

}  // namespace detail

/// Cost of transmitting k bits over distance d meters.
inline double tx_cost(const EnergyModel& m, std::int64_t k, double d) {
  detail::require_bits(k);
  if (d < 0.0) {
    throw std::domain_error("distance must be non-negative");
  }
  const double bits = static_cast<double>(k);
  return m.e_elec * bits + m.eps_amp * bits * d * d;
}

/// Cost of receiving k bits.
inline double rx_cost(const EnergyModel& m, std::int64_t k) {
  detail::require_bits(k);
  return m.e_elec * static_cast<double>(k);
}

/// Cost of sending k bits straight to a destination n hops away when the
/// per-hop spacing is r meters (single transmission over distance n*r).
inline double direct_energy(const EnergyModel& m, std::int64_t k,
                            std::int64_t n, double r) {
  detail::require_bits(k);
  detail::require_hops(n);
  if (r <= 0.0) {
    throw std::domain_error("hop spacing must be positive");
  }
  const double bits = static_cast<double>(k);
  const double hops = static_cast<double>(n);
  return bits * (m.e_elec + m.eps_amp * hops * hops * r * r);
}

/// Receive cost accumulated at the n-1 intermediate nodes of an n-hop relay.
inline double multihop_receive_energy(const EnergyModel& m, std::int64_t k,
                                      std::int64_t n) {
  detail::require_bits(k);
  detail::require_hops(n);
  return static_cast<double>(n - 1) * m.e_elec * static_cast<double>(k);
}

/// Total cost of relaying k bits over n hops of r meters each:
/// n transmissions plus n-1 intermediate receptions. The final receiver is
/// not charged.
inline double multihop_total_energy(const EnergyModel& m, std::int64_t k,
                                    std::int64_t n, double r) {
  detail::require_bits(k);
  detail::require_hops(n);
  if (r <= 0.0) {
    throw std::domain_error("hop spacing must be positive");
  }
  const double bits = static_cast<double>(k);
  const double hops = static_cast<double>(n);
  return bits * ((2.0 * hops - 1.0) * m.e_elec + m.eps_amp * hops * r * r);
}

/// Cost of one transmit plus one receive over a single link of r meters.
inline double singlehop_pair_energy(const EnergyModel& m, std::int64_t k,
                                    double r) {
  detail::require_bits(k);
  if (r <= 0.0) {
    throw std::domain_error("link distance must be positive");
  }
  const double bits = static_cast<double>(k);
  return bits * (2.0 * m.e_elec + m.eps_amp * r * r);
}

}  // namespace drugsim
