#pragma once

#include "fockopt/core.hpp"

#include <optional>

namespace fockopt::chan {

struct DetectorModel {
    double eta = 1.0;        // efficiency
    double dark_rate = 0.0;  // counts per second
    double window = 1e-9;    // seconds

    double dark_probability() const { return dark_rate * window; }
};

struct ThermalLossParams {
    double eta = 1.0;
    double nbar = 0.0;

    double gain() const { return 1.0 + (1.0 - eta) * nbar; }
    double transmissivity() const { return eta / gain(); }
};

ThermalLossParams make_thermal_loss(double eta, double nbar);

// Kraus route: sum_i A_i rho A_i^dag with A_i = sqrt((1-T)^i/i!) T^{n/2} a^i.
DensityOperator pure_loss(const DensityOperator& s, double tau);
DensityOperator pure_loss(const PureState& s, double tau);

// Quantum-limited amplifier, B_k = sqrt((G-1)^k/(k! G^{k+1})) a^dag^k G^{-n/2}.
// Output above the truncation is dropped.
DensityOperator amplifier(const DensityOperator& s, double gain);

// Pure loss at T = eta/G followed by the amplifier of gain G.
DensityOperator thermal_loss(const DensityOperator& s, const ThermalLossParams& p);

// Reference channel: mix with a thermal state on a beamsplitter of
// transmissivity eta and trace out the ancilla. Small dims only.
DensityOperator thermal_loss_dilation_oracle(const DensityOperator& s, double eta, double nbar);

// n = p / ((1-p)(1-eta)) with p = R_d D_w.
double dark_count_mean_photon(const DetectorModel& m);
double dark_count_probability(double eta, double nbar);

// <n| E(|m><m|) |n> for the thermal-loss channel of the detector, m = 0..mmax-1.
// The effective POVM element of outcome n is diagonal with these weights.
RVec detector_response(int n, const ThermalLossParams& p, int mmax);

// Thermal-loss detector on the measured mode followed by projection on |n>.
Heralded<DensityOperator> noisy_herald_pnrd(const DensityOperator& joint, int measured_mode, int n, const DetectorModel& m);
Heralded<DensityOperator> noisy_herald_pnrd(const PureState& joint, int measured_mode, int n, const DetectorModel& m);

ThermalLossParams detector_params(const DetectorModel& m);

}  // namespace fockopt::chan
