#pragma once

#include "fockopt/core.hpp"

#include <vector>

namespace fockopt::metrics {

double fidelity(const PureState& a, const PureState& b);
double fidelity(const DensityOperator& a, const PureState& b);
double fidelity(const PureState& a, const DensityOperator& b);
double fidelity(const DensityOperator& a, const DensityOperator& b);
double fidelity(const State& a, const State& b);

struct WignerGrid {
    std::vector<double> x;
    std::vector<double> p;
    // w[ip * x.size() + ix]
    std::vector<double> w;
};

std::vector<double> linspace(double lo, double hi, double step);

// W(x,p) = (1/2pi) Tr[rho D(g) P D(g)^dag], g = (x + ip)/2, P the parity.
// Evaluated with the Laguerre-type recurrence over matrix elements.
WignerGrid wigner(const DensityOperator& s, const std::vector<double>& xs, const std::vector<double>& ps, int workers = 1);
WignerGrid wigner(const PureState& s, const std::vector<double>& xs, const std::vector<double>& ps, int workers = 1);

double parity(const PureState& s);
double parity(const DensityOperator& s);

struct Moments {
    double mean_x, mean_p, var_x, var_p;
};
Moments quadrature_moments(const PureState& s);
Moments quadrature_moments(const DensityOperator& s);

enum class Stabilizer { Sx, Sp };

// S_x = exp(i sqrt(pi) x) = D(i sqrt(pi)), S_p = exp(i sqrt(pi) p) = D(sqrt(pi))
cplx stabilizer_expectation(const PureState& s, Stabilizer which);
cplx stabilizer_expectation(const DensityOperator& s, Stabilizer which);

struct SqueezingReport {
    double delta2_x, delta2_p;
    double db_x, db_p;
    double symmetric_db;  // min(db_x, db_p)
};

SqueezingReport squeezing_from_stabilizers(cplx sx, cplx sp);
SqueezingReport effective_squeezing(const PureState& s);
SqueezingReport effective_squeezing(const DensityOperator& s);

// r_corr = (1/4) ln(var_x / var_p)
double squeezing_correction(const PureState& s);
double squeezing_correction(const DensityOperator& s);

double squeezing_db(double r);
double db_to_r(double db);

}  // namespace fockopt::metrics
