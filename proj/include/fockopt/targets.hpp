#pragma once

#include "fockopt/core.hpp"

namespace fockopt::targets {

enum class Parity { Even, Odd };

struct CatSpec {
    double alpha = 1.0;  // real amplitude
    double r = 0.0;
    Parity parity = Parity::Even;
};

struct GkpSpec {
    int logical = 0;
    double delta = 1.0;
    // envelope weight below which lattice terms are dropped
    double weight_cut = 1e-12;
};

// S(r)|0> with S(r) = exp[(r/2)(a^2 - a^dag^2)]: amplitude of |2n> is
// (-tanh r)^n sqrt((2n)!)/(2^n n!) / sqrt(cosh r).
PureState squeezed_vacuum(double r, const Truncation& t);

PureState coherent(cplx alpha, const Truncation& t);

// normalized (a^dag)^n S(r)|0>
PureState ideal_photon_added_squeezed(double r, int n, const Truncation& t);

// exp(i gamma x^3)|0>, x = a + a^dag, via the eigenbasis of x on the truncated space
PureState ideal_cubic(double gamma, const Truncation& t);

PureState ideal_cat(const CatSpec& spec, const Truncation& t);

// sum_s exp(-((2s+mu) beta delta)^2 / 2) D((2s+mu) beta) S(-ln delta)|0>, beta = sqrt(pi)/2.
// Built from its position wavefunction projected on the Fock basis.
PureState ideal_gkp(const GkpSpec& spec, const Truncation& t);

// (a^dag)^n applied to the amplitudes, dropping what falls off the truncation.
Vec raise(const Vec& v, int n);

}  // namespace fockopt::targets
