#pragma once

#include "fockopt/core.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace fockopt::ops {

struct Squeeze { double r; };
struct Displace { cplx alpha; };
struct Beamsplitter { double tau; };
struct TwoModeSqueeze { double kappa; };
struct CubicPhase { double gamma; };

using UnitarySpec = std::variant<Squeeze, Displace, Beamsplitter, TwoModeSqueeze, CubicPhase>;

struct ModeOperator {
    int modes = 1;
    Truncation t1;
    Truncation t2;
    Mat m;
    // set when the operator acting on vacuum leaks into the guard band
    bool health_warning = false;
};

RMat ladder(int dim);

// exp(G) for anti-Hermitian G, via the eigendecomposition of the Hermitian iG
Mat expm_skew(const Mat& generator);

// Eigendecomposition H = V diag(w) V^dagger, reused for exp(-i t H) at any t.
struct Spectrum {
    RVec w;
    Mat v;
    Mat exp_minus_i(double t) const;
    Vec apply(double t, const Vec& x) const;
};

// Cached spectra of the displacement generator i(a^dag - a) and the squeeze
// generator (i/2)(a^2 - a^dag^2) on a padded space of size p. Thread-safe.
std::shared_ptr<const Spectrum> displacement_spectrum(int p);
std::shared_ptr<const Spectrum> squeeze_spectrum(int p);

// Padded sizes that make the top-left dim x dim block of the operator exact to
// double precision. Rounded up to a multiple of 64 so the cache gets reused.
int displacement_pad_dim(int dim, double abs_alpha);
int squeeze_pad_dim(int dim, double abs_r, int cap_factor = 4);

// Operator matrices computed on the padded space and cropped to dim.
Mat displacement_matrix(cplx alpha, int dim);
Mat squeeze_matrix(double r, int dim);
Mat cubic_phase_matrix(double gamma, int dim);

// Vector actions. The input is zero-padded, transformed on the padded space,
// and cropped back; population pushed above dim is dropped.
Vec displace(const Vec& v, cplx alpha);
Vec squeeze(const Vec& v, double r);
Vec rotate(const Vec& v, double phi);  // exp(i phi n) v

// Beamsplitter exp[acos(sqrt(tau)) (a^dag b - a b^dag)] stored as
// photon-number sectors. element(i, j, n) = <i, n-i| U |j, n-j>.
class BeamsplitterBlocks {
public:
    BeamsplitterBlocks(double tau, int dim);
    double element(int i, int j, int n) const;
    int dim() const { return dim_; }
    int lo(int n) const { return n - dim_ + 1 > 0 ? n - dim_ + 1 : 0; }
    int hi(int n) const { return n < dim_ - 1 ? n : dim_ - 1; }

private:
    int dim_;
    std::vector<std::vector<double>> blocks_;
};

// Apply the beamsplitter to a two-mode pure state of equal mode dims.
PureState apply_beamsplitter(const PureState& s, double tau);

ModeOperator build_unitary(const UnitarySpec& spec, const Truncation& t);

// Closed-form heralded OPA Kraus operator for a vacuum idler and n detected
// photons: M_n|j> = (-lambda)^n sech(kappa/2)^(j+1) sqrt(C(j+n,n)) |j+n>.
Mat heralded_opa_kraus(double kappa, int n, const Truncation& t);

// Entry (j+n, j) of the Kraus operator above without building the matrix.
double opa_kraus_coeff(double kappa, int n, int j);

double log_binomial(int n, int k);

}  // namespace fockopt::ops
