#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace fockopt {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised whenever a heralding event has zero probability (or density).
struct ZeroProbabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Truncation {
    int dim = 2;
    double guard_fraction = 0.1;
    double tail_tol = 1e-8;

    Truncation() = default;
    explicit Truncation(int d, double guard = 0.1, double tol = 1e-8);

    // number of top levels that form the guard band
    int guard_levels() const;
};

// Two-mode amplitudes use the flat index i*dim2 + j for |i>_1 |j>_2.
struct PureState {
    int modes = 1;
    Truncation t1;
    Truncation t2;
    Vec amp;

    PureState() = default;
    PureState(const Truncation& t, Vec a);
    PureState(const Truncation& ta, const Truncation& tb, Vec a);

    int dim() const { return t1.dim; }
    double norm2() const { return amp.squaredNorm(); }
    cplx at(int i, int j) const { return amp(static_cast<Eigen::Index>(i) * t2.dim + j); }
};

struct DensityOperator {
    int modes = 1;
    Truncation t1;
    Truncation t2;
    Mat rho;

    DensityOperator() = default;
    DensityOperator(const Truncation& t, Mat m);
    DensityOperator(const Truncation& ta, const Truncation& tb, Mat m);

    int dim() const { return t1.dim; }
    double trace() const { return rho.trace().real(); }
};

using State = std::variant<PureState, DensityOperator>;

template <class S>
struct Heralded {
    S unnormalized;
    double probability = 0.0;
    S normalized;
    // set for continuous outcomes: probability holds a density, not a probability
    bool is_density = false;
};

struct HealthReport {
    double guard_population = 0.0;
    bool healthy = true;
};

DensityOperator to_density(const PureState& s);
DensityOperator to_density(const State& s);

PureState basis_state(const Truncation& t, int n);

PureState tensor(const PureState& a, const PureState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// keep = 0 keeps mode 1, keep = 1 keeps mode 2
DensityOperator partial_trace(const DensityOperator& rho, int keep);

// pure states return the squared norm, densities the trace
std::pair<PureState, double> normalize(const PureState& s);
std::pair<DensityOperator, double> normalize(const DensityOperator& s);

HealthReport truncation_health(const PureState& s);
HealthReport truncation_health(const DensityOperator& s);
HealthReport truncation_health(const State& s);

// symmetrize in place and check the Hermiticity / PSD tolerances
void hermitize(Mat& m);
void check_density(const Mat& m, double herm_tol = 1e-10, double psd_tol = -1e-9);

double trace_distance(const Mat& a, const Mat& b);

}  // namespace fockopt
