#include "fockopt/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace fockopt {

Truncation::Truncation(int d, double guard, double tol) : dim(d), guard_fraction(guard), tail_tol(tol) {
    if (dim < 2) throw ValidationError("truncation dim must be >= 2");
    if (!(guard > 0.0 && guard < 1.0)) throw ValidationError("guard_fraction must be in (0,1)");
    if (!(tol > 0.0)) throw ValidationError("tail_tol must be positive");
}

int Truncation::guard_levels() const {
    return static_cast<int>(std::ceil(guard_fraction * dim - 1e-12));
}

PureState::PureState(const Truncation& t, Vec a) : modes(1), t1(t), t2(t), amp(std::move(a)) {
    if (amp.size() != t.dim) throw ValidationError("amplitude length does not match dim");
}

PureState::PureState(const Truncation& ta, const Truncation& tb, Vec a)
    : modes(2), t1(ta), t2(tb), amp(std::move(a)) {
    if (amp.size() != static_cast<Eigen::Index>(ta.dim) * tb.dim)
        throw ValidationError("two-mode amplitude length does not match dims");
}

DensityOperator::DensityOperator(const Truncation& t, Mat m) : modes(1), t1(t), t2(t), rho(std::move(m)) {
    if (rho.rows() != t.dim || rho.cols() != t.dim) throw ValidationError("density shape does not match dim");
}

DensityOperator::DensityOperator(const Truncation& ta, const Truncation& tb, Mat m)
    : modes(2), t1(ta), t2(tb), rho(std::move(m)) {
    const Eigen::Index n = static_cast<Eigen::Index>(ta.dim) * tb.dim;
    if (rho.rows() != n || rho.cols() != n) throw ValidationError("two-mode density shape does not match dims");
}

DensityOperator to_density(const PureState& s) {
    Mat m = s.amp * s.amp.adjoint();
    if (s.modes == 1) return DensityOperator(s.t1, std::move(m));
    return DensityOperator(s.t1, s.t2, std::move(m));
}

DensityOperator to_density(const State& s) {
    if (auto p = std::get_if<PureState>(&s)) return to_density(*p);
    return std::get<DensityOperator>(s);
}

PureState basis_state(const Truncation& t, int n) {
    if (n < 0 || n >= t.dim) throw ValidationError("Fock level outside truncation");
    Vec v = Vec::Zero(t.dim);
    v(n) = 1.0;
    return PureState(t, std::move(v));
}

PureState tensor(const PureState& a, const PureState& b) {
    if (a.modes != 1 || b.modes != 1) throw ValidationError("tensor supports single-mode factors only");
    const int d1 = a.t1.dim, d2 = b.t1.dim;
    Vec v(static_cast<Eigen::Index>(d1) * d2);
    for (int i = 0; i < d1; ++i) v.segment(static_cast<Eigen::Index>(i) * d2, d2) = a.amp(i) * b.amp;
    return PureState(a.t1, b.t1, std::move(v));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    if (a.modes != 1 || b.modes != 1) throw ValidationError("tensor supports single-mode factors only");
    const int d1 = a.t1.dim, d2 = b.t1.dim;
    Mat m(static_cast<Eigen::Index>(d1) * d2, static_cast<Eigen::Index>(d1) * d2);
    for (int i = 0; i < d1; ++i)
        for (int k = 0; k < d1; ++k)
            m.block(static_cast<Eigen::Index>(i) * d2, static_cast<Eigen::Index>(k) * d2, d2, d2) = a.rho(i, k) * b.rho;
    return DensityOperator(a.t1, b.t1, std::move(m));
}

DensityOperator partial_trace(const DensityOperator& r, int keep) {
    if (r.modes != 2) throw ValidationError("partial_trace needs a two-mode state");
    if (keep != 0 && keep != 1) throw ValidationError("mode index must be 0 or 1");
    const int d1 = r.t1.dim, d2 = r.t2.dim;
    if (keep == 0) {
        Mat out = Mat::Zero(d1, d1);
        for (int i = 0; i < d1; ++i)
            for (int k = 0; k < d1; ++k)
                out(i, k) = r.rho.block(static_cast<Eigen::Index>(i) * d2, static_cast<Eigen::Index>(k) * d2, d2, d2).trace();
        hermitize(out);
        return DensityOperator(r.t1, std::move(out));
    }
    Mat out = Mat::Zero(d2, d2);
    for (int i = 0; i < d1; ++i)
        out += r.rho.block(static_cast<Eigen::Index>(i) * d2, static_cast<Eigen::Index>(i) * d2, d2, d2);
    hermitize(out);
    return DensityOperator(r.t2, std::move(out));
}

std::pair<PureState, double> normalize(const PureState& s) {
    const double p = s.norm2();
    if (!(p > 0.0)) throw ZeroProbabilityError("zero-probability herald");
    PureState out = s;
    out.amp /= std::sqrt(p);
    return {out, p};
}

std::pair<DensityOperator, double> normalize(const DensityOperator& s) {
    const double p = s.trace();
    if (!(p > 0.0)) throw ZeroProbabilityError("zero-probability herald");
    DensityOperator out = s;
    out.rho /= p;
    return {out, p};
}

namespace {

HealthReport health_from_diag(const RVec& pops, const Truncation& t, double total) {
    const int g = t.guard_levels();
    const double guard = pops.tail(g).sum();
    HealthReport h;
    h.guard_population = total > 0.0 ? guard / total : 0.0;
    h.healthy = h.guard_population <= t.tail_tol;
    return h;
}

HealthReport combine(const HealthReport& a, const HealthReport& b) {
    HealthReport h;
    h.guard_population = std::max(a.guard_population, b.guard_population);
    h.healthy = a.healthy && b.healthy;
    return h;
}

}  // namespace

// Guard population is reported relative to the state's norm so unnormalized
// heralded states are judged on shape, not on their success probability.
HealthReport truncation_health(const PureState& s) {
    const double tot = s.norm2();
    if (s.modes == 1) return health_from_diag(s.amp.cwiseAbs2(), s.t1, tot);
    RVec m1 = RVec::Zero(s.t1.dim), m2 = RVec::Zero(s.t2.dim);
    for (int i = 0; i < s.t1.dim; ++i)
        for (int j = 0; j < s.t2.dim; ++j) {
            const double p = std::norm(s.at(i, j));
            m1(i) += p;
            m2(j) += p;
        }
    return combine(health_from_diag(m1, s.t1, tot), health_from_diag(m2, s.t2, tot));
}

HealthReport truncation_health(const DensityOperator& s) {
    const double tot = s.trace();
    RVec diag = s.rho.diagonal().real();
    if (s.modes == 1) return health_from_diag(diag, s.t1, tot);
    RVec m1 = RVec::Zero(s.t1.dim), m2 = RVec::Zero(s.t2.dim);
    for (int i = 0; i < s.t1.dim; ++i)
        for (int j = 0; j < s.t2.dim; ++j) {
            const double p = diag(static_cast<Eigen::Index>(i) * s.t2.dim + j);
            m1(i) += p;
            m2(j) += p;
        }
    return combine(health_from_diag(m1, s.t1, tot), health_from_diag(m2, s.t2, tot));
}

HealthReport truncation_health(const State& s) {
    return std::visit([](const auto& x) { return truncation_health(x); }, s);
}

void hermitize(Mat& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-10 * scale) throw std::runtime_error("operator lost Hermiticity: deviation " + std::to_string(dev));
    m = 0.5 * (m + m.adjoint()).eval();
}

void check_density(const Mat& m, double herm_tol, double psd_tol) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > herm_tol) throw std::runtime_error("density not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < psd_tol) throw std::runtime_error("density not positive semidefinite");
}

double trace_distance(const Mat& a, const Mat& b) {
    Mat d = a - b;
    d = 0.5 * (d + d.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace fockopt
