#include "fockopt/metrics.hpp"

#include "fockopt/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace fockopt::metrics {

namespace {

constexpr double kNormTol = 1e-8;

void require_normalized(double tr, const char* what) {
    if (std::abs(tr - 1.0) > kNormTol) throw ValidationError(std::string(what) + ": input is not normalized");
}

void require_same_dim(int a, int b) {
    if (a != b) throw ValidationError("fidelity: dimension mismatch");
}

Mat psd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
    RVec w = es.eigenvalues();
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = w(k) < -1e-12 ? 0.0 : std::sqrt(std::max(0.0, w(k)));
    return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const PureState& a, const PureState& b) {
    require_same_dim(a.dim(), b.dim());
    require_normalized(a.norm2(), "fidelity");
    require_normalized(b.norm2(), "fidelity");
    return std::min(1.0, std::norm(a.amp.dot(b.amp)));
}

double fidelity(const DensityOperator& a, const PureState& b) {
    require_same_dim(a.dim(), b.dim());
    require_normalized(a.trace(), "fidelity");
    require_normalized(b.norm2(), "fidelity");
    return std::clamp(b.amp.dot(a.rho * b.amp).real(), 0.0, 1.0);
}

double fidelity(const PureState& a, const DensityOperator& b) { return fidelity(b, a); }

double fidelity(const DensityOperator& a, const DensityOperator& b) {
    require_same_dim(a.dim(), b.dim());
    require_normalized(a.trace(), "fidelity");
    require_normalized(b.trace(), "fidelity");
    Mat sa = psd_sqrt(a.rho);
    Mat m = sa * b.rho * sa;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) s += std::sqrt(std::max(0.0, es.eigenvalues()(k)));
    return std::min(1.0, s * s);
}

double fidelity(const State& a, const State& b) {
    return std::visit([](const auto& x, const auto& y) { return fidelity(x, y); }, a, b);
}

std::vector<double> linspace(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw ValidationError("grid must be finite with positive step");
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = lo + k * step;
    return v;
}

namespace {

double wigner_point(const Mat& rho, double x, double p, std::vector<cplx>& wl) {
    const int d = static_cast<int>(rho.rows());
    const cplx a2(x, p);
    wl.assign(d, 0.0);
    wl[0] = std::exp(-0.5 * std::norm(a2));
    double w = rho(0, 0).real() * wl[0].real();
    for (int n = 1; n < d; ++n) {
        wl[n] = a2 * wl[n - 1] / std::sqrt(static_cast<double>(n));
        w += 2.0 * (rho(n, 0) * wl[n]).real();
    }
    for (int m = 1; m < d; ++m) {
        const double sm = std::sqrt(static_cast<double>(m));
        cplx temp = wl[m];
        wl[m] = (std::conj(a2) * temp - sm * wl[m - 1]) / sm;
        w += (rho(m, m) * wl[m]).real();
        for (int n = m + 1; n < d; ++n) {
            const cplx t2 = (a2 * wl[n - 1] - sm * temp) / std::sqrt(static_cast<double>(n));
            temp = wl[n];
            wl[n] = t2;
            w += 2.0 * (rho(n, m) * wl[n]).real();
        }
    }
    return w / (2.0 * std::numbers::pi);
}

}  // namespace

WignerGrid wigner(const DensityOperator& s, const std::vector<double>& xs, const std::vector<double>& ps, int workers) {
    if (s.modes != 1) throw ValidationError("wigner needs a single-mode state");
    for (double v : xs)
        if (!std::isfinite(v)) throw ValidationError("grid must be finite");
    for (double v : ps)
        if (!std::isfinite(v)) throw ValidationError("grid must be finite");
    WignerGrid g{xs, ps, std::vector<double>(xs.size() * ps.size())};
    auto rows = [&](size_t begin, size_t stride) {
        std::vector<cplx> wl;
        for (size_t ip = begin; ip < ps.size(); ip += stride)
            for (size_t ix = 0; ix < xs.size(); ++ix) g.w[ip * xs.size() + ix] = wigner_point(s.rho, xs[ix], ps[ip], wl);
    };
    const size_t nw = static_cast<size_t>(std::max(1, workers));
    if (nw == 1) {
        rows(0, 1);
    } else {
        std::vector<std::thread> th;
        for (size_t k = 0; k < nw; ++k) th.emplace_back(rows, k, nw);
        for (auto& t : th) t.join();
    }
    return g;
}

WignerGrid wigner(const PureState& s, const std::vector<double>& xs, const std::vector<double>& ps, int workers) {
    return wigner(to_density(s), xs, ps, workers);
}

double parity(const PureState& s) {
    double p = 0.0;
    for (int n = 0; n < s.dim(); ++n) p += (n % 2 ? -1.0 : 1.0) * std::norm(s.amp(n));
    return p;
}

double parity(const DensityOperator& s) {
    double p = 0.0;
    for (int n = 0; n < s.dim(); ++n) p += (n % 2 ? -1.0 : 1.0) * s.rho(n, n).real();
    return p;
}

namespace {

// <a>, <a^2>, <n> from matrix elements, using [a, a^dag] = 1 exactly
Moments moments_from(cplx ea, cplx ea2, double en) {
    Moments m;
    m.mean_x = 2.0 * ea.real();
    m.mean_p = -2.0 * ea.imag();
    const double x2 = 2.0 * ea2.real() + 2.0 * en + 1.0;
    const double p2 = -2.0 * ea2.real() + 2.0 * en + 1.0;
    m.var_x = x2 - m.mean_x * m.mean_x;
    m.var_p = p2 - m.mean_p * m.mean_p;
    return m;
}

}  // namespace

Moments quadrature_moments(const PureState& s) {
    const auto& v = s.amp;
    const int d = s.dim();
    cplx ea = 0.0, ea2 = 0.0;
    double en = 0.0;
    for (int n = 0; n < d; ++n) {
        en += n * std::norm(v(n));
        if (n + 1 < d) ea += std::conj(v(n)) * std::sqrt(n + 1.0) * v(n + 1);
        if (n + 2 < d) ea2 += std::conj(v(n)) * std::sqrt((n + 1.0) * (n + 2.0)) * v(n + 2);
    }
    const double nn = s.norm2();
    return moments_from(ea / nn, ea2 / nn, en / nn);
}

Moments quadrature_moments(const DensityOperator& s) {
    const auto& r = s.rho;
    const int d = s.dim();
    cplx ea = 0.0, ea2 = 0.0;
    double en = 0.0;
    for (int n = 0; n < d; ++n) {
        en += n * r(n, n).real();
        if (n + 1 < d) ea += r(n + 1, n) * std::sqrt(n + 1.0);
        if (n + 2 < d) ea2 += r(n + 2, n) * std::sqrt((n + 1.0) * (n + 2.0));
    }
    const double tr = s.trace();
    return moments_from(ea / tr, ea2 / tr, en / tr);
}

namespace {

cplx stabilizer_alpha(Stabilizer which) {
    const double sp = std::sqrt(std::numbers::pi);
    return which == Stabilizer::Sx ? cplx(0.0, sp) : cplx(sp, 0.0);
}

}  // namespace

cplx stabilizer_expectation(const PureState& s, Stabilizer which) {
    Vec dv = ops::displace(s.amp, stabilizer_alpha(which));
    return s.amp.dot(dv) / s.norm2();
}

cplx stabilizer_expectation(const DensityOperator& s, Stabilizer which) {
    Mat d = ops::displacement_matrix(stabilizer_alpha(which), s.dim());
    return (s.rho.cwiseProduct(d.transpose())).sum() / s.trace();
}

SqueezingReport squeezing_from_stabilizers(cplx sx, cplx sp) {
    auto delta2 = [](cplx v) {
        const double a = std::abs(v);
        if (a == 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(a * a) / std::numbers::pi;
    };
    SqueezingReport r;
    r.delta2_x = delta2(sx);
    r.delta2_p = delta2(sp);
    auto db = [](double d2) {
        if (std::isinf(d2)) return -std::numeric_limits<double>::infinity();
        return -10.0 * std::log10(d2);
    };
    r.db_x = db(r.delta2_x);
    r.db_p = db(r.delta2_p);
    r.symmetric_db = std::min(r.db_x, r.db_p);
    return r;
}

SqueezingReport effective_squeezing(const PureState& s) {
    return squeezing_from_stabilizers(stabilizer_expectation(s, Stabilizer::Sx), stabilizer_expectation(s, Stabilizer::Sp));
}

SqueezingReport effective_squeezing(const DensityOperator& s) {
    return squeezing_from_stabilizers(stabilizer_expectation(s, Stabilizer::Sx), stabilizer_expectation(s, Stabilizer::Sp));
}

double squeezing_correction(const PureState& s) {
    const Moments m = quadrature_moments(s);
    return 0.25 * std::log(m.var_x / m.var_p);
}

double squeezing_correction(const DensityOperator& s) {
    const Moments m = quadrature_moments(s);
    return 0.25 * std::log(m.var_x / m.var_p);
}

double squeezing_db(double r) { return 20.0 / std::log(10.0) * r; }
double db_to_r(double db) { return db * std::log(10.0) / 20.0; }

}  // namespace fockopt::metrics
