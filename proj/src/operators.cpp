#include "fockopt/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>

namespace fockopt::ops {

namespace {

int round_up64(int p) { return ((p + 63) / 64) * 64; }

}  // namespace

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

RMat ladder(int dim) {
    if (dim < 2) throw ValidationError("ladder needs dim >= 2");
    RMat a = RMat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Mat expm_skew(const Mat& g) {
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g + g.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ValidationError("expm_skew: generator is not anti-Hermitian");
    Mat h = cplx(0, 1) * g;
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Spectrum s{es.eigenvalues(), es.eigenvectors()};
    return s.exp_minus_i(1.0);
}

Mat Spectrum::exp_minus_i(double t) const {
    Vec ph(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) ph(k) = std::polar(1.0, -t * w(k));
    return v * ph.asDiagonal() * v.adjoint();
}

Vec Spectrum::apply(double t, const Vec& x) const {
    Vec c = v.adjoint() * x;
    for (Eigen::Index k = 0; k < w.size(); ++k) c(k) *= std::polar(1.0, -t * w(k));
    return v * c;
}

namespace {

std::shared_ptr<const Spectrum> cached(int kind, int p) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const Spectrum>> cache;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find({kind, p});
        if (it != cache.end()) return it->second;
    }
    RMat a = ladder(p);
    Mat h;
    if (kind == 0) {
        h = cplx(0, 1) * (a.transpose() - a).cast<cplx>();
    } else {
        RMat a2 = a * a;
        h = cplx(0, 0.5) * (a2 - a2.transpose()).cast<cplx>();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    auto s = std::make_shared<const Spectrum>(Spectrum{es.eigenvalues(), es.eigenvectors()});
    std::lock_guard<std::mutex> lk(mu);
    auto [it, fresh] = cache.emplace(std::make_pair(kind, p), s);
    return it->second;
}

}  // namespace

std::shared_ptr<const Spectrum> displacement_spectrum(int p) { return cached(0, p); }
std::shared_ptr<const Spectrum> squeeze_spectrum(int p) { return cached(1, p); }

int displacement_pad_dim(int dim, double abs_alpha) {
    const int pad = static_cast<int>(std::ceil(2.0 * abs_alpha * std::sqrt(static_cast<double>(dim)) + abs_alpha * abs_alpha + 20.0));
    return round_up64(dim + pad);
}

int squeeze_pad_dim(int dim, double abs_r, int cap_factor) {
    const double want = std::ceil((std::exp(2.0 * abs_r) - 1.0) * dim) + 40.0;
    const int pad = static_cast<int>(std::min(want, static_cast<double>(cap_factor) * dim));
    return round_up64(dim + pad);
}

Mat displacement_matrix(cplx alpha, int dim) {
    const double mag = std::abs(alpha);
    if (mag == 0.0) return Mat::Identity(dim, dim);
    const int p = displacement_pad_dim(dim, mag);
    Mat d = displacement_spectrum(p)->exp_minus_i(mag).topLeftCorner(dim, dim);
    // D(|a| e^{i phi}) = R(phi) D(|a|) R(phi)^dagger with R(phi) = exp(i phi n)
    const double phi = std::arg(alpha);
    if (phi != 0.0)
        for (int m = 0; m < dim; ++m)
            for (int n = 0; n < dim; ++n) d(m, n) *= std::polar(1.0, phi * (m - n));
    return d;
}

Mat squeeze_matrix(double r, int dim) {
    if (r == 0.0) return Mat::Identity(dim, dim);
    const int p = squeeze_pad_dim(dim, std::abs(r));
    return squeeze_spectrum(p)->exp_minus_i(r).topLeftCorner(dim, dim);
}

Mat cubic_phase_matrix(double gamma, int dim) {
    RMat a = ladder(dim);
    RMat x = a + a.transpose();
    Eigen::SelfAdjointEigenSolver<RMat> es(x);
    const RVec& w = es.eigenvalues();
    Vec ph(dim);
    for (int k = 0; k < dim; ++k) ph(k) = std::polar(1.0, gamma * w(k) * w(k) * w(k));
    Mat v = es.eigenvectors().cast<cplx>();
    return v * ph.asDiagonal() * v.adjoint();
}

Vec rotate(const Vec& v, double phi) {
    Vec out = v;
    for (Eigen::Index n = 0; n < v.size(); ++n) out(n) *= std::polar(1.0, phi * static_cast<double>(n));
    return out;
}

Vec displace(const Vec& v, cplx alpha) {
    const double mag = std::abs(alpha);
    if (mag == 0.0) return v;
    const int dim = static_cast<int>(v.size());
    const int p = displacement_pad_dim(dim, mag);
    const double phi = std::arg(alpha);
    Vec x = Vec::Zero(p);
    x.head(dim) = rotate(v, -phi);
    Vec y = displacement_spectrum(p)->apply(mag, x);
    return rotate(y.head(dim), phi);
}

Vec squeeze(const Vec& v, double r) {
    if (r == 0.0) return v;
    const int dim = static_cast<int>(v.size());
    const int p = squeeze_pad_dim(dim, std::abs(r));
    Vec x = Vec::Zero(p);
    x.head(dim) = v;
    return squeeze_spectrum(p)->apply(r, x).head(dim);
}

BeamsplitterBlocks::BeamsplitterBlocks(double tau, int dim) : dim_(dim) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("beamsplitter tau must be in [0,1]");
    const double c = std::sqrt(tau), s = std::sqrt(1.0 - tau);
    const int nmax = 2 * dim - 2;
    blocks_.resize(nmax + 1);
    // Sector n holds rows/cols i, j in [lo(n), hi(n)], row-major.
    blocks_[0] = {1.0};
    for (int n = 1; n <= nmax; ++n) {
        const int l = lo(n), h = hi(n), w = h - l + 1;
        const int pl = lo(n - 1), ph = hi(n - 1), pw = ph - pl + 1;
        auto& cur = blocks_[n];
        cur.assign(static_cast<size_t>(w) * w, 0.0);
        const auto& prev = blocks_[n - 1];
        auto pget = [&](int i, int j) -> double {
            if (i < pl || i > ph || j < pl || j > ph) return 0.0;
            return prev[static_cast<size_t>(i - pl) * pw + (j - pl)];
        };
        for (int j = l; j <= h; ++j) {
            for (int i = l; i <= h; ++i) {
                double val;
                if (j == 0) {
                    // U|0,n> = (c b^dag + s a^dag) U|0,n-1> / sqrt(n)
                    val = (s * std::sqrt(static_cast<double>(i)) * pget(i - 1, 0) +
                           c * std::sqrt(static_cast<double>(n - i)) * pget(i, 0)) /
                          std::sqrt(static_cast<double>(n));
                } else {
                    // U|j,l> = (c a^dag - s b^dag) U|j-1,l> / sqrt(j)
                    val = (c * std::sqrt(static_cast<double>(i)) * pget(i - 1, j - 1) -
                           s * std::sqrt(static_cast<double>(n - i)) * pget(i, j - 1)) /
                          std::sqrt(static_cast<double>(j));
                }
                cur[static_cast<size_t>(i - l) * w + (j - l)] = val;
            }
        }
    }
}

double BeamsplitterBlocks::element(int i, int j, int n) const {
    const int l = lo(n), h = hi(n);
    if (n < 0 || n >= static_cast<int>(blocks_.size()) || i < l || i > h || j < l || j > h) return 0.0;
    return blocks_[n][static_cast<size_t>(i - l) * (h - l + 1) + (j - l)];
}

PureState apply_beamsplitter(const PureState& s, double tau) {
    if (s.modes != 2 || s.t1.dim != s.t2.dim) throw ValidationError("beamsplitter needs two modes of equal dim");
    const int d = s.t1.dim;
    BeamsplitterBlocks bs(tau, d);
    Vec out = Vec::Zero(s.amp.size());
    for (int n = 0; n <= 2 * d - 2; ++n) {
        const int l = bs.lo(n), h = bs.hi(n);
        for (int i = l; i <= h; ++i) {
            cplx acc = 0.0;
            for (int j = l; j <= h; ++j) acc += bs.element(i, j, n) * s.at(j, n - j);
            out(static_cast<Eigen::Index>(i) * d + (n - i)) = acc;
        }
    }
    return PureState(s.t1, s.t2, std::move(out));
}

namespace {

Mat two_mode_from_blocks(const BeamsplitterBlocks& bs) {
    const int d = bs.dim();
    Mat u = Mat::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
    for (int n = 0; n <= 2 * d - 2; ++n)
        for (int i = bs.lo(n); i <= bs.hi(n); ++i)
            for (int j = bs.lo(n); j <= bs.hi(n); ++j)
                u(static_cast<Eigen::Index>(i) * d + (n - i), static_cast<Eigen::Index>(j) * d + (n - j)) = bs.element(i, j, n);
    return u;
}

Mat two_mode_squeeze(double kappa, int d) {
    RMat a = ladder(d);
    RMat id = RMat::Identity(d, d);
    Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
    RMat a1(dd, dd), a2(dd, dd);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            a1.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(k) * d, d, d) = a(i, k) * id;
            a2.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(k) * d, d, d) = id(i, k) * a;
        }
    RMat g = 0.5 * kappa * (a1 * a2 - a1.transpose() * a2.transpose());
    return expm_skew(g.cast<cplx>());
}

bool vacuum_leaks(const Mat& u, const Truncation& t) {
    const int g = t.guard_levels();
    const Eigen::Index n = u.rows();
    return u.col(0).tail(std::min<Eigen::Index>(g, n)).squaredNorm() > t.tail_tol;
}

}  // namespace

ModeOperator build_unitary(const UnitarySpec& spec, const Truncation& t) {
    ModeOperator op;
    op.t1 = op.t2 = t;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Squeeze>) {
                if (!std::isfinite(s.r)) throw ValidationError("squeeze r must be finite");
                op.m = squeeze_matrix(s.r, t.dim);
            } else if constexpr (std::is_same_v<T, Displace>) {
                if (!std::isfinite(std::abs(s.alpha))) throw ValidationError("alpha must be finite");
                op.m = displacement_matrix(s.alpha, t.dim);
            } else if constexpr (std::is_same_v<T, CubicPhase>) {
                if (!std::isfinite(s.gamma)) throw ValidationError("gamma must be finite");
                op.m = cubic_phase_matrix(s.gamma, t.dim);
            } else if constexpr (std::is_same_v<T, Beamsplitter>) {
                op.modes = 2;
                op.m = two_mode_from_blocks(BeamsplitterBlocks(s.tau, t.dim));
            } else {
                if (!(s.kappa >= 0.0) || !std::isfinite(s.kappa)) throw ValidationError("kappa must be finite and >= 0");
                op.modes = 2;
                op.m = two_mode_squeeze(s.kappa, t.dim);
            }
        },
        spec);
    if (op.modes == 1) {
        op.health_warning = vacuum_leaks(op.m, t);
    } else {
        // check both marginals of U|0,0>
        const int d = t.dim, g = t.guard_levels();
        double leak = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i >= d - g || j >= d - g) leak += std::norm(op.m(static_cast<Eigen::Index>(i) * d + j, 0));
        op.health_warning = leak > t.tail_tol;
    }
    return op;
}

double opa_kraus_coeff(double kappa, int n, int j) {
    const double lam = std::tanh(0.5 * kappa);
    const double sech = 1.0 / std::cosh(0.5 * kappa);
    if (n == 0) return std::pow(sech, j + 1);
    if (lam == 0.0) return 0.0;
    const double mag = std::exp(n * std::log(lam) + (j + 1) * std::log(sech) + 0.5 * log_binomial(j + n, n));
    return (n % 2 == 0) ? mag : -mag;
}

Mat heralded_opa_kraus(double kappa, int n, const Truncation& t) {
    if (n < 0) throw ValidationError("herald count must be >= 0");
    if (n >= t.dim) throw ValidationError("herald count exceeds truncation");
    Mat m = Mat::Zero(t.dim, t.dim);
    for (int j = 0; j + n < t.dim; ++j) m(j + n, j) = opa_kraus_coeff(kappa, n, j);
    return m;
}

}  // namespace fockopt::ops
