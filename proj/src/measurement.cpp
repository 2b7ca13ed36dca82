#include "fockopt/measurement.hpp"

#include "fockopt/operators.hpp"

#include <cmath>
#include <numbers>

namespace fockopt::meas {

namespace {

void check_mode(const Truncation& t1, const Truncation& t2, int mode, int n) {
    if (mode != 0 && mode != 1) throw ValidationError("measured mode must be 0 or 1");
    const int d = mode == 0 ? t1.dim : t2.dim;
    if (n < 0 || n >= d) throw ValidationError("herald count outside truncation");
}

template <class S>
Heralded<S> finish(S un, double p, bool density) {
    if (!(p > 0.0)) throw ZeroProbabilityError("zero-probability herald");
    Heralded<S> h;
    h.probability = p;
    h.normalized = normalize(un).first;
    h.unnormalized = std::move(un);
    h.is_density = density;
    return h;
}

}  // namespace

Heralded<PureState> herald_pnrd(const PureState& s, int mode, int n) {
    if (s.modes != 2) throw ValidationError("herald_pnrd needs a two-mode state");
    check_mode(s.t1, s.t2, mode, n);
    const int d1 = s.t1.dim, d2 = s.t2.dim;
    Vec out;
    Truncation kept;
    if (mode == 1) {
        out.resize(d1);
        for (int i = 0; i < d1; ++i) out(i) = s.at(i, n);
        kept = s.t1;
    } else {
        out = s.amp.segment(static_cast<Eigen::Index>(n) * d2, d2);
        kept = s.t2;
    }
    PureState un(kept, std::move(out));
    const double p = un.norm2();
    return finish(std::move(un), p, false);
}

Heralded<DensityOperator> herald_pnrd(const DensityOperator& s, int mode, int n) {
    if (s.modes != 2) throw ValidationError("herald_pnrd needs a two-mode state");
    check_mode(s.t1, s.t2, mode, n);
    const int d1 = s.t1.dim, d2 = s.t2.dim;
    Mat out;
    Truncation kept;
    if (mode == 1) {
        out.resize(d1, d1);
        for (int i = 0; i < d1; ++i)
            for (int k = 0; k < d1; ++k) out(i, k) = s.rho(static_cast<Eigen::Index>(i) * d2 + n, static_cast<Eigen::Index>(k) * d2 + n);
        kept = s.t1;
    } else {
        out = s.rho.block(static_cast<Eigen::Index>(n) * d2, static_cast<Eigen::Index>(n) * d2, d2, d2);
        kept = s.t2;
    }
    hermitize(out);
    DensityOperator un(kept, std::move(out));
    const double p = un.trace();
    return finish(std::move(un), p, false);
}

RVec homodyne_x_functional(double x, int dim) {
    RVec h(dim);
    h(0) = std::pow(2.0 * std::numbers::pi, -0.25) * std::exp(-0.25 * x * x);
    if (dim > 1) h(1) = x * h(0);
    for (int n = 2; n < dim; ++n)
        h(n) = (x * h(n - 1) - std::sqrt(static_cast<double>(n - 1)) * h(n - 2)) / std::sqrt(static_cast<double>(n));
    return h;
}

Heralded<PureState> herald_homodyne_x(const PureState& s, int mode, double x) {
    if (s.modes != 2) throw ValidationError("homodyne herald needs a two-mode state");
    check_mode(s.t1, s.t2, mode, 0);
    const int d1 = s.t1.dim, d2 = s.t2.dim;
    Vec out;
    Truncation kept;
    if (mode == 1) {
        RVec h = homodyne_x_functional(x, d2);
        out.resize(d1);
        for (int i = 0; i < d1; ++i) out(i) = s.amp.segment(static_cast<Eigen::Index>(i) * d2, d2).dot(h.cast<cplx>());
        kept = s.t1;
    } else {
        RVec h = homodyne_x_functional(x, d1);
        out = Vec::Zero(d2);
        for (int i = 0; i < d1; ++i) out += h(i) * s.amp.segment(static_cast<Eigen::Index>(i) * d2, d2);
        kept = s.t2;
    }
    PureState un(kept, std::move(out));
    const double p = un.norm2();
    return finish(std::move(un), p, true);
}

Heralded<PureState> breed_homodyne_x(const PureState& a, const PureState& b, double x) {
    if (a.modes != 1 || b.modes != 1 || a.dim() != b.dim()) throw ValidationError("breeding needs two single-mode states of equal dim");
    const int d = a.dim();
    ops::BeamsplitterBlocks bs(0.5, d);
    RVec h = homodyne_x_functional(x, d);
    Vec out = Vec::Zero(d);
    // out_i = sum_{j,l} h_{j+l-i} <i, j+l-i|U|j,l> a_j b_l
    for (int n = 0; n <= 2 * d - 2; ++n) {
        const int lo = bs.lo(n), hi = bs.hi(n);
        for (int i = lo; i <= hi; ++i) {
            const double hm = h(n - i);
            if (hm == 0.0) continue;
            cplx acc = 0.0;
            for (int j = lo; j <= hi; ++j) acc += bs.element(i, j, n) * a.amp(j) * b.amp(n - j);
            out(i) += hm * acc;
        }
    }
    PureState un(a.t1, std::move(out));
    const double p = un.norm2();
    return finish(std::move(un), p, true);
}

Heralded<DensityOperator> breed_homodyne_x(const DensityOperator& a, const DensityOperator& b, double x) {
    if (a.modes != 1 || b.modes != 1 || a.dim() != b.dim()) throw ValidationError("breeding needs two single-mode states of equal dim");
    const int d = a.dim();
    const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
    ops::BeamsplitterBlocks bs(0.5, d);
    RVec h = homodyne_x_functional(x, d);
    // Row i of kern is vec(K_i), K_i(j,l) = h_{j+l-i} <i, j+l-i|U|j,l>, column-major in (j,l).
    RMat kern = RMat::Zero(d, dd);
    for (int n = 0; n <= 2 * d - 2; ++n) {
        const int lo = bs.lo(n), hi = bs.hi(n);
        for (int i = lo; i <= hi; ++i) {
            const double hm = h(n - i);
            for (int j = lo; j <= hi; ++j) kern(i, static_cast<Eigen::Index>(n - j) * d + j) = hm * bs.element(i, j, n);
        }
    }
    // rho_out(i, i') = sum_{j,l} K_i(j,l) [rho_a K_i' rho_b^T](j,l)
    Mat out(d, d);
    Mat rbt = b.rho.transpose();
    Mat ki(d, d);
    for (int ip = 0; ip < d; ++ip) {
        for (int l = 0; l < d; ++l)
            for (int j = 0; j < d; ++j) ki(j, l) = kern(ip, static_cast<Eigen::Index>(l) * d + j);
        Mat t = a.rho * (ki * rbt);
        Eigen::Map<const Vec> tv(t.data(), dd);
        const RVec tr = tv.real(), ti = tv.imag();
        out.col(ip) = (kern * tr).cast<cplx>() + cplx(0, 1) * (kern * ti).cast<cplx>();
    }
    hermitize(out);
    DensityOperator un(a.t1, std::move(out));
    const double p = un.trace();
    return finish(std::move(un), p, true);
}

Heralded<PureState> with_window(Heralded<PureState> h, double width) {
    h.unnormalized.amp *= std::sqrt(width);
    h.probability *= width;
    h.is_density = false;
    return h;
}

Heralded<DensityOperator> with_window(Heralded<DensityOperator> h, double width) {
    h.unnormalized.rho *= width;
    h.probability *= width;
    h.is_density = false;
    return h;
}

namespace {

RMat functional_table(const std::vector<double>& grid, int dim) {
    RMat hm(dim, static_cast<Eigen::Index>(grid.size()));
    for (size_t k = 0; k < grid.size(); ++k) hm.col(static_cast<Eigen::Index>(k)) = homodyne_x_functional(grid[k], dim);
    return hm;
}

}  // namespace

std::vector<double> quadrature_distribution(const PureState& s, Quadrature q, const std::vector<double>& grid) {
    if (s.modes != 1) throw ValidationError("quadrature_distribution needs a single-mode state");
    for (double g : grid)
        if (!std::isfinite(g)) throw ValidationError("grid must be finite");
    // the x-distribution of exp(i pi n / 2) psi is the p-distribution of psi
    Vec v = q == Quadrature::P ? ops::rotate(s.amp, 0.5 * std::numbers::pi) : s.amp;
    RMat hm = functional_table(grid, s.dim());
    Vec amp = hm.transpose().cast<cplx>() * v;
    std::vector<double> out(grid.size());
    for (size_t k = 0; k < grid.size(); ++k) out[k] = std::norm(amp(static_cast<Eigen::Index>(k)));
    return out;
}

std::vector<double> quadrature_distribution(const DensityOperator& s, Quadrature q, const std::vector<double>& grid) {
    if (s.modes != 1) throw ValidationError("quadrature_distribution needs a single-mode state");
    for (double g : grid)
        if (!std::isfinite(g)) throw ValidationError("grid must be finite");
    Mat r = s.rho;
    if (q == Quadrature::P) {
        for (int m = 0; m < s.dim(); ++m)
            for (int n = 0; n < s.dim(); ++n) r(m, n) *= std::polar(1.0, 0.5 * std::numbers::pi * (m - n));
    }
    RMat hm = functional_table(grid, s.dim());
    Mat rh = r * hm.cast<cplx>();
    std::vector<double> out(grid.size());
    for (size_t k = 0; k < grid.size(); ++k)
        out[k] = hm.col(static_cast<Eigen::Index>(k)).cast<cplx>().dot(rh.col(static_cast<Eigen::Index>(k))).real();
    return out;
}

}  // namespace fockopt::meas
