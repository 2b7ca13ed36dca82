#include "fockopt/optimize.hpp"

#include "fockopt/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace fockopt::opt {

namespace {

void validate(const Problem& p) {
    if (!p.objective) throw ValidationError("optimization problem has no objective");
    if (p.lower.size() != p.upper.size() || p.lower.empty()) throw ValidationError("bounds must be non-empty and of equal length");
    for (size_t k = 0; k < p.lower.size(); ++k)
        if (!std::isfinite(p.lower[k]) || !std::isfinite(p.upper[k]) || !(p.upper[k] >= p.lower[k]))
            throw ValidationError("bounds must be finite with upper >= lower");
    if (p.starts.empty()) throw ValidationError("at least one start is required");
    for (const auto& s : p.starts)
        if (s.size() != p.lower.size()) throw ValidationError("start has wrong dimension");
}

struct Box {
    Point lo, hi;
    double to_x(double u, size_t k) const {
        if (hi[k] == lo[k]) return lo[k];
        return lo[k] + (hi[k] - lo[k]) * 0.5 * (1.0 + std::tanh(u));
    }
    double to_u(double x, size_t k) const {
        if (hi[k] == lo[k]) return 0.0;
        double t = 2.0 * (x - lo[k]) / (hi[k] - lo[k]) - 1.0;
        // starts on the boundary are nudged inward, the map is flat there
        t = std::clamp(t, -0.98, 0.98);
        return std::atanh(t);
    }
    Point map(const Point& u) const {
        Point x(u.size());
        for (size_t k = 0; k < u.size(); ++k) x[k] = to_x(u[k], k);
        return x;
    }
};

Result run_one(const Problem& p, const Point& start) {
    const size_t n = start.size();
    Box box{p.lower, p.upper};
    Result res;
    res.best_value = -INFINITY;
    auto eval = [&](const Point& u) {
        const Point x = box.map(u);
        const double f = p.objective(x);
        ++res.evals;
        if (f > res.best_value) {
            res.best_value = f;
            res.best_params = x;
        }
        res.trace.push_back(res.best_value);
        return f;
    };
    // simplex in u-space; we minimize g = -f
    std::vector<Point> sx(n + 1);
    std::vector<double> g(n + 1);
    Point u0(n);
    for (size_t k = 0; k < n; ++k) u0[k] = box.to_u(start[k], k);
    sx[0] = u0;
    for (size_t k = 0; k < n; ++k) {
        Point u = u0;
        // step in x of initial_step * width, expressed in u
        const double x0 = start[k];
        const double w = p.upper[k] - p.lower[k];
        double x1 = x0 + p.initial_step * w;
        if (x1 >= p.upper[k]) x1 = x0 - p.initial_step * w;
        u[k] = box.to_u(x1, k);
        if (u[k] == u0[k]) u[k] += 0.1;
        sx[k + 1] = u;
    }
    for (size_t i = 0; i <= n; ++i) g[i] = -eval(sx[i]);

    std::vector<size_t> idx(n + 1);
    while (true) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return g[a] < g[b]; });
        std::vector<Point> s2(n + 1);
        std::vector<double> g2(n + 1);
        for (size_t i = 0; i <= n; ++i) {
            s2[i] = sx[idx[i]];
            g2[i] = g[idx[i]];
        }
        sx.swap(s2);
        g.swap(g2);
        // convergence on function spread and simplex size in x-space
        const double fspread = std::abs(g[n] - g[0]);
        double xspread = 0.0;
        const Point xb = box.map(sx[0]);
        for (size_t i = 1; i <= n; ++i) {
            const Point xi = box.map(sx[i]);
            for (size_t k = 0; k < n; ++k) xspread = std::max(xspread, std::abs(xi[k] - xb[k]));
        }
        if (fspread <= p.f_tol && xspread <= p.x_tol) break;
        if (res.evals >= p.max_evals) {
            res.exhausted = true;
            break;
        }
        Point c(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) c[k] += sx[i][k] / static_cast<double>(n);
        auto along = [&](double t) {
            Point u(n);
            for (size_t k = 0; k < n; ++k) u[k] = c[k] + t * (sx[n][k] - c[k]);
            return u;
        };
        Point ur = along(-1.0);
        const double gr = -eval(ur);
        if (gr < g[0]) {
            Point ue = along(-2.0);
            const double ge = -eval(ue);
            if (ge < gr) {
                sx[n] = ue;
                g[n] = ge;
            } else {
                sx[n] = ur;
                g[n] = gr;
            }
        } else if (gr < g[n - 1]) {
            sx[n] = ur;
            g[n] = gr;
        } else {
            const bool outside = gr < g[n];
            Point uc = along(outside ? -0.5 : 0.5);
            const double gc = -eval(uc);
            if (gc < (outside ? gr : g[n])) {
                sx[n] = uc;
                g[n] = gc;
            } else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t k = 0; k < n; ++k) sx[i][k] = sx[0][k] + 0.5 * (sx[i][k] - sx[0][k]);
                    g[i] = -eval(sx[i]);
                }
            }
        }
    }
    return res;
}

}  // namespace

Result maximize(const Problem& p, int workers) {
    validate(p);
    const size_t ns = p.starts.size();
    std::vector<Result> all(ns);
    const size_t nw = std::min<size_t>(ns, static_cast<size_t>(std::max(1, workers)));
    if (nw <= 1) {
        for (size_t k = 0; k < ns; ++k) all[k] = run_one(p, p.starts[k]);
    } else {
        std::vector<std::thread> th;
        for (size_t w = 0; w < nw; ++w)
            th.emplace_back([&, w] {
                for (size_t k = w; k < ns; k += nw) all[k] = run_one(p, p.starts[k]);
            });
        for (auto& t : th) t.join();
    }
    Result out;
    out.best_value = -INFINITY;
    for (size_t k = 0; k < ns; ++k) {
        const Result& r = all[k];
        for (double v : r.trace) out.trace.push_back(std::max(out.trace.empty() ? -INFINITY : out.trace.back(), v));
        out.evals += r.evals;
        out.exhausted = out.exhausted || r.exhausted;
        if (r.best_value > out.best_value) {
            out.best_value = r.best_value;
            out.best_params = r.best_params;
        }
    }
    return out;
}

std::vector<Point> grid_refine(const Problem& p, const std::vector<Point>& grid, int m) {
    if (grid.empty()) throw ValidationError("grid_refine: empty grid");
    if (!p.objective) throw ValidationError("optimization problem has no objective");
    std::vector<std::pair<double, size_t>> vals;
    for (size_t k = 0; k < grid.size(); ++k) {
        const Point& g = grid[k];
        if (g.size() != p.lower.size()) throw ValidationError("grid point has wrong dimension");
        for (size_t j = 0; j < g.size(); ++j)
            if (g[j] < p.lower[j] || g[j] > p.upper[j]) throw ValidationError("grid point outside bounds");
        vals.emplace_back(p.objective(g), k);
    }
    std::stable_sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Point> out;
    for (int k = 0; k < m && k < static_cast<int>(vals.size()); ++k) out.push_back(grid[vals[k].second]);
    return out;
}

std::vector<Point> cartesian(const std::vector<std::vector<double>>& axes) {
    std::vector<Point> out{Point{}};
    for (const auto& ax : axes) {
        std::vector<Point> next;
        for (const auto& p : out)
            for (double v : ax) {
                Point q = p;
                q.push_back(v);
                next.push_back(q);
            }
        out.swap(next);
    }
    return out;
}

}  // namespace fockopt::opt
