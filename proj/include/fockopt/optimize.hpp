#pragma once

#include <functional>
#include <vector>

namespace fockopt::opt {

using Point = std::vector<double>;
using Objective = std::function<double(const Point&)>;

struct Problem {
    Objective objective;
    Point lower;
    Point upper;
    std::vector<Point> starts;
    double f_tol = 1e-6;
    double x_tol = 1e-5;
    int max_evals = 2000;
    // initial simplex edge as a fraction of each box width
    double initial_step = 0.1;
};

struct Result {
    Point best_params;
    double best_value = 0.0;
    int evals = 0;
    std::vector<double> trace;  // best-so-far after each evaluation
    bool exhausted = false;     // max_evals reached before convergence
};

// Multi-start Nelder-Mead maximization. Each start runs in the unconstrained
// coordinates u with x = lo + (hi - lo) (1 + tanh u) / 2. Starts run on up to
// `workers` threads; the reduction is ordered by start index.
Result maximize(const Problem& problem, int workers = 1);

// Evaluate the objective on every grid point and return the best m as starts.
std::vector<Point> grid_refine(const Problem& problem, const std::vector<Point>& grid, int m = 3);

// Cartesian product of per-axis values.
std::vector<Point> cartesian(const std::vector<std::vector<double>>& axes);

}  // namespace fockopt::opt
