#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace prepay {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex minimization. Converged when the spread of function
/// values over the simplex is <= f_tol and its diameter is <= x_tol.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step, double f_tol, double x_tol,
                             int max_iterations);

/// Minimum-norm least-squares solution of A w = b via complete orthogonal
/// decomposition; `rank` receives the numerical rank.
Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               Eigen::Index* rank = nullptr);

/// Lawson-Hanson non-negative least squares: argmin ||A w - b|| s.t. w >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace prepay
