#include "prepay/numerics.hpp"

#include <algorithm>
#include <numeric>

namespace prepay {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step, double f_tol, double x_tol,
                             int max_iterations) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    NelderMeadResult result;
    auto point = [n](const std::vector<double>& a, const std::vector<double>& b, double t) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = a[k] + t * (b[k] - a[k]);
        return p;
    };

    for (int it = 0; it < max_iterations; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
        result.iterations = it;
        if (values[worst] - values[best] <= f_tol && diameter <= x_tol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / n;
        }
        const auto reflected = point(centroid, simplex[worst], -1.0);
        const double f_r = f(reflected);
        if (f_r < values[best]) {
            const auto expanded = point(centroid, simplex[worst], -2.0);
            const double f_e = f(expanded);
            if (f_e < f_r) {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if (f_r < values[second]) {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }
        const bool outside = f_r < values[worst];
        const auto contracted = outside ? point(centroid, reflected, 0.5)
                                        : point(centroid, simplex[worst], 0.5);
        const double f_c = f(contracted);
        if (f_c < std::min(f_r, values[worst])) {
            simplex[worst] = contracted;
            values[worst] = f_c;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            simplex[i] = point(simplex[best], simplex[i], 0.5);
            values[i] = f(simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    result.x = simplex[best];
    result.value = values[best];
    return result;
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               Eigen::Index* rank) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    const double scale = A.cwiseAbs().maxCoeff();
    cod.setThreshold(scale > 0.0 ? 1e-12 : 1.0);
    if (rank) *rank = scale > 0.0 ? cod.rank() : 0;
    if (scale == 0.0) return Eigen::VectorXd::Zero(A.cols());
    return cod.solve(b);
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const Eigen::Index n = A.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());

    auto solve_passive = [&]() {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
        const Eigen::VectorXd zp = min_norm_solve(Ap, b);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
        return z;
    };

    for (int outer = 0; outer < 3 * n + 10; ++outer) {
        const Eigen::VectorXd grad = A.transpose() * (b - A * x);
        Eigen::Index j_max = -1;
        double g_max = tol;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[static_cast<std::size_t>(j)] && grad(j) > g_max) {
                g_max = grad(j);
                j_max = j;
            }
        if (j_max < 0) break;
        passive[static_cast<std::size_t>(j_max)] = true;
        for (int inner = 0; inner < 3 * n + 10; ++inner) {
            Eigen::VectorXd z = solve_passive();
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
            if (feasible) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0)
                    alpha = std::min(alpha, x(j) / (x(j) - z(j)));
            x += alpha * (z - x);
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-15) {
                    passive[static_cast<std::size_t>(j)] = false;
                    x(j) = 0.0;
                }
        }
    }
    return x;
}

}  // namespace prepay
