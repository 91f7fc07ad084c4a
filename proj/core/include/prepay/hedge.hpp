#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prepay/ias_pricer.hpp"
#include "prepay/numerics.hpp"

namespace prepay {

/// Receiver swaptions w(i, l): exercise at T_i into a swap paying T_{i+1}..T_l,
/// all struck at the mortgage rate. Only 1 <= i < l <= M is meaningful.
struct SwaptionGrid {
    int maturity = 0;
    RowMatrix w;  // (M+1) x (M+1)

    explicit SwaptionGrid(int m = 0) : maturity(m), w(RowMatrix::Zero(m + 1, m + 1)) {}
    double& operator()(int i, int l) { return w(i, l); }
    double operator()(int i, int l) const { return w(i, l); }
    std::vector<std::pair<int, int>> nonzero() const;
};

using Cell = std::pair<int, int>;  // (start i, end l)

/// Named sets of grid cells. diagonal: (i, M) for i = 1..M-1;
/// single-5y5y: (5, 10) scaled to (M/2, M); full: every i < l.
std::vector<Cell> diagonal_cells(int maturity);
std::vector<Cell> full_cells(int maturity);
std::vector<Cell> single_cell(int start, int end);

/// "5Y-5Y" style label (expiry - tenor).
std::string cell_label(const Cell& c);

struct HedgePortfolio {
    double rate = 0.0;                 // K, shared by swaps and swaptions
    std::vector<double> swap_notional; // N(T_0..T_{M-1}) of the amortizing swap leg
    SwaptionGrid swaptions;

    int maturity() const { return static_cast<int>(swap_notional.size()); }

    /// Notional increments d_i = N(T_{i-1}) - N(T_{i-2}) on co-terminal
    /// receiver swaps with payments T_i..T_M (N(T_{-1}) = 0).
    std::vector<double> ladder() const;
};

/// Swaps only, on the path-averaged notional.
HedgePortfolio build_linear_hedge(const NotionalPathSet& npaths, double rate);

/// Pathwise maximum notional per date.
std::vector<double> upper_envelope(const NotionalPathSet& npaths);

/// Amortizing swap on the envelope, no swaptions yet.
HedgePortfolio build_envelope_hedge(const NotionalPathSet& npaths, double rate);

/// N_Pi on path j at T_k: the envelope less every swaption exercised at
/// T_i <= T_k whose swap is still running after T_k.
double portfolio_notional(const NotionalPathSet& npaths, const HedgePortfolio& portfolio, int k,
                          std::size_t j);

/// Mean over paths of sum_{k=1}^{M-1} (N_IAS - N_Pi)^2, evaluated path by path.
double notional_mismatch(const NotionalPathSet& npaths, const HedgePortfolio& portfolio);

/// Gradient of notional_mismatch with respect to the weights of `cells`,
/// also evaluated path by path.
Eigen::VectorXd notional_mismatch_gradient(const NotionalPathSet& npaths,
                                           const HedgePortfolio& portfolio,
                                           std::span<const Cell> cells);

struct WeightFit {
    SwaptionGrid weights;
    Eigen::MatrixXd A;  // normal-equation matrix (sums over paths)
    Eigen::VectorXd b;
    Eigen::Index rank = 0;
    std::vector<Cell> null_cells;   // cells whose exercise never occurs
    double objective = 0.0;         // notional_mismatch at the solution
    std::vector<double> residual;   // mean squared mismatch per date T_1..T_{M-1}
};

/// Closed-form diagonal calibration: A(i,i') = (M - max(i,i')) sum_j 1_i 1_i',
/// b(i) = sum_{k>=i} sum_j 1_i (N_AS(T_k) - N_IAS(T_k)), minimum-norm solve.
WeightFit calibrate_diagonal(const NotionalPathSet& npaths, double rate);

/// Normal equations of the notional mismatch restricted to `cells`.
/// allow_short = false solves the non-negative least-squares problem instead.
WeightFit calibrate_numeric(const NotionalPathSet& npaths, double rate, std::span<const Cell> cells,
                            bool allow_short = true);

struct CostRow {
    Cell cell;
    double weight = 0.0;
    double unit_price = 0.0;  // per unit notional
    double cost = 0.0;        // weight * unit_price, currency
};

struct PortfolioValue {
    double swap_value = 0.0;      // amortizing swap leg, currency
    double swaption_cost = 0.0;   // sum of weight * price, currency
    double value = 0.0;           // swap_value - swaption_cost
    std::vector<CostRow> rows;
};

/// Pi(t0) = V_AS - sum w V_swp with swaption prices from the Hull-White model.
PortfolioValue price_portfolio(const HedgePortfolio& portfolio, const HullWhite& model);

struct HedgeErrorProfile {
    std::vector<double> ias;        // mean V_IAS(T_k), k = 0..M-1
    std::vector<double> portfolio;  // mean Pi(T_k)
    std::vector<double> error;      // |ias - portfolio|
};

/// Forward values of the IAS and of the portfolio at each T_k on the same
/// paths. Swaptions expiring after T_k are priced from x(T_k); earlier ones
/// are exercised by the prepayment trigger.
HedgeErrorProfile hedge_error_profile(const HullWhite& model, const IasScenario& scenario,
                                      const PathSet& paths, const NotionalPathSet& npaths,
                                      const HedgePortfolio& portfolio);

/// Forward portfolio values only (mean over paths, k = 0..M-1).
std::vector<double> forward_portfolio_values(const HullWhite& model, const PathSet& paths,
                                             const NotionalPathSet& npaths,
                                             const HedgePortfolio& portfolio);

struct GammaFit {
    SwaptionGrid gamma_weights;
    SwaptionGrid averaged;  // (w* + w_gamma) / 2
    Eigen::Index rank = 0;
};

/// Weights whose short swaption Gammas close the gap between the IAS and the
/// swap leg: min-norm solution of G w = gamma_swaps - gamma_ias, where
/// column c of G is the Gamma profile of one unit of swaption cells[c].
/// allow_short = false restricts to w >= 0.
GammaFit calibrate_gamma(const Eigen::VectorXd& gamma_ias, const Eigen::VectorXd& gamma_swaps,
                         const Eigen::MatrixXd& gamma_swaptions, std::span<const Cell> cells,
                         const SwaptionGrid& value_weights, bool allow_short = true);

enum class Strategy { Linear, Diagonal, Single5y5y, Full, Gamma, Average };

Strategy parse_strategy(const std::string& s);
std::string to_string(Strategy s);

}  // namespace prepay
