#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prepay/curve.hpp"
#include "prepay/mortgage.hpp"
#include "prepay/parallel.hpp"
#include "prepay/prepayment.hpp"
#include "prepay/shortrate.hpp"

namespace prepay {

/// Everything that defines one IAS valuation besides the rate model.
struct IasScenario {
    MortgageSpec mortgage;
    CprModel cpr{ConstantCpr{0.0}};
    double zeta = 0.0;  // mortgage-rate spread over the swap rate, kappa = S + zeta
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    bool antithetic = true;
};

/// Yearly dates 0, 1, ..., M.
std::vector<double> mortgage_grid(const MortgageSpec& spec);

/// Zero bonds P(T_i, T_k) between the dates of a fixed grid as functions of
/// the factor x(T_i): P = D(i,k) exp(B(T_k - T_i) x).
class GridBonds {
   public:
    GridBonds(const HullWhite& model, std::span<const double> grid);
    double operator()(std::size_t i, std::size_t k, double x) const {
        return k <= i ? 1.0 : det_(i, k) * std::exp(slope_(i, k) * x);
    }
    /// Annual-fixed par swap rate from T_i to T_end at factor x.
    double swap_rate(std::size_t i, std::size_t end, double x) const;
    std::size_t size() const { return static_cast<std::size_t>(det_.rows()); }

   private:
    RowMatrix det_, slope_;
};

/// Per-path notional trajectories N(T_0..T_M) (N(T_M) = 0) and the
/// prepayment trigger 1{K > kappa(T_i)} for i = 1..M-1 (columns 0 and M unused).
struct NotionalPathSet {
    std::vector<double> grid;
    RowMatrix notional;
    RowMatrix kappa;
    RowMatrix exercise;

    std::size_t n_paths() const { return static_cast<std::size_t>(notional.rows()); }
    std::size_t maturity() const { return grid.size() - 1; }
};

NotionalPathSet simulate_notional(const HullWhite& model, const IasScenario& scenario,
                                  const PathSet& paths);

/// Amortizing swap receiving K on notionals N(T_0..T_{M-1}) (curve only):
///   sum_i N(T_{i-1}) [P(0,T_i)(K + 1) - P(0,T_{i-1})].
double price_amortizing_swap(const YieldCurve& curve, double rate, std::span<const double> notionals);

/// Same with the notionals produced by a deterministic CPR path
/// (lambda_path[i-1] applied at T_i).
double price_deterministic_as(const YieldCurve& curve, const MortgageSpec& spec,
                              std::span<const double> lambda_path);

/// Mortgage rate making the prepayment-free amortizing swap worth zero.
/// For a bullet this is the M-year par swap rate.
double atm_mortgage_rate(const YieldCurve& curve, MortgageKind kind, int maturity_years);

struct McPrice {
    double value = 0.0;   // currency
    double std_error = 0.0;  // currency
    std::size_t n_paths = 0;
};

/// Path values sum_i N(T_{i-1}) [(K+1) P(T_{i-1},T_i) - 1] / M(T_{i-1}),
/// the conditional expectation of each discounted IAS cash flow one period
/// before payment.
std::vector<double> ias_path_values(const HullWhite& model, const IasScenario& scenario,
                                    const PathSet& paths, const NotionalPathSet& notionals);

/// Mean and antithetic-pair standard error of path values.
McPrice summarize(std::span<const double> samples, bool antithetic);

/// Full Monte Carlo price: simulate rates, notionals, average.
McPrice price_ias_mc(const HullWhite& model, const IasScenario& scenario);

/// Path-averaged forward IAS values V(T_k), k = 0..M-1, in currency at T_k.
std::vector<double> forward_ias_values(const HullWhite& model, const IasScenario& scenario,
                                       const PathSet& paths, const NotionalPathSet& notionals);

/// Two-period annuity with a rational trigger at eps* = 0, zeta = 0:
/// amortizing swap on the no-prepayment schedule minus (N_up - N_low) floorlets.
double price_two_period_annuity(const HullWhite& model, const MortgageSpec& spec, double lambda_max);

struct AverageNotional {
    std::vector<double> mean;         // N(T_0..T_M) averaged over paths
    std::vector<double> implied_cpr;  // constant CPR reproducing mean(T_i) from mean(T_{i-1}), i = 1..M-1
};

AverageNotional average_notional(const NotionalPathSet& notionals, const MortgageSpec& spec);

}  // namespace prepay
