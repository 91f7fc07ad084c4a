#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace prepay {

// --------------------------------------------------------------------------
// CPR models: annual prepayment rate as a function of the refinancing
// incentive eps = K - kappa.

struct ConstantCpr {
    double lambda = 0.0;
};

/// lambda_max once the incentive exceeds eps_star, zero otherwise.
struct RationalCpr {
    double lambda_max = 0.0;
    double epsilon_star = 0.0;
};

/// a1 + a2 / (1 + exp(a3 eps + a4)).
struct LogisticCpr {
    std::array<double, 4> alpha{};
};

class CprModel {
   public:
    using Form = std::variant<ConstantCpr, RationalCpr, LogisticCpr>;

    CprModel(Form form);  // validates parameters; InputError when out of range

    double operator()(double epsilon) const;
    const Form& form() const { return form_; }
    std::string name() const;  // "constant" | "rational" | "logistic"
    std::string describe() const;

   private:
    Form form_;
};

double logistic(const std::array<double, 4>& alpha, double epsilon);

/// CPR = 1 - (1 - SMM)^12 and its inverse.
double smm_to_cpr(double smm);
double cpr_to_smm(double cpr);

// --------------------------------------------------------------------------
// Loan-level data

struct LoanObservation {
    std::string period;  // YYYY-MM
    double starting_balance = 0.0;
    double prepaid_amount = 0.0;
    double incentive = 0.0;  // K - kappa, decimal
};

/// CSV with header `period,starting_balance,prepaid_amount,incentive`.
std::vector<LoanObservation> read_loans_csv(const std::filesystem::path& path);
void write_loans_csv(const std::filesystem::path& path, std::span<const LoanObservation> loans);

struct PeriodCpr {
    std::string period;
    double smm = 0.0;
    double cpr = 0.0;
    double balance = 0.0;
};

/// Balance-weighted SMM per period, annualized. Periods with zero aggregate
/// balance are left out and listed in `skipped`.
std::vector<PeriodCpr> empirical_cpr_timeseries(std::span<const LoanObservation> loans,
                                                std::vector<std::string>* skipped = nullptr);

struct BinnedCpr {
    std::vector<double> edges;    // n_bins + 1
    std::vector<double> centers;  // n_bins
    std::vector<double> mean_smm;
    std::vector<double> cpr;      // annualized mean SMM, 0 for empty bins
    std::vector<std::size_t> counts;
    std::size_t dropped = 0;  // observations outside the range or with zero balance
};

struct BinOptions {
    std::size_t n_bins = 56;
    double lo = -0.015;
    double hi = 0.04;
};

/// Equal-width bins over [lo, hi]; per-bin average of loan-level SMM.
BinnedCpr bin_observations(std::span<const LoanObservation> loans, const BinOptions& options = {});

struct LogisticFit {
    BinnedCpr bins;
    std::array<double, 4> alpha{};
    std::vector<double> residuals;  // cpr_b - logistic(center_b), NaN for empty bins
    double objective = 0.0;         // sum of squared residuals over non-empty bins
    int iterations = 0;
};

/// Unweighted least-squares logistic fit over the non-empty bins,
/// Levenberg-Marquardt from an 8-point grid of starts.
LogisticFit fit_logistic(const BinnedCpr& bins);
LogisticFit bin_and_fit(std::span<const LoanObservation> loans, const BinOptions& options = {});

// --------------------------------------------------------------------------
// Synthetic loan data

struct SyntheticLoanOptions {
    std::array<double, 4> alpha{0.06, 0.14, -300.0, 4.0};  // true CPR curve
    std::size_t n_periods = 120;
    std::size_t loans_per_period = 2000;
    double incentive_lo = -0.02;
    double incentive_hi = 0.045;
    double balance_log_mean = 12.0;  // ln of a typical balance
    double balance_log_sd = 0.6;
    int sub_units = 40;  // binomial prepayment granularity per loan
    std::uint64_t seed = 20180123;
};

/// Loans with uniform incentives, lognormal balances and binomial partial
/// prepayments whose success probability is the true monthly SMM.
std::vector<LoanObservation> generate_synthetic_loans(const SyntheticLoanOptions& options);

}  // namespace prepay
