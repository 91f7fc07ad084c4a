#pragma once

#include <span>
#include <string>
#include <vector>

namespace prepay {

enum class MortgageKind { Bullet, Annuity };

MortgageKind parse_mortgage_kind(const std::string& s);
std::string to_string(MortgageKind kind);

/// Contract terms. Payments are annual (tau = 1).
struct MortgageSpec {
    MortgageKind kind = MortgageKind::Bullet;
    double notional = 1.0;
    double rate = 0.0;  // mortgage rate K, decimal
    int maturity_years = 10;

    void validate() const;
};

/// C = K N / (1 - (1+K)^{-years}); straight-line N / years at K = 0.
double annuity_installment(double rate, double notional, int years_remaining);

/// One-period notional factor N(T_i) / N(T_{i-1}) for a prepayment rate
/// `cpr` applied after the scheduled repayment at T_i.
///   bullet : 1 - cpr
///   annuity: 1 + K (cpr - 1) / (1 - (1+K)^{-(T_M - T_prev)}) + K - cpr (K + 1)
double psi(MortgageKind kind, double rate, double cpr, double maturity, double t_prev);

/// Inverse of psi in the CPR argument: the constant rate that maps
/// N(T_{i-1}) to N(T_i).
double implied_cpr(MortgageKind kind, double rate, double factor, double maturity, double t_prev);

struct ScheduleRow {
    double time = 0.0;             // T_i
    double notional_before = 0.0;  // N(T_{i-1})
    double interest = 0.0;         // I(T_i)
    double repayment = 0.0;        // scheduled principal Q(T_i)
    double prepayment = 0.0;       // unscheduled principal at T_i
    double installment = 0.0;      // C(T_i) = I + Q
    double notional_after = 0.0;   // N(T_i)
};

/// Schedule for per-date prepayment rates cpr[i-1] applied at T_i,
/// i = 1..M. The rate at T_M is ignored (the loan matures).
std::vector<ScheduleRow> schedule(const MortgageSpec& spec, std::span<const double> cpr);

/// Schedule under one constant prepayment rate.
std::vector<ScheduleRow> constant_cpr_schedule(const MortgageSpec& spec, double cpr);

/// Outstanding notionals N(T_0..T_M) of a schedule (N(T_M) = 0).
std::vector<double> notionals(const MortgageSpec& spec, std::span<const ScheduleRow> rows);

}  // namespace prepay
