#include "prepay/mortgage.hpp"

#include <algorithm>
#include <cmath>

#include "prepay/errors.hpp"

namespace prepay {

MortgageKind parse_mortgage_kind(const std::string& s) {
    if (s == "bullet") return MortgageKind::Bullet;
    if (s == "annuity") return MortgageKind::Annuity;
    throw InputError("unknown mortgage kind '" + s + "' (expected bullet|annuity)");
}

std::string to_string(MortgageKind kind) {
    return kind == MortgageKind::Bullet ? "bullet" : "annuity";
}

void MortgageSpec::validate() const {
    require(notional > 0.0 && std::isfinite(notional), "mortgage: notional must be positive");
    require(maturity_years >= 1, "mortgage: maturity must be at least one year");
    require(std::isfinite(rate) && rate > -1.0, "mortgage: rate must be finite and > -1");
}

namespace {

// K / (1 - (1+K)^{-n}), the installment per unit notional.
double annuity_factor(double rate, double n) {
    if (std::abs(rate) < 1e-12) return 1.0 / n;
    return rate / (-std::expm1(-n * std::log1p(rate)));
}

}  // namespace

double annuity_installment(double rate, double notional, int years_remaining) {
    require(years_remaining >= 1, "annuity_installment: years_remaining must be >= 1");
    require(rate > -1.0, "annuity_installment: rate must be > -1");
    return notional * annuity_factor(rate, years_remaining);
}

double psi(MortgageKind kind, double rate, double cpr, double maturity, double t_prev) {
    require(cpr >= 0.0 && cpr <= 1.0, "psi: prepayment rate must lie in [0, 1]");
    if (kind == MortgageKind::Bullet) return 1.0 - cpr;
    require(t_prev < maturity, "psi: annuity schedule has no remaining payments");
    const double a = annuity_factor(rate, maturity - t_prev);
    return 1.0 + (cpr - 1.0) * a + rate - cpr * (rate + 1.0);
}

double implied_cpr(MortgageKind kind, double rate, double factor, double maturity, double t_prev) {
    if (kind == MortgageKind::Bullet) return 1.0 - factor;
    const double base = psi(kind, rate, 0.0, maturity, t_prev);
    require(base > 0.0, "implied_cpr: no outstanding notional after scheduled repayment");
    return 1.0 - factor / base;
}

std::vector<ScheduleRow> schedule(const MortgageSpec& spec, std::span<const double> cpr) {
    spec.validate();
    const int m = spec.maturity_years;
    require(cpr.size() >= static_cast<std::size_t>(m - 1),
            "schedule: need a prepayment rate for every date before maturity");
    std::vector<ScheduleRow> rows;
    rows.reserve(static_cast<std::size_t>(m));
    double n = spec.notional;
    for (int i = 1; i <= m; ++i) {
        ScheduleRow r;
        r.time = i;
        r.notional_before = n;
        r.interest = spec.rate * n;
        if (spec.kind == MortgageKind::Bullet) {
            r.repayment = i == m ? n : 0.0;
        } else {
            r.installment = annuity_installment(spec.rate, n, m - i + 1);
            r.repayment = r.installment - r.interest;
        }
        r.installment = r.interest + r.repayment;
        const double remaining = n - r.repayment;
        const double lam = i < m ? cpr[static_cast<std::size_t>(i - 1)] : 0.0;
        require(lam >= 0.0 && lam <= 1.0, "schedule: prepayment rate must lie in [0, 1]");
        r.prepayment = lam * remaining;
        n = i < m ? remaining - r.prepayment : 0.0;
        r.notional_after = n;
        rows.push_back(r);
    }
    return rows;
}

std::vector<ScheduleRow> constant_cpr_schedule(const MortgageSpec& spec, double cpr) {
    require(cpr >= 0.0 && cpr < 1.0, "constant_cpr_schedule: rate must lie in [0, 1)");
    const std::vector<double> path(static_cast<std::size_t>(std::max(spec.maturity_years, 1)), cpr);
    return schedule(spec, path);
}

std::vector<double> notionals(const MortgageSpec& spec, std::span<const ScheduleRow> rows) {
    std::vector<double> out{spec.notional};
    for (const auto& r : rows) out.push_back(r.notional_after);
    return out;
}

}  // namespace prepay
