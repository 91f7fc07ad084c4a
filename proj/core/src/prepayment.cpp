#include "prepay/prepayment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "prepay/csv.hpp"
#include "prepay/errors.hpp"
#include "prepay/parallel.hpp"

namespace prepay {

double logistic(const std::array<double, 4>& a, double eps) {
    const double z = a[2] * eps + a[3];
    if (z > 700.0) return a[0];
    return a[0] + a[1] / (1.0 + std::exp(z));
}

namespace {

struct Validate {
    void operator()(const ConstantCpr& c) const {
        require(c.lambda >= 0.0 && c.lambda <= 1.0, "constant CPR must lie in [0, 1]");
    }
    void operator()(const RationalCpr& r) const {
        require(r.lambda_max >= 0.0 && r.lambda_max <= 1.0, "rational lambda_max must lie in [0, 1]");
        require(std::isfinite(r.epsilon_star), "rational epsilon_star must be finite");
    }
    void operator()(const LogisticCpr& l) const {
        for (double v : l.alpha) require(std::isfinite(v), "logistic parameters must be finite");
        const double lo = l.alpha[0], hi = l.alpha[0] + l.alpha[1];
        require(lo >= 0.0 && lo <= 1.0 && hi >= 0.0 && hi <= 1.0,
                "logistic plateaus a1 and a1 + a2 must both lie in [0, 1]");
    }
};

}  // namespace

CprModel::CprModel(Form form) : form_(std::move(form)) { std::visit(Validate{}, form_); }

double CprModel::operator()(double eps) const {
    require(std::isfinite(eps), "CPR model: incentive must be finite");
    if (const auto* c = std::get_if<ConstantCpr>(&form_)) return c->lambda;
    if (const auto* r = std::get_if<RationalCpr>(&form_))
        return eps > r->epsilon_star ? r->lambda_max : 0.0;
    return std::clamp(logistic(std::get<LogisticCpr>(form_).alpha, eps), 0.0, 1.0);
}

std::string CprModel::name() const {
    switch (form_.index()) {
        case 0: return "constant";
        case 1: return "rational";
        default: return "logistic";
    }
}

std::string CprModel::describe() const {
    std::ostringstream os;
    os << std::setprecision(10) << name();
    if (const auto* c = std::get_if<ConstantCpr>(&form_)) {
        os << "{lambda=" << c->lambda << "}";
    } else if (const auto* r = std::get_if<RationalCpr>(&form_)) {
        os << "{lambda_max=" << r->lambda_max << ",epsilon_star=" << r->epsilon_star << "}";
    } else {
        const auto& a = std::get<LogisticCpr>(form_).alpha;
        os << "{" << a[0] << "," << a[1] << "," << a[2] << "," << a[3] << "}";
    }
    return os.str();
}

double smm_to_cpr(double smm) {
    require(smm >= 0.0 && smm <= 1.0, "smm_to_cpr: SMM must lie in [0, 1]");
    return -std::expm1(12.0 * std::log1p(-smm));
}

double cpr_to_smm(double cpr) {
    require(cpr >= 0.0 && cpr <= 1.0, "cpr_to_smm: CPR must lie in [0, 1]");
    return -std::expm1(std::log1p(-cpr) / 12.0);
}

// ---------------------------------------------------------------------------

std::vector<LoanObservation> read_loans_csv(const std::filesystem::path& path) {
    const auto t = csv::read(path);
    const auto c_period = csv::column(t, "period", path);
    const auto c_bal = csv::column(t, "starting_balance", path);
    const auto c_pre = csv::column(t, "prepaid_amount", path);
    const auto c_inc = csv::column(t, "incentive", path);
    std::vector<LoanObservation> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string ctx = path.string() + ":" + std::to_string(t.line_numbers[r]);
        LoanObservation o;
        o.period = row[c_period];
        require(o.period.size() == 7 && o.period[4] == '-', ctx + ": period must be YYYY-MM");
        o.starting_balance = csv::to_double(row[c_bal], ctx + " starting_balance");
        o.prepaid_amount = csv::to_double(row[c_pre], ctx + " prepaid_amount");
        o.incentive = csv::to_double(row[c_inc], ctx + " incentive");
        require(o.starting_balance >= 0.0 && o.prepaid_amount >= 0.0,
                ctx + ": balances must be non-negative");
        require(o.prepaid_amount <= o.starting_balance,
                ctx + ": prepaid_amount exceeds starting_balance");
        out.push_back(std::move(o));
    }
    return out;
}

void write_loans_csv(const std::filesystem::path& path, std::span<const LoanObservation> loans) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path.string());
    f << "period,starting_balance,prepaid_amount,incentive\n";
    f << std::setprecision(10);
    for (const auto& o : loans)
        f << o.period << ',' << o.starting_balance << ',' << o.prepaid_amount << ',' << o.incentive
          << '\n';
}

std::vector<PeriodCpr> empirical_cpr_timeseries(std::span<const LoanObservation> loans,
                                                std::vector<std::string>* skipped) {
    std::map<std::string, std::pair<double, double>> agg;
    for (const auto& o : loans) {
        auto& [bal, pre] = agg[o.period];
        bal += o.starting_balance;
        pre += o.prepaid_amount;
    }
    std::vector<PeriodCpr> out;
    for (const auto& [period, sums] : agg) {
        if (sums.first <= 0.0) {
            if (skipped) skipped->push_back(period);
            continue;
        }
        const double smm = sums.second / sums.first;
        out.push_back({period, smm, smm_to_cpr(smm), sums.first});
    }
    return out;
}

BinnedCpr bin_observations(std::span<const LoanObservation> loans, const BinOptions& opt) {
    require(opt.n_bins >= 1 && opt.hi > opt.lo, "bin_observations: invalid bin layout");
    const std::size_t nb = opt.n_bins;
    const double width = (opt.hi - opt.lo) / static_cast<double>(nb);

    struct Partial {
        std::vector<double> sum;
        std::vector<std::size_t> count;
        std::size_t dropped = 0;
    };
    const std::size_t chunk = 8192;
    const std::size_t n_chunks = (loans.size() + chunk - 1) / chunk;
    std::vector<Partial> parts(n_chunks, Partial{std::vector<double>(nb, 0.0),
                                                 std::vector<std::size_t>(nb, 0), 0});
    parallel_for_blocks(n_chunks, [&](std::size_t c) {
        auto& p = parts[c];
        const std::size_t end = std::min(loans.size(), (c + 1) * chunk);
        for (std::size_t k = c * chunk; k < end; ++k) {
            const auto& o = loans[k];
            if (!(o.incentive >= opt.lo && o.incentive <= opt.hi) || o.starting_balance <= 0.0) {
                ++p.dropped;
                continue;
            }
            auto b = static_cast<std::size_t>((o.incentive - opt.lo) / width);
            if (b >= nb) b = nb - 1;
            p.sum[b] += o.prepaid_amount / o.starting_balance;
            ++p.count[b];
        }
    });

    BinnedCpr out;
    out.edges.resize(nb + 1);
    for (std::size_t b = 0; b <= nb; ++b) out.edges[b] = opt.lo + width * static_cast<double>(b);
    out.edges[nb] = opt.hi;
    out.centers.resize(nb);
    out.mean_smm.assign(nb, 0.0);
    out.cpr.assign(nb, 0.0);
    out.counts.assign(nb, 0);
    std::vector<double> sums(nb, 0.0);
    for (const auto& p : parts) {
        for (std::size_t b = 0; b < nb; ++b) {
            sums[b] += p.sum[b];
            out.counts[b] += p.count[b];
        }
        out.dropped += p.dropped;
    }
    for (std::size_t b = 0; b < nb; ++b) {
        out.centers[b] = 0.5 * (out.edges[b] + out.edges[b + 1]);
        if (out.counts[b] == 0) continue;
        out.mean_smm[b] = sums[b] / static_cast<double>(out.counts[b]);
        out.cpr[b] = smm_to_cpr(out.mean_smm[b]);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct LogisticResidual : Eigen::DenseFunctor<double> {
    std::vector<double> x, y;

    LogisticResidual(std::vector<double> xs, std::vector<double> ys)
        : Eigen::DenseFunctor<double>(4, static_cast<int>(xs.size())), x(std::move(xs)), y(std::move(ys)) {}

    int operator()(const InputType& a, ValueType& r) const {
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double e = std::exp(std::min(a[2] * x[k] + a[3], 700.0));
            r[static_cast<Eigen::Index>(k)] = a[0] + a[1] / (1.0 + e) - y[k];
        }
        return 0;
    }

    int df(const InputType& a, JacobianType& J) const {
        for (std::size_t k = 0; k < x.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            const double e = std::exp(std::min(a[2] * x[k] + a[3], 700.0));
            const double s = 1.0 / (1.0 + e);
            const double ds = -a[1] * s * s * e;  // d/dz of a2 / (1 + e^z)
            J(i, 0) = 1.0;
            J(i, 1) = s;
            J(i, 2) = ds * x[k];
            J(i, 3) = ds;
        }
        return 0;
    }
};

}  // namespace

LogisticFit fit_logistic(const BinnedCpr& bins) {
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b < bins.centers.size(); ++b)
        if (bins.counts[b] > 0) {
            xs.push_back(bins.centers[b]);
            ys.push_back(bins.cpr[b]);
        }
    if (xs.size() < 4) {
        std::ostringstream msg;
        msg << "logistic fit is under-determined: " << xs.size()
            << " non-empty bin(s), at least 4 required";
        throw NumericalError(msg.str());
    }

    const double y_min = *std::min_element(ys.begin(), ys.end());
    const double y_max = *std::max_element(ys.begin(), ys.end());
    const double x_mid = 0.5 * (xs.front() + xs.back());

    LogisticResidual functor(xs, ys);
    LogisticFit best;
    best.objective = std::numeric_limits<double>::infinity();
    for (double slope : {-100.0, -400.0})
        for (double shift : {-0.5, 0.5})
            for (double amp : {0.5, 1.0}) {
                // a3 eps + a4 = 0 at the shifted midpoint of the data range
                const double centre = x_mid + shift * 0.5 * (xs.back() - xs.front());
                Eigen::VectorXd a(4);
                a << y_min, amp * std::max(y_max - y_min, 1e-3), slope, -slope * centre;
                Eigen::LevenbergMarquardt<LogisticResidual> lm(functor);
                lm.setFtol(1e-10);
                lm.setXtol(1e-10);
                lm.setMaxfev(4000);
                lm.minimize(a);
                Eigen::VectorXd r(static_cast<Eigen::Index>(xs.size()));
                functor(a, r);
                const double obj = r.squaredNorm();
                if (std::isfinite(obj) && obj < best.objective) {
                    best.objective = obj;
                    best.alpha = {a[0], a[1], a[2], a[3]};
                    best.iterations = static_cast<int>(lm.iterations());
                }
            }
    if (!std::isfinite(best.objective)) throw NumericalError("logistic fit failed at every start");

    // a3 > 0 with a2 < 0 describes the same curve; keep a2 >= 0.
    if (best.alpha[1] < 0.0) {
        best.alpha = {best.alpha[0] + best.alpha[1], -best.alpha[1], -best.alpha[2], -best.alpha[3]};
    }
    best.bins = bins;
    best.residuals.assign(bins.centers.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t b = 0; b < bins.centers.size(); ++b)
        if (bins.counts[b] > 0) best.residuals[b] = bins.cpr[b] - logistic(best.alpha, bins.centers[b]);
    return best;
}

LogisticFit bin_and_fit(std::span<const LoanObservation> loans, const BinOptions& options) {
    return fit_logistic(bin_observations(loans, options));
}

// ---------------------------------------------------------------------------

std::vector<LoanObservation> generate_synthetic_loans(const SyntheticLoanOptions& opt) {
    require(opt.n_periods >= 1 && opt.loans_per_period >= 1, "synthetic loans: empty layout");
    require(opt.incentive_hi > opt.incentive_lo, "synthetic loans: bad incentive range");
    require(opt.sub_units >= 1, "synthetic loans: sub_units must be >= 1");
    CprModel truth(LogisticCpr{opt.alpha});

    std::vector<LoanObservation> out(opt.n_periods * opt.loans_per_period);
    parallel_for_blocks(opt.n_periods, [&](std::size_t p) {
        std::mt19937_64 rng(stream_seed(opt.seed, p));
        std::uniform_real_distribution<double> incentive(opt.incentive_lo, opt.incentive_hi);
        std::lognormal_distribution<double> balance(opt.balance_log_mean, opt.balance_log_sd);
        char period[16];
        std::snprintf(period, sizeof period, "%04d-%02d", 2008 + static_cast<int>(p / 12),
                      1 + static_cast<int>(p % 12));
        for (std::size_t k = 0; k < opt.loans_per_period; ++k) {
            auto& o = out[p * opt.loans_per_period + k];
            o.period = period;
            o.incentive = incentive(rng);
            o.starting_balance = std::round(balance(rng) * 100.0) / 100.0;
            const double smm = cpr_to_smm(truth(o.incentive));
            std::binomial_distribution<int> events(opt.sub_units, smm);
            o.prepaid_amount = o.starting_balance * events(rng) / opt.sub_units;
        }
    });
    return out;
}

}  // namespace prepay
