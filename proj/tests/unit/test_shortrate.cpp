#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fixtures.hpp"
#include "prepay/errors.hpp"
#include "prepay/ias_pricer.hpp"
#include "prepay/numerics.hpp"
#include "prepay/parallel.hpp"
#include "prepay/shortrate.hpp"

using namespace prepay;
using doctest::Approx;

namespace {

std::vector<double> yearly(int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(i);
    return g;
}

// Mean and standard error over antithetic pair averages.
std::pair<double, double> pair_stats(const std::vector<double>& v) {
    const std::size_t n = v.size() / 2;
    double s = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double y = 0.5 * (v[2 * k] + v[2 * k + 1]);
        s += y;
        s2 += y * y;
    }
    const double m = s / n;
    return {m, std::sqrt((s2 / n - m * m) / (n - 1))};
}

}  // namespace

TEST_CASE("B and the bond price function") {
    HullWhite hw(fixtures::flat_curve(0.02), fixtures::kHw);
    CHECK(hw.B(10.0) == Approx(-(1.0 - std::exp(-2.64)) / 0.264).epsilon(1e-14));
    CHECK(hw.B(10.0) == Approx(-3.5175709).epsilon(1e-7));
    CHECK(hw.B(0.0) == 0.0);

    auto ref = fixtures::reference_model();
    CHECK(ref.bond_price(4.0, 4.0, 0.03) == 1.0);
    for (double T : {1.0, 5.0, 10.0, 20.0}) {
        CHECK(ref.bond_price_x(0.0, T, 0.0) == Approx(ref.curve().discount(T)).epsilon(1e-12));
        CHECK(ref.bond_price(0.0, T, ref.phi(0.0)) == Approx(ref.curve().discount(T)).epsilon(1e-9));
    }

    // textbook affine form with positive B
    const double t = 3.0, T = 8.0, r = 0.01, lam = 0.264, eta = 0.017;
    const double bp = (1.0 - std::exp(-lam * (T - t))) / lam;
    const auto& c = ref.curve();
    const double f = c.instantaneous_forward(t);
    const double expect = c.discount(T) / c.discount(t) *
                          std::exp(bp * f - eta * eta / (4 * lam) * (1 - std::exp(-2 * lam * t)) * bp * bp -
                                   bp * r);
    CHECK(ref.bond_price(t, T, r) == Approx(expect).epsilon(1e-8));
}

TEST_CASE("theta on a flat curve") {
    HullWhite quiet(fixtures::flat_curve(0.03), {0.264, 1e-9});
    CHECK(quiet.theta(4.0) == Approx(0.03).epsilon(1e-6));
    HullWhite hw(fixtures::flat_curve(0.03), fixtures::kHw);
    const double limit = 0.03 + 0.017 * 0.017 / (2 * 0.264 * 0.264);
    CHECK(hw.theta(35.0) == Approx(limit).epsilon(1e-6));
}

TEST_CASE("zero volatility paths are deterministic and discount exactly") {
    HullWhite hw(fixtures::reference_curve(), {0.264, 1e-12});
    auto g = yearly(10);
    auto p = simulate_paths(hw, g, 8, 3);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(1.0 / p.money_market(5, i) == Approx(hw.curve().discount(g[i])).epsilon(1e-10));
}

TEST_CASE("money market martingale test") {
    auto hw = fixtures::reference_model();
    auto g = yearly(10);
    auto p = simulate_paths(hw, g, 200000, 2024);
    for (std::size_t i = 1; i < g.size(); ++i) {
        std::vector<double> v(p.n_paths());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = 1.0 / p.money_market(j, i);
        auto [m, se] = pair_stats(v);
        CHECK(std::abs(m - hw.curve().discount(g[i])) <= 3.0 * se + 1e-12);
    }
    // factor variance matches the OU transition
    const double var = hw.factor_variance(10.0);
    double s2 = 0.0;
    for (std::size_t j = 0; j < p.n_paths(); ++j) s2 += p.factor(j, 10) * p.factor(j, 10);
    CHECK(s2 / p.n_paths() == Approx(var).epsilon(0.02));
}

TEST_CASE("antithetic pairs and determinism") {
    auto hw = fixtures::reference_model();
    auto g = yearly(10);
    auto a = simulate_paths(hw, g, 4096, 11);
    for (std::size_t j = 0; j < a.n_paths(); j += 2)
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(a.factor(j + 1, i) == -a.factor(j, i));

    set_thread_count(1);
    auto one = simulate_paths(hw, g, 5000, 11);
    set_thread_count(4);
    auto four = simulate_paths(hw, g, 5000, 11);
    set_thread_count(0);
    CHECK(one.money_market == four.money_market);
    CHECK(one.short_rate == four.short_rate);
    auto other = simulate_paths(hw, g, 5000, 12);
    CHECK(other.factor != one.factor);
    CHECK_THROWS_AS(simulate_paths(hw, g, 5001, 11, true), InputError);
}

TEST_CASE("bond option put-call parity") {
    auto hw = fixtures::reference_model();
    const auto& c = hw.curve();
    for (double X : {0.9, 0.97, 1.02}) {
        const double call = hw.bond_option(OptionType::Call, 0.0, 0.0, 3.0, 8.0, X);
        const double put = hw.bond_option(OptionType::Put, 0.0, 0.0, 3.0, 8.0, X);
        CHECK(call - put == Approx(c.discount(8.0) - X * c.discount(3.0)).epsilon(1e-12));
    }
}

TEST_CASE("swaption parity, limits and strike zero") {
    auto hw = fixtures::reference_model();
    const auto& c = hw.curve();
    auto fw = forward_swap(c, 5.0, 5.0);
    for (double K : {-0.005, 0.01, 0.03}) {
        const double pay = hw_swaption_price(hw, 5.0, 5.0, K, SwaptionType::Payer);
        const double rec = hw_swaption_price(hw, 5.0, 5.0, K, SwaptionType::Receiver);
        CHECK(pay - rec == Approx((fw.rate - K) * fw.annuity).epsilon(1e-11));
        CHECK(pay >= std::max(0.0, (fw.rate - K) * fw.annuity) - 1e-15);
    }
    HullWhite quiet(c, {0.264, 1e-13});
    CHECK(std::abs(hw_swaption_price(quiet, 5.0, 5.0, fw.rate, SwaptionType::Payer)) < 1e-11);

    // Far in the money the payer is the forward swap.
    HullWhite flat(fixtures::flat_curve(0.02), fixtures::kHw);
    const auto f2 = forward_swap(flat.curve(), 2.0, 3.0);
    CHECK(hw_swaption_price(flat, 2.0, 3.0, -0.2, SwaptionType::Receiver) < 1e-12);
    CHECK(hw_swaption_price(flat, 2.0, 3.0, -0.2, SwaptionType::Payer) ==
          Approx((f2.rate + 0.2) * f2.annuity).epsilon(1e-12));
}

TEST_CASE("swaption agrees with Monte Carlo") {
    auto hw = fixtures::reference_model();
    auto g = yearly(10);
    auto p = simulate_paths(hw, g, 100000, 99);
    GridBonds bonds(hw, g);
    const double K = forward_swap(hw.curve(), 5.0, 5.0).rate + 0.002;
    std::vector<double> v(p.n_paths());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double x = p.factor(j, 5);
        double ann = 0.0;
        for (std::size_t k = 6; k <= 10; ++k) ann += bonds(5, k, x);
        const double payer = 1.0 - bonds(5, 10, x) - K * ann;
        v[j] = std::max(payer, 0.0) / p.money_market(j, 5);
    }
    auto [m, se] = pair_stats(v);
    const double analytic = hw_swaption_price(hw, 5.0, 5.0, K, SwaptionType::Payer);
    CHECK(std::abs(m - analytic) <= 3.0 * se);
}

TEST_CASE("floorlet equals a one-period receiver swaption") {
    auto hw = fixtures::reference_model();
    const auto& c = hw.curve();
    for (double K : {-0.002, 0.0, 0.004, 0.02}) {
        const double fl = hw_floorlet_price(hw, 1.0, 2.0, K);
        CHECK(fl == Approx(hw_swaption_price(hw, 1.0, 1.0, K, SwaptionType::Receiver)).epsilon(1e-10));
        const double call = (1.0 + K) * hw.bond_option(OptionType::Call, 0.0, 0.0, 1.0, 2.0, 1.0 / (1.0 + K));
        CHECK(fl == Approx(call).epsilon(1e-10));
    }
    CHECK(hw_floorlet_price(hw, 1.0, 2.0, -0.5) < 1e-12);
    const double deep = hw_floorlet_price(hw, 1.0, 2.0, 0.5);
    CHECK(deep == Approx(1.5 * c.discount(2.0) - c.discount(1.0)).epsilon(1e-9));
}

TEST_CASE("Bachelier pricing and inversion") {
    const double A = 4.3, T = 4.0, s = 0.005;
    const double atm = bachelier_price(SwaptionType::Payer, 0.01, 0.01, s, T, A);
    CHECK(atm == Approx(A * s * std::sqrt(T / (2.0 * std::numbers::pi))).epsilon(1e-14));
    CHECK(std::abs(bachelier_implied_vol(atm, 0.01, A, T) - s) < 1e-10 * s);
    CHECK(bachelier_implied_vol(0.0, 0.01, A, T) == 0.0);
    for (double K : {0.0, 0.008, 0.013}) {
        for (auto type : {SwaptionType::Payer, SwaptionType::Receiver}) {
            const double p = bachelier_price(type, 0.01, K, s, T, A);
            CHECK(std::abs(bachelier_implied_vol(type, p, 0.01, K, A, T) - s) < 1e-10 * s);
        }
    }
}

TEST_CASE("vol matrix file") {
    auto m = read_vol_matrix_csv(fixtures::data_dir() / "swaption_vols_2018-01-23.csv");
    CHECK(m.vol_bps(5.0, 5.0) == 61.98);
    CHECK(parse_tenor_label("3Mo") == 0.25);
    CHECK(parse_tenor_label("10Yr") == 10.0);
    CHECK_THROWS_AS(m.vol_bps(5.0, 6.0), InputError);
    auto q = select_instruments(m, "counterdiag10y");
    REQUIRE(q.size() == 5);
    CHECK(q[2].expiry_years == 5.0);
    CHECK(q[2].tenor_years == 5.0);
    CHECK(q[2].normal_vol == Approx(0.006198).epsilon(1e-15));
    CHECK_THROWS_AS(select_instruments(m, "nonsense"), InputError);
}

TEST_CASE("calibration recovers synthetic parameters") {
    auto curve = fixtures::reference_curve();
    HullWhite truth(curve, fixtures::kHw);
    std::vector<SwaptionQuote> q;
    for (int e : {1, 3, 5, 7, 9}) q.push_back({double(e), 10.0 - e, hw_implied_normal_vol(truth, e, 10.0 - e)});
    auto fit = calibrate_hw(curve, q);
    CHECK(fit.params.lambda == Approx(0.264).epsilon(0.01));
    CHECK(fit.params.eta == Approx(0.017).epsilon(0.01));

    CalibrationOptions one;
    one.fix_lambda = true;
    one.initial = {0.264, 0.01};
    std::vector<SwaptionQuote> single{q[2]};
    auto f1 = calibrate_hw(curve, single, one);
    CHECK(f1.params.lambda == 0.264);
    CHECK(f1.params.eta == Approx(0.017).epsilon(1e-6));
}

TEST_CASE("market counter-diagonal fit pattern") {
    auto curve = fixtures::reference_curve();
    auto m = read_vol_matrix_csv(fixtures::data_dir() / "swaption_vols_2018-01-23.csv");
    auto q = select_instruments(m, "counterdiag10y");
    auto fit = calibrate_hw(curve, q);
    CHECK(fit.params.lambda == Approx(fixtures::kHwCalibrated.lambda).epsilon(1e-3));
    CHECK(fit.params.eta == Approx(fixtures::kHwCalibrated.eta).epsilon(1e-3));
    // model above market at the short and long ends, below in the middle
    CHECK(fit.model_vols[0] > q[0].normal_vol);
    CHECK(fit.model_vols[2] < q[2].normal_vol);
    CHECK(fit.model_vols[3] < q[3].normal_vol);
    CHECK(fit.model_vols[4] > q[4].normal_vol);
}

TEST_CASE("non-convergence reports the best point") {
    auto curve = fixtures::reference_curve();
    auto m = read_vol_matrix_csv(fixtures::data_dir() / "swaption_vols_2018-01-23.csv");
    auto q = select_instruments(m, "counterdiag10y");
    CalibrationOptions o;
    o.max_iterations = 3;
    try {
        calibrate_hw(curve, q, o);
        FAIL("expected CalibrationError");
    } catch (const CalibrationError& e) {
        CHECK(std::isfinite(e.best().params.lambda));
        CHECK(e.best().params.eta > 0.0);
    }
}
