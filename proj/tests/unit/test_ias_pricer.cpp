#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "prepay/errors.hpp"
#include "prepay/ias_pricer.hpp"
#include "prepay/parallel.hpp"

using namespace prepay;
using doctest::Approx;

namespace {

// Receive every mortgage cash flow, fund N0 today.
double loan_cashflow_value(const YieldCurve& c, const MortgageSpec& s, double lam) {
    auto rows = constant_cpr_schedule(s, lam);
    double v = -s.notional;
    for (const auto& r : rows) v += (r.interest + r.repayment + r.prepayment) * c.discount(r.time);
    return v;
}

IasScenario scenario(MortgageKind kind, double rate, CprModel cpr, std::size_t n, std::uint64_t seed) {
    IasScenario sc;
    sc.mortgage = {kind, 1.0, rate, 10};
    sc.cpr = std::move(cpr);
    sc.n_paths = n;
    sc.seed = seed;
    return sc;
}

}  // namespace

TEST_CASE("par identity") {
    auto c = fixtures::reference_curve();
    const double K = c.swap_rate(0.0, 10.0);
    MortgageSpec s{MortgageKind::Bullet, 1e6, K, 10};
    std::vector<double> zero(10, 0.0);
    CHECK(std::abs(price_deterministic_as(c, s, zero)) < 1e-10 * s.notional);
    CHECK(atm_mortgage_rate(c, MortgageKind::Bullet, 10) == Approx(K).epsilon(1e-12));

    s.rate = K + 1e-4;
    CHECK(price_deterministic_as(c, s, zero) == Approx(1e-4 * s.notional * c.annuity(0.0, 10.0)).epsilon(1e-9));
}

TEST_CASE("amortizing swap equals discounted loan cash flows") {
    auto c = fixtures::reference_curve();
    for (auto kind : {MortgageKind::Bullet, MortgageKind::Annuity})
        for (double lam : {0.0, 0.04, 0.12}) {
            MortgageSpec s{kind, 1.0, 0.015, 10};
            std::vector<double> path(10, lam);
            CHECK(price_deterministic_as(c, s, path) ==
                  Approx(loan_cashflow_value(c, s, lam)).epsilon(1e-12));
        }
    auto annuity_atm = atm_mortgage_rate(c, MortgageKind::Annuity, 10);
    MortgageSpec a{MortgageKind::Annuity, 1.0, annuity_atm, 10};
    CHECK(std::abs(loan_cashflow_value(c, a, 0.0)) < 1e-12);
}

TEST_CASE("constant CPR notionals follow the deterministic schedule") {
    auto hw = fixtures::reference_model();
    for (auto kind : {MortgageKind::Bullet, MortgageKind::Annuity}) {
        auto sc = scenario(kind, 0.01, CprModel(ConstantCpr{0.12}), 64, 3);
        auto paths = simulate_paths(hw, mortgage_grid(sc.mortgage), sc.n_paths, sc.seed);
        auto np = simulate_notional(hw, sc, paths);
        auto n = notionals(sc.mortgage, constant_cpr_schedule(sc.mortgage, 0.12));
        for (std::size_t j = 0; j < np.n_paths(); ++j)
            for (int i = 0; i <= 10; ++i) CHECK(np.notional(j, i) == Approx(n[i]).epsilon(1e-13));
        auto avg = average_notional(np, sc.mortgage);
        for (double l : avg.implied_cpr) CHECK(l == Approx(0.12).epsilon(1e-10));
    }
}

TEST_CASE("constant CPR Monte Carlo matches the curve price") {
    auto hw = fixtures::reference_model();
    for (auto kind : {MortgageKind::Bullet, MortgageKind::Annuity}) {
        auto sc = scenario(kind, 0.012, CprModel(ConstantCpr{0.04}), 20000, 5);
        auto mc = price_ias_mc(hw, sc);
        std::vector<double> lam(10, 0.04);
        const double exact = price_deterministic_as(hw.curve(), sc.mortgage, lam);
        CHECK(std::abs(mc.value - exact) <= 3.0 * mc.std_error);
        CHECK(mc.std_error > 0.0);
    }
}

TEST_CASE("rational bullet notionals take few distinct values") {
    auto hw = fixtures::reference_model();
    const double K = atm_mortgage_rate(hw.curve(), MortgageKind::Bullet, 10);
    auto sc = scenario(MortgageKind::Bullet, K, CprModel(RationalCpr{0.12, 0.0}), 4096, 8);
    auto paths = simulate_paths(hw, mortgage_grid(sc.mortgage), sc.n_paths, sc.seed);
    auto np = simulate_notional(hw, sc, paths);
    for (int i = 1; i < 10; ++i) {
        std::set<int> powers;
        for (std::size_t j = 0; j < np.n_paths(); ++j) {
            const double k = std::log(np.notional(j, i)) / std::log(0.88);
            CHECK(std::abs(k - std::round(k)) < 1e-9);
            powers.insert(static_cast<int>(std::lround(k)));
            CHECK(np.exercise(j, i) == (K > np.kappa(j, i) ? 1.0 : 0.0));
        }
        CHECK(powers.size() <= static_cast<std::size_t>(i + 1));
    }
    auto avg = average_notional(np, sc.mortgage);
    for (int i = 1; i < 10; ++i) {
        CHECK(avg.mean[i] <= 1.0);
        CHECK(avg.mean[i] >= std::pow(0.88, i));
    }
}

TEST_CASE("logistic paths stay between floor and cap schedules") {
    auto hw = fixtures::reference_model();
    auto sc = scenario(MortgageKind::Annuity, 0.012, CprModel(LogisticCpr{{0.06, 0.14, -300.0, 4.0}}), 2048, 9);
    auto paths = simulate_paths(hw, mortgage_grid(sc.mortgage), sc.n_paths, sc.seed);
    auto np = simulate_notional(hw, sc, paths);
    auto lo = notionals(sc.mortgage, constant_cpr_schedule(sc.mortgage, 0.20));
    auto hi = notionals(sc.mortgage, constant_cpr_schedule(sc.mortgage, 0.06));
    for (std::size_t j = 0; j < np.n_paths(); ++j)
        for (int i = 0; i <= 10; ++i) {
            CHECK(np.notional(j, i) <= hi[i] + 1e-12);
            CHECK(np.notional(j, i) >= lo[i] - 1e-12);
        }
}

TEST_CASE("a lower spread triggers more prepayment on every path") {
    auto hw = fixtures::reference_model();
    const double K = atm_mortgage_rate(hw.curve(), MortgageKind::Bullet, 10);
    auto sc = scenario(MortgageKind::Bullet, K, CprModel(RationalCpr{0.12, 0.0}), 4000, 21);
    auto paths = simulate_paths(hw, mortgage_grid(sc.mortgage), sc.n_paths, sc.seed);
    NotionalPathSet prev;
    for (double zeta : {0.004, 0.002, 0.0}) {
        sc.zeta = zeta;
        auto np = simulate_notional(hw, sc, paths);
        if (prev.n_paths() > 0) {
            CHECK((np.exercise.array() >= prev.exercise.array()).all());
            CHECK((np.notional.array() <= prev.notional.array()).all());
        }
        prev = std::move(np);
    }
}

TEST_CASE("two-period annuity") {
    auto curve = fixtures::reference_curve();
    // Zero volatility: the trigger is decided by the forward libor.
    HullWhite quiet(curve, {0.264, 1e-10});
    for (double K : {curve.forward_libor(1, 2) - 0.001, curve.forward_libor(1, 2) + 0.001}) {
        MortgageSpec s{MortgageKind::Annuity, 1.0, K, 2};
        const double n1 = K > curve.forward_libor(1, 2) ? psi(s.kind, K, 0.3, 2, 0) : psi(s.kind, K, 0.0, 2, 0);
        const double hand = ((K + 1) * curve.discount(1) - 1) + n1 * ((K + 1) * curve.discount(2) - curve.discount(1));
        CHECK(price_two_period_annuity(quiet, s, 0.3) == Approx(hand).epsilon(1e-8));
    }

    HullWhite hw(curve, fixtures::kHw);
    const double K = atm_mortgage_rate(curve, MortgageKind::Annuity, 2);
    MortgageSpec s{MortgageKind::Annuity, 1.0, K, 2};
    CHECK(price_two_period_annuity(hw, s, 0.0) ==
          Approx(price_deterministic_as(curve, s, std::vector<double>{0.0, 0.0})).epsilon(1e-14));
    IasScenario sc;
    sc.mortgage = s;
    sc.cpr = CprModel(RationalCpr{0.3, 0.0});
    sc.n_paths = 100000;
    sc.seed = 77;
    auto mc = price_ias_mc(hw, sc);
    CHECK(std::abs(mc.value - price_two_period_annuity(hw, s, 0.3)) <= 3.0 * mc.std_error);
}

TEST_CASE("average notional does not price the rational IAS") {
    auto hw = fixtures::reference_model();
    const double K = atm_mortgage_rate(hw.curve(), MortgageKind::Bullet, 10);
    auto sc = scenario(MortgageKind::Bullet, K, CprModel(RationalCpr{0.12, 0.0}), 20000, 31);
    auto paths = simulate_paths(hw, mortgage_grid(sc.mortgage), sc.n_paths, sc.seed);
    auto np = simulate_notional(hw, sc, paths);
    auto mc = summarize(ias_path_values(hw, sc, paths, np), true);
    auto avg = average_notional(np, sc.mortgage);
    std::vector<double> lam = avg.implied_cpr;
    lam.push_back(0.0);
    const double naive = price_deterministic_as(hw.curve(), sc.mortgage, lam);
    CHECK(std::abs(mc.value - naive) > 3.0 * mc.std_error);
    // the implied rates rebuild the mean path
    auto rows = schedule(sc.mortgage, lam);
    for (int i = 1; i < 10; ++i) CHECK(rows[i - 1].notional_after == Approx(avg.mean[i]).epsilon(1e-12));
}

TEST_CASE("forward values start at the price") {
    auto hw = fixtures::reference_model();
    auto sc = scenario(MortgageKind::Bullet, 0.01, CprModel(LogisticCpr{{0.06, 0.14, -300.0, 4.0}}), 4096, 4);
    auto paths = simulate_paths(hw, mortgage_grid(sc.mortgage), sc.n_paths, sc.seed);
    auto np = simulate_notional(hw, sc, paths);
    auto fwd = forward_ias_values(hw, sc, paths, np);
    REQUIRE(fwd.size() == 10);
    auto mc = summarize(ias_path_values(hw, sc, paths, np), true);
    CHECK(fwd[0] == Approx(mc.value).epsilon(1e-12));
}

TEST_CASE("same seed, any thread count, same price") {
    auto hw = fixtures::reference_model();
    auto sc = scenario(MortgageKind::Annuity, 0.01, CprModel(LogisticCpr{{0.06, 0.14, -300.0, 4.0}}), 10000, 42);
    set_thread_count(1);
    auto a = price_ias_mc(hw, sc);
    set_thread_count(3);
    auto b = price_ias_mc(hw, sc);
    set_thread_count(0);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    sc.seed = 43;
    CHECK(price_ias_mc(hw, sc).value != a.value);
}

TEST_CASE("inputs are validated") {
    auto hw = fixtures::reference_model();
    auto sc = scenario(MortgageKind::Bullet, 0.01, CprModel(ConstantCpr{0.0}), 100, 1);
    std::vector<double> g{0, 1, 2, 3};
    auto paths = simulate_paths(hw, g, 100, 1);
    CHECK_THROWS_AS(simulate_notional(hw, sc, paths), InputError);
    std::vector<double> bad(10, 1.0);
    CHECK_THROWS_AS(price_deterministic_as(hw.curve(), sc.mortgage, bad), InputError);
    std::vector<double> one{1.0};
    CHECK_THROWS_AS(summarize(one, false), InputError);
}
