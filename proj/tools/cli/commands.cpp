#include "commands.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "prepay/csv.hpp"
#include "prepay/errors.hpp"
#include "prepay/greeks.hpp"
#include "prepay/hedge.hpp"
#include "prepay/prepayment.hpp"

namespace prepay::cli {

namespace {

double to_bps(double value, double notional) { return value / notional * 1e4; }

std::string swaption_label(const SwaptionQuote& q) {
    return num(q.expiry_years) + "Y-" + num(q.tenor_years) + "Y";
}

Json hw_json(const HullWhiteParams& p) { return {{"lambda", p.lambda}, {"eta", p.eta}}; }

// Simulated rates and notionals of one scenario, shared by every strategy.
struct Simulation {
    IasScenario scenario;
    HullWhite model;
    PathSet paths;
    NotionalPathSet notionals;
    McPrice ias;

    Simulation(IasScenario sc, HullWhite m)
        : scenario(std::move(sc)), model(std::move(m)) {
        const auto grid = mortgage_grid(scenario.mortgage);
        paths = simulate_paths(model, grid, scenario.n_paths, scenario.seed, scenario.antithetic);
        notionals = simulate_notional(model, scenario, paths);
        ias = summarize(ias_path_values(model, scenario, paths, notionals), scenario.antithetic);
    }
};

struct BuiltHedge {
    Strategy strategy;
    HedgePortfolio portfolio;
    std::optional<WeightFit> fit;
};

struct HedgeSet {
    std::vector<BuiltHedge> hedges;
    std::optional<GammaHedge> gamma;
};

HedgeSet build_hedges(Context& ctx, const Simulation& sim, const std::vector<std::string>& names) {
    const auto& s = ctx.settings();
    const double K = sim.scenario.mortgage.rate;
    const int M = sim.scenario.mortgage.maturity_years;
    const bool allow_short = !s.no_short;
    const auto env = build_envelope_hedge(sim.notionals, K);
    const auto diag = diagonal_cells(M);

    std::optional<WeightFit> diag_fit;
    auto value_fit = [&]() -> const WeightFit& {
        if (!diag_fit)
            diag_fit = allow_short ? calibrate_diagonal(sim.notionals, K)
                                   : calibrate_numeric(sim.notionals, K, diag, false);
        return *diag_fit;
    };
    auto with = [&](const SwaptionGrid& w) {
        auto p = env;
        p.swaptions = w;
        return p;
    };

    HedgeSet out;
    for (const auto& name : names) {
        const Strategy st = parse_strategy(name);
        BuiltHedge h{st, env, std::nullopt};
        switch (st) {
            case Strategy::Linear:
                h.portfolio = build_linear_hedge(sim.notionals, K);
                break;
            case Strategy::Diagonal:
                h.fit = value_fit();
                h.portfolio = with(h.fit->weights);
                break;
            case Strategy::Full: {
                const auto cells = full_cells(M);
                h.fit = calibrate_numeric(sim.notionals, K, cells, allow_short);
                h.portfolio = with(h.fit->weights);
                break;
            }
            case Strategy::Single5y5y: {
                require(M >= 2, "single-5y5y needs a maturity of at least 2 years");
                const auto cells = single_cell(M / 2, M);
                h.fit = calibrate_numeric(sim.notionals, K, cells, allow_short);
                h.portfolio = with(h.fit->weights);
                break;
            }
            case Strategy::Gamma:
            case Strategy::Average:
                if (!out.gamma)
                    out.gamma = gamma_hedge(ctx.market(), sim.scenario, with(value_fit().weights), diag,
                                            s.bump, allow_short);
                h.portfolio = with(st == Strategy::Gamma ? out.gamma->fit.gamma_weights
                                                         : out.gamma->fit.averaged);
                break;
        }
        out.hedges.push_back(std::move(h));
    }
    return out;
}

Json weights_json(const SwaptionGrid& g, double notional) {
    Json cells = Json::array();
    for (const auto& [i, l] : g.nonzero())
        cells.push_back({{"swaption", cell_label({i, l})},
                         {"start_years", i},
                         {"end_years", l},
                         {"weight_per_notional", g(i, l) / notional}});
    // Grid layout: row i = 1..M-1 (start), column l = 2..M (end).
    Json grid = Json::array();
    for (int i = 1; i < g.maturity; ++i) {
        Json row = Json::array();
        for (int l = 2; l <= g.maturity; ++l) row.push_back(l > i ? g(i, l) / notional : 0.0);
        grid.push_back(row);
    }
    return {{"cells", cells}, {"grid", grid}};
}

CsvTable calibration_table(const std::vector<SwaptionQuote>& quotes, const HwCalibration& cal) {
    CsvTable t({"swaption", "market_vol_bps", "hw_vol_bps", "market_price_bps", "hw_price_bps"});
    for (std::size_t q = 0; q < quotes.size(); ++q)
        t.add({swaption_label(quotes[q]), num(quotes[q].normal_vol * 1e4), num(cal.model_vols[q] * 1e4),
               num(cal.market_prices[q] * 1e4), num(cal.model_prices[q] * 1e4)});
    return t;
}

std::pair<double, double> parse_range(const std::string& r) {
    const auto colon = r.find(':');
    if (colon == std::string::npos) throw InputError("range must look like lo:hi, got '" + r + "'");
    const double lo = csv::to_double(r.substr(0, colon), "range lower bound");
    const double hi = csv::to_double(r.substr(colon + 1), "range upper bound");
    if (!(hi > lo)) throw InputError("range: upper bound must exceed lower bound");
    return {lo, hi};
}

}  // namespace

// ---------------------------------------------------------------------------

void cmd_bootstrap(Context& ctx, OutputDir& out, std::ostream& log) {
    const auto& quotes = ctx.quotes();
    const auto& curve = ctx.curve();
    CsvTable t({"maturity_years", "par_rate_bps", "repriced_par_rate_bps", "discount_factor",
                "zero_rate_cc_bps", "forward_libor_1y_bps"});
    double prev = 0.0;
    for (const auto& q : quotes) {
        const double T = q.maturity_years;
        const double df = curve.discount(T);
        t.add({num(T), num(q.par_rate * 1e4), num(curve.swap_rate(0.0, T, q.fixed_frequency) * 1e4),
               num(df), num(-std::log(df) / T * 1e4),
               num(curve.forward_libor(std::max(prev, T - 1.0), T) * 1e4)});
        prev = T;
    }
    out.write_csv("curve.csv", t);
    log << "bootstrapped " << quotes.size() << " pillars\n";
}

void cmd_calibrate(Context& ctx, OutputDir& out, std::ostream& log) {
    const auto quotes = ctx.calibration_quotes();
    const auto cal = ctx.calibration();
    Json j;
    j["model"] = "hull-white";
    j["params"] = hw_json(cal.params);
    j["objective_bps2"] = cal.objective;
    j["iterations"] = cal.iterations;
    Json rows = Json::array();
    for (std::size_t q = 0; q < quotes.size(); ++q)
        rows.push_back({{"swaption", swaption_label(quotes[q])},
                        {"market_vol_bps", quotes[q].normal_vol * 1e4},
                        {"hw_vol_bps", cal.model_vols[q] * 1e4},
                        {"market_price_bps", cal.market_prices[q] * 1e4},
                        {"hw_price_bps", cal.model_prices[q] * 1e4}});
    j["instruments"] = rows;
    out.write_json("calibration.json", j);
    out.write_csv("calibration.csv", calibration_table(quotes, cal));
    log << "lambda = " << num(cal.params.lambda) << ", eta = " << num(cal.params.eta) << "\n";
}

void cmd_schedule(Context& ctx, OutputDir& out, std::ostream& log) {
    const auto spec = ctx.mortgage();
    const double cpr = ctx.settings().cpr_lambda;
    const auto rows = constant_cpr_schedule(spec, cpr);
    CsvTable t({"time_years", "notional_before_ccy", "interest_ccy", "repayment_ccy", "prepayment_ccy",
                "installment_ccy", "notional_after_ccy"});
    for (const auto& r : rows)
        t.add({num(r.time), num(r.notional_before), num(r.interest), num(r.repayment), num(r.prepayment),
               num(r.installment), num(r.notional_after)});
    out.write_csv("schedule.csv", t);
    log << to_string(spec.kind) << " schedule, K = " << num(spec.rate * 1e4) << " bps, cpr = " << num(cpr)
        << "\n";
}

void cmd_cpr_fit(Context& ctx, OutputDir& out, std::ostream& log) {
    auto& s = ctx.settings();
    std::vector<LoanObservation> loans;
    if (s.synthesize) {
        SyntheticLoanOptions opt;
        if (s.alpha.size() != 4) throw InputError("cpr.alpha needs exactly 4 values");
        opt.alpha = {s.alpha[0], s.alpha[1], s.alpha[2], s.alpha[3]};
        opt.n_periods = s.periods;
        opt.loans_per_period = s.loans_per_period;
        opt.seed = ctx.seed();
        loans = generate_synthetic_loans(opt);
        write_loans_csv(out.dir() / "synthetic_loans.csv", loans);
        out.adopt("synthetic_loans.csv");
    } else {
        if (s.loans.empty()) throw InputError("cpr-fit needs --loans or --synthesize");
        if (!std::filesystem::is_regular_file(s.loans)) throw InputError("loans: file not found: " + s.loans);
        out.add_input(s.loans);
        loans = read_loans_csv(s.loans);
    }
    BinOptions bo;
    bo.n_bins = s.bins;
    std::tie(bo.lo, bo.hi) = parse_range(s.range);
    const auto fit = bin_and_fit(loans, bo);

    Json j;
    j["alpha"] = fit.alpha;
    j["objective"] = fit.objective;
    j["iterations"] = fit.iterations;
    j["n_observations"] = loans.size();
    j["dropped"] = fit.bins.dropped;
    Json bins = Json::array();
    CsvTable t({"bin", "incentive_center_dec", "count", "mean_smm_dec", "cpr_dec", "fitted_cpr_dec",
                "residual_dec"});
    for (std::size_t b = 0; b < fit.bins.centers.size(); ++b) {
        const double fitted = logistic(fit.alpha, fit.bins.centers[b]);
        const bool empty = fit.bins.counts[b] == 0;
        bins.push_back({{"center", fit.bins.centers[b]},
                        {"count", fit.bins.counts[b]},
                        {"mean_smm", fit.bins.mean_smm[b]},
                        {"cpr", fit.bins.cpr[b]},
                        {"fitted_cpr", fitted}});
        t.add({std::to_string(b), num(fit.bins.centers[b]), std::to_string(fit.bins.counts[b]),
               num(fit.bins.mean_smm[b]), num(fit.bins.cpr[b]), num(fitted),
               empty ? "" : num(fit.residuals[b])});
    }
    j["bins"] = bins;
    Json res = Json::array();
    for (double r : fit.residuals) res.push_back(std::isnan(r) ? Json(nullptr) : Json(r));
    j["residuals"] = res;
    out.write_json("cpr_fit.json", j);
    out.write_csv("cpr_bins.csv", t);

    std::vector<std::string> skipped;
    const auto series = empirical_cpr_timeseries(loans, &skipped);
    CsvTable ts({"period", "smm_dec", "cpr_dec", "balance_ccy"});
    for (const auto& p : series) ts.add({p.period, num(p.smm), num(p.cpr), num(p.balance)});
    out.write_csv("cpr_timeseries.csv", ts);
    for (const auto& p : skipped) log << "warning: period " << p << " has zero balance, skipped\n";
    log << "alpha = [" << num(fit.alpha[0]) << ", " << num(fit.alpha[1]) << ", " << num(fit.alpha[2]) << ", "
        << num(fit.alpha[3]) << "], " << fit.bins.dropped << " observations outside the range\n";
}

void cmd_price(Context& ctx, OutputDir& out, std::ostream& log) {
    const auto sc = ctx.scenario();
    const Simulation sim(sc, ctx.model());
    const auto& spec = sc.mortgage;
    const double N0 = spec.notional;
    const auto avg = average_notional(sim.notionals, spec);
    const auto env = upper_envelope(sim.notionals);
    const std::vector<double> avg_leg(avg.mean.begin(), avg.mean.end() - 1);

    Json j;
    j["value_bps"] = to_bps(sim.ias.value, N0);
    j["stderr_bps"] = to_bps(sim.ias.std_error, N0);
    j["value_ccy"] = sim.ias.value;
    j["stderr_ccy"] = sim.ias.std_error;
    j["n_paths"] = sim.ias.n_paths;
    j["seed"] = sc.seed;
    const Json scen = ctx.scenario_json(sc);
    j["scenario_digest"] = sha256_hex(scen.dump() + hw_json(sim.model.params()).dump());
    j["scenario"] = scen;
    j["hw"] = hw_json(sim.model.params());
    j["rate_k_bps"] = spec.rate * 1e4;
    j["as_on_average_notional_bps"] = to_bps(price_amortizing_swap(ctx.curve(), spec.rate, avg_leg), N0);
    if (const auto* c = std::get_if<ConstantCpr>(&sc.cpr.form())) {
        const std::vector<double> lam(static_cast<std::size_t>(spec.maturity_years), c->lambda);
        j["deterministic_as_bps"] = to_bps(price_deterministic_as(ctx.curve(), spec, lam), N0);
    }
    out.write_json("price.json", j);

    CsvTable t({"time_years", "mean_notional_ccy", "envelope_notional_ccy", "implied_cpr_dec"});
    for (std::size_t i = 0; i < avg.mean.size(); ++i) {
        const bool has_cpr = i >= 1 && i - 1 < avg.implied_cpr.size();
        t.add({num(sim.notionals.grid[i]), num(avg.mean[i]), num(env[i]),
               has_cpr ? num(avg.implied_cpr[i - 1]) : ""});
    }
    out.write_csv("average_notional.csv", t);

    const std::size_t n_export = std::min(ctx.settings().export_paths, sim.notionals.n_paths());
    if (n_export > 0) {
        CsvTable p({"path", "time_years", "notional_ccy", "kappa_bps", "exercise_flag"});
        for (std::size_t j2 = 0; j2 < n_export; ++j2)
            for (std::size_t i = 0; i < sim.notionals.grid.size(); ++i) {
                const auto r = static_cast<Eigen::Index>(j2), c = static_cast<Eigen::Index>(i);
                const bool decision = i >= 1 && i + 1 < sim.notionals.grid.size();
                p.add({std::to_string(j2), num(sim.notionals.grid[i]), num(sim.notionals.notional(r, c)),
                       decision ? num(sim.notionals.kappa(r, c) * 1e4) : "",
                       decision ? num(sim.notionals.exercise(r, c)) : ""});
            }
        out.write_csv("notional_paths.csv", p);
    }
    log << to_string(spec.kind) << " " << sc.cpr.name() << ": " << num(to_bps(sim.ias.value, N0)) << " bps (stderr "
        << num(to_bps(sim.ias.std_error, N0)) << ")\n";
}

void cmd_hedge(Context& ctx, OutputDir& out, std::ostream& log) {
    ctx.force_zero_zeta();
    const Simulation sim(ctx.scenario(), ctx.model());
    const double N0 = sim.scenario.mortgage.notional;
    const auto set = build_hedges(ctx, sim, ctx.settings().strategies);

    Json j;
    j["scenario"] = ctx.scenario_json(sim.scenario);
    j["hw"] = hw_json(sim.model.params());
    j["ias"] = {{"value_bps", to_bps(sim.ias.value, N0)}, {"stderr_bps", to_bps(sim.ias.std_error, N0)}};
    j["allow_short"] = !ctx.settings().no_short;

    std::vector<std::string> err_header{"k", "time_years", "ias_bps"};
    std::vector<HedgeErrorProfile> profiles;
    CsvTable costs({"strategy", "swaption", "weight_per_notional", "unit_price_bps", "cost_bps"});
    Json strategies = Json::array();
    for (const auto& h : set.hedges) {
        const auto name = to_string(h.strategy);
        const auto pv = price_portfolio(h.portfolio, sim.model);
        auto prof = hedge_error_profile(sim.model, sim.scenario, sim.paths, sim.notionals, h.portfolio);
        Json s;
        s["name"] = name;
        s["weights"] = weights_json(h.portfolio.swaptions, N0);
        s["swap_value_bps"] = to_bps(pv.swap_value, N0);
        s["swaption_cost_bps"] = to_bps(pv.swaption_cost, N0);
        s["value_bps"] = to_bps(pv.value, N0);
        s["price_error_bps"] = to_bps(pv.value - sim.ias.value, N0);
        s["notional_mismatch_per_notional2"] = notional_mismatch(sim.notionals, h.portfolio) / (N0 * N0);
        if (h.fit) {
            s["rank"] = h.fit->rank;
            Json nulls = Json::array();
            for (const auto& c : h.fit->null_cells) nulls.push_back(cell_label(c));
            s["null_cells"] = nulls;
        }
        Json rows = Json::array();
        for (const auto& r : pv.rows) {
            rows.push_back({{"swaption", cell_label(r.cell)}, {"cost_bps", to_bps(r.cost, N0)}});
            costs.add({name, cell_label(r.cell), num(r.weight / N0), num(r.unit_price * 1e4),
                       num(to_bps(r.cost, N0))});
        }
        s["costs"] = rows;
        strategies.push_back(s);
        err_header.push_back(name + "_value_bps");
        err_header.push_back(name + "_error_bps");
        profiles.push_back(std::move(prof));
        log << name << ": cost " << num(to_bps(pv.swaption_cost, N0)) << " bps, value "
            << num(to_bps(pv.value, N0)) << " bps\n";
    }
    j["strategies"] = strategies;

    if (set.gamma) {
        const auto& g = *set.gamma;
        j["gamma"] = {{"l2_error_value_weights", g.error_value_weights / N0},
                      {"l2_error_gamma_weights", g.error_gamma_weights / N0},
                      {"l2_error_averaged", g.error_averaged / N0},
                      {"rank", g.fit.rank},
                      {"units", "per unit notional per 1bp^2"}};
        CsvTable gt({"bucket", "gamma_ias_ccy_per_bp2", "gamma_ias_stderr_ccy_per_bp2", "gamma_swap_leg_ccy_per_bp2"});
        for (Eigen::Index b = 0; b < g.greeks.gamma.values.rows(); ++b)
            gt.add({g.greeks.gamma.buckets[static_cast<std::size_t>(b)], num(g.greeks.gamma.values(b, 0)),
                    num(g.greeks.gamma.std_errors(b, 0)), num(g.greeks.gamma.values(b, 1))});
        out.write_csv("gamma_profile.csv", gt);
    }
    out.write_json("hedge.json", j);
    out.write_csv("hedge_costs.csv", costs);

    CsvTable et(err_header);
    const std::size_t M = profiles.empty() ? 0 : profiles.front().ias.size();
    for (std::size_t k = 0; k < M; ++k) {
        std::vector<std::string> row{std::to_string(k), num(sim.notionals.grid[k]),
                                     num(to_bps(profiles.front().ias[k], N0))};
        for (const auto& p : profiles) {
            row.push_back(num(to_bps(p.portfolio[k], N0)));
            row.push_back(num(to_bps(p.error[k], N0)));
        }
        et.add(row);
    }
    out.write_csv("hedge_error.csv", et);
}

void cmd_greeks(Context& ctx, OutputDir& out, std::ostream& log) {
    ctx.force_zero_zeta();
    auto& s = ctx.settings();
    const Simulation sim(ctx.scenario(), ctx.model());
    const double per_mm = 1e6 / sim.scenario.mortgage.notional;
    const auto set = build_hedges(ctx, sim, s.strategies);

    std::vector<HedgePortfolio> portfolios;
    std::vector<std::string> names{"ias"};
    for (const auto& h : set.hedges) {
        portfolios.push_back(h.portfolio);
        names.push_back(to_string(h.strategy));
    }
    const auto ias = ias_sample_pricer(sim.scenario);
    Pricer pricer = [&](const HullWhite& model) {
        InstrumentSamples v = ias(model);
        for (const auto& p : portfolios) v.push_back({price_portfolio(p, model).value});
        return v;
    };
    const auto market = ctx.market();
    const auto rg = rate_greeks(market, pricer, names, s.bump);
    CsvTable t({"bucket", "instrument", "delta_ccy_per_bp", "delta_stderr_ccy_per_bp", "gamma_ccy_per_bp2",
                "gamma_stderr_ccy_per_bp2"});
    for (Eigen::Index b = 0; b < rg.delta.values.rows(); ++b)
        for (Eigen::Index c = 0; c < rg.delta.values.cols(); ++c)
            t.add({rg.delta.buckets[static_cast<std::size_t>(b)], names[static_cast<std::size_t>(c)],
                   num(rg.delta.values(b, c) * per_mm), num(rg.delta.std_errors(b, c) * per_mm),
                   num(rg.gamma.values(b, c) * per_mm), num(rg.gamma.std_errors(b, c) * per_mm)});
    out.write_csv("greeks.csv", t);

    Json j;
    j["scenario"] = ctx.scenario_json(sim.scenario);
    j["hw"] = hw_json(sim.model.params());
    j["bump"] = s.bump;
    j["delta_scheme"] = rg.delta.scheme;
    j["gamma_scheme"] = rg.gamma.scheme;
    j["curve_bump"] = "re-bootstrap from the bumped par quote, Hull-White parameters fixed";
    j["common_random_numbers"] = true;
    j["units"] = "currency per 1bp (gamma per 1bp^2) per 1MM notional";
    j["instruments"] = names;

    if (!s.no_vega) {
        if (s.vols.empty()) throw InputError("vega needs vols (or pass --no-vega)");
        const auto vg = vega_profile(market, pricer, names, s.bump);
        CsvTable v({"bucket", "instrument", "vega_ccy_per_bp", "vega_stderr_ccy_per_bp"});
        for (Eigen::Index b = 0; b < vg.values.rows(); ++b)
            for (Eigen::Index c = 0; c < vg.values.cols(); ++c)
                v.add({vg.buckets[static_cast<std::size_t>(b)], names[static_cast<std::size_t>(c)],
                       num(vg.values(b, c) * per_mm), num(vg.std_errors(b, c) * per_mm)});
        out.write_csv("vega.csv", v);
        j["vega_scheme"] = vg.scheme;
        j["vega_recalibration"] = "lambda and eta refitted to the bumped vol set";
    }
    out.write_json("greeks.json", j);
    log << "greeks for " << names.size() << " instruments over " << rg.delta.buckets.size() << " buckets\n";
}

void cmd_report(Context& ctx, OutputDir& out, std::ostream& log) {
    auto& s = ctx.settings();
    const std::string& which = s.report;
    const auto kinds = {MortgageKind::Bullet, MortgageKind::Annuity};

    if (which == "table1") {
        const HullWhite model = ctx.model();
        const CprModel rational(RationalCpr{s.lambda_max, s.epsilon_star});
        const CprModel sigmoid = CprModel(LogisticCpr{{s.alpha.at(0), s.alpha.at(1), s.alpha.at(2), s.alpha.at(3)}});
        CsvTable t({"mortgage_type", "maturity_years", "rate_k_bps", "cpr_model", "price_bps", "stderr_bps"});
        Json rows = Json::array();
        for (auto kind : kinds)
            for (const auto* cpr : {&rational, &sigmoid}) {
                const auto sc = ctx.scenario(kind, *cpr);
                const auto p = price_ias_mc(model, sc);
                const double N0 = sc.mortgage.notional;
                const std::string label = cpr == &rational ? "full-rational" : "sigmoid";
                t.add({to_string(kind), std::to_string(sc.mortgage.maturity_years), num(sc.mortgage.rate * 1e4),
                       label, num(to_bps(p.value, N0)), num(to_bps(p.std_error, N0))});
                rows.push_back({{"mortgage_type", to_string(kind)},
                                {"cpr_model", label},
                                {"cpr", cpr->describe()},
                                {"rate_k_bps", sc.mortgage.rate * 1e4},
                                {"price_bps", to_bps(p.value, N0)},
                                {"stderr_bps", to_bps(p.std_error, N0)}});
                log << to_string(kind) << " " << label << ": " << num(to_bps(p.value, N0)) << " bps\n";
            }
        out.write_csv("table1.csv", t);
        out.write_json("table1.json", {{"hw", hw_json(model.params())}, {"rows", rows}});
    } else if (which == "table3") {
        ctx.force_zero_zeta();
        const HullWhite model = ctx.model();
        const int M = s.maturity;
        std::vector<std::string> header{"mortgage_type"};
        for (const auto& c : diagonal_cells(M)) header.push_back(cell_label(c) + "_bps");
        header.push_back("total_bps");
        CsvTable t(header);
        for (auto kind : kinds) {
            const Simulation sim(ctx.scenario(kind, ctx.cpr()), model);
            const auto set = build_hedges(ctx, sim, {"diag9"});
            const auto pv = price_portfolio(set.hedges.front().portfolio, model);
            const double N0 = sim.scenario.mortgage.notional;
            std::vector<std::string> row{to_string(kind)};
            for (const auto& r : pv.rows) row.push_back(num(to_bps(r.cost, N0)));
            row.push_back(num(to_bps(pv.swaption_cost, N0)));
            t.add(row);
            log << to_string(kind) << " total " << num(to_bps(pv.swaption_cost, N0)) << " bps\n";
        }
        out.write_csv("table3.csv", t);
    } else if (which == "table5") {
        const auto quotes = ctx.calibration_quotes();
        const auto cal = ctx.calibration();
        out.write_csv("table5.csv", calibration_table(quotes, cal));
        out.write_json("table5.json", {{"params", hw_json(cal.params)}, {"objective_bps2", cal.objective}});
        log << "lambda = " << num(cal.params.lambda) << ", eta = " << num(cal.params.eta) << "\n";
    } else if (which == "fig9") {
        ctx.force_zero_zeta();
        const Simulation sim(ctx.scenario(), ctx.model());
        const double N0 = sim.scenario.mortgage.notional;
        const std::vector<std::string> names{"linear", "diag9", "full", "single-5y5y"};
        const auto set = build_hedges(ctx, sim, names);
        std::vector<std::string> header{"k", "time_years"};
        std::vector<HedgeErrorProfile> prof;
        for (const auto& h : set.hedges) {
            header.push_back(to_string(h.strategy) + "_error_bps");
            prof.push_back(hedge_error_profile(sim.model, sim.scenario, sim.paths, sim.notionals, h.portfolio));
        }
        CsvTable t(header);
        for (std::size_t k = 0; k < prof.front().error.size(); ++k) {
            std::vector<std::string> row{std::to_string(k), num(sim.notionals.grid[k])};
            for (const auto& p : prof) row.push_back(num(to_bps(p.error[k], N0)));
            t.add(row);
        }
        out.write_csv("fig9.csv", t);
    } else if (which == "paths") {
        ctx.force_zero_zeta();
        const HullWhite model = ctx.model();
        const CprModel rational(RationalCpr{s.lambda_max, s.epsilon_star});
        const CprModel sigmoid = CprModel(LogisticCpr{{s.alpha.at(0), s.alpha.at(1), s.alpha.at(2), s.alpha.at(3)}});
        const std::size_t n_export = s.export_paths > 0 ? s.export_paths : 50;
        CsvTable t({"mortgage_type", "cpr_model", "path", "time_years", "notional_ias_ccy",
                    "notional_portfolio_ccy", "notional_average_ccy", "notional_envelope_ccy"});
        for (auto kind : kinds)
            for (const auto* cpr : {&rational, &sigmoid}) {
                const Simulation sim(ctx.scenario(kind, *cpr), model);
                const auto set = build_hedges(ctx, sim, {"diag9"});
                const auto& pf = set.hedges.front().portfolio;
                const auto avg = average_notional(sim.notionals, sim.scenario.mortgage);
                const auto env = upper_envelope(sim.notionals);
                const std::string label = cpr == &rational ? "full-rational" : "sigmoid";
                const std::size_t n = std::min(n_export, sim.notionals.n_paths());
                const int M = sim.scenario.mortgage.maturity_years;
                for (std::size_t j = 0; j < n; ++j)
                    for (int k = 0; k <= M; ++k)
                        t.add({to_string(kind), label, std::to_string(j), num(k),
                               num(sim.notionals.notional(static_cast<Eigen::Index>(j), k)),
                               num(k < M ? portfolio_notional(sim.notionals, pf, k, j) : 0.0),
                               num(avg.mean[static_cast<std::size_t>(k)]), num(env[static_cast<std::size_t>(k)])});
            }
        out.write_csv("paths.csv", t);
    } else {
        throw InputError("unknown report '" + which + "' (table1|table3|table5|fig9|paths)");
    }
}

}  // namespace prepay::cli
