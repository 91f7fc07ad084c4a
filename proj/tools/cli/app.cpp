#include "app.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "prepay/errors.hpp"
#include "prepay/parallel.hpp"
#include "prepay/shortrate.hpp"

namespace prepay::cli {

namespace {

using Command = std::function<void(Context&, OutputDir&, std::ostream&)>;

void add_options(CLI::App& app, Settings& s) {
    app.add_option("--curve", s.curve, "Par swap quotes CSV")->capture_default_str();
    app.add_flag("--extrapolate", s.extrapolate, "Flat-forward extrapolation beyond the last pillar");
    app.add_option("--vols", s.vols, "Swaption normal vol matrix CSV (bps)");
    app.add_option("--instruments", s.instruments, "Calibration set: counterdiag10y or '1x10,5x5,...'")
        ->capture_default_str();
    app.add_option("--hw.lambda", s.hw_lambda, "Hull-White mean reversion (skips calibration)");
    app.add_option("--hw.eta", s.hw_eta, "Hull-White volatility (skips calibration)");

    app.add_option("--kind", s.kind, "bullet | annuity")->capture_default_str();
    app.add_option("--notional", s.notional, "Mortgage notional N0 (currency)")->capture_default_str();
    app.add_option("--rate", s.rate, "Mortgage rate K as a decimal, or 'atm'")->capture_default_str();
    app.add_option("--maturity", s.maturity, "Maturity in years")->capture_default_str();

    app.add_option("--cpr.model", s.cpr_model, "constant | rational | logistic")->capture_default_str();
    app.add_option("--cpr.lambda", s.cpr_lambda, "Constant CPR")->capture_default_str();
    app.add_option("--cpr.lambda_max", s.lambda_max, "Rational model CPR once triggered")->capture_default_str();
    app.add_option("--cpr.epsilon_star", s.epsilon_star, "Rational model incentive threshold")
        ->capture_default_str();
    app.add_option("--cpr.alpha", s.alpha, "Logistic parameters a1,a2,a3,a4")->delimiter(',')->expected(4);
    app.add_option("--zeta", s.zeta, "Mortgage spread over the swap rate (pricing only)")->capture_default_str();

    app.add_option("--paths", s.paths, "Monte Carlo paths")->capture_default_str();
    app.add_option("--seed", s.seed, "Random seed (required for simulation)");
    app.add_flag("--no-antithetic", s.no_antithetic, "Disable antithetic pairs");
    app.add_option("--bump", s.bump, "Greek bump size, decimal")->capture_default_str();

    app.add_option("--out", s.out, "Output directory (overrides PREPAY_OUT_DIR and output_dir)")
        ->configurable(false);
    app.add_option("--output_dir", s.output_dir, "Output directory from a config file");
    app.add_option("--threads", s.threads, "Worker threads (0 = PREPAY_THREADS or hardware)")
        ->configurable(false);
}

std::string output_directory(const Settings& s) {
    if (!s.out.empty()) return s.out;
    if (const char* env = std::getenv("PREPAY_OUT_DIR"); env && *env) return env;
    if (!s.output_dir.empty()) return s.output_dir;
    return "out";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Mortgage prepayment pricing and static hedging", "prepay"};
    app.set_config("--config", "", "INI config file with flat keys (e.g. cpr.model = logistic)");
    // Dotted keys are option names, not section paths.
    app.get_config_formatter_base()->parentSeparator('/');
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1, 1);
    app.fallthrough();
    add_options(app, s);

    std::map<CLI::App*, std::pair<std::string, Command>> commands;
    auto sub = [&](const std::string& name, const std::string& help, Command fn) {
        auto* c = app.add_subcommand(name, help);
        commands[c] = {name, std::move(fn)};
        return c;
    };
    sub("bootstrap", "Bootstrap the discount curve", cmd_bootstrap);
    sub("calibrate", "Calibrate Hull-White to swaption vols", cmd_calibrate);
    sub("schedule", "Constant-CPR amortization schedule (uses cpr.lambda)", cmd_schedule);
    auto* fit = sub("cpr-fit", "Bin loan data by incentive and fit the logistic CPR", cmd_cpr_fit);
    fit->add_option("--loans", s.loans, "Loan CSV: period,starting_balance,prepaid_amount,incentive");
    fit->add_option("--bins", s.bins, "Number of incentive bins")->capture_default_str();
    fit->add_option("--range", s.range, "Incentive range lo:hi (decimal)")->capture_default_str();
    fit->add_flag("--synthesize", s.synthesize, "Generate loans from cpr.alpha and seed, then fit");
    fit->add_option("--periods", s.periods, "Synthetic months")->capture_default_str();
    fit->add_option("--loans-per-period", s.loans_per_period, "Synthetic loans per month")->capture_default_str();
    auto* price = sub("price", "Monte Carlo IAS price", cmd_price);
    price->add_option("--export-paths", s.export_paths, "Write the first N notional paths");
    auto* hedge = sub("hedge", "Calibrate and evaluate static hedges", cmd_hedge);
    hedge->add_option("--strategy", s.strategies, "linear|diag9|single-5y5y|full|gamma|avg")
        ->delimiter(',')
        ->capture_default_str();
    hedge->add_flag("--no-short", s.no_short, "Restrict swaption weights to be non-negative");
    auto* greeks = sub("greeks", "Delta, Gamma and Vega of the IAS and its hedges", cmd_greeks);
    greeks->add_option("--strategy", s.strategies, "Hedge portfolios to include")->delimiter(',');
    greeks->add_flag("--no-short", s.no_short, "Non-negative swaption weights");
    greeks->add_flag("--no-vega", s.no_vega, "Skip the vol bumps");
    auto* report = sub("report", "Reproduce a table or figure data set", cmd_report);
    report->add_option("name", s.report, "table1 | table3 | table5 | fig9 | paths")->required();
    report->add_option("--export-paths", s.export_paths, "Paths per case for 'paths'");

    std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv_tail.begin(), argv_tail.end());
    try {
        app.parse(argv_tail);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    std::string name = "?";
    try {
        set_thread_count(s.threads);
        OutputDir dir(output_directory(s));
        for (const auto& [ptr, cmd] : commands) {
            if (!ptr->parsed()) continue;
            name = cmd.first;
            Context ctx(s, dir, err);
            cmd.second(ctx, dir, out);
            dir.finish(name, ctx.resolved());
        }
    } catch (const CalibrationError& e) {
        err << "prepay " << name << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "prepay " << name << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InputError& e) {
        err << "prepay " << name << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "prepay " << name << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "prepay " << name << ": " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace prepay::cli
