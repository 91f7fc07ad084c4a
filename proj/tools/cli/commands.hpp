#pragma once

#include <ostream>

#include "output.hpp"
#include "settings.hpp"

namespace prepay::cli {

void cmd_bootstrap(Context& ctx, OutputDir& out, std::ostream& log);
void cmd_calibrate(Context& ctx, OutputDir& out, std::ostream& log);
void cmd_schedule(Context& ctx, OutputDir& out, std::ostream& log);
void cmd_cpr_fit(Context& ctx, OutputDir& out, std::ostream& log);
void cmd_price(Context& ctx, OutputDir& out, std::ostream& log);
void cmd_hedge(Context& ctx, OutputDir& out, std::ostream& log);
void cmd_greeks(Context& ctx, OutputDir& out, std::ostream& log);
void cmd_report(Context& ctx, OutputDir& out, std::ostream& log);

}  // namespace prepay::cli
