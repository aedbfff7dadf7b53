#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace collrf::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

enum class Suite { algebra, appendix, oracle, inference, all };

Suite suite_from_string(std::string_view name);

// Operator algebra and the weight/trace identity.
CheckResult check_operator_algebra();
CheckResult check_weight_trace_identity();

// Numbered acceptance checks.
CheckResult check_closed_form_equality();      // 1
CheckResult check_width_adjudication();     // 2
CheckResult check_steady_state();           // 3
CheckResult check_mollow_limits();          // 4
CheckResult check_oracle_convergence();     // 5
CheckResult check_secular_scaling();        // 6
CheckResult check_figure_peaks();           // 7
CheckResult check_sum_rule();               // 8
CheckResult check_inference_round_trip();   // 9
CheckResult check_peak_height_scaling();    // 10

/// Runs the acceptance check with the given number (1..10).
CheckResult run_criterion(int number);

std::vector<CheckResult> run_suite(Suite suite);

/// One line per check: `name: pass|fail: detail`.
std::string format_report(const std::vector<CheckResult>& results);

}  // namespace collrf::validation
