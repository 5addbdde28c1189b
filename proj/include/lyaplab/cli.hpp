#pragma once

// Command-line front end. Exit codes: 0 success, 1 selftest failure,
// 2 validation refusal (bad arguments, relation check failure, numeric
// breakdown), 3 I/O failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace lyaplab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSelftest = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// The invariant suite behind `lyaplab selftest`. A nonzero `corruption`
// is added to one entry of every generator before the relation suite runs.
std::vector<SuiteResult> run_selftest(double corruption = 0.0);

// Polyline plot with axes; error bars when `yerr` is nonempty.
std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& yerr = {});

}  // namespace lyaplab::cli
