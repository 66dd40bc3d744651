#pragma once

// Command-line driver: configuration, the seven verification commands and
// the CSV / JSON emitters. tools/iqho.cpp is a thin wrapper around cli_main.

#include "iqho/pbops.hpp"
#include "iqho/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace iqho::cli {

enum class Command { VerifyAlgebra, Norms, Biortho, Coherent, Resolution, WeakLimit, Contour };
enum class Format { Json, Csv };

std::string command_name(Command c);
Command parse_command(const std::string& name);

/// An angle as written by the user plus its resolved value. "pi/2" and
/// "-pi/2" (exactly, up to spaces) select the critical regime.
struct ThetaSpec {
  std::string text;
  ThetaParams params = ThetaParams::angle(0.0, 1.0);
};

struct RunConfig {
  Command command = Command::VerifyAlgebra;
  double omega = 1.0;
  std::string theta;           // empty: command default grid
  std::string theta_schedule;  // "expr:j=a..b" or a comma list
  int n_max = 20;
  double tol = 1e-8;
  Format format = Format::Json;
  std::string out_path;  // empty: standard output
  std::uint64_t seed = 0;
  int workers = 1;
  int n = -1;  // contour and weak-limit degree; -1 picks the command default
  int m = -1;
};

/// Arithmetic on numbers, pi, + - * / ^, parentheses and named variables.
double evaluate_expression(const std::string& text, const std::map<std::string, double>& vars = {});

/// "pi/2-2^-j:j=1..12" or "0.1, 0.5, pi/3".
std::vector<std::string> expand_schedule(const std::string& text, std::vector<double>* values = nullptr);

ThetaSpec resolve_theta(const std::string& text, double omega);

/// Checks ranges and resolves angles; throws ConfigError (or the library's
/// RegimeError / DegreeTooLarge / ScheduleError) before any computation.
struct ResolvedConfig {
  RunConfig raw;
  std::vector<ThetaSpec> thetas;
  std::vector<double> schedule;
  int schedule_sign = 0;
};

ResolvedConfig resolve(const RunConfig& config);

struct RunResult {
  nlohmann::ordered_json meta;
  std::vector<ReportRow> rows;
  bool pass = true;
};

RunResult run(const ResolvedConfig& config);

void emit_json(std::ostream& out, const RunResult& result);
void emit_csv(std::ostream& out, const RunResult& result);

/// Shortest round-trip decimal form, '.' separator, independent of locale.
std::string format_double(double x);
/// "re+imi" / "re-imi".
std::string format_complex(cdouble z);

/// Parses argv, runs, writes the report. Returns 0 pass, 1 verification failure, 2 usage or config error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iqho::cli
