#include "iqho/cli.hpp"

#include "iqho/distrib.hpp"
#include "iqho/errors.hpp"
#include "iqho/specfun.hpp"

#include <cctype>
#include <cmath>
#include <regex>

namespace iqho::cli {

std::string command_name(Command c) {
  switch (c) {
    case Command::VerifyAlgebra: return "verify-algebra";
    case Command::Norms: return "norms";
    case Command::Biortho: return "biortho";
    case Command::Coherent: return "coherent";
    case Command::Resolution: return "resolution";
    case Command::WeakLimit: return "weak-limit";
    case Command::Contour: return "contour";
  }
  return "verify-algebra";
}

Command parse_command(const std::string& name) {
  for (auto c : {Command::VerifyAlgebra, Command::Norms, Command::Biortho, Command::Coherent, Command::Resolution,
                 Command::WeakLimit, Command::Contour}) {
    if (command_name(c) == name) return c;
  }
  throw ConfigError("unknown command '" + name + "'");
}

namespace {

// recursive descent: expr = term {(+|-) term}; term = unary {(*|/) unary};
// unary = (+|-) unary | power; power = atom [^ unary]
class Parser {
 public:
  Parser(const std::string& s, const std::map<std::string, double>& vars) : s_(s), vars_(vars) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("cannot parse expression '" + s_ + "': " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        const double d = unary();
        if (d == 0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  double power() {
    const double base = atom();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }
  double atom() {
    skip();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
      const std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "pi") return pi<double>();
      auto it = vars_.find(name);
      if (it == vars_.end()) fail("unknown name '" + name + "'");
      return it->second;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  const std::map<std::string, double>& vars_;
  std::size_t pos_ = 0;
};

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

}  // namespace

double evaluate_expression(const std::string& text, const std::map<std::string, double>& vars) {
  const double v = Parser(text, vars).parse();
  if (!std::isfinite(v)) throw ConfigError("expression '" + text + "' is not finite");
  return v;
}

std::vector<std::string> expand_schedule(const std::string& text, std::vector<double>* values) {
  static const std::regex ranged(R"(^\s*(.+?)\s*:\s*([A-Za-z_]\w*)\s*=\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$)");
  std::vector<std::string> labels;
  std::vector<double> vals;
  std::smatch m;
  if (std::regex_match(text, m, ranged)) {
    const std::string body = m[1];
    const std::string var = m[2];
    const int a = std::stoi(m[3]), b = std::stoi(m[4]);
    if (b < a) throw ConfigError("schedule range " + std::to_string(a) + ".." + std::to_string(b) + " is empty");
    if (b - a > 10000) throw ConfigError("schedule range too long");
    for (int j = a; j <= b; ++j) {
      vals.push_back(evaluate_expression(body, {{var, static_cast<double>(j)}}));
      labels.push_back(body + " @ " + var + "=" + std::to_string(j));
    }
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = text.find(',', start);
      const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (strip_spaces(item).empty()) throw ConfigError("empty entry in theta schedule '" + text + "'");
      vals.push_back(evaluate_expression(item));
      labels.push_back(strip_spaces(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (values) *values = vals;
  return labels;
}

ThetaSpec resolve_theta(const std::string& text, double omega) {
  const std::string t = strip_spaces(text);
  ThetaSpec spec;
  spec.text = t;
  if (t == "pi/2" || t == "+pi/2") {
    spec.params = ThetaParams::critical(1, omega);
  } else if (t == "-pi/2") {
    spec.params = ThetaParams::critical(-1, omega);
  } else {
    spec.params = ThetaParams::angle(evaluate_expression(t), omega);
  }
  spec.params.require_admissible();
  return spec;
}

ResolvedConfig resolve(const RunConfig& config) {
  ResolvedConfig rc;
  rc.raw = config;
  if (!(config.omega > 0) || !std::isfinite(config.omega)) throw ConfigError("--omega must be positive");
  if (config.n_max < 0) throw ConfigError("--nmax must be non-negative");
  if (!(config.tol > 0) || !std::isfinite(config.tol)) throw ConfigError("--tol must be positive");
  if (config.workers < 1) throw ConfigError("--workers must be at least 1");
  if (!config.theta.empty() && !config.theta_schedule.empty()) {
    throw ConfigError("--theta and --theta-schedule are exclusive");
  }
  // ladder checks use n_max + 1
  check_hermite_degree(config.n_max + 1);
  if (config.n >= 0) check_hermite_degree(config.n);
  if (config.m >= 0) check_hermite_degree(config.m);

  const bool weak = config.command == Command::WeakLimit;
  if (weak) {
    const std::string text = config.theta_schedule.empty() ? "pi/2-2^-j:j=1..12" : config.theta_schedule;
    rc.raw.theta_schedule = text;
    expand_schedule(text, &rc.schedule);
    rc.schedule_sign = rc.schedule.back() >= 0 ? 1 : -1;
    validate_schedule(rc.schedule_sign, rc.schedule);
    if (!config.theta.empty()) throw ConfigError("weak-limit takes --theta-schedule, not --theta");
    return rc;
  }
  std::vector<std::string> texts;
  if (!config.theta.empty()) {
    texts.push_back(config.theta);
  } else if (!config.theta_schedule.empty()) {
    std::vector<double> vals;
    expand_schedule(config.theta_schedule, &vals);
    for (double v : vals) rc.thetas.push_back({format_double(v), ThetaParams::angle(v, config.omega)});
    for (const auto& t : rc.thetas) t.params.require_admissible();
  } else {
    switch (config.command) {
      case Command::VerifyAlgebra: texts = {"-pi/2", "-1.4", "-0.9", "-0.3", "0", "0.3", "0.9", "1.4", "pi/2"}; break;
      case Command::Norms: texts = {"-1.4", "-0.9", "-0.3", "0.3", "0.9", "1.4"}; break;
      case Command::Biortho: texts = {"-1.4", "-0.9", "-0.3", "0.3", "0.9", "1.4"}; break;
      case Command::Coherent: texts = {"-pi/2", "0", "0.6", "1.0", "pi/2"}; break;
      case Command::Resolution: texts = {"-pi/2", "pi/2"}; break;
      case Command::Contour: texts = {"0.5", "1.0", "1.4"}; break;
      case Command::WeakLimit: break;
    }
  }
  for (const auto& t : texts) rc.thetas.push_back(resolve_theta(t, config.omega));
  if (config.command == Command::Norms || config.command == Command::Biortho || config.command == Command::Contour) {
    for (const auto& t : rc.thetas) t.params.require_square_integrable(command_name(config.command));
  }
  return rc;
}

}  // namespace iqho::cli
