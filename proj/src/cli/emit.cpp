#include "iqho/cli.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace iqho::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) x = 0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_complex(cdouble z) {
  const double im = z.imag() == 0 ? 0.0 : z.imag();
  std::string s = format_double(z.real());
  if (std::signbit(im) && !std::isnan(im)) {
    s += "-" + format_double(-im);
  } else {
    s += "+" + format_double(im);
  }
  return s + "i";
}

namespace {

nlohmann::ordered_json number(double x) {
  // JSON has no inf/nan
  if (!std::isfinite(x)) return nullptr;
  return x == 0 ? 0.0 : x;
}

nlohmann::ordered_json complex_json(cdouble z) { return {{"re", number(z.real())}, {"im", number(z.imag())}}; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void emit_json(std::ostream& out, const RunResult& result) {
  nlohmann::ordered_json doc;
  doc["meta"] = result.meta;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : result.rows) {
    nlohmann::ordered_json j;
    j["quantity"] = r.quantity;
    j["params"] = r.params;
    j["closed_form"] = complex_json(r.closed_form);
    j["oracle"] = complex_json(r.oracle);
    j["abs_err"] = number(r.abs_err);
    j["rel_err"] = number(r.rel_err);
    j["tol"] = number(r.tol);
    j["check"] = check_name(r.check);
    j["pass"] = r.pass;
    rows.push_back(std::move(j));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << "\n";
}

void emit_csv(std::ostream& out, const RunResult& result) {
  // RFC 4180: CRLF line ends
  const char* eol = "\r\n";
  out << "quantity,params,closed_form,oracle,abs_err,rel_err,tol,check,pass" << eol;
  for (const auto& r : result.rows) {
    out << csv_field(r.quantity) << ',' << csv_field(r.params.dump()) << ',' << format_complex(r.closed_form) << ','
        << format_complex(r.oracle) << ',' << format_double(r.abs_err) << ',' << format_double(r.rel_err) << ','
        << format_double(r.tol) << ',' << check_name(r.check) << ',' << (r.pass ? "true" : "false") << eol;
  }
}

}  // namespace iqho::cli
