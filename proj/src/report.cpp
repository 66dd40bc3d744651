#include "iqho/report.hpp"

#include <algorithm>
#include <cmath>

namespace iqho {

ReportRow make_row(std::string quantity, nlohmann::ordered_json params, cdouble closed_form, cdouble oracle,
                   double tol, Check check) {
  ReportRow r;
  r.quantity = std::move(quantity);
  r.params = std::move(params);
  r.closed_form = closed_form;
  r.oracle = oracle;
  r.tol = tol;
  r.check = check;
  const double scale = std::abs(closed_form);
  if (check == Check::UpperBound) {
    r.abs_err = std::max(0.0, std::abs(oracle) - scale);
    r.rel_err = scale > 0 ? r.abs_err / scale : r.abs_err;
    r.pass = std::abs(oracle) <= scale * (1 + tol);
    return r;
  }
  r.abs_err = std::abs(closed_form - oracle);
  r.rel_err = scale > 0 ? r.abs_err / scale : r.abs_err;
  r.pass = check == Check::Relative ? r.rel_err <= tol : r.abs_err <= tol;
  // NaN compares false above, which is what we want
  return r;
}

ReportRow predicate_row(std::string quantity, nlohmann::ordered_json params, cdouble expected, cdouble observed,
                        bool pass, double tol) {
  ReportRow r;
  r.quantity = std::move(quantity);
  r.params = std::move(params);
  r.closed_form = expected;
  r.oracle = observed;
  r.abs_err = std::abs(expected - observed);
  r.rel_err = std::abs(expected) > 0 ? r.abs_err / std::abs(expected) : r.abs_err;
  r.tol = tol;
  r.check = Check::Predicate;
  r.pass = pass;
  return r;
}

std::string check_name(Check c) {
  switch (c) {
    case Check::Absolute: return "abs";
    case Check::Relative: return "rel";
    case Check::UpperBound: return "bound";
    case Check::Predicate: return "predicate";
  }
  return "abs";
}

bool Report::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

double Report::max_abs_err(const std::string& quantity) const {
  double m = 0;
  for (const auto& r : rows) {
    if (quantity.empty() || r.quantity == quantity) m = std::max(m, r.abs_err);
  }
  return m;
}

const ReportRow* Report::first_failure() const {
  for (const auto& r : rows) {
    if (!r.pass) return &r;
  }
  return nullptr;
}

}  // namespace iqho
