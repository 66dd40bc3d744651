#pragma once

// Verification records: one row per compared quantity.

#include "iqho/numeric.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace iqho {

enum class Check {
  Absolute,    // |closed - oracle| <= tol
  Relative,    // |closed - oracle| <= tol * |closed|
  UpperBound,  // |oracle| <= |closed| (1 + tol); closed holds the bound
  Predicate,   // pass decided by the caller; values are informative
};

struct ReportRow {
  std::string quantity;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  cdouble closed_form;
  cdouble oracle;
  double abs_err = 0;
  double rel_err = 0;
  double tol = 0;
  Check check = Check::Absolute;
  bool pass = false;
};

ReportRow make_row(std::string quantity, nlohmann::ordered_json params, cdouble closed_form, cdouble oracle,
                   double tol, Check check = Check::Absolute);

ReportRow predicate_row(std::string quantity, nlohmann::ordered_json params, cdouble expected, cdouble observed,
                        bool pass, double tol = 0);

std::string check_name(Check c);

struct Report {
  std::string title;
  std::vector<ReportRow> rows;

  void add(ReportRow row) { rows.push_back(std::move(row)); }
  void append(const Report& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
  bool all_pass() const;
  /// Largest abs_err over rows whose quantity matches (all rows when empty).
  double max_abs_err(const std::string& quantity = {}) const;
  const ReportRow* first_failure() const;
};

}  // namespace iqho
