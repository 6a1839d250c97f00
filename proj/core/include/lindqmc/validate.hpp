#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "lindqmc/oracle.hpp"

namespace lindqmc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  /// Weight used by the exhaustive-sum checks; empty means log_weight.
  LogWeightFn log_weight;
  std::uint64_t seed = 7;
};

/// Desk-scale invariant suite: decoupling identity, trace/determinant
/// identity, Liouvillian construction, exhaustive field sums against dense
/// Trotter products, Monte Carlo against the dense oracle, stabilisation
/// drift and two-state detailed balance.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out);

}  // namespace lindqmc
