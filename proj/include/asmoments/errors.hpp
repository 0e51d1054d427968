#pragma once
#include <stdexcept>
#include <string>

namespace asmoments {

struct RejectedParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConsistencyFailure : std::logic_error {
  using std::logic_error::logic_error;
};

struct DivisionByZero : std::domain_error {
  using std::domain_error::domain_error;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
  long long done;
  BudgetExceeded(const std::string& m, long long d) : std::runtime_error(m), done(d) {}
};

}  // namespace asmoments
