#pragma once

#include <stdexcept>
#include <string>

namespace confpi {

/// Input does not match the expected file layout (bad header, unparsable row).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input parsed but violates a data-quality rule (too many gaps, invalid panel).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was broken by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

#define CONFPI_REQUIRE(cond, msg)                   \
  do {                                              \
    if (!(cond)) throw ::confpi::ContractViolation(msg); \
  } while (0)

}  // namespace confpi
