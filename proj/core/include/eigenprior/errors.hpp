#pragma once

#include <stdexcept>
#include <string>

namespace eigenprior {

// Malformed or unusable input data (files, corpora, datasets).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (bad dimensions, out-of-range id).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define EIGENPRIOR_REQUIRE(cond, msg)                                   \
  do {                                                                  \
    if (!(cond)) throw ::eigenprior::ContractViolation(std::string(msg)); \
  } while (0)

}  // namespace eigenprior
