#ifndef NSMIA_ERRORS_HPP
#define NSMIA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nsmia {

// Caller passed something outside an operation's contract. Everything the
// library throws derives from one of std::invalid_argument / std::runtime_error.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Input is well-formed but numerically degenerate (zero-norm column, zero
// diagonal entry).
struct DegenerateInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hermitian-ness or similar structural precondition violated.
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nsmia

#endif  // NSMIA_ERRORS_HPP
