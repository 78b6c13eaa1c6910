#pragma once

#include <stdexcept>
#include <string>

namespace charp {

/// Input violates an operation's precondition (bad literal, wrong context, precision too low).
class PreconditionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// An enumeration would exceed the configured point budget.
class BudgetExceeded : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A reduction needs a field extension that the caller did not allow.
class ExtensionRequired : public PreconditionError {
   public:
    using PreconditionError::PreconditionError;
};

}  // namespace charp
