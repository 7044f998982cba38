#pragma once

#include <stdexcept>
#include <string>

namespace pqbbh {

/// Parameters or arguments outside the domain where a quantity is defined.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Name lookup against one of the function or schedule registries failed.
class UnknownNameError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace pqbbh
