#ifndef BNF_ERRORS_HPP
#define BNF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bnf
{

// Root of every error thrown by the library. The CLI maps each subclass to
// one exit code, so new error classes need a matching entry there.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error
{
public:
    using Error::Error;
};

// Some λ·(α−β) vanishes inside the requested range.
class ResonanceError : public Error
{
public:
    using Error::Error;
};

class OrderExceedsCertification : public Error
{
public:
    using Error::Error;
};

class InvalidGeneratingFunction : public Error
{
public:
    using Error::Error;
};

class SingularSubstitution : public Error
{
public:
    using Error::Error;
};

class InvalidHamiltonian : public Error
{
public:
    using Error::Error;
};

class SearchBudgetExhausted : public Error
{
public:
    using Error::Error;
};

class TauTooSmall : public Error
{
public:
    using Error::Error;
};

class StageCertificateInvalid : public Error
{
public:
    using Error::Error;
};

class GrowthCheckFailed : public Error
{
public:
    using Error::Error;
};

// A stage needs a normalization order beyond the configured compute budget.
class OrderBudgetExceeded : public Error
{
public:
    using Error::Error;
};

class NonRealResidual : public Error
{
public:
    using Error::Error;
};

class HypothesisViolated : public Error
{
public:
    using Error::Error;
};

class SymmetryViolated : public Error
{
public:
    using Error::Error;
};

} // namespace bnf

#endif
