#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqm
{

    // Bad arguments: conductor mismatch, non-prime characteristic, wrong dimension.
    class UsageError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Exact-arithmetic failures such as inverting zero.
    class ArithmeticError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // The requested object does not exist in the chosen field (e.g. sqrt outside Q(zeta_m)).
    class ConstructionError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // A closure or enumeration ran past its configured cap.
    class ResourceError : public std::runtime_error
    {
    public:
        ResourceError(const std::string &what, std::size_t partial_size)
            : std::runtime_error(what), partial_size_(partial_size) {}

        std::size_t partial_size() const noexcept { return partial_size_; }

    private:
        std::size_t partial_size_;
    };

    // A computed object violates an invariant that must hold if the construction is right.
    class IntegrityError : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

} // namespace cqm
