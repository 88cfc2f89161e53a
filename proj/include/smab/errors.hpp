#pragma once

#include <stdexcept>
#include <string>

namespace smab {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapacityError : std::logic_error {
    using std::logic_error::logic_error;
};

struct EndOfStreamError : std::logic_error {
    using std::logic_error::logic_error;
};

struct InvalidSlotError : std::logic_error {
    using std::logic_error::logic_error;
};

struct BudgetExhaustedError : std::logic_error {
    using std::logic_error::logic_error;
};

struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Policy called outside the (n, m) regime it is designed for.
struct RegimeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedMemoryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace smab
