#pragma once

#include <stdexcept>

namespace dunesim {

/// A solver did not reach its tolerance and the caller asked for strict behavior.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dunesim
