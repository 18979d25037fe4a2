#pragma once

#include <stdexcept>
#include <string>

namespace ainsim {

// Invalid argument values or malformed configuration (CLI exit code 2).
class parameter_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class config_error : public parameter_error {
  public:
    using parameter_error::parameter_error;
};

// Numeric failures (CLI exit code 3).
class numeric_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class singular_channel_error : public numeric_error {
  public:
    using numeric_error::numeric_error;
};

class degenerate_input_error : public numeric_error {
  public:
    using numeric_error::numeric_error;
};

class conditioning_error : public numeric_error {
  public:
    conditioning_error(const std::string& what, double condition_number)
        : numeric_error(what), condition_number(condition_number) {}

    double condition_number;
};

// Requested enumeration exceeds the hard-decision search budget.
class capacity_error : public numeric_error {
  public:
    using numeric_error::numeric_error;
};

}  // namespace ainsim
