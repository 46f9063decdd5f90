#pragma once

#include <stdexcept>
#include <string>

namespace afrp {

// Input or validation problem attributable to the caller (bad file, bad
// parameter). The CLI maps these to exit code 1.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : input_error {
  using input_error::input_error;
};

struct io_error : input_error {
  using input_error::input_error;
};

}  // namespace afrp
