#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace emm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// A non-fatal problem reported alongside a result (skipped feed item,
// unmapped character, missing model, ...).
struct Diagnostic {
  std::string where;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace emm
