#pragma once

#include <stdexcept>
#include <string>

namespace qecmag {

/// Invalid configuration, arguments, or probe/variant combinations.
/// The CLI maps this family to exit code 1.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure cannot produce a result for the given inputs.
/// The CLI maps this family to exit code 2.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field magnitude is zero, so direction cosines are undefined.
class degenerate_field_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

/// Matrix determinant below the relative guard; no finite inverse trace.
class singular_matrix_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

/// The protocol acquires no phase information at this operating point.
class no_information_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

/// Credible band and posterior ridge do not intersect (inconsistent data).
class empty_overlap_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

/// Requested simulation exceeds the exact-statevector qubit budget.
class size_limit_error : public validation_error {
 public:
  using validation_error::validation_error;
};

}  // namespace qecmag
