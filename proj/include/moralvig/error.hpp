#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace moralvig {

enum class ErrorCode {
  io_error,
  missing_file,
  malformed_header,
  malformed_row,
  empty_text,
  unknown_category,
  duplicate_id,
  no_vignettes,
  dataset_mismatch,
  invalid_polarity,
  empty_file,
  inconsistent_dim,
  non_numeric,
  duplicate_token,
  missing_category_block,
  undeclared_category,
  missing_column,
  out_of_range,
  missing_header,
  dim_mismatch,
  missing_vector,
  parse_misalignment,
  scheme_resource_mismatch,
  empty_class,
  k_too_large,
  non_finite,
  invalid_argument,
  missing_cell,
  invalid_config,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported through this type.
/// `line()` carries the 1-based row or line number for file-format errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace moralvig
