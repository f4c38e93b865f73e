#include "moralvig/error.hpp"

namespace moralvig {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::missing_file: return "missing_file";
    case ErrorCode::malformed_header: return "malformed_header";
    case ErrorCode::malformed_row: return "malformed_row";
    case ErrorCode::empty_text: return "empty_text";
    case ErrorCode::unknown_category: return "unknown_category";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::no_vignettes: return "no_vignettes";
    case ErrorCode::dataset_mismatch: return "dataset_mismatch";
    case ErrorCode::invalid_polarity: return "invalid_polarity";
    case ErrorCode::empty_file: return "empty_file";
    case ErrorCode::inconsistent_dim: return "inconsistent_dim";
    case ErrorCode::non_numeric: return "non_numeric";
    case ErrorCode::duplicate_token: return "duplicate_token";
    case ErrorCode::missing_category_block: return "missing_category_block";
    case ErrorCode::undeclared_category: return "undeclared_category";
    case ErrorCode::missing_column: return "missing_column";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::missing_header: return "missing_header";
    case ErrorCode::dim_mismatch: return "dim_mismatch";
    case ErrorCode::missing_vector: return "missing_vector";
    case ErrorCode::parse_misalignment: return "parse_misalignment";
    case ErrorCode::scheme_resource_mismatch: return "scheme_resource_mismatch";
    case ErrorCode::empty_class: return "empty_class";
    case ErrorCode::k_too_large: return "k_too_large";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::missing_cell: return "missing_cell";
    case ErrorCode::invalid_config: return "invalid_config";
  }
  return "unknown";
}

namespace {

std::string with_line(const std::string& message, std::optional<std::size_t> line) {
  if (!line) return message;
  return "line " + std::to_string(*line) + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(with_line(message, line)), code_(code), line_(line) {}

}  // namespace moralvig
