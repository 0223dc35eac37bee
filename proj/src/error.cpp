#include "regnet/error.hpp"

namespace regnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid_input";
    case ErrorCode::Io: return "io";
    case ErrorCode::MissingCountry: return "missing_country";
    case ErrorCode::UnknownRegion: return "unknown_region";
    case ErrorCode::NegativeCount: return "negative_count";
    case ErrorCode::MergeCollision: return "merge_collision";
    case ErrorCode::TooFewCountries: return "too_few_countries";
    case ErrorCode::ZeroOutput: return "zero_output";
    case ErrorCode::ZeroRow: return "zero_row";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::EmptyNetwork: return "empty_network";
    case ErrorCode::TooManyNodes: return "too_many_nodes";
    case ErrorCode::NodeSetMismatch: return "node_set_mismatch";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

}  // namespace regnet
