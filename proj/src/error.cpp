#include "linetrust/error.hpp"

namespace linetrust {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Identity: return "identity";
    case ErrorKind::MalformedExplanation: return "malformed-explanation";
    case ErrorKind::UnsupportedConstruct: return "unsupported-construct";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Import: return "import";
    case ErrorKind::DiffMismatch: return "diff-mismatch";
    case ErrorKind::UndefinedInput: return "undefined-input";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::DegenerateTraining: return "degenerate-training";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Adapter: return "adapter";
    case ErrorKind::UnknownEdge: return "unknown-edge";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::UndefinedGroundTruth: return "undefined-ground-truth";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace linetrust
