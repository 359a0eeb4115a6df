#pragma once

#include <stdexcept>
#include <string>

namespace graphsent {

// Base for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: rejected before any real work starts. CLI maps these to exit code 1,
// everything else to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// textgraph
struct UnknownTokenError : ValidationError { using ValidationError::ValidationError; };
struct MixedGraphKindsError : ValidationError { using ValidationError::ValidationError; };
struct EmptyCorpusError : ValidationError { using ValidationError::ValidationError; };

// walks / embedding
struct InvalidDistanceError : ValidationError { using ValidationError::ValidationError; };
struct EmptyGraphError : ValidationError { using ValidationError::ValidationError; };
struct EmptyWalkCorpusError : ValidationError { using ValidationError::ValidationError; };
// Walk truncation signal: the current node has no successors. Not a configuration fault.
struct DeadEndError : Error { using Error::Error; };

// convnet
struct FilterTooWideError : ValidationError { using ValidationError::ValidationError; };
struct EmptyFeatureMapError : ValidationError { using ValidationError::ValidationError; };
struct DimensionMismatchError : ValidationError { using ValidationError::ValidationError; };
struct LabelOutOfRangeError : ValidationError { using ValidationError::ValidationError; };
struct EmptyDatasetError : ValidationError { using ValidationError::ValidationError; };
struct VocabMismatchError : ValidationError { using ValidationError::ValidationError; };

// eval
struct LengthMismatchError : ValidationError { using ValidationError::ValidationError; };
struct EmptyMatrixError : ValidationError { using ValidationError::ValidationError; };

// dataset / pipeline
struct FileNotFoundError : ValidationError { using ValidationError::ValidationError; };
struct NoValidRowsError : ValidationError { using ValidationError::ValidationError; };
struct UnknownLabelError : ValidationError { using ValidationError::ValidationError; };
struct ClassTooSmallError : ValidationError { using ValidationError::ValidationError; };
struct ConfigError : ValidationError { using ValidationError::ValidationError; };
struct ParseError : ValidationError { using ValidationError::ValidationError; };

// Runtime failure inside a pipeline stage; message carries the stage label.
struct PipelineStageError : Error {
  PipelineStageError(const std::string& stage, const std::string& what)
      : Error("stage '" + stage + "': " + what), stage_name(stage) {}
  std::string stage_name;
};

}  // namespace graphsent
