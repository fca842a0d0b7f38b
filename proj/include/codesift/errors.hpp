#pragma once

#include <stdexcept>
#include <string>

namespace codesift {

// Every failure surfaced by the library derives from Error and carries a
// stable machine-readable code (used by the CLI and in report rows).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define CODESIFT_ERROR(Name)                                  \
  class Name : public Error {                                 \
   public:                                                    \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

// core model
CODESIFT_ERROR(WeightSumError);
CODESIFT_ERROR(NegativeWeightError);
CODESIFT_ERROR(EmptySchemeError);
CODESIFT_ERROR(InvalidValueError);

// syntax gate / filter
CODESIFT_ERROR(ParserUnavailableError);
CODESIFT_ERROR(TargetNotFoundError);
CODESIFT_ERROR(SpanOutOfRangeError);

// quality engine
CODESIFT_ERROR(UnknownFactorError);
CODESIFT_ERROR(SchemeMismatchError);
CODESIFT_ERROR(AnalyzerTimeout);
CODESIFT_ERROR(AnalyzerCrashed);
CODESIFT_ERROR(ReportParseError);

// ranker
CODESIFT_ERROR(AssessmentMismatchError);
CODESIFT_ERROR(EmptyRankError);

// repairer
CODESIFT_ERROR(NoFindingsError);
CODESIFT_ERROR(NoLinedFindingError);

// generation client
CODESIFT_ERROR(BackendUnavailable);
CODESIFT_ERROR(AuthMissing);
CODESIFT_ERROR(FixtureMiss);
CODESIFT_ERROR(TruncatedResponse);
CODESIFT_ERROR(DuplicateKeyError);
CODESIFT_ERROR(PreconditionError);
CODESIFT_ERROR(IoError);

// eval harness
CODESIFT_ERROR(MalformedRecord);
CODESIFT_ERROR(AlignmentError);
CODESIFT_ERROR(MissingLabelError);
CODESIFT_ERROR(IllegalLabelError);
CODESIFT_ERROR(LengthMismatchError);
CODESIFT_ERROR(DegenerateSampleError);

// configuration
CODESIFT_ERROR(ConfigError);

#undef CODESIFT_ERROR

}  // namespace codesift
