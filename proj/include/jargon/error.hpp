#pragma once

#include <stdexcept>
#include <string>

namespace jargon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define JARGON_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(#Name ": " + what) {}        \
  }

JARGON_DEFINE_ERROR(ConfigError);
JARGON_DEFINE_ERROR(UnreadableInput);
JARGON_DEFINE_ERROR(MalformedRecord);
JARGON_DEFINE_ERROR(EmptyCorpus);
JARGON_DEFINE_ERROR(EmptyStore);
JARGON_DEFINE_ERROR(EmptyDataset);
JARGON_DEFINE_ERROR(SpanOutOfRange);
JARGON_DEFINE_ERROR(SequenceTooLong);
JARGON_DEFINE_ERROR(DimensionMismatch);
JARGON_DEFINE_ERROR(DegenerateDataset);
JARGON_DEFINE_ERROR(WordNotInSentence);
JARGON_DEFINE_ERROR(SentenceRejectedByFilter);
JARGON_DEFINE_ERROR(LengthMismatch);
JARGON_DEFINE_ERROR(CheckpointError);

#undef JARGON_DEFINE_ERROR

}  // namespace jargon
