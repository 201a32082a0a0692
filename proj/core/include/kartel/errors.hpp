#pragma once

#include <stdexcept>
#include <string>

namespace kartel {

/// Base for every error raised by the library. `is_data_error()` separates
/// bad inputs (files, ids, degenerate samples) from caller misuse; the CLI
/// maps the former to exit code 2 and the latter to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, bool data_error = false)
      : std::runtime_error(what), data_error_(data_error) {}
  bool is_data_error() const noexcept { return data_error_; }

 private:
  bool data_error_;
};

#define KARTEL_DEFINE_ERROR(Name, is_data)                          \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(what, is_data) {} \
  }

KARTEL_DEFINE_ERROR(InvalidArgument, false);
KARTEL_DEFINE_ERROR(ExceededMaxBids, false);
KARTEL_DEFINE_ERROR(InvalidMix, false);
KARTEL_DEFINE_ERROR(TooManyFeatures, false);
KARTEL_DEFINE_ERROR(EmptySeries, true);
KARTEL_DEFINE_ERROR(DegenerateData, true);
KARTEL_DEFINE_ERROR(DimensionMismatch, true);
KARTEL_DEFINE_ERROR(TooFewSamples, true);
KARTEL_DEFINE_ERROR(EmptyBackground, true);
KARTEL_DEFINE_ERROR(ParseError, true);
KARTEL_DEFINE_ERROR(NonMonotonePrices, true);
KARTEL_DEFINE_ERROR(SchemaVersionMismatch, true);
KARTEL_DEFINE_ERROR(NotFound, true);

#undef KARTEL_DEFINE_ERROR

}  // namespace kartel
