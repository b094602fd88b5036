#pragma once

#include <stdexcept>
#include <string>

namespace edsketch {

// Base class for every error raised by the library. The `kind` string is the
// stable error name used by the CLI and the tests (e.g. "ZeroInverse").
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define EDSKETCH_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what = "") : Error(#Name, what) {} \
    };

EDSKETCH_DEFINE_ERROR(ZeroInverse)
EDSKETCH_DEFINE_ERROR(DomainOverflow)
EDSKETCH_DEFINE_ERROR(MalformedEdgeSet)
EDSKETCH_DEFINE_ERROR(InputTooLong)
EDSKETCH_DEFINE_ERROR(ZeroValue)
EDSKETCH_DEFINE_ERROR(IndexOverflow)
EDSKETCH_DEFINE_ERROR(SketchMismatch)
EDSKETCH_DEFINE_ERROR(HypothesisViolated)
EDSKETCH_DEFINE_ERROR(ConstraintViolated)
EDSKETCH_DEFINE_ERROR(FieldTooSmall)
EDSKETCH_DEFINE_ERROR(EncodingOverflow)
EDSKETCH_DEFINE_ERROR(IncompatibleSketch)
EDSKETCH_DEFINE_ERROR(FormatError)

#undef EDSKETCH_DEFINE_ERROR

}  // namespace edsketch
