#pragma once

#include <stdexcept>
#include <string>

namespace teich {

// Failure categories map to process exit codes in the CLI:
// certificate failures -> 2, bad input -> 3.
enum class ErrorKind { certificate, input };

struct Error : std::runtime_error {
    Error(ErrorKind k, std::string type, const std::string& msg)
        : std::runtime_error(type + ": " + msg), kind(k), type(std::move(type)) {}
    ErrorKind kind;
    std::string type;
};

#define TEICH_DEFINE_ERROR(NAME, KIND)                              \
    struct NAME : Error {                                           \
        explicit NAME(const std::string& msg)                       \
            : Error(ErrorKind::KIND, #NAME, msg) {}                 \
    }

TEICH_DEFINE_ERROR(NotHyperbolic, certificate);
TEICH_DEFINE_ERROR(NetIncomplete, certificate);
TEICH_DEFINE_ERROR(DegenerateGeodesic, certificate);
TEICH_DEFINE_ERROR(ConstructionFailure, certificate);
TEICH_DEFINE_ERROR(UncoveredInterval, certificate);
TEICH_DEFINE_ERROR(ExpansionFailure, certificate);
TEICH_DEFINE_ERROR(OrderViolation, certificate);
TEICH_DEFINE_ERROR(CodeFailure, certificate);
TEICH_DEFINE_ERROR(NotIrreducible, certificate);

TEICH_DEFINE_ERROR(UnknownLabel, input);
TEICH_DEFINE_ERROR(EmptyWord, input);
TEICH_DEFINE_ERROR(Inadmissible, input);
TEICH_DEFINE_ERROR(CombinatoricsMismatch, input);
TEICH_DEFINE_ERROR(DepthMismatch, input);
TEICH_DEFINE_ERROR(InvalidM, input);
TEICH_DEFINE_ERROR(InvalidK, input);
TEICH_DEFINE_ERROR(BadInput, input);

#undef TEICH_DEFINE_ERROR

} // namespace teich
