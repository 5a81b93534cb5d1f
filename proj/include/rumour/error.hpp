#pragma once

#include <stdexcept>
#include <string>

namespace rumour {

/// Base of every error raised by the library. `kind()` maps onto CLI exit codes.
class Error : public std::runtime_error {
public:
    enum class Kind { usage, path, parse, structure, validation, lookup, transport, protocol, dimension };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

#define RUMOUR_DEFINE_ERROR(Name, K)                                         \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(Kind::K, what) {}     \
    };

RUMOUR_DEFINE_ERROR(UsageError, usage)
RUMOUR_DEFINE_ERROR(PathError, path)
RUMOUR_DEFINE_ERROR(ParseError, parse)
RUMOUR_DEFINE_ERROR(StructureError, structure)
RUMOUR_DEFINE_ERROR(ValidationError, validation)
RUMOUR_DEFINE_ERROR(LookupError, lookup)
RUMOUR_DEFINE_ERROR(TransportError, transport)
RUMOUR_DEFINE_ERROR(ProtocolError, protocol)
RUMOUR_DEFINE_ERROR(DimensionError, dimension)

#undef RUMOUR_DEFINE_ERROR

}  // namespace rumour
