#pragma once

#include <stdexcept>
#include <string>

namespace haxc {

/// Base class for all errors raised by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument values, malformed specs, broken invariants.
class validation_error : public error {
public:
    explicit validation_error(const std::string& what) : error(what) {}
};

/// The request is well-formed but outside what the library supports
/// (e.g. derivative order too high, unsupported family combination).
class capability_error : public error {
public:
    explicit capability_error(const std::string& what) : error(what) {}
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw validation_error(msg);
}

inline void require_capability(bool cond, const std::string& msg) {
    if (!cond) throw capability_error(msg);
}

} // namespace detail
} // namespace haxc
