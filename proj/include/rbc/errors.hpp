#pragma once

#include <stdexcept>
#include <string>

namespace rbc {

/// A receive buffer was smaller than the incoming payload.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was used outside its contract (foreign request, non-member caller).
class InvalidUse : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Peers disagreed about the shape of a protocol (schedule checksum, byte counts).
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every running rank is parked and no message can arrive any more.
class DeadlockError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The fabric was aborted because another rank failed.
class Aborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rbc
