#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <thread>

#include "rbc/tag_registry.hpp"
#include "rbc/transport.hpp"
#include "rbc/types.hpp"

namespace rbc {

class Comm;

struct Status {
    /// Local rank of the sender in the communicator the operation ran on.
    int source = 0;
    Tag tag = 0;
    /// Payload size in bytes.
    std::size_t count = 0;
};

/// Outcome of one progress step of a request.
enum class Progress {
    Blocked,  ///< waiting for a message that has not arrived
    Advanced, ///< executed a state, more work may be runnable
    Done,
};

namespace detail {

/// State machine behind a Request. Progress happens only inside poll().
class RequestState {
public:
    RequestState(Fabric& fabric, BaseRank owner);
    RequestState(const RequestState&) = delete;
    RequestState& operator=(const RequestState&) = delete;
    virtual ~RequestState();

    /// Throws InvalidUse when called from a worker other than the creating one.
    Progress poll();

    bool done() const noexcept { return done_; }
    const std::optional<Status>& status() const noexcept { return status_; }
    int transitions() const noexcept { return transitions_; }
    Fabric& fabric() const noexcept { return *fabric_; }
    BaseRank owner() const noexcept { return owner_; }

    /// Registers this operation with the fabric's tag registry until completion.
    void track(const Comm& comm, Tag tag, const char* what);

protected:
    /// Called only while not done; must call complete() when finished.
    virtual Progress advance() = 0;
    void complete(std::optional<Status> status = std::nullopt);
    void count_transition() noexcept { ++transitions_; }

private:
    Fabric* fabric_;
    BaseRank owner_;
    std::thread::id thread_;
    bool done_ = false;
    int transitions_ = 0;
    std::optional<Status> status_;
    std::optional<TagRegistry::Token> token_;
};

} // namespace detail

/// Handle to a nonblocking operation. A default-constructed request is complete.
class Request {
public:
    Request() = default;
    explicit Request(std::shared_ptr<detail::RequestState> state) : state_(std::move(state)) {}

    bool valid() const noexcept { return state_ != nullptr; }
    bool done() const noexcept { return !state_ || state_->done(); }
    std::optional<Status> status() const { return state_ ? state_->status() : std::nullopt; }
    /// Number of states executed so far.
    int transitions() const noexcept { return state_ ? state_->transitions() : 0; }

    Progress poll() { return state_ ? state_->poll() : Progress::Done; }
    bool test() { return poll() == Progress::Done; }
    void wait();

    BaseRank owner() const;
    Fabric* fabric() const noexcept { return state_ ? &state_->fabric() : nullptr; }

protected:
    std::shared_ptr<detail::RequestState> state_;
};

inline bool test(Request& req) { return req.test(); }
inline void wait(Request& req) { req.wait(); }

/// Tests every request once; true if all are complete.
bool testall(std::span<Request> reqs);
/// Repeats testall until everything is complete, parking between unproductive passes.
void waitall(std::span<Request> reqs);

} // namespace rbc
