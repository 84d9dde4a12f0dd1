#include "rbc/collectives.hpp"

#include <utility>

#include "rbc/binomial_tree.hpp"
#include "rbc/errors.hpp"

namespace rbc::detail {

namespace {

enum class Shape { Bcast, Reduce, Scan, Barrier };

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
    return h ^ (h >> 33);
}

/// Debug checksum of (operation, root, position in the per-(context, tag) call sequence).
std::uint64_t schedule_check(const Comm& comm, Tag tag, CollectiveOp op, int root) {
    Fabric& fabric = comm.fabric();
    if (!fabric.options().schedule_check)
        return 0;
    std::uint64_t& seq = fabric.local(comm.me()).collective_sequence[{comm.context(), tag}];
    std::uint64_t h = mix(mix(mix(0, static_cast<std::uint64_t>(op)), static_cast<std::uint64_t>(root)), seq++);
    return h | 1;
}

const char* op_name(CollectiveOp op) {
    switch (op) {
    case CollectiveOp::Bcast: return "ibcast";
    case CollectiveOp::Reduce: return "ireduce";
    case CollectiveOp::Scan: return "iscan";
    case CollectiveOp::Exscan: return "iexscan";
    case CollectiveOp::Gather: return "igather";
    case CollectiveOp::Gatherv: return "igatherv";
    case CollectiveOp::Barrier: return "ibarrier";
    }
    return "collective";
}

/// Tree collective as a state machine: an optional up-sweep towards the root followed
/// by an optional down-sweep away from it. A state runs once all of its incoming
/// messages are present, so each call to advance() executes at most one state.
class TreeCollective final : public RequestState {
public:
    struct Setup {
        Shape shape = Shape::Bcast;
        CollectiveOp op = CollectiveOp::Bcast;
        int root = 0;
        Tag up_tag = 0;
        Tag down_tag = 0;
        Bytes own;
        ByteCombine combine;
        ByteSink sink;
        std::optional<Bytes> identity;
        bool exclusive = false;
    };

    TreeCollective(const Comm& comm, Setup setup)
        : RequestState(comm.fabric(), comm.me()), comm_(comm), s_(std::move(setup)) {
        if (!comm_.is_member())
            throw InvalidUse(std::string(op_name(s_.op)) + " called by non-member rank " + std::to_string(comm.me().id));
        if (s_.root < 0 || s_.root >= comm_.size())
            throw std::invalid_argument(std::string(op_name(s_.op)) + ": root outside the communicator");
        if (s_.up_tag < 0 || s_.down_tag < 0)
            throw std::invalid_argument("negative collective tag");
        check_ = schedule_check(comm_, s_.up_tag, s_.op, s_.root);
        node_ = tree_node(comm_.size(), s_.root, comm_.rank());
        track(comm_, s_.up_tag, op_name(s_.op));
    }

    void start() {
        count_transition();
        if (s_.shape == Shape::Bcast) {
            if (node_.parent < 0) {
                for (const TreeChild& c : node_.children)
                    post(c.rank, s_.down_tag, s_.own);
                complete();
            } else {
                parent_recv_ = MessageRecv(comm_, node_.parent, s_.down_tag, check_);
                stage_ = Stage::Down;
            }
            return;
        }
        child_recv_.reserve(node_.children.size());
        for (const TreeChild& c : node_.children)
            child_recv_.emplace_back(comm_, c.rank, s_.up_tag, check_);
        stage_ = Stage::Up;
        if (node_.children.empty())
            run_up();
    }

protected:
    Progress advance() override {
        if (stage_ == Stage::Up) {
            bool ready = true;
            for (MessageRecv& r : child_recv_)
                ready = r.try_complete() && ready;
            if (!ready)
                return Progress::Blocked;
            count_transition();
            run_up();
            return Progress::Advanced;
        }
        if (!parent_recv_.try_complete())
            return Progress::Blocked;
        count_transition();
        run_down(std::move(parent_recv_.payload()));
        return Progress::Advanced;
    }

private:
    enum class Stage { Up, Down };

    void post(int dst, Tag tag, std::span<const std::byte> payload) { post_send(comm_, dst, tag, payload, check_); }

    void run_up() {
        // Children were generated largest first; walking them backwards grows an
        // interval around this rank one adjacent block at a time.
        Bytes acc = s_.own;
        if (s_.shape == Shape::Scan)
            prefix_before_.assign(node_.children.size(), Bytes{});
        for (std::size_t k = node_.children.size(); k-- > 0;) {
            Bytes& part = child_recv_[k].payload();
            if (s_.shape == Shape::Scan)
                prefix_before_[k] = acc;
            if (s_.shape == Shape::Barrier)
                continue;
            if (node_.children[k].lo > node_.rank)
                acc = s_.combine(acc, part);
            else
                acc = s_.combine(part, acc);
        }
        child_recv_.clear();
        if (node_.parent >= 0)
            post(node_.parent, s_.up_tag, acc);

        if (s_.shape == Shape::Reduce) {
            if (node_.parent < 0 && s_.sink)
                s_.sink(std::move(acc));
            complete();
            return;
        }
        if (node_.parent < 0) {
            run_down(std::nullopt);
            return;
        }
        parent_recv_ = MessageRecv(comm_, node_.parent, s_.down_tag, check_);
        stage_ = Stage::Down;
    }

    void run_down(std::optional<Bytes> from_parent) {
        switch (s_.shape) {
        case Shape::Bcast:
            for (const TreeChild& c : node_.children)
                post(c.rank, s_.down_tag, *from_parent);
            if (s_.sink)
                s_.sink(std::move(*from_parent));
            break;
        case Shape::Barrier:
            for (const TreeChild& c : node_.children)
                post(c.rank, s_.down_tag, {});
            break;
        case Shape::Scan:
            for (std::size_t k = 0; k < node_.children.size(); ++k) {
                const Bytes out = from_parent ? s_.combine(*from_parent, prefix_before_[k]) : prefix_before_[k];
                post(node_.children[k].rank, s_.down_tag, out);
            }
            if (s_.sink) {
                if (s_.exclusive)
                    s_.sink(from_parent ? std::move(*from_parent) : std::move(*s_.identity));
                else
                    s_.sink(from_parent ? s_.combine(*from_parent, s_.own) : std::move(s_.own));
            }
            break;
        case Shape::Reduce:
            break;
        }
        complete();
    }

    Comm comm_;
    Setup s_;
    std::uint64_t check_ = 0;
    TreeNode node_;
    Stage stage_ = Stage::Up;
    std::vector<MessageRecv> child_recv_;
    MessageRecv parent_recv_;
    std::vector<Bytes> prefix_before_;
};

Request launch(const Comm& comm, TreeCollective::Setup setup) {
    auto state = std::make_shared<TreeCollective>(comm, std::move(setup));
    state->start();
    return Request(std::move(state));
}

} // namespace

Request start_bcast(const Comm& comm, int root, Bytes payload, ByteSink sink, Tag tag) {
    TreeCollective::Setup s;
    s.shape = Shape::Bcast;
    s.op = CollectiveOp::Bcast;
    s.root = root;
    s.up_tag = s.down_tag = tag;
    s.own = std::move(payload);
    s.sink = std::move(sink);
    return launch(comm, std::move(s));
}

Request start_reduce(const Comm& comm, int root, Bytes payload, ByteCombine combine, ByteSink sink, Tag tag,
                     CollectiveOp op) {
    TreeCollective::Setup s;
    s.shape = Shape::Reduce;
    s.op = op;
    s.root = root;
    s.up_tag = s.down_tag = tag;
    s.own = std::move(payload);
    s.combine = std::move(combine);
    s.sink = std::move(sink);
    return launch(comm, std::move(s));
}

Request start_scan(const Comm& comm, Bytes payload, ByteCombine combine, std::optional<Bytes> identity, ByteSink sink,
                   Tag tag, bool exclusive) {
    if (exclusive && !identity)
        throw std::invalid_argument("exscan requires an identity element");
    TreeCollective::Setup s;
    s.shape = Shape::Scan;
    s.op = exclusive ? CollectiveOp::Exscan : CollectiveOp::Scan;
    s.root = 0;
    s.up_tag = s.down_tag = tag;
    s.own = std::move(payload);
    s.combine = std::move(combine);
    s.sink = std::move(sink);
    s.identity = std::move(identity);
    s.exclusive = exclusive;
    return launch(comm, std::move(s));
}

Request start_barrier(const Comm& comm, Tag up_tag, Tag down_tag) {
    TreeCollective::Setup s;
    s.shape = Shape::Barrier;
    s.op = CollectiveOp::Barrier;
    s.root = 0;
    s.up_tag = up_tag;
    s.down_tag = down_tag;
    return launch(comm, std::move(s));
}

} // namespace rbc::detail
