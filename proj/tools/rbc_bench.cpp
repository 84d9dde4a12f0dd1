// Benchmark and verification driver: runs one benchmark configuration on the
// in-process fabric and prints or writes the CSV records.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "harness/harness.hpp"

namespace {

template <class E>
CLI::Option* add_enum(CLI::App& app, const std::string& flag, E& target, const std::map<std::string, E>& names,
                      const std::string& help) {
    return app.add_option(flag, target, help)->transform(CLI::CheckedTransformer(names, CLI::ignore_case));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range-based communicator and Janus Quicksort benchmarks"};

    std::string bench = "sort";
    int p = 8;
    std::int64_t n_per_p = 1;
    rbc::CommMode mode = rbc::CommMode::ContextScoped;
    jquick::Schedule schedule = jquick::Schedule::Cascaded;
    harness::SplitImpl impl = harness::SplitImpl::Range;
    harness::SplitShape shape = harness::SplitShape::Halves;
    harness::CollectiveKind op = harness::CollectiveKind::Bcast;
    harness::CollectiveScope scope = harness::CollectiveScope::Full;
    jquick::PivotMode pivot = jquick::PivotMode::SampleMedian;
    int reps = 0;
    std::uint64_t seed = 1;
    std::string csv;

    app.add_option("--bench", bench, "split, collective or sort")
        ->check(CLI::IsMember({"split", "collective", "sort"}));
    app.add_option("--p", p, "number of simulated ranks")->check(CLI::Range(1, 4096));
    app.add_option("--n-per-p", n_per_p, "elements per rank")->check(CLI::NonNegativeNumber);
    add_enum(app, "--mode", mode, {{"tag", rbc::CommMode::TagScoped}, {"ctx", rbc::CommMode::ContextScoped}},
             "communicator isolation");
    add_enum(app, "--schedule", schedule,
             {{"cascaded", jquick::Schedule::Cascaded}, {"alternating", jquick::Schedule::Alternating}},
             "creation order of overlapping groups");
    add_enum(app, "--impl", impl, {{"range", harness::SplitImpl::Range}, {"group", harness::SplitImpl::Group}},
             "local range split or leader-based group creation");
    add_enum(app, "--split", shape, {{"halves", harness::SplitShape::Halves}, {"chain", harness::SplitShape::Chain}},
             "split benchmark shape");
    add_enum(app, "--op", op,
             {{"bcast", harness::CollectiveKind::Bcast},
              {"reduce", harness::CollectiveKind::Reduce},
              {"scan", harness::CollectiveKind::Scan},
              {"gatherv", harness::CollectiveKind::Gatherv},
              {"barrier", harness::CollectiveKind::Barrier}},
             "collective operation");
    add_enum(app, "--scope", scope, {{"full", harness::CollectiveScope::Full}, {"half", harness::CollectiveScope::Half}},
             "collective on all ranks or on a split-off half");
    add_enum(app, "--pivot", pivot, {{"single", jquick::PivotMode::Single}, {"sample", jquick::PivotMode::SampleMedian}},
             "pivot selection");
    app.add_option("--reps", reps, "repetitions (default 5, or 3 for sorts with n/p > 2^16)");
    app.add_option("--seed", seed, "input and pivot seed");
    app.add_option("--csv", csv, "write records to this file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    if (reps <= 0)
        reps = bench == "sort" && n_per_p > (1 << 16) ? 3 : 5;

    harness::BenchOutcome outcome;
    try {
        if (bench == "split") {
            outcome = harness::bench_split({p, shape, impl, schedule, mode, reps});
        } else if (bench == "collective") {
            outcome = harness::bench_collective({p, op, n_per_p, scope, impl, mode, reps});
        } else {
            jquick::Config cfg;
            cfg.pivot = pivot;
            cfg.mode = mode;
            cfg.schedule = schedule;
            outcome = harness::bench_sort({p, n_per_p, cfg, reps, seed});
        }
        if (csv.empty())
            harness::write_csv(std::cout, outcome.records);
        else
            harness::emit_csv(outcome.records, csv);
    } catch (const std::exception& e) {
        std::cerr << "rbc_bench: " << e.what() << '\n';
        return 2;
    }

    for (const auto& problem : outcome.problems)
        std::cerr << "verification failed: " << problem << '\n';
    return outcome.ok ? 0 : 1;
}
