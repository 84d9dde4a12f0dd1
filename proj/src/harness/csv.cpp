#include <fstream>
#include <sstream>
#include <stdexcept>

#include "harness/harness.hpp"

namespace harness {

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
    os << kCsvHeader << '\n';
    for (const BenchRecord& r : records)
        os << r.bench << ',' << r.p << ',' << r.n_per_p << ',' << r.mode << ',' << r.repetition << ',' << r.wall_ns
           << ',' << r.messages << ',' << r.bytes << ',' << r.depth << ',' << r.rounds << '\n';
}

void emit_csv(const std::vector<BenchRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(out, records);
    out.flush();
    if (!out)
        throw std::runtime_error("write to " + path + " failed");
}

std::vector<BenchRecord> parse_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader)
        throw std::runtime_error("missing or unexpected CSV header");
    std::vector<BenchRecord> out;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::vector<std::string> f;
        std::string cell;
        while (std::getline(row, cell, ','))
            f.push_back(cell);
        if (f.size() != 10)
            throw std::runtime_error("CSV row with " + std::to_string(f.size()) + " fields: " + line);
        BenchRecord r;
        r.bench = f[0];
        r.p = std::stoi(f[1]);
        r.n_per_p = std::stoll(f[2]);
        r.mode = f[3];
        r.repetition = std::stoi(f[4]);
        r.wall_ns = std::stoll(f[5]);
        r.messages = std::stoull(f[6]);
        r.bytes = std::stoull(f[7]);
        r.depth = std::stoi(f[8]);
        r.rounds = std::stoull(f[9]);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace harness
