// blocking.hpp - Direct and indirect blocking flow sets.
//
// Two flows block each other directly when they share a physical link (they
// contend for the same output port, or for the same injection link). In
// buffer-aware mode, a direct blocker l only propagates indirect blocking to
// the flow of interest k along the part of its path where its packet can
// still be stretched back over the shared link: from the last node l has in
// common with k, for as many hops as its packet needs to fit entirely into
// the downstream input buffers. Conventional mode uses l's whole path.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "whnc/model.hpp"

namespace whnc {

enum class BlockingMode { BufferAware, Conventional };

const char* to_string(BlockingMode mode);
BlockingMode parse_blocking_mode(const std::string& text);

// ceil(length / buffer): number of input buffers a packet spans.
std::size_t hops(double length, double buffer);

// Contiguous slice [first, last] (node indices) of the path of `owner`.
struct Subpath {
    std::size_t owner = 0;
    std::size_t first = 0;
    std::size_t last = 0;
    // The packet does not fit in the buffers after `first`, so a stall on
    // the out-link of `last` still reaches back into the shared buffer.
    bool spills = false;

    std::size_t nodes() const { return last - first + 1; }
    bool contains(const Subpath& other) const
    {
        return owner == other.owner && first <= other.first && other.last <= last;
    }
    friend bool operator==(const Subpath&, const Subpath&) = default;
};

struct IndirectSet {
    // Direct blockers of k drawn from the universe considered.
    std::vector<std::size_t> direct;
    // Indirect blockers, ascending.
    std::vector<std::size_t> flows;
    // For each indirect blocker, the blocking segments of every direct
    // blocker it intersects; the analysis picks the worst one.
    std::map<std::size_t, std::vector<Subpath>> candidates;
};

struct FlowBlocking {
    std::vector<std::size_t> direct;
    std::map<std::size_t, Subpath> map_db;
    IndirectSet indirect;
};

struct BlockingReport {
    BlockingMode mode = BlockingMode::BufferAware;
    double buffer = 0.0;
    std::vector<FlowBlocking> flows;
};

class BlockingAnalyzer {
public:
    BlockingAnalyzer(const Network& net, BlockingMode mode);

    BlockingMode mode() const { return mode_; }
    const Network& network() const { return *net_; }

    bool shares_link(std::size_t i, std::size_t k) const;

    // F_DB^k: every other flow sharing at least one link with k.
    std::vector<std::size_t> direct_set(std::size_t k) const;

    // Buffer-aware subpath of direct blocker i relative to k; throws
    // DomainError when i does not directly block k.
    Subpath subpath(std::size_t i, std::size_t k) const;

    // Part of l's path through which l can relay blocking to k: the subpath
    // in buffer-aware mode, l's full path in conventional mode.
    Subpath blocking_segment(std::size_t l, std::size_t k) const;

    std::map<std::size_t, Subpath> map_db(std::size_t k) const;

    // Links of a segment: those between consecutive nodes of the slice.
    std::vector<LinkId> segment_links(const Subpath& s) const;
    bool crosses_segment(std::size_t i, const Subpath& s) const;

    // Indirect blockers of k when only the flows flagged in `universe` are
    // considered: direct blockers come from the universe, indirect ones from
    // the universe minus those direct blockers.
    IndirectSet indirect_within(std::size_t k, const std::vector<bool>& universe) const;
    IndirectSet indirect(std::size_t k) const;

    // Buffer-unaware baseline: blocker paths taken in full, whatever the mode.
    std::vector<std::size_t> conventional_indirect_set(std::size_t k) const;

    FlowBlocking report(std::size_t k) const;
    BlockingReport report_all() const;

private:
    const Network* net_;
    BlockingMode mode_;
    std::vector<std::vector<LinkId>> links_;  // sorted, per flow
};

} // namespace whnc
