#include "whnc/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "whnc/errors.hpp"

namespace whnc {

const char* to_string(BlockingMode mode)
{
    return mode == BlockingMode::BufferAware ? "buffer-aware" : "conventional";
}

BlockingMode parse_blocking_mode(const std::string& text)
{
    if (text == "buffer-aware" || text == "aware")
        return BlockingMode::BufferAware;
    if (text == "conventional")
        return BlockingMode::Conventional;
    throw InvalidArgument("unknown blocking mode '" + text + "'");
}

std::size_t hops(double length, double buffer)
{
    if (!(buffer >= 1.0))
        throw InvalidArgument("hops: buffer must be >= 1 byte");
    if (!(length > 0.0))
        throw InvalidArgument("hops: length must be > 0");
    auto h = static_cast<std::size_t>(std::ceil(length / buffer));
    // Guard against length/buffer landing just above an integer.
    if (h > 1 && static_cast<double>(h - 1) * buffer >= length)
        --h;
    return std::max<std::size_t>(h, 1);
}

BlockingAnalyzer::BlockingAnalyzer(const Network& net, BlockingMode mode)
    : net_(&net), mode_(mode), links_(net.flows().size())
{
    for (std::size_t k = 0; k < net.flows().size(); ++k) {
        const Flow& f = net.flow(k);
        for (std::size_t h = 0; h < f.path.size(); ++h)
            for (LinkId id : net.hop_links(f, h))
                links_[k].push_back(id);
        std::sort(links_[k].begin(), links_[k].end());
    }
}

bool BlockingAnalyzer::shares_link(std::size_t i, std::size_t k) const
{
    const auto& a = links_[i];
    const auto& b = links_[k];
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib)
            return true;
        if (*ia < *ib)
            ++ia;
        else
            ++ib;
    }
    return false;
}

std::vector<std::size_t> BlockingAnalyzer::direct_set(std::size_t k) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < links_.size(); ++i)
        if (i != k && shares_link(i, k))
            out.push_back(i);
    return out;
}

Subpath BlockingAnalyzer::subpath(std::size_t i, std::size_t k) const
{
    if (i == k || !shares_link(i, k))
        throw DomainError("flow '" + net_->flow(i).id + "' does not directly block '" + net_->flow(k).id + "'");
    const Flow& fi = net_->flow(i);
    const Flow& fk = net_->flow(k);
    std::set<int> k_nodes;
    for (const Hop& h : fk.path)
        k_nodes.insert(h.router);

    std::size_t last = 0;
    for (std::size_t n = 0; n < fi.path.size(); ++n)
        if (k_nodes.count(fi.path[n].router))
            last = n;

    // Walk downstream until the input buffers crossed can hold the packet;
    // with a uniform buffer this stops after ceil(L / Buff) hops.
    const std::size_t end = fi.path.size() - 1;
    std::size_t divergence = last;
    double held = 0.0;
    while (held < fi.length && divergence < end) {
        ++divergence;
        const Hop& h = fi.path[divergence];
        held += net_->buffer_at(h.router, h.in_port);
    }
    return {i, last, divergence, held < fi.length};
}

Subpath BlockingAnalyzer::blocking_segment(std::size_t l, std::size_t k) const
{
    if (mode_ == BlockingMode::Conventional) {
        if (l == k || !shares_link(l, k))
            throw DomainError("flow '" + net_->flow(l).id + "' does not directly block '" + net_->flow(k).id + "'");
        return {l, 0, net_->flow(l).path.size() - 1, true};
    }
    return subpath(l, k);
}

std::map<std::size_t, Subpath> BlockingAnalyzer::map_db(std::size_t k) const
{
    std::map<std::size_t, Subpath> out;
    for (std::size_t l : direct_set(k))
        out.emplace(l, subpath(l, k));
    return out;
}

std::vector<LinkId> BlockingAnalyzer::segment_links(const Subpath& s) const
{
    const Flow& f = net_->flow(s.owner);
    std::vector<LinkId> out;
    std::size_t end = s.spills ? s.last + 1 : s.last;
    for (std::size_t n = s.first; n < end; ++n)
        out.push_back(net_->out_link(f.path[n].router, f.path[n].out_port));
    return out;
}

bool BlockingAnalyzer::crosses_segment(std::size_t i, const Subpath& s) const
{
    const auto& mine = links_[i];
    for (LinkId id : segment_links(s))
        if (std::binary_search(mine.begin(), mine.end(), id))
            return true;
    return false;
}

IndirectSet BlockingAnalyzer::indirect_within(std::size_t k, const std::vector<bool>& universe) const
{
    IndirectSet out;
    for (std::size_t l : direct_set(k))
        if (universe[l])
            out.direct.push_back(l);

    std::vector<Subpath> segments;
    segments.reserve(out.direct.size());
    for (std::size_t l : out.direct)
        segments.push_back(blocking_segment(l, k));

    for (std::size_t i = 0; i < universe.size(); ++i) {
        if (!universe[i] || i == k || std::binary_search(out.direct.begin(), out.direct.end(), i))
            continue;
        if (shares_link(i, k))
            continue;
        for (const Subpath& s : segments)
            if (crosses_segment(i, s))
                out.candidates[i].push_back(s);
        if (out.candidates.count(i))
            out.flows.push_back(i);
    }
    return out;
}

IndirectSet BlockingAnalyzer::indirect(std::size_t k) const
{
    return indirect_within(k, std::vector<bool>(links_.size(), true));
}

std::vector<std::size_t> BlockingAnalyzer::conventional_indirect_set(std::size_t k) const
{
    auto direct = direct_set(k);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < links_.size(); ++i) {
        if (i == k || std::binary_search(direct.begin(), direct.end(), i))
            continue;
        if (std::any_of(direct.begin(), direct.end(), [&](std::size_t l) { return shares_link(i, l); }))
            out.push_back(i);
    }
    return out;
}

FlowBlocking BlockingAnalyzer::report(std::size_t k) const
{
    FlowBlocking out;
    out.direct = direct_set(k);
    out.map_db = map_db(k);
    out.indirect = indirect(k);
    return out;
}

BlockingReport BlockingAnalyzer::report_all() const
{
    BlockingReport out;
    out.mode = mode_;
    out.buffer = net_->buffer();
    for (std::size_t k = 0; k < links_.size(); ++k)
        out.flows.push_back(report(k));
    return out;
}

} // namespace whnc
