#include "pqlin/oracle.hpp"

#include <cstdint>
#include <set>

namespace pqlin {

namespace {

std::vector<std::uint64_t> predecessor_masks(const History& h, int cap) {
    int n = static_cast<int>(h.ops.size());
    if (n > cap || n > 63)
        throw CapExceeded("execution has " + std::to_string(n) + " operations, oracle cap is " + std::to_string(cap));
    std::vector<std::uint64_t> pred(n, 0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (h.hb(a, b)) pred[b] |= std::uint64_t{1} << a;
    return pred;
}

struct Enumerator {
    const std::vector<std::uint64_t>& pred;
    const std::function<bool(const Linearization&)>& visit;
    int n;
    Linearization cur;
    std::size_t count = 0;
    bool stop = false;

    void run(std::uint64_t placed) {
        if (static_cast<int>(cur.size()) == n) {
            ++count;
            if (!visit(cur)) stop = true;
            return;
        }
        for (int k = 0; k < n && !stop; ++k) {
            std::uint64_t bit = std::uint64_t{1} << k;
            if ((placed & bit) || (pred[k] & ~placed)) continue;
            cur.push_back(k);
            run(placed | bit);
            cur.pop_back();
        }
    }
};

struct Searcher {
    const History& h;
    const std::vector<std::uint64_t>& pred;
    int n;
    Linearization cur;
    std::set<std::pair<std::uint64_t, std::vector<std::vector<int>>>> dead_exact;

    SeqOp sym(int k) const {
        const Op& o = h.ops[k];
        if (o.is_put()) return SeqOp::put(o.value, o.priority);
        if (o.empty) return SeqOp::rm_empty(o.value);
        return SeqOp::rm(o.value);
    }

    bool run(std::uint64_t placed, const PQState& q) {
        if (static_cast<int>(cur.size()) == n) return true;
        auto key = std::make_pair(placed, q.per_priority);
        if (dead_exact.count(key)) return false;
        for (int k = 0; k < n; ++k) {
            std::uint64_t bit = std::uint64_t{1} << k;
            if ((placed & bit) || (pred[k] & ~placed)) continue;
            for (const auto& next : lts_successors(q, sym(k), *h.order)) {
                cur.push_back(k);
                if (run(placed | bit, next)) return true;
                cur.pop_back();
            }
        }
        dead_exact.insert(std::move(key));
        return false;
    }
};

}  // namespace

std::size_t enumerate_linearizations(const History& h, const std::function<bool(const Linearization&)>& visit,
                                     int cap) {
    auto pred = predecessor_masks(h, cap);
    Enumerator en{pred, visit, static_cast<int>(h.ops.size()), {}, 0, false};
    en.run(0);
    return en.count;
}

std::size_t count_linearizations(const History& h, int cap) {
    return enumerate_linearizations(h, [](const Linearization&) { return true; }, cap);
}

Word word_of(const History& h, const Linearization& lin) {
    Word w;
    w.reserve(lin.size());
    for (int k : lin) {
        const Op& o = h.ops[k];
        if (o.is_put()) w.push_back(SeqOp::put(o.value, o.priority));
        else if (o.empty) w.push_back(SeqOp::rm_empty(o.value));
        else w.push_back(SeqOp::rm(o.value));
    }
    return w;
}

OracleResult is_linearizable_bruteforce(const History& h, int cap) {
    auto pred = predecessor_masks(h, cap);
    Searcher s{h, pred, static_cast<int>(h.ops.size()), {}, {}};
    OracleResult r;
    if (s.run(0, PQState(h.order->size()))) {
        r.linearizable = true;
        r.witness = s.cur;
    }
    return r;
}

const char* branch_name(Branch g) {
    switch (g) {
        case Branch::EmptyRemove: return "EmptyRemove";
        case Branch::UnmatchedMaxPriority: return "UnmatchedMaxPriority";
        case Branch::MatchedMaxPriority: return "MatchedMaxPriority";
    }
    return "?";
}

namespace {

bool branch_seq(const Word& w, Branch g, int target, const PriorityOrder& order) {
    switch (g) {
        case Branch::EmptyRemove:
            for (int i = 0; i < static_cast<int>(w.size()); ++i)
                if (w[i].sym == SeqOp::RmEmpty && w[i].value == target) return empty_remove_seq(w, i);
            return false;
        case Branch::UnmatchedMaxPriority: return unmatched_max_priority_seq(w, target, order);
        case Branch::MatchedMaxPriority: return matched_max_priority_seq(w, target, order);
    }
    return false;
}

}  // namespace

bool branch_oracle(const History& h, Branch g, int target, int cap) {
    bool found = false;
    enumerate_linearizations(
        h,
        [&](const Linearization& lin) {
            if (branch_seq(word_of(h, lin), g, target, *h.order)) found = true;
            return !found;
        },
        cap);
    return found;
}

bool branch_oracle_any(const History& h, Branch g, int cap) {
    std::vector<int> targets;
    for (int v = 0; v < h.num_values(); ++v) {
        if (!h.by_value[v].present()) continue;
        bool token = h.value_empty[v];
        if ((g == Branch::EmptyRemove) == token) targets.push_back(v);
    }
    bool found = false;
    enumerate_linearizations(
        h,
        [&](const Linearization& lin) {
            Word w = word_of(h, lin);
            for (int a : targets)
                if (branch_seq(w, g, a, *h.order)) {
                    found = true;
                    break;
                }
            return !found;
        },
        cap);
    return found;
}

}  // namespace pqlin
