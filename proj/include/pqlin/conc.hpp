#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pqlin/model.hpp"

namespace pqlin {

struct FifoViolation {
    int pattern = 0;          // 1..4
    std::vector<int> values;  // value ids; pattern 4 lists (a, b)
    bool operator==(const FifoViolation&) const = default;
};

// Per priority class, with rm(empty) ignored:
//   1  rm(b) <hb put(b)
//   2  rm(b) while b is never put
//   3  one put(b) and two or more rm(b)
//   4  put(a) <hb put(b), rm(b) present, and rm(b) <hb rm(a) or rm(a) absent
std::vector<FifoViolation> fifo_violations(const History& h);

struct ConstraintGraph {
    enum Reason : std::uint8_t {
        PutBeforePut,    // put(d) <hb put(x)
        PutBeforeRm,     // put(d) <hb rm(x), or put(d1) <hb rm(d2)
        RmBeforeRm,      // rm(x) <hb rm(d)
        NeverRemoved,    // rm(d) absent
        PutBeforeEmpty,  // put(d) <hb o
        EmptyBeforeRm,   // o <hb rm(d)
    };
    struct Edge {
        int from;
        int to;
        Reason reason;
        bool operator==(const Edge&) const = default;
    };
    std::vector<int> nodes;  // value ids (an rm(empty) node is its token id)
    std::vector<Edge> edges;

    bool has_edge(int from, int to) const;
    // Shortest cycle through node, as a node list starting at node.
    std::optional<std::vector<int>> cycle_through(int node) const;
};
const char* reason_name(ConstraintGraph::Reason r);

// The maximal-priority value x must be the only one at its priority; the
// history must have no rm(empty).
ConstraintGraph left_right_constraint(const History& h, int x);
bool check_matched_gt(const History& h, int x);

// The span during which a value is certainly stored: from the index of its
// put's return up to, but excluding, the index of its remove's call; to the
// end of the history when never removed.
struct Interval {
    int from;
    int to;  // exclusive
    bool contains(int i) const { return from <= i && i < to; }
};
std::optional<Interval> value_interval(const History& h, int v);

struct GapPointSet {
    int value = -1;
    std::vector<int> indices;  // sorted
    std::optional<int> rightmost() const {
        if (indices.empty()) return std::nullopt;
        return indices.back();
    }
};
GapPointSet gap_points(const History& h, int x);

struct PbEdge {
    enum Case : std::uint8_t { A, B, C };
    int from;
    int to;
    Case kind;
    bool operator==(const PbEdge&) const = default;
};
struct PbOrder {
    std::vector<int> values;  // maximal-priority values
    std::vector<PbEdge> edges;
    std::vector<std::vector<bool>> reach;  // transitive closure over positions in values
    int pos(int v) const;
    bool direct(int a, int b, PbEdge::Case c) const;
    bool before(int a, int b) const;  // a <pb* b
};
PbOrder pb_order(const History& h);

// Witness of a failed MatchedMaxPriority check with several maximal values:
// y is put before x and every gap-point of x precedes a call of y.
struct PbGap {
    int x = -1;
    int y = -1;
    std::optional<int> rightmost_gap;
    int bound = -1;  // the index the gap-point falls short of
};
std::optional<PbGap> find_pb_gap(const History& h);
bool check_matched_eq(const History& h);

ConstraintGraph empty_remove_constraint(const History& h, int token);
bool check_empty_remove(const History& h, int token);

// Holds whenever its preconditions hold; throws Error when they do not.
bool check_unmatched(const History& h);

struct Evidence {
    enum Tag : std::uint8_t { None, Fifo, Cycle, PbGapTag, EmptyCycle };
    Tag tag = None;
    std::vector<FifoViolation> fifo;
    std::vector<int> cycle;  // value ids; for EmptyCycle the first node is the token
    std::optional<PbGap> pb_gap;
    std::optional<int> priority;  // maximal priority the failing check ran at
    std::string note;
};
const char* evidence_tag(Evidence::Tag t);

struct NonRecResult {
    bool ok = true;
    Evidence evidence;
};
NonRecResult check_pq_conc_nonrec(const History& h);

struct CheckOptions {
    int proj_bound = 12;       // exhaustive projections up to this many values
    int rename_cap = 4096;     // de-renamings tried for non-differentiated input
};

struct Verdict {
    bool linearizable = true;
    bool complete = true;          // false: bound exceeded, only witness search ran
    Evidence evidence;
    std::vector<int> projection;   // value ids of the failing projection
    std::string message;
    // History the value ids above refer to: the input itself, or the
    // de-renamed copy when the input puts some value twice.
    std::shared_ptr<const History> subject;
};

Verdict check_execution(const History& h, const CheckOptions& opt = {});
// Re-checks a negative verdict's evidence against h.
bool evidence_holds(const History& h, const Verdict& v);

std::vector<std::string> value_names(const History& h, const std::vector<int>& ids);

}  // namespace pqlin
