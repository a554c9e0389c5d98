#pragma once

#include <optional>
#include <set>
#include <vector>

#include "pqlin/model.hpp"

namespace pqlin {

struct SeqOp {
    enum Sym : std::uint8_t { Put, Rm, RmEmpty };
    Sym sym = Put;
    int value = -1;
    int priority = -1;  // Put only

    static SeqOp put(int v, int p) { return {Put, v, p}; }
    static SeqOp rm(int v) { return {Rm, v, -1}; }
    static SeqOp rm_empty(int token) { return {RmEmpty, token, -1}; }
    bool operator==(const SeqOp&) const = default;
};

using Word = std::vector<SeqOp>;

// Queue contents per priority id, oldest first.
struct PQState {
    std::vector<std::vector<int>> per_priority;

    explicit PQState(int priorities = 0) : per_priority(priorities) {}
    bool all_empty() const;
    bool operator==(const PQState&) const = default;
};

// All successors of q under op (several only when a value is queued at more
// than one priority, which needs a non-differentiated run). Empty = refusal.
std::vector<PQState> lts_successors(const PQState& q, const SeqOp& op, const PriorityOrder& order);
std::optional<PQState> lts_step(const PQState& q, const SeqOp& op, const PriorityOrder& order);
bool lts_member(const Word& w, const PriorityOrder& order);
bool lts_member(const History& h);  // throws Error when h is not sequential

// Operation word of a sequential history (calls in order).
Word to_word(const History& h);
History from_word(const Word& w, OrderPtr order, const std::vector<std::string>& value_names);

// Word predicates used by the recursive checker. Positions are indices into
// the word; a value is selected by id.
std::set<int> priorities(const Word& w);
std::set<int> unmatched_priorities(const Word& w);
bool matched_prec(const Word& w, int p, const PriorityOrder& order);
bool matched(const Word& w);
bool has_empty_removes(const Word& w);
bool has_unmatched_max_priority(const Word& w, const PriorityOrder& order);
bool empty_remove_seq(const Word& w, int pos);
bool unmatched_max_priority_seq(const Word& w, int x, const PriorityOrder& order);
bool matched_max_priority_seq(const Word& w, int x, const PriorityOrder& order);

Word erase_value(const Word& w, int v);
Word erase_position(const Word& w, int pos);

enum class SeqBranch { Empty, EmptyRemove, UnmatchedMax, MatchedMax };
SeqBranch select_branch(const Word& w, const PriorityOrder& order);
// Candidates of the active branch, earliest first: rm(empty) positions for
// EmptyRemove, value ids otherwise.
std::vector<int> branch_candidates(const Word& w, const PriorityOrder& order);

bool check_pq_seq(const Word& w, const PriorityOrder& order);
bool check_pq_seq(const History& h);  // throws Error unless sequential and differentiated
// Same recursion, but tries every candidate of each branch; used to confirm
// that the candidate order never matters.
bool check_pq_seq_any_choice(const Word& w, const PriorityOrder& order);

}  // namespace pqlin
