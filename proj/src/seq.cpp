#include "pqlin/seq.hpp"

#include <algorithm>

namespace pqlin {

bool PQState::all_empty() const {
    for (const auto& s : per_priority)
        if (!s.empty()) return false;
    return true;
}

std::vector<PQState> lts_successors(const PQState& q, const SeqOp& op, const PriorityOrder& order) {
    std::vector<PQState> out;
    switch (op.sym) {
        case SeqOp::Put: {
            PQState n = q;
            if (static_cast<int>(n.per_priority.size()) < order.size()) n.per_priority.resize(order.size());
            n.per_priority[op.priority].push_back(op.value);
            out.push_back(std::move(n));
            break;
        }
        case SeqOp::RmEmpty:
            if (q.all_empty()) out.push_back(q);
            break;
        case SeqOp::Rm: {
            int n = static_cast<int>(q.per_priority.size());
            for (int p = 0; p < n; ++p) {
                const auto& s = q.per_priority[p];
                if (s.empty() || s.front() != op.value) continue;
                bool lower_empty = true;
                for (int r = 0; r < n && lower_empty; ++r)
                    if (order.less(r, p) && !q.per_priority[r].empty()) lower_empty = false;
                if (!lower_empty) continue;
                PQState m = q;
                m.per_priority[p].erase(m.per_priority[p].begin());
                out.push_back(std::move(m));
            }
            break;
        }
    }
    return out;
}

std::optional<PQState> lts_step(const PQState& q, const SeqOp& op, const PriorityOrder& order) {
    auto next = lts_successors(q, op, order);
    if (next.empty()) return std::nullopt;
    return next.front();
}

namespace {

bool member_from(const PQState& q, const Word& w, std::size_t i, const PriorityOrder& order) {
    if (i == w.size()) return true;
    auto next = lts_successors(q, w[i], order);
    if (next.size() == 1) return member_from(next.front(), w, i + 1, order);
    for (const auto& n : next)
        if (member_from(n, w, i + 1, order)) return true;
    return false;
}

}  // namespace

bool lts_member(const Word& w, const PriorityOrder& order) {
    return member_from(PQState(order.size()), w, 0, order);
}

Word to_word(const History& h) {
    Word w;
    w.reserve(h.ops.size());
    for (const auto& o : h.ops) {
        if (o.is_put()) w.push_back(SeqOp::put(o.value, o.priority));
        else if (o.empty) w.push_back(SeqOp::rm_empty(o.value));
        else w.push_back(SeqOp::rm(o.value));
    }
    return w;
}

bool lts_member(const History& h) {
    if (!is_sequential(h)) throw Error("lts_member needs a sequential execution");
    return lts_member(to_word(h), *h.order);
}

History from_word(const Word& w, OrderPtr order, const std::vector<std::string>& value_names) {
    std::vector<std::string> names = value_names;
    std::vector<bool> empties(names.size(), false);
    std::vector<Op> ops;
    for (std::size_t i = 0; i < w.size(); ++i) {
        Op o;
        o.id = "o" + std::to_string(i);
        o.method = w[i].sym == SeqOp::Put ? Method::Put : Method::Rm;
        o.value = w[i].value;
        o.priority = w[i].priority;
        o.empty = w[i].sym == SeqOp::RmEmpty;
        o.call = static_cast<int>(2 * i);
        o.ret = static_cast<int>(2 * i + 1);
        if (o.value >= static_cast<int>(names.size())) {
            names.resize(o.value + 1);
            empties.resize(o.value + 1, false);
        }
        if (names[o.value].empty()) names[o.value] = o.empty ? "e" + std::to_string(i) : "v" + std::to_string(o.value);
        if (o.empty) empties[o.value] = true;
        ops.push_back(o);
    }
    return make_history(std::move(order), std::move(names), std::move(empties), std::move(ops));
}

std::set<int> priorities(const Word& w) {
    std::set<int> out;
    for (const auto& o : w)
        if (o.sym == SeqOp::Put) out.insert(o.priority);
    return out;
}

namespace {

bool removed_in(const Word& w, int v) {
    for (const auto& o : w)
        if (o.sym == SeqOp::Rm && o.value == v) return true;
    return false;
}

bool occurs_in(const Word& w, std::size_t from, std::size_t to, int v) {
    for (std::size_t i = from; i < to; ++i)
        if (w[i].sym != SeqOp::RmEmpty && w[i].value == v) return true;
    return false;
}

// p is below some priority of the puts in w outside [skip_from, skip_to).
bool below_some(const Word& w, int p, const PriorityOrder& order, std::size_t skip_from, std::size_t skip_to) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i >= skip_from && i < skip_to) continue;
        if (w[i].sym == SeqOp::Put && order.less(p, w[i].priority)) return true;
    }
    return false;
}

}  // namespace

std::set<int> unmatched_priorities(const Word& w) {
    std::set<int> out;
    for (const auto& o : w)
        if (o.sym == SeqOp::Put && !removed_in(w, o.value)) out.insert(o.priority);
    return out;
}

bool matched_prec(const Word& w, int p, const PriorityOrder& order) {
    for (const auto& o : w)
        if (o.sym == SeqOp::Put && order.less(o.priority, p) && !removed_in(w, o.value)) return false;
    return true;
}

// Every value put in w is removed in w. Quantifying matched_prec over all
// priorities would leave the globally maximal ones unconstrained.
bool matched(const Word& w) {
    for (const auto& o : w)
        if (o.sym == SeqOp::Put && !removed_in(w, o.value)) return false;
    return true;
}

bool has_empty_removes(const Word& w) {
    return std::any_of(w.begin(), w.end(), [](const SeqOp& o) { return o.sym == SeqOp::RmEmpty; });
}

bool has_unmatched_max_priority(const Word& w, const PriorityOrder& order) {
    auto pr = priorities(w);
    auto um = unmatched_priorities(w);
    for (int p : um) {
        bool maximal = true;
        for (int q : pr)
            if (order.less(p, q)) maximal = false;
        if (maximal) return true;
    }
    return false;
}

bool empty_remove_seq(const Word& w, int pos) {
    if (pos < 0 || pos >= static_cast<int>(w.size()) || w[pos].sym != SeqOp::RmEmpty) return false;
    return matched(Word(w.begin(), w.begin() + pos));
}

namespace {

int put_position(const Word& w, int x) {
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i].sym == SeqOp::Put && w[i].value == x) return static_cast<int>(i);
    return -1;
}

}  // namespace

bool unmatched_max_priority_seq(const Word& w, int x, const PriorityOrder& order) {
    int i = put_position(w, x);
    if (i < 0) return false;
    std::size_t n = w.size();
    int p = w[i].priority;
    // x occurs only in its put: u and v do not mention it.
    if (occurs_in(w, 0, i, x) || occurs_in(w, i + 1, n, x)) return false;
    if (below_some(w, p, order, i, i + 1)) return false;
    for (std::size_t k = i + 1; k < n; ++k)
        if (w[k].sym == SeqOp::Put && w[k].priority == p) return false;
    return true;
}

bool matched_max_priority_seq(const Word& w, int x, const PriorityOrder& order) {
    int i = put_position(w, x);
    if (i < 0) return false;
    int n = static_cast<int>(w.size());
    int j = -1;
    for (int k = i + 1; k < n; ++k)
        if (w[k].sym == SeqOp::Rm && w[k].value == x) {
            j = k;
            break;
        }
    if (j < 0) return false;
    int p = w[i].priority;
    if (occurs_in(w, 0, i, x) || occurs_in(w, i + 1, j, x) || occurs_in(w, j + 1, n, x)) return false;
    Word rest;  // u.v.w without the two x operations
    Word uv;    // u.v
    for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        rest.push_back(w[k]);
        if (k < j) uv.push_back(w[k]);
    }
    for (int q : priorities(rest))
        if (order.less(p, q)) return false;
    for (int q : unmatched_priorities(rest))
        if (order.less_eq(p, q)) return false;
    if (!matched_prec(uv, p, order)) return false;
    for (int k = i + 1; k < n; ++k)
        if (k != j && w[k].sym == SeqOp::Put && w[k].priority == p) return false;
    // Nor may w remove a priority-p value: x is the last one added and the
    // last one removed. Counting only puts here would accept
    // put(a,p)·put(b,p)·rm(b)·rm(a).
    for (int k = j + 1; k < n; ++k)
        if (w[k].sym == SeqOp::Rm) {
            int at = put_position(w, w[k].value);
            if (at >= 0 && w[at].priority == p) return false;
        }
    return true;
}

Word erase_value(const Word& w, int v) {
    Word out;
    out.reserve(w.size());
    for (const auto& o : w)
        if (o.value != v) out.push_back(o);
    return out;
}

Word erase_position(const Word& w, int pos) {
    Word out = w;
    out.erase(out.begin() + pos);
    return out;
}

SeqBranch select_branch(const Word& w, const PriorityOrder& order) {
    if (w.empty()) return SeqBranch::Empty;
    if (has_empty_removes(w)) return SeqBranch::EmptyRemove;
    if (has_unmatched_max_priority(w, order)) return SeqBranch::UnmatchedMax;
    return SeqBranch::MatchedMax;
}

std::vector<int> branch_candidates(const Word& w, const PriorityOrder& order) {
    std::vector<int> out;
    switch (select_branch(w, order)) {
        case SeqBranch::Empty: break;
        case SeqBranch::EmptyRemove:
            for (int i = 0; i < static_cast<int>(w.size()); ++i)
                if (empty_remove_seq(w, i)) out.push_back(i);
            break;
        case SeqBranch::UnmatchedMax:
            for (const auto& o : w)
                if (o.sym == SeqOp::Put && unmatched_max_priority_seq(w, o.value, order)) out.push_back(o.value);
            break;
        case SeqBranch::MatchedMax:
            for (const auto& o : w)
                if (o.sym == SeqOp::Put && matched_max_priority_seq(w, o.value, order)) out.push_back(o.value);
            break;
    }
    return out;
}

bool check_pq_seq(const Word& w, const PriorityOrder& order) {
    SeqBranch b = select_branch(w, order);
    if (b == SeqBranch::Empty) return true;
    auto cands = branch_candidates(w, order);
    if (cands.empty()) return false;
    if (b == SeqBranch::EmptyRemove) return check_pq_seq(erase_position(w, cands.front()), order);
    return check_pq_seq(erase_value(w, cands.front()), order);
}

bool check_pq_seq(const History& h) {
    if (!is_sequential(h)) throw Error("check_pq_seq needs a sequential execution");
    if (!is_data_differentiated(h)) throw Error("check_pq_seq needs a data-differentiated execution");
    return check_pq_seq(to_word(h), *h.order);
}

bool check_pq_seq_any_choice(const Word& w, const PriorityOrder& order) {
    SeqBranch b = select_branch(w, order);
    if (b == SeqBranch::Empty) return true;
    for (int c : branch_candidates(w, order)) {
        Word next = b == SeqBranch::EmptyRemove ? erase_position(w, c) : erase_value(w, c);
        if (check_pq_seq_any_choice(next, order)) return true;
    }
    return false;
}

}  // namespace pqlin
