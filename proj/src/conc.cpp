#include "pqlin/conc.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

#include "pqlin/automata.hpp"

namespace pqlin {

std::vector<FifoViolation> fifo_violations(const History& h) {
    std::vector<FifoViolation> out;
    int nv = h.num_values();
    for (int v = 0; v < nv; ++v) {
        const auto& s = h.by_value[v];
        if (h.value_empty[v] || s.rms.empty()) continue;
        if (s.puts.empty()) {
            out.push_back({2, {v}});
            continue;
        }
        for (int r : s.rms)
            if (h.hb(r, s.puts.front())) {
                out.push_back({1, {v}});
                break;
            }
        if (s.rms.size() >= 2) out.push_back({3, {v}});
    }
    for (int a = 0; a < nv; ++a) {
        int pa = h.put_of(a);
        if (pa < 0) continue;
        for (int b = 0; b < nv; ++b) {
            int pb = h.put_of(b);
            if (b == a || pb < 0 || h.ops[pa].priority != h.ops[pb].priority) continue;
            int rb = h.rm_of(b);
            if (rb < 0 || !h.hb(pa, pb)) continue;
            int ra = h.rm_of(a);
            if (ra < 0 || h.hb(rb, ra)) out.push_back({4, {a, b}});
        }
    }
    return out;
}

bool ConstraintGraph::has_edge(int from, int to) const {
    return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.from == from && e.to == to; });
}

std::optional<std::vector<int>> ConstraintGraph::cycle_through(int node) const {
    std::map<int, int> parent;
    std::deque<int> queue;
    for (const auto& e : edges)
        if (e.from == node && !parent.count(e.to)) {
            parent[e.to] = node;
            queue.push_back(e.to);
        }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (u == node) {
            std::vector<int> path;
            int cur = parent[node];
            while (cur != node) {
                path.push_back(cur);
                cur = parent[cur];
            }
            path.push_back(node);
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (const auto& e : edges)
            if (e.from == u && !parent.count(e.to)) {
                parent[e.to] = u;
                queue.push_back(e.to);
            }
    }
    return std::nullopt;
}

const char* reason_name(ConstraintGraph::Reason r) {
    switch (r) {
        case ConstraintGraph::PutBeforePut: return "put<put";
        case ConstraintGraph::PutBeforeRm: return "put<rm";
        case ConstraintGraph::RmBeforeRm: return "rm<rm";
        case ConstraintGraph::NeverRemoved: return "never-removed";
        case ConstraintGraph::PutBeforeEmpty: return "put<empty";
        case ConstraintGraph::EmptyBeforeRm: return "empty<rm";
    }
    return "?";
}

namespace {

bool has_empty_remove(const History& h) {
    return std::any_of(h.ops.begin(), h.ops.end(), [](const Op& o) { return o.empty; });
}

std::vector<int> values_at(const History& h, int p) {
    std::vector<int> out;
    for (int v = 0; v < h.num_values(); ++v)
        if (h.priority_of(v) == p) out.push_back(v);
    return out;
}

int single_maximal(const History& h) {
    auto mx = maximal_priorities(h);
    if (mx.size() != 1) throw Error("expected exactly one maximal priority");
    return mx.front();
}

}  // namespace

ConstraintGraph left_right_constraint(const History& h, int x) {
    int p = single_maximal(h);
    if (h.priority_of(x) != p) throw Error("left_right_constraint: value is not of maximal priority");
    if (values_at(h, p).size() != 1) throw Error("left_right_constraint: several maximal-priority values");
    if (has_empty_remove(h)) throw Error("left_right_constraint: history has rm(empty)");
    int px = h.put_of(x), rx = h.rm_of(x);
    if (rx < 0) throw Error("left_right_constraint: maximal value is never removed");
    ConstraintGraph g;
    for (int v : h.present_values()) g.nodes.push_back(v);
    for (int d : g.nodes) {
        if (d == x) continue;
        int pd = h.put_of(d), rd = h.rm_of(d);
        if (pd >= 0 && h.hb(pd, px)) g.edges.push_back({d, x, ConstraintGraph::PutBeforePut});
        else if (pd >= 0 && h.hb(pd, rx)) g.edges.push_back({d, x, ConstraintGraph::PutBeforeRm});
        if (rd < 0) g.edges.push_back({x, d, ConstraintGraph::NeverRemoved});
        else if (h.hb(rx, rd)) g.edges.push_back({x, d, ConstraintGraph::RmBeforeRm});
    }
    for (int d1 : g.nodes) {
        int p1 = h.put_of(d1);
        if (d1 == x || p1 < 0) continue;
        for (int d2 : g.nodes) {
            int r2 = h.rm_of(d2);
            if (d2 == x || d2 == d1 || r2 < 0) continue;
            if (h.hb(p1, r2)) g.edges.push_back({d1, d2, ConstraintGraph::PutBeforeRm});
        }
    }
    return g;
}

bool check_matched_gt(const History& h, int x) {
    return !left_right_constraint(h, x).cycle_through(x).has_value();
}

std::optional<Interval> value_interval(const History& h, int v) {
    int pv = h.put_of(v);
    if (pv < 0) return std::nullopt;
    int rv = h.rm_of(v);
    return Interval{h.ops[pv].ret, rv < 0 ? h.length() : h.ops[rv].call};
}

GapPointSet gap_points(const History& h, int x) {
    int px = h.put_of(x), rx = h.rm_of(x);
    if (px < 0 || rx < 0) throw Error("gap_points: value lacks its put or its rm");
    int p = h.ops[px].priority;
    std::vector<Interval> lower;
    for (int d = 0; d < h.num_values(); ++d) {
        int q = h.priority_of(d);
        if (q >= 0 && h.order->less(q, p)) lower.push_back(*value_interval(h, d));
    }
    GapPointSet out;
    out.value = x;
    int from = std::max(h.ops[px].call, h.ops[rx].call);
    for (int i = from; i < h.ops[rx].ret; ++i) {
        bool covered = std::any_of(lower.begin(), lower.end(), [&](const Interval& iv) { return iv.contains(i); });
        if (!covered) out.indices.push_back(i);
    }
    return out;
}

int PbOrder::pos(int v) const {
    auto it = std::find(values.begin(), values.end(), v);
    return it == values.end() ? -1 : static_cast<int>(it - values.begin());
}

bool PbOrder::direct(int a, int b, PbEdge::Case c) const {
    return std::any_of(edges.begin(), edges.end(),
                       [&](const PbEdge& e) { return e.from == a && e.to == b && e.kind == c; });
}

bool PbOrder::before(int a, int b) const {
    int i = pos(a), j = pos(b);
    return i >= 0 && j >= 0 && reach[i][j];
}

PbOrder pb_order(const History& h) {
    int p = single_maximal(h);
    PbOrder out;
    out.values = values_at(h, p);
    int n = static_cast<int>(out.values.size());
    out.reach.assign(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            int a = out.values[i], b = out.values[j];
            int pa = h.put_of(a), pb = h.put_of(b), ra = h.rm_of(a), rb = h.rm_of(b);
            if (h.hb(pa, pb)) out.edges.push_back({a, b, PbEdge::A});
            if (ra >= 0 && rb >= 0 && h.hb(ra, rb)) out.edges.push_back({a, b, PbEdge::B});
            if (ra >= 0 && h.hb(ra, pb)) out.edges.push_back({a, b, PbEdge::C});
        }
    for (const auto& e : out.edges) out.reach[out.pos(e.from)][out.pos(e.to)] = true;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (out.reach[i][k])
                for (int j = 0; j < n; ++j)
                    if (out.reach[k][j]) out.reach[i][j] = true;
    return out;
}

std::optional<PbGap> find_pb_gap(const History& h) {
    PbOrder pb = pb_order(h);
    for (int x : pb.values) {
        auto gap = gap_points(h, x).rightmost();
        for (int y : pb.values) {
            if (y == x || !pb.before(y, x)) continue;
            int cy = h.ops[h.put_of(y)].call;
            int ry = h.rm_of(y);
            int bound = ry < 0 ? cy : std::max(cy, h.ops[ry].call);
            if (!gap || *gap < bound) return PbGap{x, y, gap, bound};
        }
    }
    return std::nullopt;
}

bool check_matched_eq(const History& h) {
    int p = single_maximal(h);
    if (values_at(h, p).size() < 2) throw Error("check_matched_eq: needs two maximal-priority values");
    if (has_empty_remove(h)) throw Error("check_matched_eq: history has rm(empty)");
    return !find_pb_gap(h).has_value();
}

ConstraintGraph empty_remove_constraint(const History& h, int token) {
    int o = -1;
    for (int k = 0; k < static_cast<int>(h.ops.size()); ++k)
        if (h.ops[k].empty && h.ops[k].value == token) o = k;
    if (o < 0) throw Error("empty_remove_constraint: no such rm(empty)");
    ConstraintGraph g;
    g.nodes.push_back(token);
    std::vector<int> data;
    for (int v : h.present_values())
        if (!h.value_empty[v]) data.push_back(v);
    for (int d : data) {
        g.nodes.push_back(d);
        int pd = h.put_of(d), rd = h.rm_of(d);
        if (pd >= 0 && h.hb(pd, o)) g.edges.push_back({d, token, ConstraintGraph::PutBeforeEmpty});
        if (rd < 0) g.edges.push_back({token, d, ConstraintGraph::NeverRemoved});
        else if (h.hb(o, rd)) g.edges.push_back({token, d, ConstraintGraph::EmptyBeforeRm});
    }
    for (int d1 : data) {
        int p1 = h.put_of(d1);
        if (p1 < 0) continue;
        for (int d2 : data) {
            int r2 = h.rm_of(d2);
            if (d2 == d1 || r2 < 0) continue;
            if (h.hb(p1, r2)) g.edges.push_back({d1, d2, ConstraintGraph::PutBeforeRm});
        }
    }
    return g;
}

bool check_empty_remove(const History& h, int token) {
    return !empty_remove_constraint(h, token).cycle_through(token).has_value();
}

bool check_unmatched(const History& h) {
    int p = single_maximal(h);
    bool unmatched = false;
    for (int v : values_at(h, p))
        if (h.rm_of(v) < 0) unmatched = true;
    if (!unmatched) throw Error("check_unmatched: no unmatched value of maximal priority");
    if (has_empty_remove(h)) throw Error("check_unmatched: history has rm(empty)");
    if (!fifo_violations(h).empty()) throw Error("check_unmatched: per-priority FIFO violated");
    return true;
}

const char* evidence_tag(Evidence::Tag t) {
    switch (t) {
        case Evidence::None: return "none";
        case Evidence::Fifo: return "fifo";
        case Evidence::Cycle: return "cycle";
        case Evidence::PbGapTag: return "pb_gap";
        case Evidence::EmptyCycle: return "empty_cycle";
    }
    return "?";
}

NonRecResult check_pq_conc_nonrec(const History& h) {
    NonRecResult r;
    if (h.ops.empty()) return r;
    std::vector<int> tokens;
    for (const auto& o : h.ops)
        if (o.empty) tokens.push_back(o.value);
    if (!tokens.empty()) {
        std::optional<std::vector<int>> first_cycle;
        for (int t : tokens) {
            auto c = empty_remove_constraint(h, t).cycle_through(t);
            if (!c) return r;
            if (!first_cycle) first_cycle = c;
        }
        r.ok = false;
        r.evidence.tag = Evidence::EmptyCycle;
        r.evidence.cycle = *first_cycle;
        return r;
    }
    auto mx = maximal_priorities(h);
    for (int p : mx)
        for (int v : values_at(h, p))
            if (h.rm_of(v) < 0) return r;  // unmatched maximal value: holds under per-priority FIFO

    std::optional<Evidence> first_failure;
    for (int p : mx) {
        History hp = project_priority_downset(h, p);
        auto top = values_at(hp, p);
        Evidence ev;
        ev.priority = p;
        if (top.size() == 1) {
            auto c = left_right_constraint(hp, top.front()).cycle_through(top.front());
            if (!c) return r;
            ev.tag = Evidence::Cycle;
            ev.cycle = *c;
        } else {
            auto w = find_pb_gap(hp);
            if (!w) return r;
            ev.tag = Evidence::PbGapTag;
            ev.pb_gap = w;
        }
        if (!first_failure) first_failure = ev;
    }
    r.ok = false;
    if (first_failure) r.evidence = *first_failure;
    else r.evidence.note = "no maximal priority";
    return r;
}

namespace {

Verdict check_differentiated(const History& h, const CheckOptions& opt) {
    Verdict v;
    auto fifo = fifo_violations(h);
    if (!fifo.empty()) {
        v.linearizable = false;
        v.evidence.tag = Evidence::Fifo;
        v.evidence.fifo = fifo;
        for (int x : fifo.front().values) v.projection.push_back(x);
        return v;
    }
    auto present = h.present_values();
    int n = static_cast<int>(present.size());
    if (n > opt.proj_bound || n > 30) {
        auto hit = witness_projection(h);
        if (hit) {
            History hp = project_values(h, [&] {
                std::vector<bool> keep(h.num_values(), false);
                for (int x : *hit) keep[x] = true;
                return keep;
            }());
            auto nr = check_pq_conc_nonrec(hp);
            v.linearizable = false;
            v.evidence = nr.evidence;
            v.projection = *hit;
            if (nr.ok) v.evidence.note = "monitor witness";
            return v;
        }
        v.complete = false;
        v.message = "incomplete: witness-search only";
        return v;
    }
    std::vector<std::uint32_t> masks;
    masks.reserve(std::size_t{1} << n);
    for (std::uint32_t m = 1; m < (std::uint32_t{1} << n); ++m) masks.push_back(m);
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint32_t a, std::uint32_t b) { return __builtin_popcount(a) < __builtin_popcount(b); });
    std::vector<bool> keep(h.num_values(), false);
    for (std::uint32_t m : masks) {
        std::fill(keep.begin(), keep.end(), false);
        for (int i = 0; i < n; ++i)
            if ((m >> i) & 1u) keep[present[i]] = true;
        History hp = project_values(h, keep);
        auto nr = check_pq_conc_nonrec(hp);
        if (nr.ok) continue;
        v.linearizable = false;
        v.evidence = nr.evidence;
        for (int i = 0; i < n; ++i)
            if ((m >> i) & 1u) v.projection.push_back(present[i]);
        return v;
    }
    return v;
}

// Every way of matching each remove of a value to a distinct put of it, each
// put getting its own value name.
std::vector<History> derenamings(const History& h, int cap, bool& truncated) {
    truncated = false;
    std::vector<History> out;
    int nv = h.num_values();
    std::vector<std::vector<int>> choice(nv);  // per value: put index (into puts) per rm, -1 unmatched
    std::function<void(int, int)> rec = [&](int v, int r) {
        if (static_cast<int>(out.size()) >= cap) {
            truncated = true;
            return;
        }
        while (v < nv && (h.by_value[v].puts.size() <= 1 || r >= static_cast<int>(h.by_value[v].rms.size()))) {
            ++v;
            r = 0;
        }
        if (v == nv) {
            History d = h;
            std::vector<int> instance_value;
            for (int u = 0; u < nv; ++u) {
                const auto& s = h.by_value[u];
                if (s.puts.size() <= 1) continue;
                std::vector<int> ids;
                for (std::size_t i = 0; i < s.puts.size(); ++i) {
                    int id = d.num_values();
                    d.values.push_back(h.values[u] + "#" + std::to_string(i + 1));
                    d.value_empty.push_back(false);
                    d.ops[s.puts[i]].value = id;
                    ids.push_back(id);
                }
                for (std::size_t i = 0; i < s.rms.size(); ++i) {
                    int c = choice[u][i];
                    if (c >= 0) d.ops[s.rms[i]].value = ids[c];
                    else {
                        int id = d.num_values();
                        d.values.push_back(h.values[u] + "#x" + std::to_string(i + 1));
                        d.value_empty.push_back(false);
                        d.ops[s.rms[i]].value = id;
                    }
                }
            }
            d.index();
            out.push_back(std::move(d));
            return;
        }
        const auto& s = h.by_value[v];
        choice[v].resize(s.rms.size(), -1);
        for (int c = 0; c < static_cast<int>(s.puts.size()); ++c) {
            bool used = false;
            for (int k = 0; k < r; ++k)
                if (choice[v][k] == c) used = true;
            if (used) continue;
            choice[v][r] = c;
            rec(v, r + 1);
        }
        if (static_cast<int>(s.rms.size()) > static_cast<int>(s.puts.size())) {
            choice[v][r] = -1;
            rec(v, r + 1);
        }
    };
    rec(0, 0);
    return out;
}

}  // namespace

Verdict check_execution(const History& h, const CheckOptions& opt) {
    auto self = std::make_shared<const History>(h);
    if (is_data_differentiated(h)) {
        Verdict v = check_differentiated(h, opt);
        v.subject = self;
        return v;
    }
    bool truncated = false;
    auto candidates = derenamings(h, opt.rename_cap, truncated);
    std::optional<Verdict> first_failure;
    bool any_incomplete = false;
    for (auto& d : candidates) {
        Verdict v = check_differentiated(d, opt);
        v.subject = std::make_shared<const History>(std::move(d));
        if (v.linearizable && v.complete) {
            v.message = "linearizable after de-renaming repeated values";
            return v;
        }
        if (!v.complete) any_incomplete = true;
        if (!v.linearizable && !first_failure) first_failure = std::move(v);
    }
    if (truncated || any_incomplete) {
        Verdict v;
        v.complete = false;
        v.subject = self;
        v.message = "incomplete: too many de-renamings of repeated values";
        return v;
    }
    Verdict v = first_failure ? std::move(*first_failure) : Verdict{};
    if (!first_failure) v.linearizable = false;
    v.message = "no de-renaming of repeated values is linearizable";
    return v;
}

bool evidence_holds(const History& h, const Verdict& v) {
    if (v.linearizable) return true;
    const History& s = v.subject ? *v.subject : h;
    const Evidence& ev = v.evidence;
    if (ev.tag == Evidence::Fifo) {
        auto now = fifo_violations(s);
        for (const auto& f : ev.fifo)
            if (std::find(now.begin(), now.end(), f) == now.end()) return false;
        return !ev.fifo.empty();
    }
    std::vector<bool> keep(s.num_values(), false);
    for (int x : v.projection) keep[x] = true;
    History hp = project_values(s, keep);
    if (check_pq_conc_nonrec(hp).ok) return false;
    switch (ev.tag) {
        case Evidence::EmptyCycle: {
            if (ev.cycle.empty()) return false;
            auto g = empty_remove_constraint(hp, ev.cycle.front());
            for (std::size_t i = 0; i < ev.cycle.size(); ++i)
                if (!g.has_edge(ev.cycle[i], ev.cycle[(i + 1) % ev.cycle.size()])) return false;
            return true;
        }
        case Evidence::Cycle: {
            if (ev.cycle.empty() || !ev.priority) return false;
            History top = project_priority_downset(hp, *ev.priority);
            auto g = left_right_constraint(top, ev.cycle.front());
            for (std::size_t i = 0; i < ev.cycle.size(); ++i)
                if (!g.has_edge(ev.cycle[i], ev.cycle[(i + 1) % ev.cycle.size()])) return false;
            return true;
        }
        case Evidence::PbGapTag: {
            if (!ev.pb_gap || !ev.priority) return false;
            History top = project_priority_downset(hp, *ev.priority);
            auto pb = pb_order(top);
            if (!pb.before(ev.pb_gap->y, ev.pb_gap->x)) return false;
            auto gap = gap_points(top, ev.pb_gap->x).rightmost();
            return gap == ev.pb_gap->rightmost_gap && (!gap || *gap < ev.pb_gap->bound);
        }
        default: return false;
    }
}

std::vector<std::string> value_names(const History& h, const std::vector<int>& ids) {
    std::vector<std::string> out;
    for (int x : ids) out.push_back(h.values[x]);
    return out;
}

}  // namespace pqlin
