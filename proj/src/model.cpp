#include "pqlin/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

namespace pqlin {

PriorityOrder::PriorityOrder(const std::vector<std::string>& names) {
    for (const auto& n : names) add(n);
}

int PriorityOrder::add(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    int id = size();
    names_.push_back(name);
    index_.emplace(name, id);
    for (auto& row : lt_) row.push_back(false);
    lt_.emplace_back(names_.size(), false);
    return id;
}

int PriorityOrder::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int PriorityOrder::id(const std::string& name) const {
    int p = find(name);
    if (p < 0) throw Error("unknown priority '" + name + "'");
    return p;
}

void PriorityOrder::add_less(const std::string& lo, const std::string& hi) {
    add_less(add(lo), add(hi));
}

void PriorityOrder::add_less(int lo, int hi) {
    if (lo == hi || lt_[hi][lo])
        throw Error("priority order is cyclic at " + names_[lo] + " < " + names_[hi]);
    if (lt_[lo][hi]) return;
    int n = size();
    // Everything at or below lo becomes below everything at or above hi.
    for (int a = 0; a < n; ++a) {
        if (!(a == lo || lt_[a][lo])) continue;
        for (int b = 0; b < n; ++b)
            if (b == hi || lt_[hi][b]) lt_[a][b] = true;
    }
}

std::vector<std::pair<int, int>> PriorityOrder::pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int p = 0; p < size(); ++p)
        for (int q = 0; q < size(); ++q)
            if (lt_[p][q]) out.emplace_back(p, q);
    return out;
}

PriorityOrder PriorityOrder::chain(const std::vector<std::string>& names) {
    PriorityOrder o(names);
    for (std::size_t i = 1; i < names.size(); ++i) o.add_less(static_cast<int>(i - 1), static_cast<int>(i));
    return o;
}

const char* violation_name(Violation::Code c) {
    switch (c) {
        case Violation::UnmatchedReturn: return "unmatched return";
        case Violation::DuplicateOp: return "duplicate op id";
        case Violation::PendingOp: return "pending operation";
        case Violation::UnknownPriority: return "unknown priority";
        case Violation::MalformedEmpty: return "malformed rm(empty)";
    }
    return "?";
}

std::vector<Violation> validate(const Execution& e) {
    std::vector<Violation> out;
    struct Seen {
        std::size_t call;
        bool returned = false;
    };
    std::unordered_map<std::string, Seen> open;
    std::set<std::string> calls_seen;
    // value -> (is empty token, op id of the first rm(empty) using it)
    std::unordered_map<std::string, std::pair<bool, std::string>> value_use;

    auto note_value = [&](std::size_t i, const Action& a) {
        auto [it, fresh] = value_use.try_emplace(a.value, a.empty, a.op);
        if (fresh) return;
        if (it->second.first || a.empty) {
            if (!(a.empty && it->second.first && it->second.second == a.op))
                out.push_back({Violation::MalformedEmpty, i,
                               "rm(empty) value '" + a.value + "' is not unique to op " + a.op});
        }
    };

    for (std::size_t i = 0; i < e.actions.size(); ++i) {
        const Action& a = e.actions[i];
        if (a.empty && a.method != Method::Rm)
            out.push_back({Violation::MalformedEmpty, i, "empty flag on a put action of op " + a.op});
        if (a.method == Method::Put) {
            if (a.priority.empty() || !e.order || e.order->find(a.priority) < 0)
                out.push_back({Violation::UnknownPriority, i,
                               "op " + a.op + " uses priority '" + a.priority + "'"});
        } else if (!a.priority.empty()) {
            out.push_back({Violation::UnknownPriority, i, "rm op " + a.op + " carries a priority"});
        }
        if (a.kind == Kind::Call) {
            if (!calls_seen.insert(a.op).second) {
                out.push_back({Violation::DuplicateOp, i, "op " + a.op + " called twice"});
                continue;
            }
            open[a.op] = Seen{i};
            note_value(i, a);
        } else {
            auto it = open.find(a.op);
            if (it == open.end()) {
                out.push_back({Violation::UnmatchedReturn, i, "return of op " + a.op + " without a call"});
                continue;
            }
            if (it->second.returned) {
                out.push_back({Violation::DuplicateOp, i, "op " + a.op + " returned twice"});
                continue;
            }
            const Action& c = e.actions[it->second.call];
            if (c.method != a.method || c.value != a.value || c.priority != a.priority || c.empty != a.empty)
                out.push_back({Violation::UnmatchedReturn, i, "return of op " + a.op + " differs from its call"});
            it->second.returned = true;
        }
    }
    for (const auto& [op, s] : open)
        if (!s.returned) out.push_back({Violation::PendingOp, s.call, "op " + op + " never returns"});
    std::sort(out.begin(), out.end(), [](const Violation& x, const Violation& y) { return x.index < y.index; });
    return out;
}

void History::index() {
    by_value.assign(values.size(), {});
    for (int i = 0; i < static_cast<int>(ops.size()); ++i) {
        auto& slot = by_value[ops[i].value];
        (ops[i].is_put() ? slot.puts : slot.rms).push_back(i);
    }
}

std::vector<int> History::present_values() const {
    std::vector<int> out;
    for (int v = 0; v < num_values(); ++v)
        if (by_value[v].present()) out.push_back(v);
    return out;
}

History compile(const Execution& e) {
    auto bad = validate(e);
    if (!bad.empty()) {
        std::string msg = "malformed execution:";
        for (const auto& v : bad) msg += std::string("\n  ") + violation_name(v.code) + ": " + v.detail;
        throw Error(msg);
    }
    History h;
    h.order = e.order;
    std::unordered_map<std::string, int> value_id;
    std::unordered_map<std::string, int> op_index;
    for (std::size_t i = 0; i < e.actions.size(); ++i) {
        const Action& a = e.actions[i];
        if (a.kind == Kind::Call) {
            auto [it, fresh] = value_id.try_emplace(a.value, h.num_values());
            if (fresh) {
                h.values.push_back(a.value);
                h.value_empty.push_back(a.empty);
            }
            Op o;
            o.id = a.op;
            o.method = a.method;
            o.value = it->second;
            o.priority = a.method == Method::Put ? e.order->id(a.priority) : -1;
            o.empty = a.empty;
            o.call = static_cast<int>(i);
            op_index[a.op] = static_cast<int>(h.ops.size());
            h.ops.push_back(o);
            h.actions.emplace_back(static_cast<int>(h.ops.size()) - 1, Kind::Call);
        } else {
            int k = op_index.at(a.op);
            h.ops[k].ret = static_cast<int>(i);
            h.actions.emplace_back(k, Kind::Ret);
        }
    }
    h.index();
    return h;
}

Execution decompile(const History& h) {
    Execution e;
    e.order = h.order;
    e.actions.reserve(h.actions.size());
    for (auto [k, kind] : h.actions) {
        const Op& o = h.ops[k];
        Action a;
        a.op = o.id;
        a.kind = kind;
        a.method = o.method;
        a.value = h.values[o.value];
        if (o.is_put()) a.priority = h.order->name(o.priority);
        a.empty = o.empty;
        e.actions.push_back(std::move(a));
    }
    return e;
}

History make_history(OrderPtr order, std::vector<std::string> values, std::vector<bool> value_empty,
                     std::vector<Op> ops) {
    History h;
    h.order = std::move(order);
    h.values = std::move(values);
    h.value_empty = std::move(value_empty);
    std::sort(ops.begin(), ops.end(), [](const Op& a, const Op& b) { return a.call < b.call; });
    int n = static_cast<int>(ops.size());
    h.actions.assign(2 * n, {-1, Kind::Call});
    for (int k = 0; k < n; ++k) {
        const Op& o = ops[k];
        if (o.call < 0 || o.ret <= o.call || o.ret >= 2 * n || h.actions[o.call].first >= 0 ||
            h.actions[o.ret].first >= 0)
            throw Error("make_history: inconsistent action positions");
        h.actions[o.call] = {k, Kind::Call};
        h.actions[o.ret] = {k, Kind::Ret};
    }
    h.ops = std::move(ops);
    h.index();
    return h;
}

std::vector<std::pair<std::string, std::string>> happens_before(const Execution& e) {
    History h = compile(e);
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t a = 0; a < h.ops.size(); ++a)
        for (std::size_t b = 0; b < h.ops.size(); ++b)
            if (h.hb(static_cast<int>(a), static_cast<int>(b))) out.emplace_back(h.ops[a].id, h.ops[b].id);
    return out;
}

bool is_interval_order(const History& h) {
    int n = static_cast<int>(h.ops.size());
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (!h.hb(a, b)) continue;
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    if (h.hb(c, d) && !h.hb(a, d) && !h.hb(c, b)) return false;
        }
    return true;
}

History project_values(const History& h, const std::vector<bool>& keep) {
    History out;
    out.order = h.order;
    out.values = h.values;
    out.value_empty = h.value_empty;
    std::vector<int> remap(h.ops.size(), -1);
    for (std::size_t k = 0; k < h.ops.size(); ++k) {
        if (!keep[h.ops[k].value]) continue;
        remap[k] = static_cast<int>(out.ops.size());
        out.ops.push_back(h.ops[k]);
    }
    for (auto [k, kind] : h.actions) {
        int nk = remap[k];
        if (nk < 0) continue;
        int pos = out.length();
        (kind == Kind::Call ? out.ops[nk].call : out.ops[nk].ret) = pos;
        out.actions.emplace_back(nk, kind);
    }
    out.index();
    return out;
}

History project_values(const History& h, std::uint64_t mask) {
    std::vector<bool> keep(h.values.size());
    for (std::size_t v = 0; v < keep.size() && v < 64; ++v) keep[v] = (mask >> v) & 1u;
    return project_values(h, keep);
}

Execution project_values(const Execution& e, const std::vector<std::string>& values) {
    std::set<std::string> d(values.begin(), values.end());
    Execution out;
    out.order = e.order;
    for (const auto& a : e.actions)
        if (d.count(a.value)) out.actions.push_back(a);
    return out;
}

std::vector<int> maximal_priorities(const History& h) {
    std::vector<bool> used(h.order->size(), false);
    for (const auto& o : h.ops)
        if (o.is_put()) used[o.priority] = true;
    std::vector<int> out;
    for (int p = 0; p < h.order->size(); ++p) {
        if (!used[p]) continue;
        bool maximal = true;
        for (int q = 0; q < h.order->size() && maximal; ++q)
            if (used[q] && h.order->less(p, q)) maximal = false;
        if (maximal) out.push_back(p);
    }
    return out;
}

History project_priority_downset(const History& h, int p) {
    auto mx = maximal_priorities(h);
    if (std::find(mx.begin(), mx.end(), p) == mx.end())
        throw Error("priority " + h.order->name(p) + " is not maximal in the execution");
    std::vector<bool> keep(h.values.size(), false);
    for (int v = 0; v < h.num_values(); ++v) {
        int q = h.priority_of(v);
        keep[v] = q >= 0 && h.order->less_eq(q, p);
    }
    return project_values(h, keep);
}

Execution project_priority_downset(const Execution& e, const std::string& p) {
    History h = compile(e);
    return decompile(project_priority_downset(h, e.order->id(p)));
}

Execution rename(const Execution& e, const std::map<std::string, std::string>& r) {
    std::set<std::string> empty_images, plain_images;
    for (const auto& a : e.actions) {
        auto it = r.find(a.value);
        if (it == r.end()) throw Error("renaming is not defined on value '" + a.value + "'");
        (a.empty ? empty_images : plain_images).insert(it->second);
    }
    for (const auto& v : empty_images)
        if (plain_images.count(v)) throw Error("renaming maps an rm(empty) value onto data value '" + v + "'");
    Execution out = e;
    for (auto& a : out.actions) a.value = r.at(a.value);
    return out;
}

bool is_data_differentiated(const History& h) {
    for (const auto& slot : h.by_value)
        if (slot.puts.size() > 1) return false;
    return true;
}

bool is_data_differentiated(const Execution& e) {
    std::set<std::string> seen;
    for (const auto& a : e.actions)
        if (a.kind == Kind::Call && a.method == Method::Put && !seen.insert(a.value).second) return false;
    return true;
}

bool is_sequential(const History& h) {
    for (const auto& o : h.ops)
        if (o.ret != o.call + 1) return false;
    return true;
}

std::string to_string(const History& h) {
    std::ostringstream os;
    auto op_text = [&](const Op& o) {
        if (o.is_put()) return "put(" + h.values[o.value] + "," + h.order->name(o.priority) + ")";
        if (o.empty) return std::string("rm(empty)");
        return "rm(" + h.values[o.value] + ")";
    };
    bool seq = is_sequential(h);
    bool first = true;
    for (auto [k, kind] : h.actions) {
        if (seq && kind == Kind::Ret) continue;
        if (!first) os << ' ';
        first = false;
        if (!seq) os << (kind == Kind::Call ? "call:" : "ret:");
        os << op_text(h.ops[k]);
    }
    return os.str();
}

}  // namespace pqlin
