#include "pqlin/automata.hpp"

#include "pqlin/conc.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

namespace pqlin {

const char* role_name(Role r) {
    switch (r) {
        case Role::A: return "a";
        case Role::B: return "b";
        case Role::A1: return "a1";
        case Role::D: return "d";
        case Role::E: return "e";
        case Role::Top: return "top";
        case Role::Empty: return "empty";
    }
    return "?";
}

const char* guard_name(Guard g) {
    switch (g) {
        case Guard::True: return "true";
        case Guard::Eq: return "=r";
        case Guard::Lt: return "<r";
    }
    return "?";
}

std::string to_string(const Label& l) {
    if (l.guess) return "r=*";
    std::string s = l.kind == Kind::Call ? "call(" : "ret(";
    s += l.method == Method::Put ? "put," : "rm,";
    s += role_name(l.role);
    if (l.method == Method::Put && l.kind == Kind::Call) {
        s += ",";
        s += guard_name(l.guard);
    }
    return s + ")";
}

std::vector<Role> RegisterAutomaton::roles() const {
    std::set<Role> seen;
    for (const auto& t : transitions)
        if (!t.label.guess && t.label.role != Role::Top) seen.insert(t.label.role);
    return {seen.begin(), seen.end()};
}

bool RegisterAutomaton::uses(Role r) const {
    auto rs = roles();
    return std::find(rs.begin(), rs.end(), r) != rs.end();
}

bool RegisterAutomaton::is_set_role(Role r) const {
    return std::find(set_roles.begin(), set_roles.end(), r) != set_roles.end();
}

bool RegisterAutomaton::has_register_guards() const {
    return std::any_of(transitions.begin(), transitions.end(),
                       [](const Transition& t) { return !t.label.guess && t.label.guard != Guard::True; });
}

std::vector<std::string> check_structure(const RegisterAutomaton& a) {
    std::vector<std::string> out;
    int n = a.num_states();
    if (a.initial < 0 || a.initial >= n) out.push_back("initial state out of range");
    if (static_cast<int>(a.accepting.size()) != n) out.push_back("accepting vector size mismatch");
    int guesses = 0;
    for (const auto& t : a.transitions) {
        if (t.from < 0 || t.from >= n || t.to < 0 || t.to >= n) out.push_back("transition out of range");
        if (t.label.guess) {
            ++guesses;
            if (t.from != a.initial) out.push_back("r=* away from the initial state");
        } else if (t.label.guard != Guard::True && !(t.label.method == Method::Put && t.label.kind == Kind::Call)) {
            out.push_back("guard on a non put-call label: " + to_string(t.label));
        }
    }
    if (guesses > 1) out.push_back("more than one r=* transition");
    return out;
}

namespace {

constexpr int letter_of(Role r, Kind k, Method m) {
    return static_cast<int>(r) * 4 + (m == Method::Put ? 0 : 2) + (k == Kind::Call ? 0 : 1);
}
constexpr int kLetters = kNumRoles * 4;

bool guard_holds(Guard g, int priority, int reg, const PriorityOrder& order) {
    switch (g) {
        case Guard::True: return true;
        case Guard::Eq: return reg >= 0 && priority == reg;
        case Guard::Lt: return reg >= 0 && priority >= 0 && order.less(priority, reg);
    }
    return false;
}

// Outgoing transitions per state and letter, flattened.
struct Index {
    std::vector<int> offset;  // (state * kLetters + letter) -> first edge
    std::vector<std::pair<Guard, int>> edges;
    std::vector<int> starts;

    explicit Index(const RegisterAutomaton& a) {
        int n = a.num_states();
        std::vector<std::vector<std::pair<Guard, int>>> bucket(static_cast<std::size_t>(n) * kLetters);
        for (const auto& t : a.transitions) {
            if (t.label.guess) {
                if (t.from == a.initial) starts.push_back(t.to);
                continue;
            }
            bucket[t.from * kLetters + letter_of(t.label.role, t.label.kind, t.label.method)].emplace_back(t.label.guard, t.to);
        }
        if (starts.empty()) starts.push_back(a.initial);
        offset.reserve(bucket.size() + 1);
        for (auto& b : bucket) {
            offset.push_back(static_cast<int>(edges.size()));
            edges.insert(edges.end(), b.begin(), b.end());
        }
        offset.push_back(static_cast<int>(edges.size()));
    }
    template <class F>
    void each(int state, int letter, F&& f) const {
        int i = state * kLetters + letter;
        for (int k = offset[i]; k < offset[i + 1]; ++k) f(edges[k].first, edges[k].second);
    }
};

// ---------------------------------------------------------------------------
// Hand-built automata

struct Builder {
    RegisterAutomaton a;
    bool empty_is_context = true;  // rm(empty) letters belong to the C loops

    Builder(std::string name, std::string family, std::string note) {
        a.name = std::move(name);
        a.family = std::move(family);
        a.case_note = std::move(note);
    }
    int state(const std::string& name, bool accepting = false) {
        a.states.push_back(name);
        a.accepting.push_back(accepting);
        return a.num_states() - 1;
    }
    void edge(int from, int to, Kind k, Method m, Role r, Guard g = Guard::True) {
        a.transitions.push_back({from, to, Label{false, k, m, r, g}});
    }
    void guess(int from, int to) { a.transitions.push_back({from, to, Label{true, Kind::Call, Method::Put, Role::Top, Guard::True}}); }
    // C: every Top letter, plus the rm(empty) letters unless the automaton
    // tracks a designated rm(empty).
    void context(int s) {
        edge(s, s, Kind::Call, Method::Put, Role::Top);
        edge(s, s, Kind::Ret, Method::Put, Role::Top);
        edge(s, s, Kind::Call, Method::Rm, Role::Top);
        edge(s, s, Kind::Ret, Method::Rm, Role::Top);
        if (empty_is_context) {
            edge(s, s, Kind::Call, Method::Rm, Role::Empty);
            edge(s, s, Kind::Ret, Method::Rm, Role::Empty);
        }
    }
};

// Pattern 1: some rm(b) returns before put(b) is called.
RegisterAutomaton fifo_rm_before_put() {
    Builder b("SinPri1", "fifo", "rm(b) <hb put(b)");
    int q0 = b.state("q0"), q1 = b.state("q1"), q2 = b.state("q2"), q3 = b.state("q3", true);
    b.guess(q0, q1);
    for (int s : {q1, q2, q3}) b.context(s);
    b.edge(q1, q1, Kind::Call, Method::Rm, Role::B);
    b.edge(q1, q2, Kind::Ret, Method::Rm, Role::B);
    b.edge(q2, q2, Kind::Call, Method::Rm, Role::B);
    b.edge(q2, q2, Kind::Ret, Method::Rm, Role::B);
    b.edge(q2, q3, Kind::Call, Method::Put, Role::B);
    b.edge(q3, q3, Kind::Ret, Method::Put, Role::B);
    b.edge(q3, q3, Kind::Call, Method::Rm, Role::B);
    b.edge(q3, q3, Kind::Ret, Method::Rm, Role::B);
    return b.a;
}

// Pattern 2: rm(b) and no put(b).
RegisterAutomaton fifo_rm_without_put() {
    Builder b("SinPri2", "fifo", "rm(b) with no put(b)");
    int q0 = b.state("q0"), q1 = b.state("q1"), q2 = b.state("q2", true);
    b.guess(q0, q1);
    b.context(q1);
    b.context(q2);
    b.edge(q1, q2, Kind::Call, Method::Rm, Role::B);
    b.edge(q2, q2, Kind::Call, Method::Rm, Role::B);
    b.edge(q2, q2, Kind::Ret, Method::Rm, Role::B);
    return b.a;
}

// Pattern 3: put(b) and at least two rm(b).
RegisterAutomaton fifo_double_remove() {
    Builder b("SinPri3", "fifo", "one put(b), two or more rm(b)");
    int q0 = b.state("q0");
    // (put progress 0..2) x (rm calls 0..2)
    int grid[3][3];
    for (int p = 0; p < 3; ++p)
        for (int r = 0; r < 3; ++r)
            grid[p][r] = b.state("put" + std::to_string(p) + "_rm" + std::to_string(r), p == 2 && r == 2);
    b.guess(q0, grid[0][0]);
    for (int p = 0; p < 3; ++p)
        for (int r = 0; r < 3; ++r) {
            int s = grid[p][r];
            b.context(s);
            if (p == 0) b.edge(s, grid[1][r], Kind::Call, Method::Put, Role::B);
            if (p == 1) b.edge(s, grid[2][r], Kind::Ret, Method::Put, Role::B);
            b.edge(s, grid[p][std::min(r + 1, 2)], Kind::Call, Method::Rm, Role::B);
            if (r > 0) b.edge(s, s, Kind::Ret, Method::Rm, Role::B);
        }
    return b.a;
}

// ---------------------------------------------------------------------------
// Ordering-case compiler. A case names single-valued roles, precedences
// between their actions, and optionally a window that values of a set role
// must cover: after every action from the last `start` action up to, but not
// including, `end`, at least one covering value has returned from its put and
// not yet called its rm. The cover is tracked as the count
// #ret(put,cover) - #call(rm,cover), kept within 0..2; a minimal covering
// chain never has more than two intervals open at once.

enum Step { CP = 0, RP = 1, CR = 2, RR = 3 };
const char* step_name(int k) {
    static const char* names[] = {"cp", "rp", "cr", "rr"};
    return names[k];
}

struct Ev {
    Role role;
    int step;
};

struct SingleSpec {
    Role role;
    Guard guard;
    bool put = true;
    bool removed = true;
};

struct CoverSpec {
    Role role;
    Guard guard;
    std::vector<Ev> start;
    Ev end;
};

struct CaseSpec {
    std::string name;
    std::string family;
    std::string note;
    std::vector<SingleSpec> singles;
    std::vector<std::pair<Ev, Ev>> before;
    std::optional<CoverSpec> cover;
};

RegisterAutomaton compile(const CaseSpec& spec) {
    Builder b(spec.name, spec.family, spec.note);
    bool tracks_empty = std::any_of(spec.singles.begin(), spec.singles.end(),
                                    [](const SingleSpec& s) { return s.role == Role::Empty; });
    b.empty_is_context = !tracks_empty;
    if (spec.cover) b.a.set_roles.push_back(spec.cover->role);
    int ns = static_cast<int>(spec.singles.size());
    auto bit = [&](const Ev& e) {
        for (int i = 0; i < ns; ++i)
            if (spec.singles[i].role == e.role) return 1u << (i * 4 + e.step);
        throw Error("case spec refers to an unknown role");
    };
    unsigned required = 0;
    for (int i = 0; i < ns; ++i) {
        if (spec.singles[i].put) required |= 0x3u << (i * 4);
        if (spec.singles[i].removed) required |= 0xCu << (i * 4);
    }
    std::vector<unsigned> preds(ns * 4, 0);
    for (int i = 0; i < ns; ++i) {
        preds[i * 4 + RP] |= 1u << (i * 4 + CP);
        preds[i * 4 + RR] |= 1u << (i * 4 + CR);
    }
    for (const auto& [x, y] : spec.before) {
        unsigned by = bit(y);
        int idx = __builtin_ctz(by);
        preds[idx] |= bit(x);
    }
    unsigned start_mask = 0, end_bit = 0;
    if (spec.cover) {
        for (const auto& e : spec.cover->start) start_mask |= bit(e);
        end_bit = bit(spec.cover->end);
    }

    using Key = std::tuple<unsigned, int, int>;  // done mask, count, phase (1 once the window closed)
    std::map<Key, int> ids;
    std::vector<Key> work;
    auto name_of = [&](const Key& k) {
        auto [mask, count, phase] = k;
        std::string s;
        for (int i = 0; i < ns; ++i)
            for (int st = 0; st < 4; ++st)
                if (mask & (1u << (i * 4 + st))) {
                    if (!s.empty()) s += ",";
                    s += std::string(step_name(st)) + "(" + role_name(spec.singles[i].role) + ")";
                }
        if (s.empty()) s = "-";
        if (spec.cover) s += phase ? " |closed" : " |n=" + std::to_string(count);
        return s;
    };
    auto accepting = [&](const Key& k) {
        auto [mask, count, phase] = k;
        return (mask & required) == required && (!spec.cover || phase == 1);
    };
    auto id_of = [&](const Key& k) {
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        int id = b.state(name_of(k), accepting(k));
        ids.emplace(k, id);
        work.push_back(k);
        return id;
    };
    // Applies the window rule after an action; nullopt kills the run.
    auto settle = [&](unsigned mask, int count, int phase) -> std::optional<Key> {
        if (!spec.cover || phase == 1) return Key{mask, 0, phase};
        if (mask & end_bit) return Key{mask, 0, 1};
        if ((mask & start_mask) == start_mask && count < 1) return std::nullopt;
        return Key{mask, count, 0};
    };

    int q0 = b.state("init");
    b.guess(q0, id_of(Key{0u, 0, 0}));
    while (!work.empty()) {
        Key k = work.back();
        work.pop_back();
        int s = ids.at(k);
        auto [mask, count, phase] = k;
        b.context(s);
        for (int i = 0; i < ns; ++i) {
            const auto& role = spec.singles[i];
            for (int st = 0; st < 4; ++st) {
                unsigned eb = 1u << (i * 4 + st);
                if (mask & eb) continue;
                if (st < 2 ? !role.put : !role.removed) continue;
                if ((preds[i * 4 + st] & mask) != preds[i * 4 + st]) continue;
                auto next = settle(mask | eb, count, phase);
                if (!next) continue;
                Kind kind = (st == CP || st == CR) ? Kind::Call : Kind::Ret;
                Method m = st < 2 ? Method::Put : Method::Rm;
                b.edge(s, id_of(*next), kind, m, role.role, st == CP ? role.guard : Guard::True);
            }
        }
        if (spec.cover) {
            const auto& c = *spec.cover;
            for (int st = 0; st < 4; ++st) {
                Kind kind = (st == CP || st == CR) ? Kind::Call : Kind::Ret;
                Method m = st < 2 ? Method::Put : Method::Rm;
                Guard g = st == CP ? c.guard : Guard::True;
                if (phase == 1) {
                    b.edge(s, s, kind, m, c.role, g);
                    continue;
                }
                int nc = count + (st == RP ? 1 : st == CR ? -1 : 0);
                if (nc < 0 || nc > 2) continue;
                auto next = settle(mask, nc, phase);
                if (!next) continue;
                b.edge(s, id_of(*next), kind, m, c.role, g);
            }
        }
    }
    return b.a;
}

Ev ev(Role r, int step) { return {r, step}; }

}  // namespace

std::vector<RegisterAutomaton> build_fifo() {
    std::vector<RegisterAutomaton> out = {fifo_rm_before_put(), fifo_rm_without_put(), fifo_double_remove()};
    for (bool a_removed : {false, true}) {
        CaseSpec s;
        s.name = a_removed ? "SinPri4b" : "SinPri4a";
        s.family = "fifo";
        s.note = a_removed ? "put(a) <hb put(b), rm(b) <hb rm(a)" : "put(a) <hb put(b), rm(b) present, rm(a) absent";
        s.singles = {{Role::A, Guard::Eq, true, a_removed}, {Role::B, Guard::Eq, true, true}};
        s.before = {{ev(Role::A, RP), ev(Role::B, CP)}};
        if (a_removed) s.before.push_back({ev(Role::B, RR), ev(Role::A, CR)});
        out.push_back(compile(s));
    }
    return out;
}

std::vector<RegisterAutomaton> build_matched_gt(Guard cover_guard) {
    struct Case {
        const char* name;
        const char* note;
        std::vector<std::pair<Ev, Ev>> before;
    };
    Role b = Role::B;
    std::vector<Case> cases = {
        {"l-lar1", "put(b) <hb rm(b)", {{ev(b, RP), ev(b, CR)}}},
        {"l-lar2", "call put(b) < call rm(b) < ret put(b) < ret rm(b)",
         {{ev(b, CP), ev(b, CR)}, {ev(b, CR), ev(b, RP)}, {ev(b, RP), ev(b, RR)}}},
        {"l-lar3", "call put(b) < call rm(b) < ret rm(b) < ret put(b)",
         {{ev(b, CP), ev(b, CR)}, {ev(b, CR), ev(b, RP)}, {ev(b, RR), ev(b, RP)}}},
        {"l-lar4", "call rm(b) < call put(b) < ret rm(b)", {{ev(b, CR), ev(b, CP)}, {ev(b, CP), ev(b, RR)}}},
    };
    std::vector<RegisterAutomaton> out;
    for (const auto& c : cases) {
        CaseSpec s;
        s.name = c.name;
        s.family = "matched_gt";
        s.note = c.note;
        s.singles = {{b, Guard::Eq, true, true}};
        s.before = c.before;
        s.cover = CoverSpec{Role::A, cover_guard, {ev(b, CP), ev(b, CR)}, ev(b, RR)};
        out.push_back(compile(s));
    }
    return out;
}

namespace {

CaseSpec eq_base(const std::string& name, const std::string& note, bool with_a1) {
    CaseSpec s;
    s.name = name;
    s.family = "matched_eq";
    s.note = note;
    s.singles = {{Role::A, Guard::Eq, true, true}, {Role::B, Guard::Eq, true, true}};
    if (with_a1) s.singles.push_back({Role::A1, Guard::Eq, true, true});
    s.cover = CoverSpec{Role::D, Guard::Lt,
                        {ev(Role::A, CP), ev(Role::A, CR), ev(Role::B, CP), ev(Role::B, CR)},
                        ev(Role::B, RR)};
    return s;
}

}  // namespace

std::vector<RegisterAutomaton> build_matched_eq_shapes() {
    Role a = Role::A, b = Role::B, a1 = Role::A1;
    std::vector<RegisterAutomaton> out;
    auto add = [&](const char* name, const char* note, bool with_a1, std::vector<std::pair<Ev, Ev>> before) {
        CaseSpec s = eq_base(name, note, with_a1);
        s.before = std::move(before);
        out.push_back(compile(s));
    };
    add("1-eq/A", "put(a) <hb put(b)", false, {{ev(a, RP), ev(b, CP)}});
    add("1-eq/B", "rm(a) <hb rm(b)", false, {{ev(a, RR), ev(b, CR)}});
    add("1-eq/C", "rm(a) <hb put(b)", false, {{ev(a, RR), ev(b, CP)}});
    add("1-eq/AB", "put(a) <hb put(a1), rm(a1) <hb rm(b)", true, {{ev(a, RP), ev(a1, CP)}, {ev(a1, RR), ev(b, CR)}});
    add("1-eq/BA", "rm(a) <hb rm(a1), put(a1) <hb put(b)", true, {{ev(a, RR), ev(a1, CR)}, {ev(a1, RP), ev(b, CP)}});
    return out;
}

std::vector<RegisterAutomaton> build_matched_eq() {
    Role a = Role::A, b = Role::B, a1 = Role::A1;
    std::vector<RegisterAutomaton> out;
    // a put before b: rm(b) called before rm(a), which returns last.
    std::vector<std::pair<Ev, Ev>> tail = {{ev(b, CR), ev(a, CR)}, {ev(a, CR), ev(b, RR)}, {ev(b, RR), ev(a, RR)}};
    {
        CaseSpec s = eq_base("1-eq1", "put(a) <hb put(b); call put(b) < call rm(b) < call rm(a) < ret rm(b) < ret rm(a)", false);
        s.before = tail;
        s.before.push_back({ev(a, RP), ev(b, CP)});
        s.before.push_back({ev(b, CP), ev(b, CR)});
        out.push_back(compile(s));
    }
    {
        CaseSpec s = eq_base("1-eq2", "put(a) <hb put(b); call rm(b) < call put(b) < call rm(a) < ret rm(b) < ret rm(a)", false);
        s.before = tail;
        s.before.push_back({ev(a, RP), ev(b, CP)});
        s.before.push_back({ev(b, CR), ev(b, CP)});
        s.before.push_back({ev(b, CP), ev(a, CR)});
        out.push_back(compile(s));
    }
    // a put before a1, a1 removed before b.
    std::vector<std::pair<Ev, Ev>> chain = tail;
    chain.push_back({ev(a, RP), ev(a1, CP)});
    chain.push_back({ev(a1, RR), ev(b, CR)});
    // Third ordering: call rm(a1) < ret put(a) < call put(a1) < ret rm(a1) <
    // call rm(b) < call rm(a). Fourteen cases by the slot of call put(b) and
    // then of call put(a).
    {
        std::vector<Ev> spine = {ev(a1, CR), ev(a, RP), ev(a1, CP), ev(a1, RR), ev(b, CR), ev(a, CR)};
        int n = 0;
        for (int slot = 0; slot < 6; ++slot) {
            // call put(b) sits just before spine[slot]
            std::vector<std::vector<std::pair<Ev, Ev>>> a_cases;
            Ev cpb = ev(b, CP), cpa = ev(a, CP);
            if (slot >= 2) {
                a_cases.push_back({{cpa, ev(a1, CR)}});
                a_cases.push_back({{ev(a1, CR), cpa}});
            } else if (slot == 1) {
                a_cases.push_back({{cpb, cpa}});
                a_cases.push_back({{ev(a1, CR), cpa}, {cpa, cpb}});
                a_cases.push_back({{cpa, ev(a1, CR)}});
            } else {
                a_cases.push_back({{ev(a1, CR), cpa}});
                a_cases.push_back({{cpb, cpa}, {cpa, ev(a1, CR)}});
                a_cases.push_back({{cpa, cpb}});
            }
            for (const auto& extra : a_cases) {
                ++n;
                CaseSpec s = eq_base("1-eq3-" + std::to_string(n),
                                     "call rm(a1) < ret put(a) < call put(a1) < ret rm(a1) < call rm(b) < call rm(a); "
                                     "call put(b) before " + std::string(step_name(spine[slot].step)) + "(" +
                                         role_name(spine[slot].role) + ")" +
                                         (slot > 0 ? std::string(", after ") + step_name(spine[slot - 1].step) + "(" +
                                                         role_name(spine[slot - 1].role) + ")"
                                                   : std::string()),
                                     true);
                s.before = chain;
                for (std::size_t k = 0; k + 1 < spine.size(); ++k) s.before.push_back({spine[k], spine[k + 1]});
                s.before.push_back({cpb, spine[slot]});
                if (slot > 0) s.before.push_back({spine[slot - 1], cpb});
                for (const auto& e : extra) s.before.push_back(e);
                out.push_back(compile(s));
            }
        }
    }
    {
        CaseSpec s = eq_base("1-eq4", "put(a) <hb put(a1), rm(a1) <hb rm(b); ret put(a) < call rm(a1) < call put(a1)", true);
        s.before = chain;
        s.before.push_back({ev(a, RP), ev(a1, CR)});
        s.before.push_back({ev(a1, CR), ev(a1, CP)});
        out.push_back(compile(s));
    }
    {
        CaseSpec s = eq_base("1-eq5", "put(a) <hb put(a1), rm(a1) <hb rm(b); call put(a1) < call rm(a1)", true);
        s.before = chain;
        s.before.push_back({ev(a1, CP), ev(a1, CR)});
        out.push_back(compile(s));
    }
    return out;
}

std::vector<RegisterAutomaton> build_empty() {
    CaseSpec s;
    s.name = "SeqPQ3";
    s.family = "empty";
    s.note = "rm(empty) window covered by values renamed b";
    s.singles = {{Role::Empty, Guard::True, false, true}};
    s.cover = CoverSpec{Role::B, Guard::True, {ev(Role::Empty, CR)}, ev(Role::Empty, RR)};
    return {compile(s)};
}

std::vector<RegisterAutomaton> default_monitors() {
    std::vector<RegisterAutomaton> out = build_fifo();
    for (auto& a : build_matched_gt()) out.push_back(std::move(a));
    for (auto& a : build_matched_eq_shapes()) out.push_back(std::move(a));
    for (auto& a : build_empty()) out.push_back(std::move(a));
    return out;
}

bool accepts(const RegisterAutomaton& a, const RoleWord& w, const PriorityOrder& order) {
    Index idx(a);
    std::set<int> regs;
    for (const auto& x : w)
        if (x.method == Method::Put && x.priority >= 0) regs.insert(x.priority);
    if (regs.empty()) regs.insert(-1);
    for (int r : regs) {
        std::set<int> cur(idx.starts.begin(), idx.starts.end());
        for (const auto& x : w) {
            std::set<int> next;
            int l = letter_of(x.role, x.kind, x.method);
            for (int s : cur)
                idx.each(s, l, [&](Guard g, int t) {
                    if (guard_holds(g, x.priority, r, order)) next.insert(t);
                });
            cur.swap(next);
            if (cur.empty()) break;
        }
        for (int s : cur)
            if (a.accepting[s]) return true;
    }
    return false;
}

RoleWord rename_to_roles(const History& h, const std::vector<Role>& roles) {
    RoleWord w;
    w.reserve(h.actions.size());
    for (auto [k, kind] : h.actions) {
        const Op& o = h.ops[k];
        RoleAction x;
        x.kind = kind;
        x.method = o.method;
        x.role = roles[o.value];
        x.priority = o.is_put() ? o.priority : -1;
        w.push_back(x);
    }
    return w;
}

struct MonitorSet::Table {
    Index index;
    std::vector<Role> data_choices;   // roles a data value may take
    std::vector<Role> token_choices;  // roles an rm(empty) token may take
    unsigned set_mask = 0;
    bool guarded = false;

    explicit Table(const RegisterAutomaton& a) : index(a), guarded(a.has_register_guards()) {
        data_choices = {Role::Top};
        token_choices = {Role::Top};
        for (Role r : a.roles()) (r == Role::Empty ? token_choices : data_choices).push_back(r);
        for (Role r : a.set_roles) set_mask |= 1u << static_cast<int>(r);
    }
};

MonitorSet::MonitorSet(std::vector<RegisterAutomaton> monitors) : monitors_(std::move(monitors)) {
    tables_.reserve(monitors_.size());
    for (const auto& a : monitors_) tables_.emplace_back(a);
}
MonitorSet::~MonitorSet() = default;
MonitorSet::MonitorSet(MonitorSet&&) noexcept = default;
MonitorSet& MonitorSet::operator=(MonitorSet&&) noexcept = default;

namespace {

constexpr std::int8_t kUnassigned = -1;

// Product node. Values whose last action is behind us no longer matter for
// future moves, so only live ones go into the key; `roles` rides along as
// the witness.
struct Node {
    int state;
    unsigned taken;  // single roles in use
    std::vector<std::pair<int, std::int8_t>> live;
    std::vector<std::int8_t> roles;
};

struct KeyHash {
    std::size_t operator()(const std::vector<int>& k) const {
        std::size_t h = k.size();
        for (int x : k) h = h * 1000003u ^ static_cast<std::size_t>(x + 0x9e3779b9);
        return h;
    }
};

std::vector<int> key_of(const Node& n) {
    std::vector<int> k = {n.state, static_cast<int>(n.taken)};
    for (auto [v, r] : n.live) {
        k.push_back(v);
        k.push_back(r);
    }
    return k;
}

std::optional<MonitorHit> run_product(const History& h, const RegisterAutomaton& a, const MonitorSet::Table& tab,
                                      int reg) {
    int nv = h.num_values();
    std::vector<int> last(nv, -1);
    for (int i = 0; i < h.length(); ++i) last[h.ops[h.actions[i].first].value] = i;
    using Layer = std::unordered_map<std::vector<int>, Node, KeyHash>;
    Layer cur;
    for (int s : tab.index.starts) {
        Node n{s, 0u, {}, std::vector<std::int8_t>(nv, kUnassigned)};
        cur.emplace(key_of(n), std::move(n));
    }
    for (int i = 0; i < h.length() && !cur.empty(); ++i) {
        auto [k, kind] = h.actions[i];
        const Op& o = h.ops[k];
        int v = o.value;
        int pri = o.is_put() ? o.priority : -1;
        bool closing = i == last[v];
        Layer next;
        for (auto& entry : cur) {
            const Node& n = entry.second;
            auto step = [&](Role r) {
                bool fresh = n.roles[v] == kUnassigned;
                tab.index.each(n.state, letter_of(r, kind, o.method), [&](Guard g, int t) {
                    if (!guard_holds(g, pri, reg, *h.order)) return;
                    Node m{t, n.taken, n.live, n.roles};
                    if (fresh) {
                        m.roles[v] = static_cast<std::int8_t>(r);
                        unsigned rb = 1u << static_cast<int>(r);
                        if (r != Role::Top && !(tab.set_mask & rb)) m.taken |= rb;
                        if (!closing) {
                            m.live.emplace_back(v, static_cast<std::int8_t>(r));
                            std::sort(m.live.begin(), m.live.end());
                        }
                    } else if (closing) {
                        std::erase_if(m.live, [&](const auto& p) { return p.first == v; });
                    }
                    auto mk = key_of(m);
                    next.try_emplace(std::move(mk), std::move(m));
                });
            };
            if (n.roles[v] != kUnassigned) {
                step(static_cast<Role>(n.roles[v]));
                continue;
            }
            for (Role r : h.value_empty[v] ? tab.token_choices : tab.data_choices) {
                unsigned rb = 1u << static_cast<int>(r);
                if (r != Role::Top && !(tab.set_mask & rb) && (n.taken & rb)) continue;
                step(r);
            }
        }
        cur.swap(next);
    }
    for (auto& [key, n] : cur) {
        if (!a.accepting[n.state]) continue;
        MonitorHit hit;
        hit.name = a.name;
        hit.family = a.family;
        hit.register_priority = reg;
        hit.roles.assign(nv, Role::Top);
        for (int v = 0; v < nv; ++v)
            if (n.roles[v] != kUnassigned) hit.roles[v] = static_cast<Role>(n.roles[v]);
        return hit;
    }
    return std::nullopt;
}

}  // namespace

std::optional<MonitorHit> MonitorSet::hit(const History& h) const {
    std::set<int> occurring;
    for (const auto& o : h.ops)
        if (o.is_put()) occurring.insert(o.priority);
    for (std::size_t m = 0; m < monitors_.size(); ++m) {
        std::vector<int> regs;
        if (tables_[m].guarded) regs.assign(occurring.begin(), occurring.end());
        if (regs.empty()) regs.push_back(-1);
        for (int r : regs) {
            auto found = run_product(h, monitors_[m], tables_[m], r);
            if (found) {
                found->monitor = static_cast<int>(m);
                return found;
            }
        }
    }
    return std::nullopt;
}

std::optional<MonitorHit> monitor_hit(const History& h, const std::vector<RegisterAutomaton>& monitors) {
    return MonitorSet(monitors).hit(h);
}

std::optional<MonitorHit> monitor_hit(const History& h) {
    static const MonitorSet defaults(default_monitors());
    return defaults.hit(h);
}

namespace {

bool matched(const History& h, int v) { return h.put_of(v) >= 0 && h.rm_of(v) >= 0; }

bool is_data(const History& h, int v) { return !h.value_empty[v] && h.by_value[v].present(); }

// v's priority lies strictly below p.
bool lower(const History& h, int v, int p) {
    int q = h.priority_of(v);
    return q >= 0 && h.order->less(q, p);
}

bool ref_matched_gt(const History& h) {
    int nv = h.num_values();
    for (int x = 0; x < nv; ++x) {
        if (!is_data(h, x) || !matched(h, x)) continue;
        std::vector<bool> keep(nv, false);
        keep[x] = true;
        for (int v = 0; v < nv; ++v)
            if (is_data(h, v) && lower(h, v, h.priority_of(x))) keep[v] = true;
        if (!check_matched_gt(project_values(h, keep), x)) return true;
    }
    return false;
}

bool ref_matched_eq(const History& h) {
    int nv = h.num_values();
    auto top = [&](int v, int p) { return is_data(h, v) && matched(h, v) && h.priority_of(v) == p; };
    for (int a = 0; a < nv; ++a) {
        if (!is_data(h, a) || !matched(h, a)) continue;
        int p = h.priority_of(a);
        for (int b = 0; b < nv; ++b) {
            if (b == a || !top(b, p)) continue;
            for (int a1 = -1; a1 < nv; ++a1) {
                if (a1 >= 0 && (a1 == a || a1 == b || !top(a1, p))) continue;
                std::vector<bool> keep(nv, false);
                keep[a] = keep[b] = true;
                if (a1 >= 0) keep[a1] = true;
                for (int v = 0; v < nv; ++v)
                    if (is_data(h, v) && lower(h, v, p)) keep[v] = true;
                if (find_pb_gap(project_values(h, keep))) return true;
            }
        }
    }
    return false;
}

bool ref_empty(const History& h) {
    int nv = h.num_values();
    for (int o = 0; o < nv; ++o) {
        if (!h.value_empty[o]) continue;
        std::vector<bool> keep(nv, false);
        keep[o] = true;
        for (int v = 0; v < nv; ++v)
            if (!h.value_empty[v]) keep[v] = true;
        if (!check_empty_remove(project_values(h, keep), o)) return true;
    }
    return false;
}

}  // namespace

bool family_reference(const History& h, const std::string& family) {
    if (family == "fifo") return !fifo_violations(h).empty();
    if (family == "matched_gt") return ref_matched_gt(h);
    if (family == "matched_eq") return ref_matched_eq(h);
    if (family == "empty") return ref_empty(h);
    throw Error("unknown monitor family: " + family);
}

std::vector<FamilyAgreement> family_agreement(const History& h) {
    static const MonitorSet fifo(build_fifo()), gt(build_matched_gt()), eq(build_matched_eq_shapes()),
        empty(build_empty());
    bool clean = fifo_violations(h).empty();
    std::vector<FamilyAgreement> out;
    for (auto [name, set] : {std::pair{"fifo", &fifo}, {"matched_gt", &gt}, {"matched_eq", &eq}, {"empty", &empty}}) {
        FamilyAgreement f;
        f.family = name;
        f.applicable = clean || f.family == "fifo" || f.family == "empty";
        if (f.applicable) {
            f.monitor = set->hit(h).has_value();
            f.reference = family_reference(h, f.family);
        }
        out.push_back(f);
    }
    return out;
}

std::optional<std::vector<int>> witness_projection(const History& h) {
    auto hit = monitor_hit(h);
    if (!hit) return std::nullopt;
    std::vector<int> out;
    for (int v = 0; v < h.num_values(); ++v)
        if (hit->roles[v] != Role::Top && h.by_value[v].present()) out.push_back(v);
    return out;
}

}  // namespace pqlin
