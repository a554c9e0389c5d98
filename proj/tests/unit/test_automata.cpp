#include "doctest.h"

#include <set>

#include "../support/gen.hpp"
#include "../support/notation.hpp"
#include "pqlin/automata.hpp"
#include "pqlin/conc.hpp"

using namespace pqlin;
using notation::hist;
using notation::value_id;

namespace {

RoleAction act(Kind k, Method m, Role r, int priority = -1) { return {k, m, r, priority}; }

const RegisterAutomaton& by_name(const std::vector<RegisterAutomaton>& ms, const std::string& name) {
    for (const auto& m : ms)
        if (m.name == name) return m;
    throw Error("no monitor " + name);
}

bool has_self_loop(const RegisterAutomaton& a, Kind k, Method m, Role r, Guard g = Guard::True) {
    for (const auto& t : a.transitions)
        if (t.from == t.to && !t.label.guess && t.label.kind == k && t.label.method == m && t.label.role == r &&
            t.label.guard == g)
            return true;
    return false;
}

std::vector<RegisterAutomaton> all_built() {
    std::vector<RegisterAutomaton> out;
    for (auto fam : {build_fifo(), build_matched_gt(), build_matched_gt(Guard::Eq), build_matched_eq(),
                     build_matched_eq_shapes(), build_empty()})
        out.insert(out.end(), fam.begin(), fam.end());
    return out;
}

}  // namespace

TEST_CASE("family sizes") {
    CHECK(build_fifo().size() == 5);
    CHECK(build_matched_gt().size() == 4);
    CHECK(build_matched_eq().size() == 18);
    CHECK(build_matched_eq_shapes().size() == 5);
    CHECK(build_empty().size() == 1);
    CHECK(default_monitors().size() == 15);
}

TEST_CASE("every built automaton is structurally sound") {
    for (const auto& a : all_built()) {
        CAPTURE(a.name);
        CHECK(check_structure(a).empty());
        CHECK_FALSE(a.family.empty());
        CHECK_FALSE(a.case_note.empty());
        int guesses = 0;
        for (const auto& t : a.transitions) {
            if (t.label.guess) {
                ++guesses;
                CHECK(t.from == a.initial);
            }
            if (t.label.guard != Guard::True) CHECK((t.label.kind == Kind::Call && t.label.method == Method::Put));
        }
        CHECK(guesses <= 1);
        CHECK_FALSE(a.uses(Role::E));
    }
}

TEST_CASE("fourteen third-case automata with distinct names") {
    std::set<std::string> names;
    int third = 0;
    for (const auto& a : build_matched_eq()) {
        names.insert(a.name);
        if (a.name.rfind("1-eq3-", 0) == 0) ++third;
    }
    CHECK(third == 14);
    CHECK(names.size() == 18);
}

TEST_CASE("structure check catches broken automata") {
    RegisterAutomaton a = build_empty()[0];
    a.transitions.push_back({a.initial + 1, a.initial, Label{true}});
    CHECK_FALSE(check_structure(a).empty());

    RegisterAutomaton b = build_empty()[0];
    Label bad;
    bad.kind = Kind::Ret;
    bad.method = Method::Rm;
    bad.role = Role::B;
    bad.guard = Guard::Eq;
    b.transitions.push_back({0, 0, bad});
    CHECK_FALSE(check_structure(b).empty());
}

TEST_CASE("accepts") {
    PriorityOrder o({"p1", "p2"});
    o.add_less("p1", "p2");

    RegisterAutomaton none = build_empty()[0];
    std::fill(none.accepting.begin(), none.accepting.end(), false);
    RoleWord stored = {act(Kind::Call, Method::Put, Role::B, 0), act(Kind::Ret, Method::Put, Role::B, 0),
                       act(Kind::Call, Method::Rm, Role::Empty), act(Kind::Ret, Method::Rm, Role::Empty)};
    CHECK_FALSE(accepts(none, stored, o));
    CHECK(accepts(build_empty()[0], stored, o));

    RoleWord drained = {act(Kind::Call, Method::Put, Role::B, 0), act(Kind::Ret, Method::Put, Role::B, 0),
                        act(Kind::Call, Method::Rm, Role::B), act(Kind::Ret, Method::Rm, Role::B),
                        act(Kind::Call, Method::Rm, Role::Empty), act(Kind::Ret, Method::Rm, Role::Empty)};
    CHECK_FALSE(accepts(build_empty()[0], drained, o));

    const auto fifo = build_fifo();
    RoleWord early = {act(Kind::Call, Method::Rm, Role::B), act(Kind::Ret, Method::Rm, Role::B),
                      act(Kind::Call, Method::Put, Role::B, 1), act(Kind::Ret, Method::Put, Role::B, 1)};
    CHECK(accepts(by_name(fifo, "SinPri1"), early, o));
    RoleWord fine = {act(Kind::Call, Method::Put, Role::B, 1), act(Kind::Ret, Method::Put, Role::B, 1),
                     act(Kind::Call, Method::Rm, Role::B), act(Kind::Ret, Method::Rm, Role::B)};
    for (const auto& m : fifo) CHECK_FALSE(accepts(m, fine, o));
}

TEST_CASE("self-loop alphabets named in the captions") {
    // l-lar: ret(rm,a) may occur freely once the cover is established
    bool ret_rm_a = false;
    for (const auto& a : build_matched_gt()) ret_rm_a |= has_self_loop(a, Kind::Ret, Method::Rm, Role::A);
    CHECK(ret_rm_a);
    bool cover_put = false;
    for (const auto& a : build_matched_gt()) cover_put |= has_self_loop(a, Kind::Call, Method::Put, Role::A, Guard::Lt);
    CHECK(cover_put);
    bool eq_cover = false;
    for (const auto& a : build_matched_gt(Guard::Eq)) eq_cover |= has_self_loop(a, Kind::Call, Method::Put, Role::A, Guard::Eq);
    CHECK(eq_cover);
    // 1-eq1: call(put,d,<r)
    CHECK(has_self_loop(by_name(build_matched_eq(), "1-eq1"), Kind::Call, Method::Put, Role::D, Guard::Lt));
}

TEST_CASE("monitor_hit examples") {
    auto o = notation::order("p1<p2");
    CHECK_FALSE(monitor_hit(hist("put(a,p2) put(b,p1) rm(b) rm(a)", o)));

    History blocked = hist("put(d1,p1) put(b,p2) rm(b)", o);
    auto hit = monitor_hit(blocked);
    REQUIRE(hit);
    CHECK(hit->family == "matched_gt");
    CHECK(hit->roles[value_id(blocked, "d1")] == Role::A);
    CHECK(hit->roles[value_id(blocked, "b")] == Role::B);
    CHECK(hit->register_priority == o->id("p2"));

    History covered = hist("put(d1,p1) c:rm(empty) put(d2,p1) rm(d1) r:rm(empty) rm(d2)", o);
    auto eh = monitor_hit(covered);
    REQUIRE(eh);
    CHECK(eh->family == "empty");
    CHECK(eh->roles[value_id(covered, "empty1")] == Role::Empty);
    CHECK(eh->roles[value_id(covered, "d1")] == Role::B);
    CHECK(eh->roles[value_id(covered, "d2")] == Role::B);

    History pb = hist("put(a,p2) put(b,p2) c:rm(b) put(d,p1) c:rm(a) r:rm(b) rm(d) r:rm(a)", o);
    auto ph = monitor_hit(pb);
    REQUIRE(ph);
    CHECK(ph->family == "matched_eq");

    History fifo = hist("put(a,p1) put(b,p1) rm(b) rm(a)", o);
    auto fh = monitor_hit(fifo);
    REQUIRE(fh);
    CHECK(fh->family == "fifo");
}

TEST_CASE("a hit replays through the plain acceptance run") {
    MonitorSet set(default_monitors());
    gen::Rng rng(12);
    int hits = 0;
    for (int i = 0; i < 4000; ++i) {
        History h = gen::random_history(rng);
        auto hit = set.hit(h);
        if (!hit) continue;
        ++hits;
        RoleWord w = rename_to_roles(h, hit->roles);
        CHECK(accepts(set.monitors()[hit->monitor], w, *h.order));
    }
    CHECK(hits > 500);
}

TEST_CASE("monitors and check_execution agree on a random sample") {
    MonitorSet set(default_monitors());
    gen::Rng rng(13);
    int mismatches = 0;
    for (int i = 0; i < 4000; ++i) {
        History h = gen::random_history(rng);
        if (set.hit(h).has_value() == check_execution(h).linearizable) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("per-family agreement on a random sample") {
    gen::Rng rng(14);
    std::map<std::string, int> applicable, mismatched;
    for (int i = 0; i < 3000; ++i) {
        History h = gen::random_history(rng);
        for (const auto& fa : family_agreement(h)) {
            if (!fa.applicable) continue;
            ++applicable[fa.family];
            if (fa.monitor != fa.reference) ++mismatched[fa.family];
        }
    }
    for (const char* f : {"fifo", "matched_gt", "matched_eq", "empty"}) {
        CAPTURE(f);
        CHECK(applicable[f] > 1000);
        CHECK(mismatched[f] == 0);
    }
}

TEST_CASE("the enumerated equal-priority cases are covered by the shapes") {
    MonitorSet cases(build_matched_eq()), shapes(build_matched_eq_shapes());
    gen::Rng rng(15);
    int case_hits = 0;
    for (int i = 0; i < 3000; ++i) {
        auto inst = gen::random_pb_instance(rng, 1, 1, 6);
        const History& h = inst.history;
        if (!fifo_violations(h).empty()) continue;
        if (!cases.hit(h)) continue;
        ++case_hits;
        CHECK(shapes.hit(h));
    }
    CHECK(case_hits > 100);
}

TEST_CASE("cover guard: <r matches the cycle reference, =r does not") {
    MonitorSet lt(build_matched_gt(Guard::Lt)), eq(build_matched_gt(Guard::Eq));
    long checked = 0, lt_bad = 0, eq_bad = 0;
    for (int n = 1; n <= 4; ++n)
        gen::for_each_execution(n, 2, [&](const History& h) {
            if (!fifo_violations(h).empty()) return;
            ++checked;
            bool ref = family_reference(h, "matched_gt");
            if (lt.hit(h).has_value() != ref) ++lt_bad;
            if (eq.hit(h).has_value() != ref) ++eq_bad;
        });
    CHECK(checked > 10000);
    CHECK(lt_bad == 0);
    CHECK(eq_bad > 0);
}

TEST_CASE("witness_projection") {
    auto o = notation::order("p1<p2");
    History blocked = hist("put(d1,p1) put(x,p3) put(b,p2) rm(b)", notation::order("p1<p2, p3"));
    auto proj = witness_projection(blocked);
    REQUIRE(proj);
    std::set<int> got(proj->begin(), proj->end());
    CHECK(got.count(value_id(blocked, "b")));
    CHECK(got.count(value_id(blocked, "d1")));
    CHECK_FALSE(got.count(value_id(blocked, "x")));
    CHECK_FALSE(witness_projection(hist("put(a,p1) rm(a)", o)));
}
