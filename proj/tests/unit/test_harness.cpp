#include "doctest.h"

#include <set>

#include "../support/notation.hpp"
#include "pqlin/conc.hpp"
#include "pqlin/harness.hpp"
#include "pqlin/oracle.hpp"

using namespace pqlin;

namespace {

Invocation put(const std::string& p, const std::string& v = "") { return {Method::Put, p, v}; }
Invocation rm() { return {Method::Rm, "", ""}; }

Program program(const std::string& impl, std::vector<std::vector<Invocation>> threads) {
    return {notation::order("p1<p2"), impl, std::move(threads)};
}

std::string text(const Execution& e) { return to_string(compile(e)); }

}  // namespace

TEST_CASE("implementations and step counts") {
    CHECK(impl_names().size() == 5);
    for (const auto& n : impl_names()) CHECK(is_known_impl(n));
    CHECK_FALSE(is_known_impl("skiplist"));
    CHECK(steps_of("coarse-lock", Method::Put) == 2);
    CHECK(steps_of("late-publish", Method::Put) == 1);
    Program p = program("coarse-lock", {{put("p1"), rm()}, {put("p2")}});
    CHECK(thread_steps(p) == std::vector<int>{4, 2});
    CHECK(total_steps(p) == 6);
}

TEST_CASE("single thread put then rm is linearizable") {
    Program p = program("coarse-lock", {{put("p1"), rm()}});
    Execution e = run_schedule(p, {0, 0, 0, 0});
    CHECK(validate(e).empty());
    CHECK(text(e) == "put(v1,p1) rm(v1)");
    CHECK(check_execution(compile(e)).linearizable);
}

TEST_CASE("invalid schedules are rejected") {
    Program p = program("coarse-lock", {{put("p1")}, {rm()}});
    CHECK_THROWS_AS(run_schedule(p, {0, 0, 0}), Error);  // thread 0 has only 2 steps
    CHECK_THROWS_AS(run_schedule(p, {0, 2}), Error);     // no thread 2
    CHECK_THROWS_AS(run_schedule(p, {0, 0}), Error);     // thread 1 never runs
}

TEST_CASE("schedule counts") {
    Program two = program("late-publish", {{put("p1")}, {put("p2")}});  // one step each
    int seen = 0;
    enumerate_schedules(two, 10, [&](const Schedule&, const Execution&) { ++seen; });
    CHECK(seen == 2);

    Program p = program("coarse-lock", {{put("p1"), rm()}, {put("p2")}, {rm()}});
    CHECK(count_schedules(p) == 420);  // 8! / (4! 2! 2!)
    std::set<Schedule> all;
    enumerate_schedules(p, 10, [&](const Schedule& s, const Execution& e) {
        CHECK(all.insert(s).second);
        CHECK(validate(e).empty());
    });
    CHECK(all.size() == 420);

    Program big = program("coarse-lock", {{put("p1"), rm(), put("p1")}, {rm(), rm()}});
    CHECK_THROWS_AS(enumerate_schedules(big, 9, [](const Schedule&, const Execution&) {}), BoundExceeded);
}

TEST_CASE("enumeration order is depth-first, lowest thread first") {
    Program p = program("coarse-lock", {{put("p1")}, {put("p2")}});
    std::vector<Schedule> order;
    enumerate_schedules(p, 10, [&](const Schedule& s, const Execution&) { order.push_back(s); });
    REQUIRE(order.size() == 6);
    CHECK(order.front() == Schedule{0, 0, 1, 1});
    CHECK(order.back() == Schedule{1, 1, 0, 0});
}

TEST_CASE("fuzz is reproducible") {
    Program p = program("racy-empty", {{put("p1"), rm()}, {put("p2"), rm(), rm()}});
    std::vector<std::string> first, second, other;
    fuzz(p, 42, 50, [&](const Schedule&, const Execution& e) { first.push_back(text(e)); });
    fuzz(p, 42, 50, [&](const Schedule&, const Execution& e) { second.push_back(text(e)); });
    fuzz(p, 43, 50, [&](const Schedule&, const Execution& e) { other.push_back(text(e)); });
    CHECK(first == second);
    CHECK(first != other);
}

TEST_CASE("traces are differentiated and well formed") {
    for (const auto& impl : impl_names()) {
        Program p = program(impl, {{put("p2"), rm()}, {put("p1"), rm()}, {rm()}});
        fuzz(p, 7, 200, [&](const Schedule&, const Execution& e) {
            CHECK(validate(e).empty());
            CHECK(is_data_differentiated(e));
        });
    }
}

TEST_CASE("implementations are data independent") {
    for (const auto& impl : impl_names()) {
        CAPTURE(impl);
        Program named = program(impl, {{put("p2", "x"), rm()}, {put("p1", "y"), rm()}, {put("p2", "z")}});
        Program renamed = program(impl, {{put("p2", "q"), rm()}, {put("p1", "r"), rm()}, {put("p2", "s")}});
        std::map<std::string, std::string> r = {{"x", "q"}, {"y", "r"}, {"z", "s"}};
        fuzz(named, 5, 300, [&](const Schedule& s, const Execution& e) {
            std::map<std::string, std::string> full = r;
            for (const auto& a : e.actions)
                if (a.empty) full[a.value] = a.value;
            Execution expect = rename(e, full);
            Execution got = run_schedule(renamed, s);
            CHECK(got.actions == expect.actions);
        });
    }
}

TEST_CASE("correct implementation under fuzzing") {
    Program p = program("coarse-lock", {{put("p2"), rm(), put("p1")}, {put("p1"), rm()}, {rm(), put("p2")}});
    int rejected = 0;
    fuzz(p, 1, 10000, [&](const Schedule&, const Execution& e) {
        if (!check_execution(compile(e)).linearizable) ++rejected;
    });
    CHECK(rejected == 0);
}

TEST_CASE("lifo-tie fuzzing finds a pattern-4 violation") {
    Program p = program("lifo-tie", {{put("p1"), rm()}, {put("p1"), rm()}});
    int pattern4 = 0;
    fuzz(p, 1, 10000, [&](const Schedule&, const Execution& e) {
        for (const auto& v : fifo_violations(compile(e))) pattern4 += v.pattern == 4;
    });
    CHECK(pattern4 >= 1);
}

TEST_CASE("stale-min under a crafted schedule") {
    // rm fixes its slot at the call and pops whatever sits there at the
    // return, so it can hand back v2 while v1 (smaller) is still stored
    Program p = program("stale-min", {{put("p1"), put("p2")}, {rm()}});
    int rejected = 0;
    enumerate_schedules(p, 10, [&](const Schedule&, const Execution& e) {
        History h = compile(e);
        auto v = check_execution(h);
        if (v.linearizable) return;
        ++rejected;
        CHECK(v.evidence.tag == Evidence::Cycle);
        CHECK_FALSE(is_linearizable_bruteforce(h).linearizable);
    });
    CHECK(rejected >= 1);
}
