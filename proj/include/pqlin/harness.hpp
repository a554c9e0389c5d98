#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pqlin/model.hpp"

namespace pqlin {

struct Invocation {
    Method method = Method::Put;
    std::string priority;  // put only
    std::string value;     // put only; empty means "generate a fresh one"
};

// Threads run their scripts in order; the implementation is chosen by name.
struct Program {
    OrderPtr order;
    std::string impl;
    std::vector<std::vector<Invocation>> threads;
};

// One entry per atomic step: the thread that takes it.
using Schedule = std::vector<int>;

struct BoundExceeded : Error {
    using Error::Error;
};

// coarse-lock, stale-min, lifo-tie, racy-empty, late-publish
const std::vector<std::string>& impl_names();
bool is_known_impl(const std::string& name);
// Atomic steps one invocation of method takes under impl.
int steps_of(const std::string& impl, Method method);
std::vector<int> thread_steps(const Program& p);
int total_steps(const Program& p);

// Deterministic trace of prog under s. Op ids are t<thread>.<k>; fresh values
// are v1, v2, ... in order of their put's first step.
Execution run_schedule(const Program& prog, const Schedule& s);

// Number of interleavings: the multinomial of the per-thread step counts.
std::uint64_t count_schedules(const Program& prog);

// Every interleaving exactly once, in DFS order (lowest thread first).
// Throws BoundExceeded when the program has more than `bound` steps.
void enumerate_schedules(const Program& prog, int bound,
                         const std::function<void(const Schedule&, const Execution&)>& visit);

// Uniformly random next-thread choices from a seeded generator.
void fuzz(const Program& prog, std::uint64_t seed, int count,
          const std::function<void(const Schedule&, const Execution&)>& visit);

}  // namespace pqlin
