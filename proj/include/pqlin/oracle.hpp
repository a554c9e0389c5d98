#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pqlin/model.hpp"
#include "pqlin/seq.hpp"

namespace pqlin {

struct CapExceeded : Error {
    using Error::Error;
};

inline constexpr int kDefaultOracleCap = 12;

// A linearization is a permutation of op indices respecting happens-before.
using Linearization = std::vector<int>;

// Calls visit on every linearization exactly once; visit returns false to
// stop early. Returns the number visited.
std::size_t enumerate_linearizations(const History& h, const std::function<bool(const Linearization&)>& visit,
                                     int cap = kDefaultOracleCap);
std::size_t count_linearizations(const History& h, int cap = kDefaultOracleCap);

Word word_of(const History& h, const Linearization& lin);

struct OracleResult {
    bool linearizable = false;
    std::optional<Linearization> witness;
};

OracleResult is_linearizable_bruteforce(const History& h, int cap = kDefaultOracleCap);

enum class Branch { EmptyRemove, UnmatchedMaxPriority, MatchedMaxPriority };
const char* branch_name(Branch g);

// Some linearization s of h satisfies the sequential predicate for target
// (an rm(empty) token for EmptyRemove, a value id otherwise).
bool branch_oracle(const History& h, Branch g, int target, int cap = kDefaultOracleCap);
// Some target works.
bool branch_oracle_any(const History& h, Branch g, int cap = kDefaultOracleCap);

}  // namespace pqlin
