#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pqlin {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Strict partial order over priority names. Pairs are closed transitively on
// every insertion; a pair that would close a cycle is rejected.
class PriorityOrder {
public:
    PriorityOrder() = default;
    explicit PriorityOrder(const std::vector<std::string>& names);

    int add(const std::string& name);  // idempotent
    int find(const std::string& name) const;  // -1 when unknown
    int id(const std::string& name) const;    // throws when unknown
    const std::string& name(int p) const { return names_[p]; }
    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

    void add_less(const std::string& lo, const std::string& hi);
    void add_less(int lo, int hi);
    bool less(int p, int q) const { return lt_[p][q]; }
    bool less_eq(int p, int q) const { return p == q || lt_[p][q]; }
    bool comparable(int p, int q) const { return p == q || lt_[p][q] || lt_[q][p]; }
    std::vector<std::pair<int, int>> pairs() const;

    // Chain p0 < p1 < ... over the given names.
    static PriorityOrder chain(const std::vector<std::string>& names);

private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<std::vector<bool>> lt_;
};

using OrderPtr = std::shared_ptr<const PriorityOrder>;

enum class Kind : std::uint8_t { Call, Ret };
enum class Method : std::uint8_t { Put, Rm };

struct Action {
    std::string op;
    Kind kind = Kind::Call;
    Method method = Method::Put;
    std::string value;
    std::string priority;  // put only
    bool empty = false;    // rm(empty) only

    bool operator==(const Action&) const = default;
};

// Surface form of a trace: a list of actions plus the priority order. All
// algorithms run on the compiled History below.
struct Execution {
    std::vector<Action> actions;
    OrderPtr order;
};

struct Violation {
    enum Code { UnmatchedReturn, DuplicateOp, PendingOp, UnknownPriority, MalformedEmpty };
    Code code;
    std::size_t index;  // action index the problem was found at
    std::string detail;
};
const char* violation_name(Violation::Code c);

std::vector<Violation> validate(const Execution& e);

// One operation of a completed execution.
struct Op {
    std::string id;
    Method method = Method::Put;
    int value = -1;     // index into History::values
    int priority = -1;  // put only
    bool empty = false;
    int call = -1;      // action index
    int ret = -1;       // action index
    bool is_put() const { return method == Method::Put; }
    bool is_rm() const { return method == Method::Rm; }
};

// Compiled, validated execution. Value ids are stable under projection so
// that a value id means the same thing in every projection of a history.
struct History {
    OrderPtr order;
    std::vector<std::string> values;     // value names, indexed by value id
    std::vector<bool> value_empty;       // value id is an rm(empty) token
    std::vector<Op> ops;                 // sorted by call index
    std::vector<std::pair<int, Kind>> actions;  // op index + kind per action

    int length() const { return static_cast<int>(actions.size()); }
    int num_values() const { return static_cast<int>(values.size()); }
    bool hb(int a, int b) const { return ops[a].ret < ops[b].call; }

    // Per-value lookups (empty when absent). Rebuilt by index().
    struct ValueOps {
        std::vector<int> puts;
        std::vector<int> rms;
        bool present() const { return !puts.empty() || !rms.empty(); }
    };
    std::vector<ValueOps> by_value;
    void index();

    int put_of(int v) const { return by_value[v].puts.empty() ? -1 : by_value[v].puts.front(); }
    int rm_of(int v) const { return by_value[v].rms.empty() ? -1 : by_value[v].rms.front(); }
    int priority_of(int v) const {
        int o = put_of(v);
        return o < 0 ? -1 : ops[o].priority;
    }
    std::vector<int> present_values() const;
};

// Throws Error listing the violations when e is not well formed.
History compile(const Execution& e);
Execution decompile(const History& h);

// Builds a history from ops given in call order with explicit action
// positions; used by generators. Ops must already carry call/ret indices.
History make_history(OrderPtr order, std::vector<std::string> values, std::vector<bool> value_empty,
                     std::vector<Op> ops);

std::vector<std::pair<std::string, std::string>> happens_before(const Execution& e);
// Interval-order law on op indices: a<b and c<d imply a<d or c<b.
bool is_interval_order(const History& h);

History project_values(const History& h, const std::vector<bool>& keep);
History project_values(const History& h, std::uint64_t mask);
Execution project_values(const Execution& e, const std::vector<std::string>& values);

std::vector<int> maximal_priorities(const History& h);
History project_priority_downset(const History& h, int p);
Execution project_priority_downset(const Execution& e, const std::string& p);

Execution rename(const Execution& e, const std::map<std::string, std::string>& r);

bool is_data_differentiated(const History& h);
bool is_data_differentiated(const Execution& e);

// Sequential: every call immediately followed by its return.
bool is_sequential(const History& h);

// Short text form, one op per token, e.g. "put(a,p1) rm(a) rm(empty)" for
// sequential histories; concurrent ones list actions.
std::string to_string(const History& h);

}  // namespace pqlin
