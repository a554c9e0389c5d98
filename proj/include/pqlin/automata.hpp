#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqlin/model.hpp"

namespace pqlin {

// Fixed role alphabet. E is reserved and used by no monitor.
enum class Role : std::uint8_t { A, B, A1, D, E, Top, Empty };
inline constexpr int kNumRoles = 7;
const char* role_name(Role r);

// Put-call guards against the single register.
enum class Guard : std::uint8_t { True, Eq, Lt };
const char* guard_name(Guard g);

struct Label {
    bool guess = false;  // r=* (store an arbitrary priority)
    Kind kind = Kind::Call;
    Method method = Method::Put;
    Role role = Role::Top;
    Guard guard = Guard::True;  // meaningful on put calls only
    bool operator==(const Label&) const = default;
};
std::string to_string(const Label& l);

struct Transition {
    int from;
    int to;
    Label label;
};

struct RegisterAutomaton {
    std::string name;
    std::string family;     // fifo | matched_gt | matched_eq | empty
    std::string case_note;  // ordering case the automaton encodes
    std::vector<std::string> states;
    int initial = 0;
    std::vector<bool> accepting;
    std::vector<Transition> transitions;
    // Roles that may be given to several values at once (covering chains).
    std::vector<Role> set_roles;

    int num_states() const { return static_cast<int>(states.size()); }
    std::vector<Role> roles() const;  // non-Top roles on some transition
    bool uses(Role r) const;
    bool is_set_role(Role r) const;
    bool has_register_guards() const;
};

// Structural invariants: one guess, only out of the initial state; guards
// only on put calls; transitions within range. Returns the problems found.
std::vector<std::string> check_structure(const RegisterAutomaton& a);

// One action of a renamed execution.
struct RoleAction {
    Kind kind = Kind::Call;
    Method method = Method::Put;
    Role role = Role::Top;
    int priority = -1;  // put actions only
};
using RoleWord = std::vector<RoleAction>;

// The register is resolved by trying every priority occurring in w.
bool accepts(const RegisterAutomaton& a, const RoleWord& w, const PriorityOrder& order);

// Per-priority FIFO patterns 1, 2, 3 and 4 (two automata: rm(a) absent, or
// rm(b) before rm(a)).
std::vector<RegisterAutomaton> build_fifo();
// Single maximal value b covered by smaller values renamed a; one automaton
// per ordering case of b's four actions. cover_guard is the guard of the
// a-role put calls.
std::vector<RegisterAutomaton> build_matched_gt(Guard cover_guard = Guard::Lt);
// Equal-priority violations as enumerated case by case: two orderings for a
// put-before b, then three orderings for a chain a, a1, b, the first split
// into fourteen cases by where the calls of put(b) and put(a) fall.
std::vector<RegisterAutomaton> build_matched_eq();
// Same violation class, one automaton per put-before shape (A, B, C, A then
// B through a1, B then A through a1) with no extra ordering assumptions.
std::vector<RegisterAutomaton> build_matched_eq_shapes();
// rm(empty) whose window is covered by values renamed b.
std::vector<RegisterAutomaton> build_empty();
// Monitor set used by monitor_hit by default.
std::vector<RegisterAutomaton> default_monitors();

struct MonitorHit {
    int monitor = -1;
    std::string name;
    std::string family;
    std::vector<Role> roles;  // per value id; Top outside the projection
    int register_priority = -1;
};

RoleWord rename_to_roles(const History& h, const std::vector<Role>& roles);

// Monitors with their transition tables indexed once; reuse across histories.
class MonitorSet {
public:
    explicit MonitorSet(std::vector<RegisterAutomaton> monitors);
    ~MonitorSet();
    MonitorSet(MonitorSet&&) noexcept;
    MonitorSet& operator=(MonitorSet&&) noexcept;

    const std::vector<RegisterAutomaton>& monitors() const { return monitors_; }
    std::optional<MonitorHit> hit(const History& h) const;

    struct Table;

private:
    std::vector<RegisterAutomaton> monitors_;
    std::vector<Table> tables_;
};

// Searches role assignments and register values for a run of some monitor on
// the renamed history. Roles are chosen at each value's first action.
std::optional<MonitorHit> monitor_hit(const History& h, const std::vector<RegisterAutomaton>& monitors);
std::optional<MonitorHit> monitor_hit(const History& h);

// One monitor family next to its counterpart on the characterization side:
//   fifo        some per-priority FIFO pattern
//   matched_gt  a left-right cycle through some matched x, over x and the
//               values of strictly smaller priority
//   matched_eq  a pb/gap witness over two or three matched values of one
//               priority and the values below it
//   empty       a cycle in some rm(empty) constraint graph
// The two middle families are only compared on FIFO-clean histories, the
// setting their characterizations assume (applicable is false otherwise).
struct FamilyAgreement {
    std::string family;
    bool applicable = true;
    bool monitor = false;
    bool reference = false;
};
std::vector<FamilyAgreement> family_agreement(const History& h);
bool family_reference(const History& h, const std::string& family);

// Value ids of the projection a monitor hit points at, if any.
std::optional<std::vector<int>> witness_projection(const History& h);

}  // namespace pqlin
