#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "pqlin/automata.hpp"
#include "pqlin/conc.hpp"
#include "pqlin/harness.hpp"
#include "pqlin/model.hpp"

namespace pqlin {

// Raised for unreadable or malformed input files.
struct ParseError : Error {
    using Error::Error;
};

inline constexpr int kFormatVersion = 1;

// Priority order: {"format":1,"priorities":[..],"less_than":[[p,q],..]}.
// Written transitively closed.
PriorityOrder order_from_json(const nlohmann::json& j);
nlohmann::json order_to_json(const PriorityOrder& o);
OrderPtr read_order_file(const std::string& path);
void write_order_file(const std::string& path, const PriorityOrder& o);

// Trace: JSON Lines. An optional first line {"format":1} is the header;
// every other line is one action. With no order, the priorities seen in the
// trace become pairwise incomparable.
Action action_from_json(const nlohmann::json& j);
nlohmann::json action_to_json(const Action& a);
Execution read_trace(std::istream& in, OrderPtr order);
Execution read_trace_file(const std::string& path, OrderPtr order);
void write_trace(std::ostream& out, const Execution& e);
void write_trace_file(const std::string& path, const Execution& e);

// Verdict with evidence tag and value names relative to the checked history.
nlohmann::json verdict_to_json(const History& h, const Verdict& v);

// Program: {"format":1,"impl":"..","order":{..},"threads":[[{"method":"put",
// "priority":"p1"},{"method":"rm"}],..]}. `order` may be omitted when an
// order is supplied separately.
Program program_from_json(const nlohmann::json& j, OrderPtr fallback_order = nullptr);
nlohmann::json program_to_json(const Program& p);
Program read_program_file(const std::string& path, OrderPtr fallback_order = nullptr);

nlohmann::json automaton_to_json(const RegisterAutomaton& a);
nlohmann::json monitors_to_json(const std::vector<RegisterAutomaton>& monitors);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace pqlin
