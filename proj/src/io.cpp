#include "pqlin/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace pqlin {

using nlohmann::json;

namespace {

void check_format(const json& j, const char* what) {
    if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
    if (j.contains("format") && j.at("format") != kFormatVersion)
        throw ParseError(std::string(what) + ": unsupported format " + j.at("format").dump());
}

std::string get_string(const json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string(what) + ": missing field '" + key + "'");
    if (!it->is_string()) throw ParseError(std::string(what) + ": field '" + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

PriorityOrder order_from_json(const json& j) {
    check_format(j, "priority order");
    PriorityOrder o;
    try {
        for (const auto& p : j.at("priorities")) o.add(p.get<std::string>());
        if (j.contains("less_than"))
            for (const auto& pair : j.at("less_than")) {
                if (!pair.is_array() || pair.size() != 2) throw ParseError("priority order: less_than entries are [p, q] pairs");
                o.add_less(pair[0].get<std::string>(), pair[1].get<std::string>());
            }
    } catch (const json::exception& e) {
        throw ParseError(std::string("priority order: ") + e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("priority order: ") + e.what());
    }
    return o;
}

json order_to_json(const PriorityOrder& o) {
    json pairs = json::array();
    for (auto [p, q] : o.pairs()) pairs.push_back({o.name(p), o.name(q)});
    return {{"format", kFormatVersion}, {"priorities", o.names()}, {"less_than", pairs}};
}

OrderPtr read_order_file(const std::string& path) {
    return std::make_shared<PriorityOrder>(order_from_json(read_json_file(path)));
}

void write_order_file(const std::string& path, const PriorityOrder& o) { write_json_file(path, order_to_json(o)); }

Action action_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("action: expected a JSON object");
    Action a;
    a.op = get_string(j, "op", "action");
    std::string kind = get_string(j, "kind", "action");
    if (kind == "call") a.kind = Kind::Call;
    else if (kind == "ret") a.kind = Kind::Ret;
    else throw ParseError("action: kind must be \"call\" or \"ret\", got \"" + kind + "\"");
    std::string method = get_string(j, "method", "action");
    if (method == "put") a.method = Method::Put;
    else if (method == "rm") a.method = Method::Rm;
    else throw ParseError("action: method must be \"put\" or \"rm\", got \"" + method + "\"");
    a.value = get_string(j, "value", "action");
    if (a.method == Method::Put) a.priority = get_string(j, "priority", "action");
    if (auto it = j.find("empty"); it != j.end()) {
        if (!it->is_boolean()) throw ParseError("action: field 'empty' must be a boolean");
        a.empty = it->get<bool>();
    }
    return a;
}

json action_to_json(const Action& a) {
    json j = {{"op", a.op},
              {"kind", a.kind == Kind::Call ? "call" : "ret"},
              {"method", a.method == Method::Put ? "put" : "rm"},
              {"value", a.value}};
    if (a.method == Method::Put) j["priority"] = a.priority;
    else j["empty"] = a.empty;
    return j;
}

Execution read_trace(std::istream& in, OrderPtr order) {
    Execution e;
    std::string line;
    int lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& err) {
            throw ParseError("trace line " + std::to_string(lineno) + ": " + err.what());
        }
        if (first && j.is_object() && j.contains("format") && !j.contains("op")) {
            check_format(j, "trace header");
            first = false;
            continue;
        }
        first = false;
        try {
            e.actions.push_back(action_from_json(j));
        } catch (const ParseError& err) {
            throw ParseError("trace line " + std::to_string(lineno) + ": " + err.what());
        }
    }
    if (!order) {
        auto o = std::make_shared<PriorityOrder>();
        for (const auto& a : e.actions)
            if (a.method == Method::Put) o->add(a.priority);
        order = o;
    }
    e.order = std::move(order);
    return e;
}

Execution read_trace_file(const std::string& path, OrderPtr order) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_trace(in, std::move(order));
}

void write_trace(std::ostream& out, const Execution& e) {
    out << json{{"format", kFormatVersion}}.dump() << '\n';
    for (const auto& a : e.actions) out << action_to_json(a).dump() << '\n';
}

void write_trace_file(const std::string& path, const Execution& e) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_trace(out, e);
}

json verdict_to_json(const History& h, const Verdict& v) {
    const History& s = v.subject ? *v.subject : h;
    auto names = [&](const std::vector<int>& ids) { return value_names(s, ids); };
    json ev = {{"tag", evidence_tag(v.evidence.tag)}};
    const Evidence& x = v.evidence;
    if (!x.fifo.empty()) {
        json arr = json::array();
        for (const auto& f : x.fifo) arr.push_back({{"pattern", f.pattern}, {"values", names(f.values)}});
        ev["fifo"] = arr;
    }
    if (!x.cycle.empty()) ev["cycle"] = names(x.cycle);
    if (x.pb_gap) {
        const PbGap& g = *x.pb_gap;
        ev["pb_gap"] = {{"x", s.values[g.x]},
                        {"y", s.values[g.y]},
                        {"rightmost_gap", g.rightmost_gap ? json(*g.rightmost_gap) : json(nullptr)},
                        {"bound", g.bound}};
    }
    if (x.priority) ev["priority"] = s.order->name(*x.priority);
    if (!x.note.empty()) ev["note"] = x.note;
    json j = {{"format", kFormatVersion},
              {"linearizable", v.linearizable},
              {"complete", v.complete},
              {"evidence", ev},
              {"projection", names(v.projection)}};
    if (!v.message.empty()) j["message"] = v.message;
    return j;
}

Program program_from_json(const json& j, OrderPtr fallback_order) {
    check_format(j, "program");
    Program p;
    try {
        p.impl = get_string(j, "impl", "program");
        if (j.contains("order")) p.order = std::make_shared<PriorityOrder>(order_from_json(j.at("order")));
        else p.order = std::move(fallback_order);
        if (!p.order) throw ParseError("program: no priority order given");
        if (!is_known_impl(p.impl)) throw ParseError("program: unknown implementation \"" + p.impl + "\"");
        for (const auto& th : j.at("threads")) {
            std::vector<Invocation> script;
            for (const auto& inv : th) {
                Invocation i;
                std::string m = get_string(inv, "method", "program invocation");
                if (m == "put") {
                    i.method = Method::Put;
                    i.priority = get_string(inv, "priority", "program invocation");
                    if (p.order->find(i.priority) < 0) throw ParseError("program: unknown priority \"" + i.priority + "\"");
                    if (inv.contains("value")) i.value = get_string(inv, "value", "program invocation");
                } else if (m == "rm") {
                    i.method = Method::Rm;
                } else {
                    throw ParseError("program: method must be \"put\" or \"rm\"");
                }
                script.push_back(i);
            }
            p.threads.push_back(std::move(script));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("program: ") + e.what());
    }
    return p;
}

json program_to_json(const Program& p) {
    json threads = json::array();
    for (const auto& th : p.threads) {
        json script = json::array();
        for (const auto& i : th) {
            json inv = {{"method", i.method == Method::Put ? "put" : "rm"}};
            if (i.method == Method::Put) {
                inv["priority"] = i.priority;
                if (!i.value.empty()) inv["value"] = i.value;
            }
            script.push_back(inv);
        }
        threads.push_back(script);
    }
    json j = {{"format", kFormatVersion}, {"impl", p.impl}, {"threads", threads}};
    if (p.order) j["order"] = order_to_json(*p.order);
    return j;
}

Program read_program_file(const std::string& path, OrderPtr fallback_order) {
    return program_from_json(read_json_file(path), std::move(fallback_order));
}

json automaton_to_json(const RegisterAutomaton& a) {
    json states = json::array();
    for (int s = 0; s < a.num_states(); ++s)
        states.push_back({{"id", s}, {"name", a.states[s]}, {"accepting", static_cast<bool>(a.accepting[s])}});
    json trans = json::array();
    for (const auto& t : a.transitions) trans.push_back({{"from", t.from}, {"to", t.to}, {"label", to_string(t.label)}});
    json set_roles = json::array();
    for (Role r : a.set_roles) set_roles.push_back(role_name(r));
    return {{"name", a.name},       {"family", a.family}, {"case", a.case_note}, {"initial", a.initial},
            {"set_roles", set_roles}, {"states", states}, {"transitions", trans}};
}

json monitors_to_json(const std::vector<RegisterAutomaton>& monitors) {
    json arr = json::array();
    for (const auto& a : monitors) arr.push_back(automaton_to_json(a));
    return {{"format", kFormatVersion}, {"monitors", arr}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace pqlin
