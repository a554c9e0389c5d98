// Python bindings: traces and orders go in as JSON text (the same formats the
// CLI reads), verdicts come back as plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pqlin/automata.hpp"
#include "pqlin/conc.hpp"
#include "pqlin/harness.hpp"
#include "pqlin/io.hpp"
#include "pqlin/oracle.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace pqlin;

namespace {

py::object to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return py::none();
        case json::value_t::boolean: return py::bool_(j.get<bool>());
        case json::value_t::number_integer: return py::int_(j.get<long long>());
        case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case json::value_t::number_float: return py::float_(j.get<double>());
        case json::value_t::string: return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const auto& x : j) out.append(to_py(x));
            return std::move(out);
        }
        case json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = to_py(it.value());
            return std::move(out);
        }
        default: return py::none();
    }
}

History load(const std::string& trace, const std::optional<std::string>& order) {
    OrderPtr o;
    if (order) o = std::make_shared<PriorityOrder>(order_from_json(json::parse(*order)));
    std::istringstream in(trace);
    return compile(read_trace(in, o));
}

Program load_program(const std::string& text) { return program_from_json(json::parse(text)); }

std::string trace_text(const Execution& e) {
    std::ostringstream out;
    write_trace(out, e);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Linearizability checking for priority-queue traces";

    // translators are tried newest first, so the base class goes first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);
    py::register_exception<BoundExceeded>(m, "BoundExceeded", PyExc_RuntimeError);

    m.def(
        "check",
        [](const std::string& trace, std::optional<std::string> order, int proj_bound) {
            History h = load(trace, order);
            CheckOptions opt;
            opt.proj_bound = proj_bound;
            return to_py(verdict_to_json(h, check_execution(h, opt)));
        },
        py::arg("trace"), py::arg("order") = py::none(), py::arg("proj_bound") = 12,
        "Verdict dict for a JSONL trace under an optional JSON priority order.");

    m.def(
        "oracle",
        [](const std::string& trace, std::optional<std::string> order, int cap) {
            History h = load(trace, order);
            auto r = is_linearizable_bruteforce(h, cap);
            py::dict out;
            out["linearizable"] = r.linearizable;
            if (r.witness) {
                py::list ids;
                for (int k : *r.witness) ids.append(h.ops[k].id);
                out["witness"] = ids;
            }
            return out;
        },
        py::arg("trace"), py::arg("order") = py::none(), py::arg("cap") = kDefaultOracleCap);

    m.def(
        "monitor",
        [](const std::string& trace, std::optional<std::string> order) -> py::object {
            History h = load(trace, order);
            auto hit = monitor_hit(h);
            if (!hit) return py::none();
            py::dict roles;
            for (int v = 0; v < h.num_values(); ++v)
                if (hit->roles[v] != Role::Top) roles[py::str(h.values[v])] = role_name(hit->roles[v]);
            py::dict out;
            out["monitor"] = hit->name;
            out["family"] = hit->family;
            out["roles"] = roles;
            return std::move(out);
        },
        py::arg("trace"), py::arg("order") = py::none(), "First monitor hit, or None.");

    m.def("impl_names", &impl_names);
    m.def(
        "count_schedules", [](const std::string& program) { return count_schedules(load_program(program)); },
        py::arg("program"));
    m.def(
        "run_schedule",
        [](const std::string& program, const Schedule& s) { return trace_text(run_schedule(load_program(program), s)); },
        py::arg("program"), py::arg("schedule"), "JSONL trace of the program under one schedule.");
    m.def(
        "fuzz",
        [](const std::string& program, std::uint64_t seed, int count) {
            std::vector<std::string> out;
            fuzz(load_program(program), seed, count,
                 [&](const Schedule&, const Execution& e) { out.push_back(trace_text(e)); });
            return out;
        },
        py::arg("program"), py::arg("seed"), py::arg("count"));
}
