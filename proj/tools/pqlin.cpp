// pqlin: check priority-queue traces, generate traces from the toy
// implementations, and cross-check the three decision procedures.
//
// Exit codes: 0 linearizable / no disagreement, 1 violation or disagreement,
// 2 input error, 3 bound exceeded or verdict incomplete.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "pqlin/automata.hpp"
#include "pqlin/conc.hpp"
#include "pqlin/harness.hpp"
#include "pqlin/io.hpp"
#include "pqlin/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pqlin;

namespace {

enum Exit { kOk = 0, kViolation = 1, kInputError = 2, kIncomplete = 3 };

struct Config {
    std::vector<std::string> inputs;
    std::string order_path;
    std::string mode = "characterization";
    int oracle_cap = kDefaultOracleCap;
    int proj_bound = 12;
    int schedule_bound = 10;
    std::optional<std::uint64_t> seed;
    int count = 1000;
    std::string out;
    std::string impl;
    std::string program;
    int jobs = 1;
};

void emit(const Config& cfg, const json& j) {
    if (cfg.out.empty() || cfg.out == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    write_json_file(cfg.out, j);
}

OrderPtr order_for(const Config& cfg, const fs::path& dir = {}) {
    if (!cfg.order_path.empty()) return read_order_file(cfg.order_path);
    if (!dir.empty() && fs::exists(dir / "order.json")) return read_order_file((dir / "order.json").string());
    return nullptr;
}

json oracle_json(const History& h, int cap) {
    auto r = is_linearizable_bruteforce(h, cap);
    json j = {{"linearizable", r.linearizable}};
    if (r.witness) {
        json ops = json::array();
        for (int k : *r.witness) ops.push_back(h.ops[k].id);
        j["witness"] = ops;
    }
    return j;
}

json automata_json(const History& h) {
    auto hit = monitor_hit(h);
    json j = {{"linearizable", !hit.has_value()}};
    if (hit) {
        json roles = json::object();
        for (int v = 0; v < h.num_values(); ++v)
            if (hit->roles[v] != Role::Top) roles[h.values[v]] = role_name(hit->roles[v]);
        j["monitor"] = hit->name;
        j["family"] = hit->family;
        j["roles"] = roles;
        if (hit->register_priority >= 0) j["register"] = h.order->name(hit->register_priority);
    }
    return j;
}

// One trace in one mode; returns the exit code it maps to.
int check_one(const Config& cfg, const History& h, json& out) {
    CheckOptions opt;
    opt.proj_bound = cfg.proj_bound;
    if (cfg.mode == "characterization") {
        Verdict v = check_execution(h, opt);
        out = verdict_to_json(h, v);
        if (!v.linearizable) return kViolation;
        return v.complete ? kOk : kIncomplete;
    }
    if (cfg.mode == "oracle") {
        try {
            out = oracle_json(h, cfg.oracle_cap);
        } catch (const CapExceeded& e) {
            out = {{"linearizable", nullptr}, {"complete", false}, {"message", e.what()}};
            return kIncomplete;
        }
        out["format"] = kFormatVersion;
        return out["linearizable"].get<bool>() ? kOk : kViolation;
    }
    if (cfg.mode == "automata") {
        if (!is_data_differentiated(h)) throw ParseError("automata mode needs a data-differentiated trace");
        out = automata_json(h);
        out["format"] = kFormatVersion;
        return out["linearizable"].get<bool>() ? kOk : kViolation;
    }
    // xcheck
    Verdict v = check_execution(h, opt);
    out = {{"format", kFormatVersion}, {"characterization", verdict_to_json(h, v)}};
    if (is_data_differentiated(h)) out["automata"] = automata_json(h);
    bool capped = false;
    try {
        out["oracle"] = oracle_json(h, cfg.oracle_cap);
    } catch (const CapExceeded& e) {
        out["oracle"] = {{"linearizable", nullptr}, {"message", e.what()}};
        capped = true;
    }
    bool agree = true;
    for (const char* k : {"automata", "oracle"})
        if (out.contains(k) && out[k]["linearizable"].is_boolean() && out[k]["linearizable"].get<bool>() != v.linearizable)
            agree = false;
    out["agree"] = agree;
    if (!agree || !v.linearizable) return kViolation;
    return capped || !v.complete ? kIncomplete : kOk;
}

int cmd_check(const Config& cfg) {
    OrderPtr order;
    try {
        order = order_for(cfg);
    } catch (const Error& e) {
        std::cerr << "pqlin: " << e.what() << '\n';
        return kInputError;
    }
    json results = json::array();
    int worst = kOk;
    bool violation = false, incomplete = false;
    for (const auto& path : cfg.inputs) {
        json out;
        try {
            History h = compile(read_trace_file(path, order));
            int code = check_one(cfg, h, out);
            violation |= code == kViolation;
            incomplete |= code == kIncomplete;
        } catch (const Error& e) {
            std::cerr << "pqlin: " << path << ": " << e.what() << '\n';
            worst = kInputError;
            out = {{"format", kFormatVersion}, {"error", e.what()}};
        }
        out["trace"] = path;
        out["mode"] = cfg.mode;
        results.push_back(out);
    }
    if (cfg.inputs.size() == 1) emit(cfg, results[0]);
    else emit(cfg, {{"format", kFormatVersion}, {"results", results}});
    if (worst == kInputError) return kInputError;
    if (violation) return kViolation;
    return incomplete ? kIncomplete : kOk;
}

int cmd_gen(const Config& cfg) {
    Program prog;
    try {
        prog = read_program_file(cfg.program, cfg.order_path.empty() ? nullptr : read_order_file(cfg.order_path));
        if (!cfg.impl.empty()) {
            if (!is_known_impl(cfg.impl)) throw ParseError("unknown implementation \"" + cfg.impl + "\"");
            prog.impl = cfg.impl;
        }
    } catch (const Error& e) {
        std::cerr << "pqlin: " << e.what() << '\n';
        return kInputError;
    }
    fs::path dir = cfg.out.empty() ? fs::path("corpus") : fs::path(cfg.out);
    fs::create_directories(dir);
    write_order_file((dir / "order.json").string(), *prog.order);
    write_json_file((dir / "program.json").string(), program_to_json(prog));

    json traces = json::array();
    int index = 0;
    std::size_t rejected = 0;
    auto visit = [&](const Schedule& s, const Execution& e) {
        char name[32];
        std::snprintf(name, sizeof name, "trace_%06d.jsonl", index++);
        write_trace_file((dir / name).string(), e);
        History h = compile(e);
        CheckOptions opt;
        opt.proj_bound = cfg.proj_bound;
        Verdict v = check_execution(h, opt);
        rejected += !v.linearizable;
        json entry = {{"file", name}, {"schedule", s}, {"linearizable", v.linearizable}};
        if (!v.linearizable) entry["evidence"] = evidence_tag(v.evidence.tag);
        traces.push_back(entry);
    };
    json manifest = {{"format", kFormatVersion}, {"impl", prog.impl}, {"program", "program.json"}, {"order", "order.json"}};
    try {
        if (cfg.seed) {
            fuzz(prog, *cfg.seed, cfg.count, visit);
            manifest["mode"] = "fuzz";
            manifest["seed"] = *cfg.seed;
            manifest["requested"] = cfg.count;
        } else {
            enumerate_schedules(prog, cfg.schedule_bound, visit);
            manifest["mode"] = "exhaustive";
            manifest["schedule_bound"] = cfg.schedule_bound;
            manifest["schedules"] = count_schedules(prog);
        }
    } catch (const BoundExceeded& e) {
        std::cerr << "pqlin: " << e.what() << '\n';
        return kIncomplete;
    } catch (const Error& e) {
        std::cerr << "pqlin: " << e.what() << '\n';
        return kInputError;
    }
    manifest["count"] = traces.size();
    manifest["rejected"] = rejected;
    manifest["traces"] = traces;
    write_json_file((dir / "manifest.json").string(), manifest);
    std::cerr << "pqlin: wrote " << traces.size() << " traces to " << dir.string() << " (" << rejected << " rejected)\n";
    return kOk;
}

struct TraceInput {
    std::string path;
    OrderPtr order;
};

struct TraceOutcome {
    bool skipped = false;
    std::string error;
    std::string skip_reason;
    bool characterization = true, automata = true, oracle = true;
    std::vector<FamilyAgreement> families;
};

TraceOutcome xcheck_trace(const Config& cfg, const TraceInput& in) {
    TraceOutcome r;
    History h;
    try {
        h = compile(read_trace_file(in.path, in.order));
    } catch (const Error& e) {
        r.error = e.what();
        return r;
    }
    if (!is_data_differentiated(h)) {
        r.skipped = true;
        r.skip_reason = "not data-differentiated";
        return r;
    }
    try {
        r.oracle = is_linearizable_bruteforce(h, cfg.oracle_cap).linearizable;
    } catch (const CapExceeded& e) {
        r.skipped = true;
        r.skip_reason = e.what();
        return r;
    }
    CheckOptions opt;
    opt.proj_bound = cfg.proj_bound;
    r.characterization = check_execution(h, opt).linearizable;
    r.automata = !monitor_hit(h).has_value();
    r.families = family_agreement(h);
    return r;
}

int cmd_xcheck(const Config& cfg) {
    std::vector<TraceInput> inputs;
    try {
        for (const auto& arg : cfg.inputs) {
            fs::path p(arg);
            if (fs::is_directory(p)) {
                OrderPtr order = order_for(cfg, p);
                std::vector<std::string> files;
                for (const auto& entry : fs::directory_iterator(p))
                    if (entry.path().extension() == ".jsonl") files.push_back(entry.path().string());
                std::sort(files.begin(), files.end());
                for (auto& f : files) inputs.push_back({f, order});
            } else {
                inputs.push_back({arg, order_for(cfg)});
            }
        }
    } catch (const Error& e) {
        std::cerr << "pqlin: " << e.what() << '\n';
        return kInputError;
    }

    std::vector<TraceOutcome> results(inputs.size());
    std::size_t next = 0;
    std::mutex m;
    auto worker = [&]() {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(m);
                if (next >= inputs.size()) return;
                i = next++;
            }
            results[i] = xcheck_trace(cfg, inputs[i]);
        }
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < std::max(1, cfg.jobs); ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    json disagreements = json::array(), skipped = json::array(), errors = json::array();
    std::map<std::string, std::map<std::string, long>> fam;
    long checked = 0, rejected = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& r = results[i];
        const auto& path = inputs[i].path;
        if (!r.error.empty()) {
            errors.push_back({{"trace", path}, {"error", r.error}});
            continue;
        }
        if (r.skipped) {
            skipped.push_back({{"trace", path}, {"reason", r.skip_reason}});
            continue;
        }
        ++checked;
        rejected += !r.oracle;
        bool family_ok = true;
        for (const auto& f : r.families) {
            auto& c = fam[f.family];
            if (!f.applicable) {
                ++c["not_applicable"];
                continue;
            }
            ++c["compared"];
            c["monitor_hits"] += f.monitor;
            c["reference_hits"] += f.reference;
            if (f.monitor == f.reference) ++c["agree"];
            else family_ok = false;
        }
        if (r.characterization != r.automata || r.characterization != r.oracle || !family_ok)
            disagreements.push_back({{"trace", path},
                                     {"characterization", r.characterization},
                                     {"automata", r.automata},
                                     {"oracle", r.oracle},
                                     {"families_agree", family_ok}});
    }
    json per_family = json::object();
    for (auto& [name, counts] : fam) per_family[name] = counts;
    json report = {{"format", kFormatVersion},
                   {"traces", inputs.size()},
                   {"checked", checked},
                   {"rejected", rejected},
                   {"skipped", skipped},
                   {"errors", errors},
                   {"disagreements", disagreements},
                   {"per_family", per_family}};
    emit(cfg, report);
    if (!errors.empty()) return kInputError;
    return disagreements.empty() ? kOk : kViolation;
}

int cmd_monitors(const Config& cfg) {
    std::vector<RegisterAutomaton> all;
    for (auto&& set : {build_fifo(), build_matched_gt(), build_matched_eq(), build_matched_eq_shapes(), build_empty()})
        for (const auto& a : set) all.push_back(a);
    emit(cfg, monitors_to_json(all));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linearizability checking for concurrent priority-queue traces"};
    app.require_subcommand(1);
    Config cfg;

    auto add_bounds = [&](CLI::App* c) {
        c->add_option("--order", cfg.order_path, "Priority-order JSON file");
        c->add_option("--oracle-cap", cfg.oracle_cap, "Largest operation count the brute-force oracle accepts")
            ->check(CLI::PositiveNumber);
        c->add_option("--proj-bound", cfg.proj_bound, "Largest value count for exhaustive projection search")
            ->check(CLI::PositiveNumber);
        c->add_option("--out", cfg.out, "Output path (stdout when omitted)");
    };

    auto* check = app.add_subcommand("check", "Decide linearizability of trace files");
    check->add_option("traces", cfg.inputs, "Trace files (JSON Lines)")->required();
    check->add_option("--mode", cfg.mode, "Decision procedure")
        ->check(CLI::IsMember({"characterization", "oracle", "automata", "xcheck"}));
    add_bounds(check);

    auto* gen = app.add_subcommand("gen", "Write the traces of a program under the chosen implementation");
    gen->add_option("--program", cfg.program, "Program JSON file")->required();
    gen->add_option("--impl", cfg.impl, "Implementation (overrides the program's)");
    gen->add_option("--schedule-bound", cfg.schedule_bound, "Largest step count for exhaustive scheduling")
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", cfg.seed, "Fuzz with random schedules from this seed instead");
    gen->add_option("--count", cfg.count, "Number of fuzzed schedules")->check(CLI::PositiveNumber);
    add_bounds(gen);

    auto* xcheck = app.add_subcommand("xcheck", "Run all three procedures over a corpus and compare");
    xcheck->add_option("inputs", cfg.inputs, "Corpus directories or trace files");
    xcheck->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
    add_bounds(xcheck);

    auto* monitors = app.add_subcommand("monitors", "Dump the monitor automata as JSON");
    monitors->add_option("--out", cfg.out, "Output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*check) return cmd_check(cfg);
        if (*gen) return cmd_gen(cfg);
        if (*xcheck) return cmd_xcheck(cfg);
        if (*monitors) return cmd_monitors(cfg);
    } catch (const Error& e) {
        std::cerr << "pqlin: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "pqlin: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
