#pragma once

// Execution generators shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pqlin/model.hpp"
#include "pqlin/seq.hpp"

namespace pqlin::gen {

using Rng = std::mt19937_64;

inline std::vector<std::string> priority_names(int k) {
    std::vector<std::string> out;
    for (int i = 0; i < k; ++i) out.push_back("p" + std::to_string(i + 1));
    return out;
}

// Every strict partial order on k labeled priorities (k <= 3: 1, 1, 3, 19).
inline std::vector<OrderPtr> all_orders(int k) {
    std::vector<std::pair<int, int>> cand;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            if (a != b) cand.emplace_back(a, b);
    std::vector<OrderPtr> out;
    int m = static_cast<int>(cand.size());
    for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<std::vector<bool>> lt(k, std::vector<bool>(k, false));
        for (int i = 0; i < m; ++i)
            if ((mask >> i) & 1) lt[cand[i].first][cand[i].second] = true;
        bool ok = true;
        for (int a = 0; a < k && ok; ++a)
            for (int b = 0; b < k && ok; ++b) {
                if (lt[a][b] && lt[b][a]) ok = false;
                for (int c = 0; c < k && ok; ++c)
                    if (lt[a][b] && lt[b][c] && !lt[a][c]) ok = false;
            }
        if (!ok) continue;
        auto o = std::make_shared<PriorityOrder>(priority_names(k));
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                if (lt[a][b]) o->add_less(a, b);
        out.push_back(o);
    }
    return out;
}

inline OrderPtr random_order(Rng& rng, int k) {
    auto o = std::make_shared<PriorityOrder>(priority_names(k));
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::bernoulli_distribution edge(0.5);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (edge(rng) && !o->less(perm[j], perm[i])) o->add_less(perm[i], perm[j]);
    return o;
}

// Op labels before placement in time.
struct Label {
    enum Kind { Put, Rm, RmEmpty } kind;
    int value;     // Put: fresh value id; Rm: target id (may be a ghost)
    int priority;  // Put only
};

// Builds a history from labels and an action sequence listing op indices;
// the first occurrence of an index is its call, the second its return.
inline History assemble(const OrderPtr& order, const std::vector<Label>& labels, const std::vector<int>& seq,
                        int num_data_values) {
    std::vector<std::string> names;
    std::vector<bool> empties;
    for (int v = 0; v < num_data_values; ++v) {
        names.push_back(std::string(1, static_cast<char>('a' + v % 26)) + (v >= 26 ? std::to_string(v / 26) : ""));
        empties.push_back(false);
    }
    std::vector<Op> ops(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Op& o = ops[i];
        o.id = "o" + std::to_string(i);
        const Label& l = labels[i];
        if (l.kind == Label::Put) {
            o.method = Method::Put;
            o.value = l.value;
            o.priority = l.priority;
        } else if (l.kind == Label::Rm) {
            o.method = Method::Rm;
            o.value = l.value;
        } else {
            o.method = Method::Rm;
            o.empty = true;
            o.value = static_cast<int>(names.size());
            names.push_back("empty" + std::to_string(i));
            empties.push_back(true);
        }
    }
    std::vector<int> seen(labels.size(), 0);
    for (std::size_t pos = 0; pos < seq.size(); ++pos) {
        int k = seq[pos];
        (seen[k]++ == 0 ? ops[k].call : ops[k].ret) = static_cast<int>(pos);
    }
    return make_history(order, std::move(names), std::move(empties), std::move(ops));
}

// Uniformly random interleaving of n call/return pairs.
inline std::vector<int> random_interleaving(Rng& rng, int n) {
    std::vector<int> seq;
    for (int i = 0; i < n; ++i) {
        seq.push_back(i);
        seq.push_back(i);
    }
    std::shuffle(seq.begin(), seq.end(), rng);
    return seq;
}

// Interleaving from random linearization points: op i takes effect at
// time 2i+1 and its call/return straddle that point by a random width.
inline std::vector<int> interleaving_around(Rng& rng, int n, int spread) {
    std::uniform_int_distribution<int> w(0, spread);
    std::uniform_real_distribution<double> jitter(0.0, 0.5);
    std::vector<std::pair<double, int>> events;
    for (int i = 0; i < n; ++i) {
        double mid = 2.0 * i + 1.0;
        events.emplace_back(mid - 1.0 - 2.0 * w(rng) + jitter(rng) - 0.5, i);
        events.emplace_back(mid + 1.0 + 2.0 * w(rng) - jitter(rng) + 0.5, i);
    }
    std::sort(events.begin(), events.end());
    std::vector<int> seq;
    for (auto& e : events) seq.push_back(e.second);
    return seq;
}

struct RandomConfig {
    int max_ops = 6;
    int max_priorities = 3;
    double ghost = 0.05;       // rm of a never-put value
    double duplicate = 0.03;   // second rm of a value
    double empty = 0.15;       // rm(empty)
};

// Labels of a random run of a real queue (so that a plausible interleaving
// around it is often linearizable), followed by random damage.
inline std::vector<Label> plausible_labels(Rng& rng, const PriorityOrder& order, int n, const RandomConfig& cfg,
                                           int& num_values) {
    std::vector<Label> labels;
    PQState q(order.size());
    std::uniform_int_distribution<int> pri(0, order.size() - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    num_values = 0;
    for (int i = 0; i < n; ++i) {
        bool any = !q.all_empty();
        double r = u(rng);
        if (!any && r < cfg.empty) {
            labels.push_back({Label::RmEmpty, -1, -1});
            continue;
        }
        if (any && r < 0.45) {
            // remove some legal value (random minimal priority)
            std::vector<int> options;
            for (int p = 0; p < order.size(); ++p) {
                if (q.per_priority[p].empty()) continue;
                bool lower_empty = true;
                for (int s = 0; s < order.size(); ++s)
                    if (order.less(s, p) && !q.per_priority[s].empty()) lower_empty = false;
                if (lower_empty) options.push_back(p);
            }
            int p = options[std::uniform_int_distribution<int>(0, static_cast<int>(options.size()) - 1)(rng)];
            labels.push_back({Label::Rm, q.per_priority[p].front(), -1});
            q.per_priority[p].erase(q.per_priority[p].begin());
            continue;
        }
        int p = pri(rng);
        labels.push_back({Label::Put, num_values, p});
        q.per_priority[p].push_back(num_values);
        ++num_values;
    }
    // damage: retarget a remove, drop a remove's target, or add an rm(empty)
    double d = u(rng);
    std::vector<int> rms;
    for (int i = 0; i < n; ++i)
        if (labels[i].kind == Label::Rm) rms.push_back(i);
    if (d < 0.25 && !rms.empty() && num_values > 1) {
        int i = rms[std::uniform_int_distribution<int>(0, static_cast<int>(rms.size()) - 1)(rng)];
        labels[i].value = std::uniform_int_distribution<int>(0, num_values - 1)(rng);
    } else if (d < 0.35 && !labels.empty()) {
        int i = std::uniform_int_distribution<int>(0, n - 1)(rng);
        labels[i] = {Label::RmEmpty, -1, -1};
    }
    (void)cfg;
    return labels;
}

inline std::vector<Label> random_labels(Rng& rng, const PriorityOrder& order, int n, const RandomConfig& cfg,
                                        int& num_values) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pri(0, order.size() - 1);
    std::vector<Label::Kind> kinds;
    int puts = 0;
    for (int i = 0; i < n; ++i) {
        double r = u(rng);
        Label::Kind k = r < cfg.empty ? Label::RmEmpty : (r < cfg.empty + (1 - cfg.empty) * 0.5 ? Label::Put : Label::Rm);
        if (k == Label::Put) ++puts;
        kinds.push_back(k);
    }
    num_values = puts;
    std::vector<Label> labels;
    int next = 0;
    std::vector<int> removed;
    for (auto k : kinds) {
        if (k == Label::Put) {
            labels.push_back({Label::Put, next++, pri(rng)});
        } else if (k == Label::RmEmpty) {
            labels.push_back({Label::RmEmpty, -1, -1});
        } else {
            int target;
            if (puts == 0 || u(rng) < cfg.ghost) target = num_values;  // ghost
            else {
                std::vector<int> fresh;
                for (int v = 0; v < puts; ++v)
                    if (std::find(removed.begin(), removed.end(), v) == removed.end()) fresh.push_back(v);
                if (fresh.empty() || u(rng) < cfg.duplicate)
                    target = std::uniform_int_distribution<int>(0, puts - 1)(rng);
                else
                    target = fresh[std::uniform_int_distribution<int>(0, static_cast<int>(fresh.size()) - 1)(rng)];
            }
            removed.push_back(target);
            labels.push_back({Label::Rm, target, -1});
        }
    }
    if (std::any_of(labels.begin(), labels.end(), [&](const Label& l) { return l.kind == Label::Rm && l.value == num_values; }))
        ++num_values;
    return labels;
}

// Mixed distribution: half fully random, half perturbed plausible runs.
inline History random_history(Rng& rng, const RandomConfig& cfg = {}) {
    std::uniform_int_distribution<int> nops(0, cfg.max_ops);
    std::uniform_int_distribution<int> npri(1, cfg.max_priorities);
    int n = nops(rng);
    OrderPtr order = random_order(rng, npri(rng));
    int nv = 0;
    std::vector<Label> labels;
    std::vector<int> seq;
    if (std::bernoulli_distribution(0.5)(rng)) {
        labels = random_labels(rng, *order, n, cfg, nv);
        seq = random_interleaving(rng, n);
    } else {
        labels = plausible_labels(rng, *order, n, cfg, nv);
        seq = interleaving_around(rng, n, std::uniform_int_distribution<int>(0, 2)(rng));
    }
    return assemble(order, labels, seq, nv);
}

// All interleavings of n ops whose calls occur in index order.
inline void for_each_interleaving(int n, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> seq;
    std::vector<int> state(n, 0);  // 0 not called, 1 open, 2 done
    std::function<void(int)> rec = [&](int next_call) {
        if (static_cast<int>(seq.size()) == 2 * n) {
            f(seq);
            return;
        }
        if (next_call < n) {
            state[next_call] = 1;
            seq.push_back(next_call);
            rec(next_call + 1);
            seq.pop_back();
            state[next_call] = 0;
        }
        for (int k = 0; k < next_call; ++k) {
            if (state[k] != 1) continue;
            state[k] = 2;
            seq.push_back(k);
            rec(next_call);
            seq.pop_back();
            state[k] = 1;
        }
    };
    rec(0);
}

// All label vectors for n ops in call order: puts get fresh values in order
// and priorities as a restricted-growth string (first use names the next
// priority); removes target any put value or one ghost value.
inline void for_each_labeling(int n, int max_priorities,
                              const std::function<void(const std::vector<Label>&, int num_values, int used_priorities)>& f) {
    std::vector<Label::Kind> kinds(n);
    std::function<void(int)> kinds_rec = [&](int i) {
        if (i == n) {
            int puts = 0;
            for (auto k : kinds)
                if (k == Label::Put) ++puts;
            std::vector<Label> labels(n);
            std::function<void(int, int, int)> fill = [&](int j, int next_value, int used) {
                if (j == n) {
                    bool ghost = false;
                    for (const auto& l : labels)
                        if (l.kind == Label::Rm && l.value == puts) ghost = true;
                    f(labels, puts + (ghost ? 1 : 0), used);
                    return;
                }
                if (kinds[j] == Label::Put) {
                    for (int p = 0; p <= used && p < max_priorities; ++p) {
                        labels[j] = {Label::Put, next_value, p};
                        fill(j + 1, next_value + 1, std::max(used, p + 1));
                    }
                } else if (kinds[j] == Label::Rm) {
                    for (int t = 0; t <= puts; ++t) {
                        labels[j] = {Label::Rm, t, -1};
                        fill(j + 1, next_value, used);
                    }
                } else {
                    labels[j] = {Label::RmEmpty, -1, -1};
                    fill(j + 1, next_value, used);
                }
            };
            fill(0, 0, 0);
            return;
        }
        for (auto k : {Label::Put, Label::Rm, Label::RmEmpty}) {
            kinds[i] = k;
            kinds_rec(i + 1);
        }
    };
    kinds_rec(0);
}

// Every differentiated execution with exactly n ops over every order on the
// priorities it uses.
inline void for_each_execution(int n, int max_priorities, const std::function<void(const History&)>& f) {
    std::vector<std::vector<OrderPtr>> orders(max_priorities + 1);
    for (int k = 0; k <= max_priorities; ++k) orders[k] = all_orders(std::max(k, 1));
    for_each_labeling(n, max_priorities, [&](const std::vector<Label>& labels, int nv, int used) {
        for_each_interleaving(n, [&](const std::vector<int>& seq) {
            for (const auto& o : orders[used]) f(assemble(o, labels, seq, nv));
        });
    });
}

// Random in-precondition instance for the maximal-priority checks: one
// maximal priority holding `top` values (all put and removed) and up to
// `lower` values of strictly smaller priorities, no rm(empty). Ops are laid
// out in a random put-before-rm sequence and then widened into overlaps.
struct MaxInstance {
    History history;
    std::vector<int> top;  // value ids at the maximal priority
};

inline MaxInstance random_max_instance(Rng& rng, int top, int lower, int spread = 2) {
    std::uniform_int_distribution<int> npri(1, 3);
    int k = npri(rng);
    // chain-ish or arbitrary order with the last priority maximal
    auto o = std::make_shared<PriorityOrder>(priority_names(k));
    std::bernoulli_distribution coin(0.5);
    for (int a = 0; a + 1 < k; ++a) o->add_less(a, k - 1);
    if (k == 3 && coin(rng)) o->add_less(0, 1);
    int p = k - 1;
    std::uniform_int_distribution<int> low_pri(0, std::max(0, k - 2));
    int nlow = k == 1 ? 0 : std::uniform_int_distribution<int>(0, lower)(rng);
    std::vector<Label> labels;
    std::vector<int> seq_ops;  // op indices in sequential order
    std::vector<std::pair<int, int>> pending;  // (value, put op) not yet removed
    struct V { int priority; bool removed; };
    std::vector<V> vals;
    for (int i = 0; i < top; ++i) vals.push_back({p, true});
    for (int i = 0; i < nlow; ++i) vals.push_back({low_pri(rng), std::bernoulli_distribution(0.7)(rng)});
    std::shuffle(vals.begin(), vals.end(), rng);
    // sequential skeleton: each value contributes put then maybe rm, positions random
    std::vector<std::pair<int, int>> events;  // (value, 0 put / 1 rm)
    for (int v = 0; v < static_cast<int>(vals.size()); ++v) {
        events.emplace_back(v, 0);
        if (vals[v].removed) events.emplace_back(v, 1);
    }
    std::shuffle(events.begin(), events.end(), rng);
    // fix order so each put precedes its rm
    for (std::size_t i = 0; i < events.size(); ++i)
        for (std::size_t j = i + 1; j < events.size(); ++j)
            if (events[i].first == events[j].first && events[i].second == 1 && events[j].second == 0)
                std::swap(events[i].second, events[j].second);
    for (auto [v, kind] : events) {
        if (kind == 0) labels.push_back({Label::Put, v, vals[v].priority});
        else labels.push_back({Label::Rm, v, -1});
    }
    int n = static_cast<int>(labels.size());
    auto seq = coin(rng) ? interleaving_around(rng, n, spread) : random_interleaving(rng, n);
    // assemble wants op indices in call order; renumber
    std::vector<int> first_seen;
    std::vector<int> remap(n, -1);
    for (int x : seq)
        if (remap[x] < 0) {
            remap[x] = static_cast<int>(first_seen.size());
            first_seen.push_back(x);
        }
    std::vector<Label> ordered;
    for (int x : first_seen) ordered.push_back(labels[x]);
    for (int& x : seq) x = remap[x];
    MaxInstance out{assemble(o, ordered, seq, static_cast<int>(vals.size())), {}};
    for (int v = 0; v < static_cast<int>(vals.size()); ++v)
        if (vals[v].priority == p) out.top.push_back(v);
    return out;
}

// Every sequential differentiated word of exactly `len` ops over at most
// `max_values` data values and `max_priorities` priorities, with values and
// priorities named in order of first use. rm(empty) tokens get ids after the
// data values. f receives the word, the data value count and the number of
// priorities used.
inline void for_each_word(int len, int max_values, int max_priorities,
                          const std::function<void(const Word&, int, int)>& f) {
    Word w;
    std::vector<int> word_tokens;
    std::vector<bool> put_done(max_values, false);
    std::function<void(int, int)> rec = [&](int values, int pris) {
        if (static_cast<int>(w.size()) == len) {
            Word out = w;
            int token = values;
            for (auto& o : out)
                if (o.sym == SeqOp::RmEmpty) o.value = token++;
            f(out, values, pris);
            return;
        }
        for (int v = 0; v <= values && v < max_values; ++v) {
            int nv = std::max(values, v + 1);
            if (!put_done[v]) {
                put_done[v] = true;
                for (int p = 0; p <= pris && p < max_priorities; ++p) {
                    w.push_back(SeqOp::put(v, p));
                    rec(nv, std::max(pris, p + 1));
                    w.pop_back();
                }
                put_done[v] = false;
            }
            w.push_back(SeqOp::rm(v));
            rec(nv, pris);
            w.pop_back();
        }
        w.push_back(SeqOp::rm_empty(-1));
        rec(values, pris);
        w.pop_back();
    };
    rec(0, 0);
}

// Instances near the equal-priority violation shape: a and b at the top
// priority with put(a) before put(b), and a lower value d whose interval
// spans from call(rm,a) to ret(rm,b). The base layout is perturbed by random
// adjacent swaps and padded with noise values, so both outcomes occur.
inline MaxInstance random_pb_instance(Rng& rng, int noise_top, int noise_low, int swaps) {
    auto o = std::make_shared<PriorityOrder>(priority_names(2));
    o->add_less(0, 1);
    std::vector<Label> labels = {{Label::Put, 0, 1}, {Label::Put, 1, 1}, {Label::Rm, 1, -1},
                                 {Label::Put, 2, 0}, {Label::Rm, 0, -1}, {Label::Rm, 2, -1}};
    // op indices: 0 put a, 1 put b, 2 rm b, 3 put d, 4 rm a, 5 rm d
    std::vector<int> seq = {0, 0, 1, 1, 2, 3, 3, 4, 2, 5, 5, 4};
    int values = 3;
    std::uniform_int_distribution<int> nt(0, noise_top), nl(0, noise_low);
    int add_top = nt(rng), add_low = nl(rng);
    for (int i = 0; i < add_top + add_low; ++i) {
        int v = values++;
        int pri = i < add_top ? 1 : 0;
        int put_op = static_cast<int>(labels.size());
        labels.push_back({Label::Put, v, pri});
        bool removed = pri == 1 || std::bernoulli_distribution(0.6)(rng);
        int rm_op = -1;
        if (removed) {
            rm_op = static_cast<int>(labels.size());
            labels.push_back({Label::Rm, v, -1});
        }
        // insert the actions in order at random positions
        std::vector<int> mine = {put_op, put_op};
        if (removed) {
            mine.push_back(rm_op);
            mine.push_back(rm_op);
        }
        std::vector<int> pos;
        for (std::size_t k = 0; k < mine.size(); ++k)
            pos.push_back(std::uniform_int_distribution<int>(0, static_cast<int>(seq.size() + k))(rng));
        std::sort(pos.begin(), pos.end());
        for (std::size_t k = 0; k < mine.size(); ++k) seq.insert(seq.begin() + pos[k], mine[k]);
    }
    std::uniform_int_distribution<int> at(0, static_cast<int>(seq.size()) - 2);
    for (int i = 0; i < swaps; ++i) {
        int k = at(rng);
        if (seq[k] == seq[k + 1]) continue;  // call and return of one op
        std::swap(seq[k], seq[k + 1]);
    }
    // put before remove of the same value in time, at least at the call
    MaxInstance out{assemble(o, labels, seq, values), {}};
    for (int v = 0; v < values; ++v)
        if (out.history.priority_of(v) == 1) out.top.push_back(v);
    return out;
}

}  // namespace pqlin::gen
