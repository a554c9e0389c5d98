#include "pqlin/harness.hpp"

#include <algorithm>
#include <optional>
#include <random>

namespace pqlin {

namespace {

enum class Impl { CoarseLock, StaleMin, LifoTie, RacyEmpty, LatePublish };

Impl impl_of(const std::string& name) {
    if (name == "coarse-lock") return Impl::CoarseLock;
    if (name == "stale-min") return Impl::StaleMin;
    if (name == "lifo-tie") return Impl::LifoTie;
    if (name == "racy-empty") return Impl::RacyEmpty;
    if (name == "late-publish") return Impl::LatePublish;
    throw Error("unknown implementation: " + name);
}

struct Entry {
    std::string value;
    int rank;
    long seq;  // insertion counter
};

// Shared state of every model: an array kept sorted so that the back is the
// value a correct rm returns. Smaller priorities leave first; the oldest
// leaves first among equal ones.
struct Shared {
    std::vector<Entry> items;
    int size = 0;  // racy-empty's published count
    long next_seq = 0;

    static bool below(const Entry& x, const Entry& y) {
        return x.rank != y.rank ? x.rank > y.rank : x.seq > y.seq;
    }
    int position_for(const Entry& e) const {
        return static_cast<int>(std::upper_bound(items.begin(), items.end(), e, below) - items.begin());
    }
    void insert_at(int pos, Entry e) {
        pos = std::clamp(pos, 0, static_cast<int>(items.size()));
        items.insert(items.begin() + pos, std::move(e));
    }
    std::string pop_at(int pos) {
        std::string v = items[pos].value;
        items.erase(items.begin() + pos);
        return v;
    }
    // Newest value of the smallest rank.
    int newest_min() const {
        int best = -1;
        for (int i = 0; i < static_cast<int>(items.size()); ++i)
            if (best < 0 || items[i].rank < items[best].rank ||
                (items[i].rank == items[best].rank && items[i].seq > items[best].seq))
                best = i;
        return best;
    }
};

struct ThreadState {
    std::size_t inv = 0;  // current invocation
    int step = 0;         // steps taken within it
    std::string op;
    std::string value;
    int reg = -1;  // per-invocation scratch: read position or reservation flag
    std::optional<std::string> taken;  // late-publish: value removed at the call
    std::optional<Entry> pending;      // late-publish: put not yet visible
};

// Ranks form a linear extension of the priority order.
std::vector<int> ranks_of(const PriorityOrder& o) {
    int n = o.size();
    std::vector<int> below(n, 0);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            if (o.less(q, p)) ++below[p];
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return below[a] != below[b] ? below[a] < below[b] : a < b; });
    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) rank[idx[i]] = i;
    return rank;
}

class Runner {
public:
    explicit Runner(const Program& p)
        : prog_(p), impl_(impl_of(p.impl)), rank_(ranks_of(*p.order)), threads_(p.threads.size()) {
        exec_.order = p.order;
    }

    bool done(int t) const { return threads_[t].inv >= prog_.threads[t].size(); }

    void step(int t) {
        if (t < 0 || t >= static_cast<int>(threads_.size())) throw Error("schedule names unknown thread " + std::to_string(t));
        if (done(t)) throw Error("schedule steps thread " + std::to_string(t) + " past its script");
        ThreadState& th = threads_[t];
        const Invocation& inv = prog_.threads[t][th.inv];
        int total = steps_of(prog_.impl, inv.method);
        if (th.pending) {
            shared_.insert_at(static_cast<int>(shared_.items.size()) - th.reg, *th.pending);
            th.pending.reset();
        }
        if (th.step == 0) begin(t, th, inv);
        if (inv.method == Method::Put) put_step(th, inv, th.step);
        else rm_step(th, th.step, total);
        if (++th.step == total) {
            ++th.inv;
            th.step = 0;
        }
    }

    Execution finish() {
        for (int t = 0; t < static_cast<int>(threads_.size()); ++t)
            if (!done(t)) throw Error("schedule leaves thread " + std::to_string(t) + " unfinished");
        return std::move(exec_);
    }

private:
    void begin(int t, ThreadState& th, const Invocation& inv) {
        th.op = "t" + std::to_string(t) + "." + std::to_string(th.inv);
        th.reg = -1;
        th.taken.reset();
        th.value.clear();
        Action a;
        a.op = th.op;
        a.kind = Kind::Call;
        a.method = inv.method;
        if (inv.method == Method::Put) {
            th.value = inv.value.empty() ? "v" + std::to_string(++fresh_) : inv.value;
            a.value = th.value;
            a.priority = inv.priority;
        }
        exec_.actions.push_back(a);
    }

    void ret(ThreadState& th, Method m, const std::string& value, const std::string& priority, bool empty) {
        Action a;
        a.op = th.op;
        a.kind = Kind::Ret;
        a.method = m;
        a.value = value;
        a.priority = priority;
        a.empty = empty;
        exec_.actions.push_back(a);
        if (m == Method::Rm && !empty) {
            // Rm calls carry the value returned, filled in afterwards.
            for (auto it = exec_.actions.rbegin(); it != exec_.actions.rend(); ++it)
                if (it->op == th.op && it->kind == Kind::Call) {
                    it->value = value;
                    break;
                }
        }
        if (m == Method::Rm && empty) {
            for (auto it = exec_.actions.rbegin(); it != exec_.actions.rend(); ++it)
                if (it->op == th.op && it->kind == Kind::Call) {
                    it->value = value;
                    it->empty = true;
                    break;
                }
        }
    }

    void ret_rm(ThreadState& th, std::optional<std::string> v) {
        if (v) ret(th, Method::Rm, *v, "", false);
        else ret(th, Method::Rm, "empty." + th.op, "", true);
    }

    Entry entry_for(const ThreadState& th, const Invocation& inv) {
        return Entry{th.value, rank_[prog_.order->id(inv.priority)], shared_.next_seq};
    }

    void put_step(ThreadState& th, const Invocation& inv, int k) {
        switch (impl_) {
            case Impl::CoarseLock:
            case Impl::StaleMin:
            case Impl::LifoTie:
                if (k == 1) {
                    Entry e = entry_for(th, inv);
                    ++shared_.next_seq;
                    shared_.insert_at(shared_.position_for(e), e);
                    ret(th, Method::Put, th.value, inv.priority, false);
                }
                break;
            case Impl::RacyEmpty:
                if (k == 0) {
                    Entry e = entry_for(th, inv);
                    ++shared_.next_seq;
                    shared_.insert_at(shared_.position_for(e), e);
                } else {
                    ++shared_.size;
                    ret(th, Method::Put, th.value, inv.priority, false);
                }
                break;
            case Impl::LatePublish:
                // Returns at once; the value sits in the thread's buffer with
                // its slot, counted from the back, until the thread's next
                // step publishes it.
                th.pending = entry_for(th, inv);
                ++shared_.next_seq;
                th.reg = static_cast<int>(shared_.items.size()) - shared_.position_for(*th.pending);
                ret(th, Method::Put, th.value, inv.priority, false);
                break;
        }
    }

    void rm_step(ThreadState& th, int k, int total) {
        auto& items = shared_.items;
        switch (impl_) {
            case Impl::LatePublish:
                if (k == 0) {
                    th.taken = items.empty() ? std::nullopt
                                             : std::optional<std::string>(shared_.pop_at(static_cast<int>(items.size()) - 1));
                } else {
                    ret_rm(th, th.taken);
                }
                break;
            case Impl::CoarseLock:
                if (k == total - 1) {
                    if (items.empty()) ret_rm(th, std::nullopt);
                    else ret_rm(th, shared_.pop_at(static_cast<int>(items.size()) - 1));
                }
                break;
            case Impl::LifoTie:
                if (k == total - 1) {
                    int at = shared_.newest_min();
                    if (at < 0) ret_rm(th, std::nullopt);
                    else ret_rm(th, shared_.pop_at(at));
                }
                break;
            case Impl::StaleMin:
                // Position of the minimum read at the call, element taken
                // from that position later.
                if (k == 0) {
                    th.reg = static_cast<int>(items.size()) - 1;
                } else if (th.reg < 0 || th.reg >= static_cast<int>(items.size())) {
                    ret_rm(th, std::nullopt);
                } else {
                    ret_rm(th, shared_.pop_at(th.reg));
                }
                break;
            case Impl::RacyEmpty:
                // Reserve against the published count, then take the top of
                // the array, which may hold a value whose put has not
                // returned yet.
                if (k == 0) {
                    if (shared_.size == 0) th.reg = 0;
                    else {
                        --shared_.size;
                        th.reg = 1;
                    }
                } else if (th.reg == 0 || items.empty()) {
                    ret_rm(th, std::nullopt);
                } else {
                    ret_rm(th, shared_.pop_at(static_cast<int>(items.size()) - 1));
                }
                break;
        }
    }

    const Program& prog_;
    Impl impl_;
    std::vector<int> rank_;
    std::vector<ThreadState> threads_;
    Shared shared_;
    Execution exec_;
    int fresh_ = 0;
};

void check_program(const Program& p) {
    if (!p.order) throw Error("program has no priority order");
    impl_of(p.impl);
    for (const auto& th : p.threads)
        for (const auto& inv : th)
            if (inv.method == Method::Put && p.order->find(inv.priority) < 0)
                throw Error("unknown priority in program: " + inv.priority);
}

}  // namespace

const std::vector<std::string>& impl_names() {
    static const std::vector<std::string> names = {"coarse-lock", "stale-min", "lifo-tie", "racy-empty", "late-publish"};
    return names;
}

bool is_known_impl(const std::string& name) {
    const auto& n = impl_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

int steps_of(const std::string& impl, Method method) {
    // A call step and a return step; late-publish puts return in the step
    // they are called.
    if (impl_of(impl) == Impl::LatePublish && method == Method::Put) return 1;
    return 2;
}

std::vector<int> thread_steps(const Program& p) {
    std::vector<int> out;
    for (const auto& th : p.threads) {
        int n = 0;
        for (const auto& inv : th) n += steps_of(p.impl, inv.method);
        out.push_back(n);
    }
    return out;
}

int total_steps(const Program& p) {
    int n = 0;
    for (int s : thread_steps(p)) n += s;
    return n;
}

Execution run_schedule(const Program& prog, const Schedule& s) {
    check_program(prog);
    Runner r(prog);
    for (int t : s) r.step(t);
    return r.finish();
}

std::uint64_t count_schedules(const Program& prog) {
    // Product of binomials, built up thread by thread.
    std::uint64_t count = 1;
    int placed = 0;
    for (int n : thread_steps(prog)) {
        for (int k = 1; k <= n; ++k) count = count * static_cast<std::uint64_t>(placed + k) / static_cast<std::uint64_t>(k);
        placed += n;
    }
    return count;
}

void enumerate_schedules(const Program& prog, int bound,
                         const std::function<void(const Schedule&, const Execution&)>& visit) {
    check_program(prog);
    auto left = thread_steps(prog);
    int total = 0;
    for (int n : left) total += n;
    if (total > bound)
        throw BoundExceeded("program needs " + std::to_string(total) + " steps, bound is " + std::to_string(bound));
    Schedule s;
    std::function<void()> dfs = [&]() {
        if (static_cast<int>(s.size()) == total) {
            visit(s, run_schedule(prog, s));
            return;
        }
        for (int t = 0; t < static_cast<int>(left.size()); ++t) {
            if (left[t] == 0) continue;
            --left[t];
            s.push_back(t);
            dfs();
            s.pop_back();
            ++left[t];
        }
    };
    dfs();
}

void fuzz(const Program& prog, std::uint64_t seed, int count,
          const std::function<void(const Schedule&, const Execution&)>& visit) {
    check_program(prog);
    std::mt19937_64 rng(seed);
    auto steps = thread_steps(prog);
    for (int i = 0; i < count; ++i) {
        auto left = steps;
        Schedule s;
        std::vector<int> ready;
        for (;;) {
            ready.clear();
            for (int t = 0; t < static_cast<int>(left.size()); ++t)
                if (left[t] > 0) ready.push_back(t);
            if (ready.empty()) break;
            int t = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng)];
            --left[t];
            s.push_back(t);
        }
        visit(s, run_schedule(prog, s));
    }
}

}  // namespace pqlin
