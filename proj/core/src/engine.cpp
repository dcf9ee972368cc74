#include "adtmas/engine.hpp"

#include "adtmas/fm.hpp"

#include <boost/functional/hash.hpp>

#include <algorithm>
#include <chrono>
#include <exception>
#include <functional>
#include <limits>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace adtmas {

const char* name(QueryKind k) {
    switch (k) {
        case QueryKind::Feasible: return "feasible";
        case QueryKind::MinAttr: return "min";
        case QueryKind::MaxAttr: return "max";
        case QueryKind::EnumerateOutcomes: return "enumerate";
    }
    return "?";
}

std::vector<std::string> Trace::choices() const {
    std::vector<std::string> out;
    for (const auto& s : steps) out.insert(out.end(), s.choices.begin(), s.choices.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct CompKey {
    int loc = 0;
    std::vector<AffineExpr> vals;
    friend bool operator==(const CompKey&, const CompKey&) = default;
};

struct CompKeyHash {
    std::size_t operator()(const CompKey& k) const {
        std::size_t h = std::hash<int>()(k.loc);
        for (const auto& v : k.vals) boost::hash_combine(h, v.hash());
        return h;
    }
};

template <class Key, class Hash>
class InternTable {
public:
    std::uint32_t intern(Key&& k) {
        auto it = index_.find(k);
        if (it != index_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(items_.size());
        index_.emplace(k, id);
        items_.push_back(std::move(k));
        return id;
    }
    const Key& at(std::uint32_t id) const { return items_[id]; }
    std::size_t size() const { return items_.size(); }

private:
    std::vector<Key> items_;
    std::unordered_map<Key, std::uint32_t, Hash> index_;
};

struct ConjHash {
    std::size_t operator()(const Conjunction& c) const { return hash_value(c); }
};

struct Step {
    int mover = -1;
    int mover_transition = -1;
    int sender = -1;
    int sender_transition = -1;
};

struct Successor {
    std::vector<std::pair<int, CompKey>> changed;
    std::optional<Conjunction> pc;
    Step step;
};

enum class Bound { None, Min, Max };

// Is every point of pc satisfying some `all` alternative covered by one of `chosen`?
bool covers(const Conjunction& pc, const std::vector<const Conjunction*>& chosen,
            const std::vector<const Conjunction*>& all) {
    for (const auto* c : chosen)
        if (c->empty()) return true;
    std::function<bool(Conjunction, std::size_t)> escapes = [&](Conjunction region, std::size_t i) {
        if (!is_satisfiable(region)) return false;
        if (i == chosen.size()) return true;
        for (const auto& lit : *chosen[i]) {
            for (const auto& piece : negation(lit)) {
                Conjunction next = region;
                next.push_back(piece);
                if (escapes(std::move(next), i + 1)) return true;
            }
        }
        return false;
    };
    for (const auto* b : all) {
        Conjunction region = pc;
        region.insert(region.end(), b->begin(), b->end());
        if (escapes(std::move(region), 0)) return false;
    }
    return true;
}

class Explorer {
public:
    Explorer(const EamasNetwork& net, const EngineOptions& opt, bool symbolic)
        : net_(net), opt_(opt), symbolic_(symbolic), models_(static_cast<int>(net.models.size())),
          width_(static_cast<std::size_t>(models_) + 2), tables_(static_cast<std::size_t>(models_) + 1) {
        owner_.resize(net.attrs.size());
        offset_.resize(net.attrs.size());
        owned_.resize(static_cast<std::size_t>(models_) + 1);
        for (std::size_t v = 0; v < net.attrs.size(); ++v) {
            int o = net.attrs[v].owner < 0 ? models_ : net.attrs[v].owner;
            owner_[v] = o;
            offset_[v] = static_cast<int>(owned_[static_cast<std::size_t>(o)].size());
            owned_[static_cast<std::size_t>(o)].push_back(static_cast<int>(v));
        }
        passive_loc_.resize(net.models.size());
        for (std::size_t m = 0; m < net.models.size(); ++m) {
            const auto& lm = net.models[m];
            for (std::size_t l = 0; l < lm.locations.size(); ++l) {
                bool passive = true;
                for (int ti : lm.outgoing[l]) {
                    const auto& t = lm.transitions[static_cast<std::size_t>(ti)];
                    if (!(t.message && t.message->dir == MsgDir::Send && t.is_self_loop())) passive = false;
                }
                passive_loc_[m].push_back(passive);
            }
        }
        reduce_ = opt.reduction && net.reduction_safe;
        stats_.workers = std::max(1U, opt.workers);
        stats_.reduced = reduce_;

        // future_list_[m][l]: models that m may still read from location l on.
        reaches_ok_.resize(net.models.size());
        future_list_.resize(net.models.size());
        for (std::size_t m = 0; m < net.models.size(); ++m) {
            const auto& lm = net.models[m];
            std::vector<std::vector<char>> direct(lm.locations.size(), std::vector<char>(net.models.size(), 0));
            for (const auto& t : lm.transitions) {
                auto& d = direct[static_cast<std::size_t>(t.from)];
                std::vector<int> vars;
                if (t.guard) {
                    t.guard->lhs.collect_vars(vars);
                    t.guard->rhs.collect_vars(vars);
                }
                for (const auto& u : t.updates) u.expr.collect_vars(vars);
                for (int v : vars) {
                    int o = owner_[static_cast<std::size_t>(v)];
                    if (o != static_cast<int>(m) && o < models_) d[static_cast<std::size_t>(o)] = 1;
                }
                if (t.message && t.message->dir == MsgDir::Receive)
                    for (const auto& ep : net.senders_of(t))
                        if (ep.model != static_cast<int>(m)) d[static_cast<std::size_t>(ep.model)] = 1;
                // a send that moves the sender needs a receiver in the right location
                if (t.message && t.message->dir == MsgDir::Send && !t.is_self_loop())
                    for (const auto& ep : net.receivers_of(t))
                        if (ep.model != static_cast<int>(m)) d[static_cast<std::size_t>(ep.model)] = 1;
            }
            std::vector<std::vector<char>> fr;
            fr.assign(lm.locations.size(), std::vector<char>(net.models.size(), 0));
            reaches_ok_[m].assign(lm.locations.size(), false);
            for (std::size_t l = 0; l < lm.locations.size(); ++l) {
                std::vector<char> seen(lm.locations.size(), 0);
                std::vector<int> work{static_cast<int>(l)};
                while (!work.empty()) {
                    auto x = static_cast<std::size_t>(work.back());
                    work.pop_back();
                    if (seen[x]) continue;
                    seen[x] = 1;
                    for (std::size_t o = 0; o < net.models.size(); ++o) fr[l][o] = static_cast<char>(fr[l][o] | direct[x][o]);
                    if (std::find(lm.ok_locations.begin(), lm.ok_locations.end(), static_cast<int>(x)) != lm.ok_locations.end())
                        reaches_ok_[m][l] = true;
                    for (int ti : lm.outgoing[x]) work.push_back(lm.transitions[static_cast<std::size_t>(ti)].to);
                }
            }
            future_list_[m].resize(lm.locations.size());
            for (std::size_t l = 0; l < lm.locations.size(); ++l)
                for (std::size_t o = 0; o < net.models.size(); ++o)
                    if (fr[l][o]) future_list_[m][l].push_back(static_cast<int>(o));
        }
    }

    // Models whose finished state stays observable (goal and root models); others are reset to a
    // canonical state once every model reading them has finished too.
    void protect(const std::vector<int>& models) {
        if (!reduce_) return;
        collapsible_.assign(static_cast<std::size_t>(models_), true);
        for (int m : models) collapsible_[static_cast<std::size_t>(m)] = false;
        canon_.assign(static_cast<std::size_t>(models_), 0);
        for (int m = 0; m < models_; ++m) {
            const auto& lm = net_.models[static_cast<std::size_t>(m)];
            if (lm.ok_locations.empty()) {
                collapsible_[static_cast<std::size_t>(m)] = false;
                continue;
            }
            CompKey k;
            k.loc = lm.ok_locations.front();
            k.vals.assign(owned_[static_cast<std::size_t>(m)].size(), AffineExpr(Rational(0)));
            canon_[static_cast<std::size_t>(m)] = tables_[static_cast<std::size_t>(m)].intern(std::move(k));
        }
    }

    // Classifies a freshly interned state: true = expand it.
    using Classifier = std::function<bool(std::uint32_t)>;

    // Runs level-synchronous BFS. `stop_after_level` is polled after each level.
    void run(const Classifier& classify, const std::function<bool()>& stop_after_level) {
        auto start = std::chrono::steady_clock::now();
        std::vector<std::uint32_t> frontier;
        {
            GlobalState s0 = initial_state(net_);
            std::vector<std::uint32_t> packed(width_);
            for (int m = 0; m < models_; ++m) packed[static_cast<std::size_t>(m)] = tables_[static_cast<std::size_t>(m)].intern(key_of(s0, m));
            packed[static_cast<std::size_t>(models_)] = tables_.back().intern(key_of(s0, models_));
            packed.back() = pcs_.intern(Conjunction(s0.constraint));
            collapse(packed);
            std::uint32_t id = add_state(packed, std::numeric_limits<std::uint32_t>::max(), Step{});
            if (classify(id)) frontier.push_back(id);
        }
        while (!frontier.empty()) {
            stats_.peak_frontier = std::max(stats_.peak_frontier, frontier.size());
            ++stats_.levels;
            std::vector<std::vector<Successor>> out(frontier.size());
            expand_all(frontier, out);
            std::vector<std::uint32_t> next;
            for (std::size_t i = 0; i < frontier.size(); ++i) {
                for (auto& succ : out[i]) {
                    ++stats_.transitions;
                    std::vector<std::uint32_t> packed(state(frontier[i]), state(frontier[i]) + width_);
                    for (auto& [comp, key] : succ.changed)
                        packed[static_cast<std::size_t>(comp)] = tables_[static_cast<std::size_t>(comp)].intern(std::move(key));
                    if (succ.pc) packed.back() = pcs_.intern(std::move(*succ.pc));
                    collapse(packed);
                    auto [id, fresh] = find_or_add(packed, frontier[i], succ.step);
                    if (fresh && classify(id)) next.push_back(id);
                }
            }
            frontier = std::move(next);
            if (stop_after_level()) break;
        }
        stats_.states = parent_.size();
        stats_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    class View : public StateView {
    public:
        View(const Explorer& e, const std::uint32_t* s) : e_(e), s_(s) {}
        int location(int model) const override { return e_.comp(s_, model).loc; }
        const AffineExpr& value(int var) const override {
            auto v = static_cast<std::size_t>(var);
            return e_.comp(s_, e_.owner_[v]).vals[static_cast<std::size_t>(e_.offset_[v])];
        }

    private:
        const Explorer& e_;
        const std::uint32_t* s_;
    };

    View view(std::uint32_t id) const { return View(*this, state(id)); }
    const Conjunction& pc(std::uint32_t id) const { return pcs_.at(state(id)[width_ - 1]); }
    int location(std::uint32_t id, int model) const { return comp(state(id), model).loc; }
    bool can_reach_ok(std::uint32_t id, int model) const {
        return reaches_ok_[static_cast<std::size_t>(model)][static_cast<std::size_t>(location(id, model))];
    }
    std::uint32_t pc_id(std::uint32_t id) const { return state(id)[width_ - 1]; }

    Trace trace_to(std::uint32_t id) const {
        std::vector<Step> steps;
        while (parent_[id] != std::numeric_limits<std::uint32_t>::max()) {
            steps.push_back(via_[id]);
            id = parent_[id];
        }
        std::reverse(steps.begin(), steps.end());
        Trace t;
        for (const auto& s : steps) t.steps.push_back(describe(net_, s));
        return t;
    }

    static TraceStep describe(const EamasNetwork& net, const Step& s) {
        TraceStep ts;
        const auto& mt = net.models[static_cast<std::size_t>(s.mover)].transitions[static_cast<std::size_t>(s.mover_transition)];
        ts.actor = net.models[static_cast<std::size_t>(s.mover)].id;
        ts.action = mt.action;
        if (!mt.choice.empty()) ts.choices.push_back(mt.choice);
        if (s.sender >= 0) {
            const auto& st = net.models[static_cast<std::size_t>(s.sender)].transitions[static_cast<std::size_t>(s.sender_transition)];
            ts.action = st.action + "_" + name(st.message->payload);
            if (!st.choice.empty()) ts.choices.push_back(st.choice);
        }
        std::sort(ts.choices.begin(), ts.choices.end());
        return ts;
    }

    ExplorationStats& stats() { return stats_; }

private:
    const std::uint32_t* state(std::uint32_t id) const { return packed_.data() + static_cast<std::size_t>(id) * width_; }
    const CompKey& comp(const std::uint32_t* s, int c) const {
        return tables_[static_cast<std::size_t>(c)].at(s[static_cast<std::size_t>(c)]);
    }

    CompKey key_of(const GlobalState& s, int c) const {
        CompKey k;
        k.loc = c < models_ ? s.locations[static_cast<std::size_t>(c)] : 0;
        for (int v : owned_[static_cast<std::size_t>(c)]) k.vals.push_back(s.valuation[static_cast<std::size_t>(v)]);
        return k;
    }

    int loc_of(const std::vector<std::uint32_t>& packed, int m) const {
        return tables_[static_cast<std::size_t>(m)].at(packed[static_cast<std::size_t>(m)]).loc;
    }

    // Resets every model that no protected model can still depend on, directly or through
    // other such models, to its canonical state.
    void collapse(std::vector<std::uint32_t>& packed) const {
        if (collapsible_.empty()) return;
        std::vector<char> live(static_cast<std::size_t>(models_), 0);
        std::vector<int> work;
        for (int m = 0; m < models_; ++m)
            if (!collapsible_[static_cast<std::size_t>(m)]) {
                live[static_cast<std::size_t>(m)] = 1;
                work.push_back(m);
            }
        while (!work.empty()) {
            int r = work.back();
            work.pop_back();
            for (int o : future_list_[static_cast<std::size_t>(r)][static_cast<std::size_t>(loc_of(packed, r))]) {
                if (live[static_cast<std::size_t>(o)]) continue;
                live[static_cast<std::size_t>(o)] = 1;
                work.push_back(o);
            }
        }
        for (int m = 0; m < models_; ++m)
            if (!live[static_cast<std::size_t>(m)]) packed[static_cast<std::size_t>(m)] = canon_[static_cast<std::size_t>(m)];
    }

    struct SlotHash {
        const Explorer* e;
        std::size_t operator()(std::uint32_t id) const {
            const std::uint32_t* s = e->slot(id);
            std::size_t h = 0;
            for (std::size_t i = 0; i < e->width_; ++i) boost::hash_combine(h, s[i]);
            return h;
        }
    };
    struct SlotEq {
        const Explorer* e;
        bool operator()(std::uint32_t a, std::uint32_t b) const {
            return std::equal(e->slot(a), e->slot(a) + e->width_, e->slot(b));
        }
    };
    const std::uint32_t* slot(std::uint32_t id) const { return packed_.data() + static_cast<std::size_t>(id) * width_; }

    std::uint32_t add_state(const std::vector<std::uint32_t>& packed, std::uint32_t parent, Step step) {
        return find_or_add(packed, parent, step).first;
    }

    std::pair<std::uint32_t, bool> find_or_add(const std::vector<std::uint32_t>& packed, std::uint32_t parent, Step step) {
        auto id = static_cast<std::uint32_t>(parent_.size());
        packed_.insert(packed_.end(), packed.begin(), packed.end());
        auto [it, fresh] = seen_.insert(id);
        if (!fresh) {
            packed_.resize(packed_.size() - width_);
            return {*it, false};
        }
        parent_.push_back(parent);
        via_.push_back(step);
        if (parent_.size() > opt_.state_limit)
            throw StateLimitExceeded("state limit of " + std::to_string(opt_.state_limit) + " exceeded");
        return {id, true};
    }

    void expand_all(const std::vector<std::uint32_t>& frontier, std::vector<std::vector<Successor>>& out) const {
        unsigned workers = std::min<std::size_t>(std::max(1U, opt_.workers), frontier.size());
        if (workers <= 1) {
            for (std::size_t i = 0; i < frontier.size(); ++i) expand(frontier[i], out[i]);
            return;
        }
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < frontier.size(); i += workers) expand(frontier[i], out[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    void expand(std::uint32_t id, std::vector<Successor>& out) const {
        const std::uint32_t* s = state(id);
        View v(*this, s);
        const Conjunction& pcon = pcs_.at(s[width_ - 1]);
        std::vector<std::vector<Move>> by_model(static_cast<std::size_t>(models_));
        std::size_t total = 0;
        for (int m = 0; m < models_; ++m) {
            moves_of(net_, v, pcon, m, symbolic_, by_model[static_cast<std::size_t>(m)]);
            total += by_model[static_cast<std::size_t>(m)].size();
        }
        if (total == 0) return;
        std::vector<const Move*> chosen = reduce_ ? ample(v, pcon, by_model, total) : std::vector<const Move*>{};
        if (chosen.empty())
            for (const auto& ms : by_model)
                for (const auto& mv : ms) chosen.push_back(&mv);
        for (const Move* mv : chosen) out.push_back(successor(s, v, pcon, *mv));
    }

    bool passive(const StateView& v, int m) const {
        return passive_loc_[static_cast<std::size_t>(m)][static_cast<std::size_t>(v.location(m))];
    }

    std::vector<const Move*> ample(const StateView& v, const Conjunction& pcon,
                                   const std::vector<std::vector<Move>>& by_model, std::size_t total) const {
        std::vector<char> seeds(static_cast<std::size_t>(models_), 0);
        for (const auto& ms : by_model)
            for (const auto& mv : ms) {
                if (!passive(v, mv.mover)) seeds[static_cast<std::size_t>(mv.mover)] = 1;
                if (mv.sender >= 0 && !passive(v, mv.sender)) seeds[static_cast<std::size_t>(mv.sender)] = 1;
            }
        std::vector<const Move*> best;
        std::size_t best_size = total;
        std::vector<const Conjunction*> all;
        if (symbolic_)
            for (const auto& ms : by_model)
                for (const auto& mv : ms) all.push_back(&mv.added);
        for (int seed = 0; seed < models_; ++seed) {
            if (!seeds[static_cast<std::size_t>(seed)]) continue;
            std::vector<char> in(static_cast<std::size_t>(models_), 0);
            std::vector<int> work{seed};
            in[static_cast<std::size_t>(seed)] = 1;
            while (!work.empty()) {
                int m = work.back();
                work.pop_back();
                const auto& lm = net_.models[static_cast<std::size_t>(m)];
                for (int ti : lm.outgoing[static_cast<std::size_t>(v.location(m))]) {
                    const auto& t = lm.transitions[static_cast<std::size_t>(ti)];
                    if (!t.message) continue;
                    const auto& peers = t.message->dir == MsgDir::Receive ? net_.senders_of(t) : net_.receivers_of(t);
                    for (const auto& ep : peers) {
                        if (in[static_cast<std::size_t>(ep.model)] || passive(v, ep.model)) continue;
                        in[static_cast<std::size_t>(ep.model)] = 1;
                        work.push_back(ep.model);
                    }
                }
            }
            std::vector<const Move*> cand;
            for (const auto& ms : by_model)
                for (const auto& mv : ms)
                    if (in[static_cast<std::size_t>(mv.mover)] || (mv.sender >= 0 && in[static_cast<std::size_t>(mv.sender)]))
                        cand.push_back(&mv);
            if (cand.empty() || cand.size() >= best_size) continue;
            if (symbolic_) {
                std::vector<const Conjunction*> picked;
                for (const auto* mv : cand) picked.push_back(&mv->added);
                if (!covers(pcon, picked, all)) continue;
            }
            best = std::move(cand);
            best_size = best.size();
            if (best_size == 1) break;
        }
        return best;
    }

    Successor successor(const std::uint32_t* s, const StateView& v, const Conjunction& pcon, const Move& mv) const {
        Successor out;
        out.step = Step{mv.mover, mv.mover_transition, mv.sender, mv.sender_transition};
        std::map<int, CompKey> changed;
        auto touch = [&](int c) -> CompKey& {
            auto it = changed.find(c);
            if (it == changed.end()) it = changed.emplace(c, comp(s, c)).first;
            return it->second;
        };
        const auto& mt = net_.models[static_cast<std::size_t>(mv.mover)].transitions[static_cast<std::size_t>(mv.mover_transition)];
        if (mt.to != v.location(mv.mover)) touch(mv.mover).loc = mt.to;
        if (mv.sender >= 0) {
            const auto& st = net_.models[static_cast<std::size_t>(mv.sender)].transitions[static_cast<std::size_t>(mv.sender_transition)];
            if (st.to != v.location(mv.sender)) touch(mv.sender).loc = st.to;
        }
        for (const auto& [var, val] : mv.writes) {
            auto vi = static_cast<std::size_t>(var);
            CompKey& k = touch(owner_[vi]);
            k.vals[static_cast<std::size_t>(offset_[vi])] = val;
        }
        for (auto& [c, k] : changed) out.changed.emplace_back(c, std::move(k));
        if (!mv.added.empty()) {
            Conjunction c = pcon;
            c.insert(c.end(), mv.added.begin(), mv.added.end());
            out.pc = canonical(std::move(c));
        }
        return out;
    }

    const EamasNetwork& net_;
    EngineOptions opt_;
    bool symbolic_;
    bool reduce_ = false;
    int models_;
    std::size_t width_;
    std::vector<int> owner_, offset_;
    std::vector<std::vector<int>> owned_;
    std::vector<std::vector<bool>> passive_loc_;
    std::vector<std::vector<bool>> reaches_ok_;
    std::vector<std::vector<std::vector<int>>> future_list_;  // models read from each location on
    std::vector<bool> collapsible_;
    std::vector<std::uint32_t> canon_;
    std::vector<InternTable<CompKey, CompKeyHash>> tables_;
    InternTable<Conjunction, ConjHash> pcs_;
    std::vector<std::uint32_t> packed_;
    std::vector<std::uint32_t> parent_;
    std::vector<Step> via_;
    std::unordered_set<std::uint32_t, SlotHash, SlotEq> seen_{1024, SlotHash{this}, SlotEq{this}};
    ExplorationStats stats_;
};

bool at_any(int loc, const std::vector<int>& locs) { return std::find(locs.begin(), locs.end(), loc) != locs.end(); }

std::vector<std::pair<std::string, int>> root_vars(const EamasNetwork& net, int root) {
    std::vector<std::pair<std::string, int>> out;
    const std::string prefix = net.models[static_cast<std::size_t>(root)].id + ".";
    for (std::size_t v = 0; v < net.attrs.size(); ++v) {
        const auto& n = net.attrs[v].name;
        if (n.rfind(prefix, 0) != 0) continue;
        std::string rest = n.substr(prefix.size());
        if (rest.rfind("has.", 0) == 0) continue;
        out.emplace_back(rest, static_cast<int>(v));
    }
    return out;
}

}  // namespace

QueryResult check(const EamasNetwork& net, const Query& q, const EngineOptions& opt) {
    if (!net.params.empty()) throw InvalidQuery("network has symbolic parameters; instantiate them or synthesize");
    QueryResult result;
    Explorer ex(net, opt, false);

    if (q.kind == QueryKind::EnumerateOutcomes) {
        const GoalLabel& ok = net.labels.count("root_ok") ? net.labels.at("root_ok") : throw UnknownLabel("root_ok");
        const GoalLabel& nok = net.labels.count("root_nok") ? net.labels.at("root_nok") : throw UnknownLabel("root_nok");
        auto vars = root_vars(net, ok.model);
        ex.protect({ok.model, nok.model});
        std::map<std::pair<std::string, std::vector<Rational>>, std::uint32_t> found;
        ex.run(
            [&](std::uint32_t id) {
                int loc = ex.location(id, ok.model);
                bool is_ok = at_any(loc, ok.locations);
                if (!is_ok && !at_any(loc, nok.locations)) return true;
                auto v = ex.view(id);
                std::vector<Rational> values;
                for (const auto& [n, var] : vars) values.push_back(v.value(var).constant());
                found.emplace(std::make_pair(is_ok ? "root_ok" : "root_nok", std::move(values)), id);
                return false;
            },
            [] { return false; });
        for (const auto& [key, id] : found) {
            OutcomeRecord r;
            r.verdict = key.first;
            for (std::size_t i = 0; i < vars.size(); ++i) r.values[vars[i].first] = key.second[i];
            r.trace = ex.trace_to(id);
            if (r.verdict == "root_ok") result.feasible = true;
            result.outcomes.push_back(std::move(r));
        }
        result.stats = ex.stats();
        return result;
    }

    auto lit = net.labels.find(q.goal);
    if (lit == net.labels.end()) throw UnknownLabel(q.goal);
    const GoalLabel& goal = lit->second;
    int target = -1;
    Bound bound = q.kind == QueryKind::MinAttr ? Bound::Min : q.kind == QueryKind::MaxAttr ? Bound::Max : Bound::None;
    if (bound != Bound::None) {
        target = net.attr_index(net.models[static_cast<std::size_t>(goal.model)].id + "." + q.attr);
        if (target < 0) throw InvalidQuery("attribute '" + q.attr + "' is not declared for '" + q.goal + "'");
    }

    // pruning facts
    const GoalHint* hint = net.hints.count(q.goal) ? &net.hints.at(q.goal) : nullptr;
    std::vector<std::pair<int, int>> required;  // model, target-attribute variable (or -1)
    std::vector<std::pair<int, Rational>> budget;
    if (hint && net.reduction_safe) {
        for (int m : hint->required)
            required.emplace_back(m, net.attr_index(net.models[static_cast<std::size_t>(m)].id + "." + q.attr));
        for (const auto& [m, values] : hint->contributors) {
            auto it = values.find(q.attr);
            budget.emplace_back(m, it == values.end() ? Rational(0) : it->second);
        }
    }

    ex.protect({goal.model});
    std::optional<Rational> best;
    std::optional<std::uint32_t> best_id;
    bool hit = false;
    auto& stats = ex.stats();
    ex.run(
        [&](std::uint32_t id) {
            if (at_any(ex.location(id, goal.model), goal.locations)) {
                hit = true;
                if (bound == Bound::None) {
                    if (!best_id) best_id = id;
                    return false;
                }
                Rational v = ex.view(id).value(target).constant();
                if (!best || (bound == Bound::Min ? v < *best : v > *best)) {
                    best = v;
                    best_id = id;
                }
                return false;
            }
            for (const auto& [m, var] : required) {
                if (!ex.can_reach_ok(id, m)) {
                    ++stats.pruned;
                    return false;
                }
            }
            if (!best) return true;
            if (bound == Bound::Min) {
                Rational lb = 0;
                auto v = ex.view(id);
                for (const auto& [m, var] : required)
                    if (var >= 0 && at_any(ex.location(id, m), net.models[static_cast<std::size_t>(m)].ok_locations))
                        lb = std::max(lb, v.value(var).constant());
                if (lb >= *best) {
                    ++stats.pruned;
                    return false;
                }
            } else if (bound == Bound::Max && !budget.empty()) {
                Rational ub = 0;
                for (const auto& [m, init] : budget)
                    if (!at_any(ex.location(id, m), net.models[static_cast<std::size_t>(m)].nok_locations)) ub += init;
                if (ub <= *best) {
                    ++stats.pruned;
                    return false;
                }
            }
            return true;
        },
        [&] { return bound == Bound::None && hit; });

    result.feasible = hit;
    result.stats = ex.stats();
    if (best_id) result.witness = ex.trace_to(*best_id);
    if (bound != Bound::None) {
        if (!hit) throw GoalUnreachable(q.goal);
        result.value = best;
    }
    return result;
}

std::vector<Conjunction> goal_regions(const EamasNetwork& net, const std::string& goal_label, const EngineOptions& opt,
                                      ExplorationStats* stats) {
    auto lit = net.labels.find(goal_label);
    if (lit == net.labels.end()) throw UnknownLabel(goal_label);
    const GoalLabel& goal = lit->second;
    Explorer ex(net, opt, true);
    ex.protect({goal.model});
    std::set<Conjunction> regions;
    ex.run(
        [&](std::uint32_t id) {
            if (at_any(ex.location(id, goal.model), goal.locations)) {
                regions.insert(ex.pc(id));
                return false;
            }
            return true;
        },
        [] { return false; });
    if (stats) *stats = ex.stats();
    return {regions.begin(), regions.end()};
}

std::optional<GlobalState> replay(const EamasNetwork& net, const Trace& trace) {
    GlobalState s = initial_state(net);
    for (const auto& step : trace.steps) {
        bool moved = false;
        for (auto& gt : successors(net, s)) {
            Step st;
            if (gt.receiver >= 0)
                st = Step{gt.receiver, gt.receiver_transition, gt.sender, gt.sender_transition};
            else
                st = Step{gt.sender, gt.sender_transition, -1, -1};
            if (Explorer::describe(net, st) == step) {
                s = std::move(gt.next);
                moved = true;
                break;
            }
        }
        if (!moved) return std::nullopt;
    }
    return s;
}

}  // namespace adtmas
