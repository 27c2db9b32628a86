#include "netdiff/reachability.hpp"

#include "netdiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace netdiff {

namespace {

NodeList neighbors_of_set(const Window& w, const NodeList& S) {
    NodeList out;
    for (const NodeId& x : S) {
        NodeList nb = w.neighbors(x);
        out.insert(out.end(), nb.begin(), nb.end());
    }
    normalize(out);
    return out;
}

void require_in_window(const Window& w, const NodeList& S) {
    for (const NodeId& x : S) {
        if (!w.contains(x)) throw Error(ErrorKind::OutOfRegion, "node " + x.str() + " lies outside the window");
    }
}

Bipartition require_bipartite(const Window& w) {
    auto r = bipartition(w);
    if (auto* odd = std::get_if<OddCycle>(&r)) {
        throw Error(ErrorKind::NotBipartite, "window has an odd cycle of length " + std::to_string(odd->cycle.size()));
    }
    return std::get<Bipartition>(r);
}

void require_no_torus(const Window& w) {
    if (w.boundary().kind == BoundaryKind::Torus) throw Error(ErrorKind::InvalidInput, "synthesis on torus windows is not supported");
}

// Breadth-first path from the first reachable source to a target, avoiding `avoid`.
std::optional<NodeList> bfs_path(const Window& w, const NodeList& sources, const std::function<bool(const NodeId&)>& is_target,
                                 const std::set<NodeId>& avoid) {
    std::map<NodeId, NodeId> parent;
    std::deque<NodeId> queue;
    for (const NodeId& s : sources) {
        if (avoid.count(s) || parent.count(s)) continue;
        parent.emplace(s, s);
        queue.push_back(s);
    }
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        if (is_target(u)) {
            NodeList path{u};
            while (!(parent.at(path.back()) == path.back())) path.push_back(parent.at(path.back()));
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (const NodeId& v : w.neighbors(u)) {
            if (avoid.count(v) || parent.count(v)) continue;
            parent.emplace(v, u);
            queue.push_back(v);
        }
    }
    return std::nullopt;
}

Cylinder cylinder_of(const std::map<NodeId, Status>& m) {
    NodeList X, Y;
    for (const auto& [n, s] : m) (s == Status::Active ? X : Y).push_back(n);
    return Cylinder(std::move(X), std::move(Y));
}

void put(std::map<NodeId, Status>& m, const NodeId& n, Status s) {
    auto [it, inserted] = m.emplace(n, s);
    if (!inserted && it->second != s) throw Error(ErrorKind::Internal, "conflicting statuses planned at " + n.str());
}

// Branch statuses: -1 free, 0 inactive, 1 active.
using Pat = std::array<int8_t, 3>;

int8_t code(Status s) { return s == Status::Active ? 1 : 0; }
Status status_of_code(int8_t c) { return c == 1 ? Status::Active : Status::Inactive; }

bool has_both(const Pat& p) {
    bool a = false, i = false;
    for (int8_t c : p) {
        a |= c == 1;
        i |= c == 0;
    }
    return a && i;
}

Pat to_pat(const StarPattern& sp) {
    Pat p{-1, -1, -1};
    for (size_t k = 0; k < 3; ++k) {
        if (sp[k]) p[k] = code(*sp[k]);
    }
    return p;
}

// Two-step exchange: `sigma` on the center, its opposite on s'_k for kept k, then `next` on the branches.
struct Macro {
    Status sigma;
    Pat next;
};

std::vector<Macro> macro_moves(const Pat& p) {
    std::vector<Macro> out;
    for (Status sigma : {Status::Active, Status::Inactive}) {
        int8_t sc = code(sigma), oc = code(flip(sigma));
        if (std::find(p.begin(), p.end(), sc) == p.end()) continue;
        for (int m = 0; m < 27; ++m) {
            Pat n;
            int v = m;
            bool ok = true;
            for (size_t k = 0; k < 3; ++k) {
                n[k] = static_cast<int8_t>(v % 3) - 1;
                v /= 3;
                if (n[k] == oc && p[k] != oc) ok = false;
            }
            if (ok && has_both(n)) out.push_back({sigma, n});
        }
    }
    return out;
}

struct MacroPlan {
    Pat state;
    std::vector<Macro> moves;
};

// Every family state reachable from `start`, in breadth-first order.
std::vector<MacroPlan> macro_reachable(const Pat& start) {
    std::vector<MacroPlan> out{{start, {}}};
    std::set<Pat> seen{start};
    for (size_t i = 0; i < out.size(); ++i) {
        for (const Macro& mv : macro_moves(out[i].state)) {
            if (!seen.insert(mv.next).second) continue;
            MacroPlan np = out[i];
            np.state = mv.next;
            np.moves.push_back(mv);
            out.push_back(std::move(np));
        }
    }
    return out;
}

void put_pattern(std::map<NodeId, Status>& m, const ComplexStar& star, const Pat& p) {
    for (size_t k = 0; k < 3; ++k) {
        if (p[k] >= 0) put(m, star.s[k], status_of_code(p[k]));
    }
}

// Off-branch step holding pattern p: `center` on s*, its opposite on s'_k of opposite branches.
void put_idle(std::map<NodeId, Status>& m, const ComplexStar& star, const Pat& p, Status center) {
    put(m, star.s_star, center);
    for (size_t k = 0; k < 3; ++k) {
        if (p[k] == code(flip(center))) put(m, star.sp[k], flip(center));
    }
}

void put_macro(std::map<NodeId, Status>& m, const ComplexStar& star, const Macro& mv) {
    put(m, star.s_star, mv.sigma);
    for (size_t k = 0; k < 3; ++k) {
        if (mv.next[k] == code(flip(mv.sigma))) put(m, star.sp[k], flip(mv.sigma));
    }
}

size_t branch_index(const ComplexStar& star, const NodeId& b) {
    for (size_t k = 0; k < 3; ++k) {
        if (star.s[k] == b) return k;
    }
    throw Error(ErrorKind::Internal, b.str() + " is not a branch");
}

struct PlanFailure {
    std::string clause;
};

// Two tokens (one per status) moved onto distinct branches.
struct CentragePlan {
    std::vector<std::pair<NodeId, NodeId>> pos; // (active token, inactive token) per step
    size_t branch_active = 0, branch_inactive = 0;
};

std::optional<CentragePlan> plan_centrage(const Window& w, const ComplexStar& star, const NodeId& x, const NodeId& y,
                                          const std::map<NodeId, uint64_t>& dist) {
    auto d = [&](const NodeId& n) {
        auto it = dist.find(n);
        return it == dist.end() ? std::numeric_limits<uint64_t>::max() : it->second;
    };
    std::set<NodeId> branches(star.s.begin(), star.s.end());
    auto is_branch = [&](const NodeId& n) { return branches.count(n) > 0; };

    // The closer token leads; ties let the active one lead.
    std::vector<bool> lead_active_order = d(x) <= d(y) ? std::vector<bool>{true, false} : std::vector<bool>{false, true};
    for (bool lead_active : lead_active_order) {
        const NodeId& lead = lead_active ? x : y;
        const NodeId& trail = lead_active ? y : x;
        NodeList thetas = w.neighbors(trail);
        std::stable_sort(thetas.begin(), thetas.end(), [&](const NodeId& a, const NodeId& b) { return d(a) > d(b); });
        for (const NodeId& th : thetas) {
            auto lead_path = bfs_path(w, {lead}, is_branch, {trail, th});
            if (!lead_path) continue;
            const NodeId& bL = lead_path->back();
            size_t iL = branch_index(star, bL);
            size_t t1 = lead_path->size() - 1;
            NodeList rhos{star.s_star, star.sp[iL]};
            for (const NodeId& n : w.neighbors(bL)) rhos.push_back(n);
            const NodeId& trail_at = (t1 % 2 == 0) ? trail : th;
            for (const NodeId& rho : rhos) {
                if (rho == trail || rho == th) continue;
                auto trail_path = bfs_path(
                    w, {trail_at}, [&](const NodeId& n) { return is_branch(n) && !(n == bL); }, {bL, rho});
                if (!trail_path) continue;
                size_t total = t1 + trail_path->size() - 1;
                CentragePlan plan;
                for (size_t k = 0; k <= total; ++k) {
                    NodeId lp = k <= t1 ? (*lead_path)[k] : ((k - t1) % 2 == 0 ? bL : rho);
                    NodeId tp = k <= t1 ? (k % 2 == 0 ? trail : th) : (*trail_path)[k - t1];
                    plan.pos.emplace_back(lead_active ? lp : tp, lead_active ? tp : lp);
                }
                size_t iT = branch_index(star, trail_path->back());
                plan.branch_active = lead_active ? iL : iT;
                plan.branch_inactive = lead_active ? iT : iL;
                return plan;
            }
        }
    }
    return std::nullopt;
}

// Nearest nodes of parity p carrying each status, by distance from `from`.
std::optional<std::pair<NodeId, NodeId>> nearest_witnesses(const Window& w, const Bipartition& bip, const ConfigDescriptor& config,
                                                           const NodeId& from, Parity p) {
    std::optional<NodeId> a, i;
    std::map<NodeId, uint64_t> dist = bfs_distances(w, from);
    std::vector<std::pair<uint64_t, NodeId>> order;
    for (const auto& [n, dd] : dist) order.emplace_back(dd, n);
    std::sort(order.begin(), order.end());
    for (const auto& [dd, n] : order) {
        if (bip.of(n) != p) continue;
        Status s = config.status_of(n);
        if (s == Status::Active && !a) a = n;
        if (s == Status::Inactive && !i) i = n;
        if (a && i) return std::make_pair(*a, *i);
    }
    return std::nullopt;
}

} // namespace

// ---------------------------------------------------------------- stars

NodeList ComplexStar::nodes() const {
    NodeList out{s_star, s[0], s[1], s[2], sp[0], sp[1], sp[2]};
    normalize(out);
    return out;
}

bool is_complex_star(const Window& w, const ComplexStar& star) {
    if (!w.contains(star.s_star)) return false;
    NodeList center_nb = w.neighbors(star.s_star);
    auto adjacent = [&](const NodeList& nb, const NodeId& n) { return std::binary_search(nb.begin(), nb.end(), n); };
    for (size_t k = 0; k < 3; ++k) {
        if (!adjacent(center_nb, star.s[k])) return false;
        if (!adjacent(w.neighbors(star.s[k]), star.sp[k])) return false;
        if (star.sp[k] == star.s_star) return false;
    }
    return !(star.s[0] == star.s[1]) && !(star.s[1] == star.s[2]) && !(star.s[0] == star.s[2]);
}

std::vector<ComplexStar> find_complex_stars(const Window& w, size_t cap) {
    std::vector<ComplexStar> out;
    for (const NodeId& c : w.nodes()) {
        if (out.size() >= cap) break;
        NodeList branches;
        std::vector<NodeList> further;
        for (const NodeId& s : w.neighbors(c)) {
            NodeList nb = w.neighbors(s);
            nb.erase(std::remove(nb.begin(), nb.end(), c), nb.end());
            if (nb.empty()) continue;
            branches.push_back(s);
            further.push_back(std::move(nb));
        }
        if (branches.size() < 3) continue;
        ComplexStar star;
        star.s_star = c;
        for (size_t k = 0; k < 3; ++k) star.s[k] = branches[k];
        // Prefer second-level nodes away from the other branches and not yet used.
        for (size_t k = 0; k < 3; ++k) {
            auto score = [&](const NodeId& n) {
                int sc = 0;
                for (size_t j = 0; j < k; ++j) sc += (star.sp[j] == n) ? 4 : 0;
                NodeList nb = w.neighbors(n);
                for (size_t j = 0; j < 3; ++j) {
                    if (j != k && (star.s[j] == n || std::binary_search(nb.begin(), nb.end(), star.s[j]))) ++sc;
                }
                return sc;
            };
            const NodeList& cand = further[k];
            star.sp[k] = *std::min_element(cand.begin(), cand.end(), [&](const NodeId& a, const NodeId& b) {
                int sa = score(a), sb = score(b);
                return sa != sb ? sa < sb : a < b;
            });
        }
        out.push_back(star);
    }
    return out;
}

// ---------------------------------------------------------------- caterpillars

CaterpillarDecomposition is_caterpillar(const Network& net) {
    if (!net.is_finite()) throw Error(ErrorKind::InvalidInput, "caterpillar check needs an explicit graph");
    CaterpillarDecomposition out;
    const NodeList& nodes = net.nodes();
    NodeList spine_nodes;
    for (const NodeId& n : nodes) {
        if (net.degree(n) >= 2) spine_nodes.push_back(n);
    }
    std::set<NodeId> on_spine(spine_nodes.begin(), spine_nodes.end());
    if (spine_nodes.empty()) {
        // A single node or a single edge.
        out.caterpillar = true;
        if (!nodes.empty()) out.spine.push_back(nodes.front());
        for (size_t i = 1; i < nodes.size(); ++i) out.antennas.emplace(nodes[i], nodes.front());
        return out;
    }
    std::map<NodeId, NodeList> spine_nb;
    for (const NodeId& n : spine_nodes) {
        for (const NodeId& m : net.neighbors(n)) {
            if (on_spine.count(m)) spine_nb[n].push_back(m);
        }
        if (spine_nb[n].size() > 2) return out;
    }
    // Walk the spine from an end, or from any node if it closes into a cycle.
    NodeId start = spine_nodes.front();
    bool closed = true;
    for (const NodeId& n : spine_nodes) {
        if (spine_nb[n].size() < 2) {
            start = n;
            closed = false;
            break;
        }
    }
    NodeList walk{start};
    std::set<NodeId> seen{start};
    while (true) {
        std::optional<NodeId> next;
        for (const NodeId& m : spine_nb[walk.back()]) {
            if (!seen.count(m)) {
                next = m;
                break;
            }
        }
        if (!next) break;
        walk.push_back(*next);
        seen.insert(*next);
    }
    if (walk.size() != spine_nodes.size()) return out;
    out.caterpillar = true;
    out.closed = closed;
    out.spine = walk;
    for (const NodeId& n : nodes) {
        if (!on_spine.count(n)) out.antennas.emplace(n, net.neighbors(n).front());
    }
    return out;
}

// ---------------------------------------------------------------- storing

StoringResult storing_function(const Window& w, const NodeList& X0, const NodeList& Y0,
                               std::function<bool(const NodeId&, const NodeId&)> prefer) {
    NodeList X = X0, Y = Y0;
    normalize(X);
    normalize(Y);
    if (!set_intersection(X, Y).empty()) throw Error(ErrorKind::InvalidInput, "X and Y must be disjoint");
    NodeList left = set_union(X, Y);
    require_in_window(w, left);
    if (left.empty()) return StoringMap{};
    if (auto bip = bipartition(w); auto* b = std::get_if<Bipartition>(&bip)) {
        Parity p = b->of(left.front());
        for (const NodeId& n : left) {
            if (b->of(n) != p) throw Error(ErrorKind::BlocksMixed, "storing sets span both parity blocks");
        }
    }
    std::vector<NodeList> cand(left.size());
    std::vector<Status> status(left.size());
    for (size_t i = 0; i < left.size(); ++i) {
        cand[i] = w.neighbors(left[i]);
        if (prefer) std::stable_sort(cand[i].begin(), cand[i].end(), prefer);
        status[i] = std::binary_search(X.begin(), X.end(), left[i]) ? Status::Active : Status::Inactive;
    }

    // Injective matching by augmenting paths.
    std::map<NodeId, size_t> owner;
    std::vector<std::optional<NodeId>> image(left.size());
    std::set<NodeId> visited;
    std::function<bool(size_t)> augment = [&](size_t i) {
        for (const NodeId& r : cand[i]) {
            if (!visited.insert(r).second) continue;
            auto it = owner.find(r);
            if (it == owner.end() || augment(it->second)) {
                owner[r] = i;
                image[i] = r;
                return true;
            }
        }
        return false;
    };
    std::optional<size_t> unmatched;
    for (size_t i = 0; i < left.size(); ++i) {
        visited.clear();
        if (!augment(i) && !unmatched) unmatched = i;
    }
    if (!unmatched) {
        StoringMap m;
        for (size_t i = 0; i < left.size(); ++i) m.theta.emplace(left[i], *image[i]);
        return m;
    }

    // Non-injective separation: images of X and Y must stay apart.
    std::vector<size_t> order(left.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return cand[a].size() < cand[b].size(); });
    std::map<NodeId, Status> color;
    std::vector<NodeId> chosen(left.size());
    size_t budget = size_t{1} << 21;
    bool exhausted = false;
    std::function<bool(size_t)> search = [&](size_t k) {
        if (k == order.size()) return true;
        if (budget-- == 0) {
            exhausted = true;
            return false;
        }
        size_t i = order[k];
        // An image already carrying the right status adds no constraint.
        for (const NodeId& r : cand[i]) {
            auto it = color.find(r);
            if (it != color.end() && it->second == status[i]) {
                chosen[i] = r;
                return search(k + 1);
            }
        }
        for (const NodeId& r : cand[i]) {
            if (color.count(r)) continue;
            color.emplace(r, status[i]);
            chosen[i] = r;
            if (search(k + 1)) return true;
            color.erase(r);
            if (exhausted) return false;
        }
        return false;
    };
    if (search(0)) {
        StoringMap m;
        m.injective = false;
        for (size_t i = 0; i < left.size(); ++i) m.theta.emplace(left[i], chosen[i]);
        return m;
    }

    // Hall violator: left nodes reachable from the unmatched one by alternating paths.
    NoStoring fail;
    fail.reason = exhausted ? "separation search budget exhausted" : "no separating map exists";
    std::set<size_t> S{*unmatched};
    std::set<NodeId> G;
    std::deque<size_t> queue{*unmatched};
    while (!queue.empty()) {
        size_t i = queue.front();
        queue.pop_front();
        for (const NodeId& r : cand[i]) {
            if (!G.insert(r).second) continue;
            auto it = owner.find(r);
            if (it != owner.end() && S.insert(it->second).second) queue.push_back(it->second);
        }
    }
    for (size_t i : S) fail.S.push_back(left[i]);
    fail.gamma_S.assign(G.begin(), G.end());
    return fail;
}

RichnessReport check_richness(const Window& w, const std::vector<Cylinder>& samples, size_t threshold) {
    RichnessReport rep;
    rep.threshold = threshold;
    rep.star_count = find_complex_stars(w).size();
    auto bip = bipartition(w);
    bool all_storable = true;
    for (const Cylinder& c : samples) {
        RichnessSample s;
        s.cylinder = c;
        // Stored per parity block.
        std::map<int, std::pair<NodeList, NodeList>> blocks;
        auto block = [&](const NodeId& n) {
            auto* b = std::get_if<Bipartition>(&bip);
            return b ? static_cast<int>(b->of(n)) : 0;
        };
        for (const NodeId& n : c.X) blocks[block(n)].first.push_back(n);
        for (const NodeId& n : c.Y) blocks[block(n)].second.push_back(n);
        for (const auto& [k, xy] : blocks) {
            StoringResult r = storing_function(w, xy.first, xy.second);
            if (auto* no = std::get_if<NoStoring>(&r)) {
                s.storable = false;
                s.witness = *no;
                break;
            }
        }
        all_storable = all_storable && s.storable;
        rep.samples.push_back(std::move(s));
    }
    if (rep.star_count < threshold) rep.violated_clause = "complex-stars";
    else if (!all_storable) rep.violated_clause = "storing";
    rep.consistent = rep.violated_clause.empty();
    return rep;
}

// ---------------------------------------------------------------- trajectories

TrajectoryCheck validate_trajectory(const Network& net, const Trajectory& traj) {
    TrajectoryCheck out;
    for (size_t i = 0; i + 1 < traj.steps.size(); ++i) {
        const Cylinder& prev = traj.steps[i];
        const Cylinder& next = traj.steps[i + 1];
        std::vector<Certificate> certs;
        auto witness = [&](const NodeId& n, const NodeList& pool, Status s) {
            for (const NodeId& m : net.neighbors(n)) {
                if (std::binary_search(pool.begin(), pool.end(), m)) {
                    certs.push_back({n, m, s});
                    return true;
                }
            }
            return false;
        };
        for (const NodeId& x : next.X) {
            if (!witness(x, prev.X, Status::Active)) {
                out.valid = false;
                out.failing_step = i + 1;
                out.reason = "active " + x.str() + " has no active neighbor at step " + std::to_string(i);
                return out;
            }
        }
        for (const NodeId& y : next.Y) {
            if (!witness(y, prev.Y, Status::Inactive)) {
                out.valid = false;
                out.failing_step = i + 1;
                out.reason = "inactive " + y.str() + " has no inactive neighbor at step " + std::to_string(i);
                return out;
            }
        }
        out.certificates.push_back(std::move(certs));
    }
    return out;
}

double ProbabilityBound::value() const { return std::pow(10.0, log10); }

ProbabilityBound probability_lower_bound(const Network& net, const AggregationFunction& A, const Trajectory& traj) {
    if (classify(A).kind != AggKind::Strict) throw Error(ErrorKind::NotStrict, "probability bound needs a strict aggregation function");
    TrajectoryCheck check = validate_trajectory(net, traj);
    if (!check.valid) throw Error(ErrorKind::InvalidTrajectory, check.reason);
    ProbabilityBound bound;
    for (size_t i = 0; i + 1 < traj.steps.size(); ++i) {
        const Cylinder& prev = traj.steps[i];
        const Cylinder& next = traj.steps[i + 1];
        auto worst = [&](const NodeId& n, Status target) {
            NodeList nb = net.neighbors(n);
            if (nb.size() > A.gamma()) throw Error(ErrorKind::ArityExceeded, "degree of " + n.str() + " exceeds the arity of A");
            StatusVector v(nb.size(), 0);
            std::vector<size_t> free;
            for (size_t k = 0; k < nb.size(); ++k) {
                if (std::binary_search(prev.X.begin(), prev.X.end(), nb[k])) v[k] = 1;
                else if (!std::binary_search(prev.Y.begin(), prev.Y.end(), nb[k])) free.push_back(k);
            }
            double lo = 1.0;
            auto take = [&](double a) { lo = std::min(lo, target == Status::Active ? a : 1.0 - a); };
            if (A.anonymous()) {
                size_t fixed_ones = static_cast<size_t>(std::count(v.begin(), v.end(), 1));
                for (size_t j = 0; j <= free.size(); ++j) take(A.evaluate_count(fixed_ones + j, nb.size()));
            } else {
                if (free.size() > 20) throw Error(ErrorKind::TooLarge, "too many unconstrained neighbors");
                for (size_t m = 0; m < (size_t{1} << free.size()); ++m) {
                    for (size_t k = 0; k < free.size(); ++k) v[free[k]] = (m >> k) & 1;
                    take(A.evaluate(v));
                }
            }
            return lo;
        };
        for (const NodeId& x : next.X) bound.log10 += std::log10(worst(x, Status::Active));
        for (const NodeId& y : next.Y) bound.log10 += std::log10(worst(y, Status::Inactive));
    }
    return bound;
}

Trajectory synth_store(const Window& w, const NodeList& X, const NodeList& Y, size_t n_steps) {
    if (n_steps % 2 != 0) throw Error(ErrorKind::InvalidInput, "store length must be even");
    StoringResult r = storing_function(w, X, Y);
    if (auto* no = std::get_if<NoStoring>(&r)) throw Error(ErrorKind::NoStoring, "cannot store the cylinder: " + no->reason);
    const StoringMap& m = std::get<StoringMap>(r);
    Cylinder home(X, Y);
    NodeList tx, ty;
    for (const NodeId& x : home.X) tx.push_back(m.theta.at(x));
    for (const NodeId& y : home.Y) ty.push_back(m.theta.at(y));
    normalize(tx);
    normalize(ty);
    Cylinder away(tx, ty);
    Trajectory t;
    for (size_t k = 0; k <= n_steps; ++k) t.steps.push_back(k % 2 == 0 ? home : away);
    return t;
}

Trajectory synth_propagate(const Window& w, const NodeId& from, const NodeId& to, Status carry) {
    for (const NodeId& n : {from, to}) {
        if (!w.contains(n)) throw Error(ErrorKind::UnknownNode, "node " + n.str() + " is not in the window");
    }
    auto path = bfs_path(w, {from}, [&](const NodeId& n) { return n == to; }, {});
    if (!path) throw Error(ErrorKind::Internal, "window is disconnected");
    Trajectory t;
    for (const NodeId& n : *path) t.steps.push_back(carry == Status::Active ? Cylinder({n}, {}) : Cylinder({}, {n}));
    return t;
}

Trajectory synth_star(const Window& w, const ComplexStar& star, const StarPattern& from, const StarPattern& to) {
    if (!is_complex_star(w, star)) throw Error(ErrorKind::InvalidInput, "not a complex star of the window");
    Pat a = to_pat(from), b = to_pat(to);
    if (!has_both(a) || !has_both(b)) throw Error(ErrorKind::NotInFamily, "star patterns need an active and an inactive branch");
    for (const MacroPlan& mp : macro_reachable(a)) {
        if (mp.state != b) continue;
        Trajectory t;
        std::map<NodeId, Status> m;
        put_pattern(m, star, a);
        t.steps.push_back(cylinder_of(m));
        for (const Macro& mv : mp.moves) {
            m.clear();
            put_macro(m, star, mv);
            t.steps.push_back(cylinder_of(m));
            m.clear();
            put_pattern(m, star, mv.next);
            t.steps.push_back(cylinder_of(m));
        }
        return t;
    }
    throw Error(ErrorKind::Internal, "star pattern unreachable");
}

Trajectory synth_centrage(const Window& w, const ConfigDescriptor& config, const ComplexStar& star) {
    require_no_torus(w);
    Bipartition bip = require_bipartite(w);
    if (!is_complex_star(w, star)) throw Error(ErrorKind::InvalidInput, "not a complex star of the window");
    NodeList exc;
    for (const NodeId& n : config.exception_nodes()) {
        if (w.contains(n)) exc.push_back(n);
    }
    NodeList halo = set_union(exc, neighbors_of_set(w, exc));
    if (!set_intersection(halo, star.nodes()).empty()) throw Error(ErrorKind::StarOverlap, "star meets the exception halo");
    Parity wp = flip(bip.of(star.s_star));
    auto wit = nearest_witnesses(w, bip, config, star.s_star, wp);
    if (!wit) throw Error(ErrorKind::InvalidInput, std::string("config lacks both statuses on the ") + parity_name(wp) + " block");
    auto plan = plan_centrage(w, star, wit->first, wit->second, bfs_distances(w, star.s_star));
    if (!plan) throw Error(ErrorKind::RichnessViolated, "centrage: no schedule brings both witnesses onto the star");
    Trajectory t;
    for (const auto& [a, i] : plan->pos) t.steps.emplace_back(NodeList{a}, NodeList{i});
    return t;
}

namespace {

// Synthesis state: finished steps plus tokens that oscillate between a home and its stored image.
struct Builder {
    const Window& w;
    const Bipartition& bip;
    const ComplexStar& star;
    Parity p0;
    struct Stored {
        NodeId home, away;
        Status s;
    };
    std::vector<Cylinder> steps;
    std::vector<Stored> stores;
    Pat pat{-1, -1, -1};

    Parity cls(size_t t) const { return t % 2 == 0 ? p0 : flip(p0); }
    Parity branch_cls() const { return bip.of(star.s[0]); }
    size_t now() const { return steps.size() - 1; }

    std::map<NodeId, Status> base_tokens() const {
        std::map<NodeId, Status> m;
        size_t t = steps.size();
        for (const Stored& s : stores) put(m, bip.of(s.home) == cls(t) ? s.home : s.away, s.s);
        return m;
    }
    void push(const std::map<NodeId, Status>& m) { steps.push_back(cylinder_of(m)); }

    void idle() {
        auto m = base_tokens();
        if (cls(steps.size()) == branch_cls()) put_pattern(m, star, pat);
        else put_idle(m, star, pat, Status::Active);
        push(m);
    }

    void run_macro(const Macro& mv) {
        auto m = base_tokens();
        put_macro(m, star, mv);
        push(m);
        pat = mv.next;
        m = base_tokens();
        put_pattern(m, star, pat);
        push(m);
    }

    // Moves a copy of a branch status to z and stores it there.
    void place(const NodeId& z, Status s, const NodeId& theta_z) {
        if (cls(now()) != branch_cls()) idle();
        int8_t sc = code(s), oc = code(flip(s));
        std::set<NodeId> opp;
        for (const Stored& st : stores) {
            if (st.s != s) {
                opp.insert(st.home);
                opp.insert(st.away);
            }
        }
        std::optional<std::pair<MacroPlan, NodeList>> best;
        for (const MacroPlan& mp : macro_reachable(pat)) {
            size_t cost0 = 2 * mp.moves.size();
            if (best && cost0 > 2 * best->first.moves.size() + best->second.size() - 1) break;
            std::set<NodeId> avoid = opp;
            NodeList starts;
            for (size_t k = 0; k < 3; ++k) {
                if (mp.state[k] == oc) {
                    avoid.insert(star.s[k]);
                    avoid.insert(star.sp[k]);
                }
                if (mp.state[k] == sc) starts.push_back(star.s[k]);
            }
            auto path = bfs_path(w, starts, [&](const NodeId& n) { return n == z; }, avoid);
            if (!path) continue;
            if (!best || cost0 + path->size() < 2 * best->first.moves.size() + best->second.size()) best.emplace(mp, *path);
        }
        if (!best) throw PlanFailure{"placement"};
        for (const Macro& mv : best->first.moves) run_macro(mv);
        const NodeList& path = best->second;
        for (size_t k = 1; k < path.size(); ++k) {
            auto m = base_tokens();
            if (cls(steps.size()) == branch_cls()) put_pattern(m, star, pat);
            else put_idle(m, star, pat, s);
            put(m, path[k], s);
            push(m);
        }
        stores.push_back({z, theta_z, s});
    }
};

std::optional<Trajectory> build_with_star(const Window& w, const Bipartition& bip, const ConfigDescriptor& config,
                                          const Cylinder& target, const ComplexStar& star, Parity wp) {
    auto wit = nearest_witnesses(w, bip, config, star.s_star, wp);
    if (!wit) return std::nullopt;
    std::map<NodeId, uint64_t> dist = bfs_distances(w, star.s_star);
    auto plan = plan_centrage(w, star, wit->first, wit->second, dist);
    if (!plan) throw PlanFailure{"centrage"};

    Builder b{w, bip, star, wp, {}, {}, {-1, -1, -1}};
    for (const auto& [a, i] : plan->pos) b.steps.emplace_back(NodeList{a}, NodeList{i});
    b.pat[plan->branch_active] = 1;
    b.pat[plan->branch_inactive] = 0;

    // Stored images point away from the star so later paths stay clear.
    auto far_first = [&](const NodeId& a, const NodeId& c) {
        uint64_t da = dist.count(a) ? dist.at(a) : 0, dc = dist.count(c) ? dist.at(c) : 0;
        return da > dc;
    };
    StoringResult sr = storing_function(w, target.X, target.Y, far_first);
    if (std::holds_alternative<NoStoring>(sr)) throw PlanFailure{"storing"};
    const StoringMap& theta = std::get<StoringMap>(sr);

    std::vector<std::pair<NodeId, Status>> order;
    for (const NodeId& x : target.X) order.emplace_back(x, Status::Active);
    for (const NodeId& y : target.Y) order.emplace_back(y, Status::Inactive);
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& c) {
        uint64_t da = dist.at(a.first), dc = dist.at(c.first);
        return da != dc ? da > dc : a.first < c.first;
    });
    for (const auto& [z, s] : order) b.place(z, s, theta.theta.at(z));
    b.steps.back() = target;
    return Trajectory{std::move(b.steps)};
}

} // namespace

BuildResult build_trajectory(const Window& w, const ConfigDescriptor& config, const Cylinder& target) {
    require_no_torus(w);
    Bipartition bip = require_bipartite(w);
    NodeList support = target.support();
    require_in_window(w, support);
    BuildResult res;
    if (support.empty()) {
        res.trajectory.steps.push_back(target);
        res.store_only = true;
        return res;
    }
    Parity tp = bip.of(support.front());
    for (const NodeId& n : support) {
        if (bip.of(n) != tp) throw Error(ErrorKind::NotSingleParity, "target spans both parity blocks");
    }
    res.target_parity = tp;

    std::vector<ComplexStar> stars = find_complex_stars(w);
    if (stars.empty()) throw Error(ErrorKind::RichnessViolated, "complex-stars: the window has no complex star");
    StoringResult sr = storing_function(w, target.X, target.Y);
    if (auto* no = std::get_if<NoStoring>(&sr)) throw Error(ErrorKind::RichnessViolated, "storing: target cannot be stored (" + no->reason + ")");

    if (target.holds(config)) {
        res.trajectory.steps.push_back(target);
        res.store_only = true;
        return res;
    }

    std::optional<Parity> wp;
    for (Parity p : {tp, flip(tp)}) {
        bool a = false, i = false;
        for (const NodeId& n : w.nodes()) {
            if (bip.of(n) != p) continue;
            (config.status_of(n) == Status::Active ? a : i) = true;
            if (a && i) break;
        }
        if (a && i) {
            wp = p;
            break;
        }
    }
    if (!wp) throw Error(ErrorKind::InvalidInput, "config needs both statuses on one parity block inside the window");
    res.witness_parity = *wp;

    NodeList halo = set_union(support, neighbors_of_set(w, support));
    // Distance of each node to the target.
    std::map<NodeId, uint64_t> to_target;
    {
        std::deque<NodeId> q;
        for (const NodeId& n : support) {
            to_target[n] = 0;
            q.push_back(n);
        }
        while (!q.empty()) {
            NodeId u = q.front();
            q.pop_front();
            for (const NodeId& v : w.neighbors(u)) {
                if (to_target.emplace(v, to_target[u] + 1).second) q.push_back(v);
            }
        }
    }
    std::vector<ComplexStar> usable;
    for (const ComplexStar& s : stars) {
        if (bip.of(s.s_star) == *wp) continue; // branches must lie on the witness block
        if (set_intersection(s.nodes(), halo).empty()) usable.push_back(s);
    }
    if (usable.empty()) throw Error(ErrorKind::TargetTooLarge, "no complex star clear of the target halo");
    std::stable_sort(usable.begin(), usable.end(), [&](const ComplexStar& a, const ComplexStar& b) {
        uint64_t da = to_target.at(a.s_star), db = to_target.at(b.s_star);
        return da != db ? da < db : a.s_star < b.s_star;
    });

    constexpr size_t kStarAttempts = 16;
    std::string clause = "placement";
    for (size_t i = 0; i < usable.size() && i < kStarAttempts; ++i) {
        try {
            auto t = build_with_star(w, bip, config, target, usable[i], *wp);
            if (!t) continue;
            TrajectoryCheck check = validate_trajectory(w.base(), *t);
            if (!check.valid) throw Error(ErrorKind::Internal, "synthesized trajectory fails validation: " + check.reason);
            bool odd_length = t->length() % 2 == 1;
            if (odd_length != (tp != *wp)) throw Error(ErrorKind::Internal, "synthesized trajectory breaks the parity law");
            res.trajectory = std::move(*t);
            res.star = usable[i];
            return res;
        } catch (const PlanFailure& f) {
            clause = f.clause;
        }
    }
    throw Error(ErrorKind::RichnessViolated, clause + ": no star admits a schedule to the target");
}

} // namespace netdiff
