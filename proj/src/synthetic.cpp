#include "fatra/synthetic.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

namespace fatra {

namespace {

inline std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct EdgeSet {
    std::unordered_set<std::uint64_t> keys;
    std::vector<Edge> edges;

    explicit EdgeSet(const std::vector<Edge>& init) {
        for (const Edge& e : init) insert(e.first, e.second);
    }
    EdgeSet() = default;

    bool contains(std::uint32_t a, std::uint32_t b) const {
        return keys.count(edge_key(a, b)) > 0;
    }
    bool insert(std::uint32_t a, std::uint32_t b) {
        if (a == b) return false;
        if (!keys.insert(edge_key(a, b)).second) return false;
        if (a > b) std::swap(a, b);
        edges.push_back({a, b});
        return true;
    }
};

double measured_u_signed(std::size_t n, const std::vector<Edge>& edges,
                         const std::vector<std::uint8_t>& F) {
    std::vector<std::uint32_t> deg(n, 0);
    std::vector<std::int32_t> same_minus_cross(n, 0);
    for (const Edge& e : edges) {
        deg[e.first] += 1;
        deg[e.second] += 1;
        const int s = F[e.first] == F[e.second] ? 1 : -1;
        same_minus_cross[e.first] += s;
        same_minus_cross[e.second] += s;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += (1.0 + same_minus_cross[i]) / (1.0 + deg[i]);
    return acc / static_cast<double>(n);
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n < 2) throw ContractError("SyntheticSpec: n must be >= 2");
    if (zeta < 1) throw ContractError("SyntheticSpec: zeta must be >= 1");
    if (!(sigma1 > 0.0) || !(sigma0 > 0.0))
        throw ContractError("SyntheticSpec: sigmas must be > 0");
    if (target_u_signed < -1.0 || target_u_signed > 1.0)
        throw ContractError("SyntheticSpec: u' must lie in [-1,1]");
    if (!(group_fraction > 0.0) || !(group_fraction < 1.0))
        throw ContractError("SyntheticSpec: group fraction must lie in (0,1)");
    if (label_rule == LabelRule::Threshold && label_channel >= zeta)
        throw ContractError("SyntheticSpec: label channel out of range");
    if (!(mean_degree > 0.0)) throw ContractError("SyntheticSpec: mean degree must be > 0");
}

UPrimeRange achievable_u_range(std::size_t n1, std::size_t n0, double mean_degree) {
    const double n = static_cast<double>(n1 + n0);
    const double d = mean_degree;
    // cross-edge count E_c = n (d+1)(1-u')/4 needs E_c >= 0 and per-group
    // same-edge counts (d n_g - E_c)/2 >= 0
    const double cap = 4.0 * d * static_cast<double>(std::min(n1, n0)) / (n * (d + 1.0));
    UPrimeRange r;
    r.hi = 1.0;
    r.lo = std::max(-1.0, 1.0 - cap);
    return r;
}

AttributedGraph sample_gaussian_graph(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(sub_seed(spec.seed, SeedStream::Synthetic));

    const std::size_t n = spec.n;
    const std::size_t n1 = static_cast<std::size_t>(std::llround(spec.group_fraction * n));
    if (n1 == 0 || n1 == n)
        throw ContractError("SyntheticSpec: group fraction leaves a group empty");
    const std::size_t n0 = n - n1;

    const UPrimeRange range = achievable_u_range(n1, n0, spec.mean_degree);
    if (spec.target_u_signed < range.lo || spec.target_u_signed > range.hi)
        throw InfeasibleError("target u' " + std::to_string(spec.target_u_signed) +
                              " outside achievable range [" + std::to_string(range.lo) +
                              ", " + std::to_string(range.hi) + "]");

    // group assignment by seeded shuffle
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    rng.shuffle(order);
    std::vector<std::uint8_t> F(n, 0);
    std::vector<std::uint32_t> members[2];
    for (std::size_t i = 0; i < n1; ++i) F[order[i]] = 1;
    for (std::size_t i = 0; i < n; ++i) members[F[i]].push_back(static_cast<std::uint32_t>(i));

    // two-block wiring: per-group same-degree and cross-degree targets solve
    //   (sigma + 1 - chi) / (d + 1) = u',  sigma + chi = d
    const double d = spec.mean_degree;
    const double u = spec.target_u_signed;
    const double ec = static_cast<double>(n) * (d + 1.0) * (1.0 - u) / 4.0;
    const double s1 = (d * static_cast<double>(n1) - ec) / 2.0;
    const double s0 = (d * static_cast<double>(n0) - ec) / 2.0;

    auto count_cap = [](std::size_t m) {
        return static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
    };
    const std::size_t want_ec =
        static_cast<std::size_t>(std::llround(std::min(ec, static_cast<double>(n1) * n0)));
    const std::size_t want_s1 =
        static_cast<std::size_t>(std::llround(std::max(0.0, std::min(s1, count_cap(n1)))));
    const std::size_t want_s0 =
        static_cast<std::size_t>(std::llround(std::max(0.0, std::min(s0, count_cap(n0)))));

    EdgeSet es;
    auto sample_within = [&](int f, std::size_t want) {
        const auto& mem = members[f];
        std::size_t placed = 0;
        std::size_t attempts = 0;
        const std::size_t max_attempts = want * 50 + 1000;
        while (placed < want && attempts < max_attempts) {
            ++attempts;
            const std::uint32_t a = mem[rng.uniform_index(0, mem.size() - 1)];
            const std::uint32_t b = mem[rng.uniform_index(0, mem.size() - 1)];
            if (a == b) continue;
            if (es.insert(a, b)) ++placed;
        }
    };
    auto sample_cross = [&](std::size_t want) {
        std::size_t placed = 0;
        std::size_t attempts = 0;
        const std::size_t max_attempts = want * 50 + 1000;
        while (placed < want && attempts < max_attempts) {
            ++attempts;
            const std::uint32_t a = members[1][rng.uniform_index(0, members[1].size() - 1)];
            const std::uint32_t b = members[0][rng.uniform_index(0, members[0].size() - 1)];
            if (es.insert(a, b)) ++placed;
        }
    };
    sample_within(1, want_s1);
    sample_within(0, want_s0);
    sample_cross(want_ec);

    // features, node-major then channel
    Matrix X(n, spec.zeta);
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = F[i] ? spec.mu1 : spec.mu0;
        const double sigma = F[i] ? spec.sigma1 : spec.sigma0;
        for (std::size_t c = 0; c < spec.zeta; ++c) X(i, c) = rng.normal(mu, sigma);
    }

    // labels
    std::vector<std::uint8_t> Y(n, 0);
    if (spec.label_rule == LabelRule::Coin) {
        for (std::size_t i = 0; i < n; ++i) Y[i] = rng.bernoulli(spec.label_prob) ? 1 : 0;
    } else {
        const double theta =
            spec.group_fraction * spec.mu1 + (1.0 - spec.group_fraction) * spec.mu0;
        for (std::size_t i = 0; i < n; ++i) Y[i] = X(i, spec.label_channel) > theta ? 1 : 0;
    }

    AttributedGraph g = AttributedGraph::create(n, std::move(es.edges), std::move(X),
                                                std::move(F), std::move(Y));

    // nudge the realized balance onto the target when sampling noise or the
    // uneven-degree Jensen effect pushed it out
    const double achieved = sensitive_balance(g).signed_mean;
    if (std::fabs(achieved - spec.target_u_signed) > 0.02) {
        auto edited = adjust_balance_edges(g, spec.target_u_signed, 0.02, rng);
        g = g.with_edges(std::move(edited));
    }
    return g;
}

std::vector<Edge> adjust_balance_edges(const AttributedGraph& g, double target,
                                       double tol, Rng& rng, std::size_t max_rounds) {
    if (target < -1.0 || target > 1.0)
        throw ContractError("adjust_balance_edges: target outside [-1,1]");
    if (!(tol > 0.0)) throw ContractError("adjust_balance_edges: tol must be > 0");

    EdgeSet es(g.edges);
    std::vector<std::uint32_t> members[2];
    for (std::size_t i = 0; i < g.n; ++i)
        members[g.F[i]].push_back(static_cast<std::uint32_t>(i));
    if (members[0].empty() || members[1].empty())
        throw InfeasibleError("adjust_balance_edges: a sensitive group is empty; "
                              "balance is fixed at 1");

    const double per_edge =
        1.0 / (static_cast<double>(g.n)) *
        2.0 / (2.0 + 2.0 * static_cast<double>(g.edges.size()) / static_cast<double>(g.n));

    double current = measured_u_signed(g.n, es.edges, g.F);
    std::size_t stalled = 0;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        const double gap = target - current;
        if (std::fabs(gap) <= tol) return es.edges;

        std::size_t batch = static_cast<std::size_t>(std::fabs(gap) / (2.0 * per_edge));
        batch = std::max<std::size_t>(1, std::min<std::size_t>(batch, g.n * 4));

        const bool raise = gap > 0.0;
        // removals from the opposing category, applied before any additions
        std::vector<std::size_t> removable;
        for (std::size_t i = 0; i < es.edges.size(); ++i) {
            const Edge& e = es.edges[i];
            const bool same = g.F[e.first] == g.F[e.second];
            if (same != raise) removable.push_back(i);
        }
        const std::size_t remove_want = std::min<std::size_t>(batch / 2, removable.size());
        std::size_t removed = 0;
        if (remove_want > 0) {
            rng.shuffle(removable);
            std::vector<bool> drop(es.edges.size(), false);
            for (std::size_t i = 0; i < remove_want; ++i) {
                drop[removable[i]] = true;
                ++removed;
            }
            EdgeSet rebuilt;
            for (std::size_t i = 0; i < es.edges.size(); ++i)
                if (!drop[i]) rebuilt.insert(es.edges[i].first, es.edges[i].second);
            es = std::move(rebuilt);
        }
        // additions in the pushing category
        std::size_t add_want = batch - removed;
        std::size_t added = 0;
        std::size_t attempts = 0;
        const std::size_t max_attempts = add_want * 50 + 200;
        while (added < add_want && attempts < max_attempts) {
            ++attempts;
            std::uint32_t a;
            std::uint32_t b;
            if (raise) {
                const int f = rng.bernoulli(0.5) ? 1 : 0;
                const auto& mem = members[f];
                if (mem.size() < 2) continue;
                a = mem[rng.uniform_index(0, mem.size() - 1)];
                b = mem[rng.uniform_index(0, mem.size() - 1)];
            } else {
                a = members[1][rng.uniform_index(0, members[1].size() - 1)];
                b = members[0][rng.uniform_index(0, members[0].size() - 1)];
            }
            if (a == b) continue;
            if (es.insert(a, b)) ++added;
        }

        if (removed + added == 0) {
            if (++stalled >= 3) break;
            continue;
        }
        stalled = 0;
        current = measured_u_signed(g.n, es.edges, g.F);
    }

    const double lo = std::min(current, target);
    const double hi = std::max(current, target);
    throw InfeasibleError("adjust_balance_edges: target " + std::to_string(target) +
                          " unreachable; stalled at " + std::to_string(current) +
                          " (reachable toward [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] exhausted)");
}

EtaBounds eta_bounds(const SyntheticSpec& spec, double delta) {
    spec.validate();
    if (!(delta > 0.0) || !(delta < 1.0))
        throw ContractError("eta_bounds: delta must lie in (0,1)");
    const double zeta = static_cast<double>(spec.zeta);
    const double varsum = spec.sigma1 * spec.sigma1 + spec.sigma0 * spec.sigma0;
    const double tail = std::sqrt(std::log(2.0 / delta) / zeta);
    const double u = spec.target_u_signed;
    const double gap = spec.mu1 - spec.mu0;
    const double mean_term = zeta * u * u * gap * gap;
    EtaBounds b;
    b.lower = varsum * zeta * (1.0 - 2.0 * tail) + mean_term;
    b.upper = varsum * zeta * (1.0 + 4.0 * tail) + mean_term;
    b.vacuous = b.lower <= 0.0;
    return b;
}

}  // namespace fatra
