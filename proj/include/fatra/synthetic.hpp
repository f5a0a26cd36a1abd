#pragma once

#include <cstdint>

#include "fatra/graph.hpp"
#include "fatra/rng.hpp"

namespace fatra {

enum class LabelRule { Coin, Threshold };

// Population model: features of group f are iid N(mu_f, sigma_f^2) per
// channel; structure is wired by a two-block rule so that the mean signed
// balance p - q lands on target_u_signed at the requested mean degree.
struct SyntheticSpec {
    std::size_t n = 1000;
    std::size_t zeta = 16;
    double mu1 = 0.0;
    double mu0 = 0.0;
    double sigma1 = 1.0;
    double sigma0 = 1.0;
    double target_u_signed = 0.0;  // u'
    double group_fraction = 0.5;   // fraction of nodes with f = 1
    LabelRule label_rule = LabelRule::Coin;
    double label_prob = 0.5;       // Coin: P(y=1)
    std::size_t label_channel = 0; // Threshold: y = 1 iff X[i,ch] > mixture mean
    double mean_degree = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct UPrimeRange {
    double lo = -1.0;
    double hi = 1.0;
};

// Range of u' the two-block wiring can reach for these group sizes and degree.
UPrimeRange achievable_u_range(std::size_t n1, std::size_t n0, double mean_degree);

AttributedGraph sample_gaussian_graph(const SyntheticSpec& spec);

// Greedy batched edge editing toward a target mean signed balance.
// Raising u' adds same-group edges and removes cross-group edges; lowering
// does the inverse. Returns the edited edge set; throws InfeasibleError with
// the reachable range when the target cannot be approached.
std::vector<Edge> adjust_balance_edges(const AttributedGraph& g, double target,
                                       double tol, Rng& rng,
                                       std::size_t max_rounds = 500);

// Envelope for the squared aggregated cross-group distance:
//   lower = (s1^2+s0^2) * zeta * (1 - 2*sqrt(log(2/delta)/zeta)) + zeta u^2 (mu1-mu0)^2
//   upper = same with + 4*sqrt(...).
struct EtaBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool vacuous = false;  // lower <= 0: the envelope carries no information
};

EtaBounds eta_bounds(const SyntheticSpec& spec, double delta);

}  // namespace fatra
