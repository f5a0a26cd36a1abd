#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fatra/model.hpp"
#include "fatra/synthetic.hpp"

namespace fatra {

enum class Verdict { Holds, Violated, Partial, Vacuous };

const char* verdict_name(Verdict v);

// Computed bound terms, the observed quantity, and the holds/violated call
// at the stated tolerance.
struct BoundCertificate {
    std::string id;
    std::vector<std::pair<std::string, double>> terms;
    double observed = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // bound - observed (or frequency - threshold)
    Verdict verdict = Verdict::Holds;
    std::string note;

    std::string to_text() const;
};

// Empirical per-pair check of the squared-distance envelope: each trial draws
// the cross-group difference vector from its stated law
//   N(u' (mu1 - mu0) * 1_zeta, (sigma1^2 + sigma0^2) I_zeta)
// and the verdict holds when the in-envelope frequency reaches
// 1 - delta - 2 sqrt(delta (1-delta) / trials). The graph-level max-min
// distances are reported alongside without a verdict.
BoundCertificate verify_pair_bound(const SyntheticSpec& spec, double delta,
                                   std::size_t trials);

// Hard-label equalized odds against L1 L2 (eta_0 + eta_1) / 2, with L1, L2
// taken as spectral-norm products over the actual stacks (relu and sigmoid
// treated 1-Lipschitz).
BoundCertificate check_thm36(const AttributedGraph& g, const FatraModel& m);

// Cross-graph bounds: EO difference against L2 * sum eps_f^y and the
// demographic-parity analogue against L2 * sum gamma_f.
struct CrossGraphCertificates {
    BoundCertificate eo;
    BoundCertificate dp;
};

CrossGraphCertificates check_thm38(const AttributedGraph& g_train,
                                   const AttributedGraph& g_test, const FatraModel& m);

// Monte Carlo certification over random small model/graph instances: one
// thm36 certificate per instance and one thm38 pair per instance.
struct RandomSuiteResult {
    std::size_t total = 0;
    std::size_t holds36 = 0;
    std::size_t holds38_eo = 0;
    std::size_t holds38_dp = 0;
    std::vector<BoundCertificate> certificates;
};

RandomSuiteResult random_certificate_suite(std::size_t count, std::uint64_t base_seed,
                                           bool keep_certificates = false);

static constexpr double kVerdictTol = 1e-9;

}  // namespace fatra
