#include "fatra/certify.hpp"

#include <cmath>
#include <cstdio>

#include "fatra/spectral.hpp"

namespace fatra {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Violated: return "violated";
        case Verdict::Partial: return "partial";
        case Verdict::Vacuous: return "vacuous";
    }
    return "unknown";
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string BoundCertificate::to_text() const {
    std::string s = "certificate " + id + " verdict=" + verdict_name(verdict) + "\n";
    for (const auto& [k, v] : terms) s += "  " + k + "=" + fmt(v) + "\n";
    s += "  observed=" + fmt(observed) + "\n";
    s += "  bound=" + fmt(bound) + "\n";
    s += "  slack=" + fmt(slack) + "\n";
    if (!note.empty()) s += "  note=" + note + "\n";
    return s;
}

BoundCertificate verify_pair_bound(const SyntheticSpec& spec, double delta,
                                   std::size_t trials) {
    spec.validate();
    if (!(delta > 0.0) || !(delta < 1.0))
        throw ContractError("verify_pair_bound: delta must lie in (0,1)");
    if (trials < 100) throw ContractError("verify_pair_bound: trials must be >= 100");

    const EtaBounds env = eta_bounds(spec, delta);
    const double sd = std::sqrt(spec.sigma1 * spec.sigma1 + spec.sigma0 * spec.sigma0);
    const double mean_shift = spec.target_u_signed * (spec.mu1 - spec.mu0);

    std::size_t inside = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(sub_seed(spec.seed, SeedStream::Theory) + trial);
        double q = 0.0;
        for (std::size_t c = 0; c < spec.zeta; ++c) {
            const double d = rng.normal(0.0, sd) + mean_shift;
            q += d * d;
        }
        if (q >= env.lower && q <= env.upper) ++inside;
    }
    const double freq = static_cast<double>(inside) / static_cast<double>(trials);
    const double threshold =
        1.0 - delta - 2.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));

    BoundCertificate cert;
    cert.id = "thm35-pair";
    cert.terms.emplace_back("lower", env.lower);
    cert.terms.emplace_back("upper", env.upper);
    cert.terms.emplace_back("delta", delta);
    cert.terms.emplace_back("trials", static_cast<double>(trials));
    cert.terms.emplace_back("in_bound_frequency", freq);
    cert.observed = freq;
    cert.bound = threshold;
    cert.slack = freq - threshold;
    if (env.vacuous) {
        cert.verdict = Verdict::Vacuous;
        cert.note = "lower bound not positive; envelope carries no information";
        return cert;
    }
    cert.verdict = freq >= threshold ? Verdict::Holds : Verdict::Violated;

    // Graph-level max-min distances, reported without a verdict: the
    // probability statement is certified per pair only.
    AttributedGraph g = sample_gaussian_graph(spec);
    const GroupIndex groups = group_partition(g);
    const Matrix H = aggregate(g);
    for (int y = 0; y < 2; ++y) {
        if (groups.eo_empty[0][y] || groups.eo_empty[1][y]) continue;
        const double e = eta(H, groups, y);
        cert.terms.emplace_back("observed_eta" + std::to_string(y) + "_sq", e * e);
    }
    return cert;
}

namespace {

double encoder_lipschitz(const FatraModel& m, const Matrix& ahat) {
    return spectral_norm(m.weight(Net::Encoder, 0)) * spectral_norm(ahat) *
           spectral_norm(m.weight(Net::Encoder, 1));
}

double classifier_lipschitz(const FatraModel& m) {
    return spectral_norm(m.weight(Net::Classifier, 0)) *
           spectral_norm(m.weight(Net::Classifier, 1));
}

double soft_eo_value(const std::vector<double>& scores, const GroupIndex& groups) {
    double acc = 0.0;
    for (int y = 0; y < 2; ++y) {
        const auto& g1 = groups.eo[1][y];
        const auto& g0 = groups.eo[0][y];
        if (g1.empty() || g0.empty()) continue;
        double r1 = 0.0;
        double r0 = 0.0;
        for (std::size_t i : g1) r1 += y == 1 ? scores[i] : 1.0 - scores[i];
        for (std::size_t i : g0) r0 += y == 1 ? scores[i] : 1.0 - scores[i];
        r1 /= static_cast<double>(g1.size());
        r0 /= static_cast<double>(g0.size());
        acc += std::fabs(r1 - r0);
    }
    return 0.5 * acc;
}

}  // namespace

BoundCertificate check_thm36(const AttributedGraph& g, const FatraModel& m) {
    const GroupIndex groups = group_partition(g);
    BoundCertificate cert;
    cert.id = "thm36";

    const GraphTensors gt = make_graph_tensors(g);
    const Matrix Z = encode(m, gt);
    const std::vector<double> scores = classifier_scores(m, Z);
    const Predictions pred = Predictions::from_scores(scores);
    const DeltaEoResult eo = delta_eo(pred, g.Y, g.F);

    bool skipped = false;
    double eta_sum = 0.0;
    const Matrix H = aggregate(g);
    for (int y = 0; y < 2; ++y) {
        if (groups.eo_empty[0][y] || groups.eo_empty[1][y]) {
            skipped = true;
            continue;
        }
        const double e = eta(H, groups, y);
        cert.terms.emplace_back("eta" + std::to_string(y), e);
        eta_sum += e;
    }
    const double l1 = encoder_lipschitz(m, gt.Ahat);
    const double l2 = classifier_lipschitz(m);
    cert.terms.emplace_back("L1", l1);
    cert.terms.emplace_back("L2", l2);
    cert.terms.emplace_back("soft_delta_eo", soft_eo_value(scores, groups));

    cert.observed = eo.value;
    cert.bound = l1 * l2 * eta_sum / 2.0;
    cert.slack = cert.bound - cert.observed;
    if (skipped || eo.any_skipped()) {
        cert.verdict = Verdict::Partial;
        cert.note = "empty EO group: eta term(s) skipped";
        return cert;
    }
    cert.verdict = cert.observed <= cert.bound + kVerdictTol ? Verdict::Holds
                                                             : Verdict::Violated;
    return cert;
}

CrossGraphCertificates check_thm38(const AttributedGraph& g_train,
                                   const AttributedGraph& g_test, const FatraModel& m) {
    if (g_train.feature_dim() != g_test.feature_dim())
        throw DimensionError("check_thm38: feature widths differ");

    const GroupIndex gj = group_partition(g_train);
    const GroupIndex gk = group_partition(g_test);

    const GraphTensors tj = make_graph_tensors(g_train);
    const GraphTensors tk = make_graph_tensors(g_test);
    const Matrix zj = encode(m, tj);
    const Matrix zk = encode(m, tk);
    const Predictions pj = Predictions::from_scores(classifier_scores(m, zj));
    const Predictions pk = Predictions::from_scores(classifier_scores(m, zk));

    const double l2 = classifier_lipschitz(m);

    CrossGraphCertificates out;

    // equalized odds difference vs L2 * sum eps
    {
        BoundCertificate& c = out.eo;
        c.id = "thm38-eo";
        const DeltaEoResult eo_j = delta_eo(pj, g_train.Y, g_train.F);
        const DeltaEoResult eo_k = delta_eo(pk, g_test.Y, g_test.F);
        const EoDistances eps = epsilon(zj, zk, gj, gk);
        c.terms.emplace_back("delta_eo_train", eo_j.value);
        c.terms.emplace_back("delta_eo_test", eo_k.value);
        c.terms.emplace_back("L2", l2);
        for (int f = 0; f < 2; ++f)
            for (int y = 0; y < 2; ++y)
                if (eps.value[f][y])
                    c.terms.emplace_back(
                        "eps_f" + std::to_string(f) + "_y" + std::to_string(y),
                        *eps.value[f][y]);
        c.observed = eo_k.value - eo_j.value;
        c.bound = l2 * eps.sum_present();
        c.slack = c.bound - c.observed;
        if (!eps.complete() || eo_j.any_skipped() || eo_k.any_skipped()) {
            c.verdict = Verdict::Partial;
            c.note = "empty EO group: term(s) skipped";
        } else {
            c.verdict = c.observed <= c.bound + kVerdictTol ? Verdict::Holds
                                                            : Verdict::Violated;
        }
    }

    // demographic parity difference vs L2 * sum gamma
    {
        BoundCertificate& c = out.dp;
        c.id = "thm38-dp";
        const double dp_j = delta_dp(pj, g_train.F);
        const double dp_k = delta_dp(pk, g_test.F);
        const SensDistances gam = gamma(zj, zk, gj, gk);
        c.terms.emplace_back("delta_dp_train", dp_j);
        c.terms.emplace_back("delta_dp_test", dp_k);
        c.terms.emplace_back("L2", l2);
        for (int f = 0; f < 2; ++f)
            if (gam.value[f])
                c.terms.emplace_back("gamma_f" + std::to_string(f), *gam.value[f]);
        c.observed = dp_k - dp_j;
        c.bound = l2 * gam.sum_present();
        c.slack = c.bound - c.observed;
        const bool complete = gam.value[0].has_value() && gam.value[1].has_value();
        if (!complete) {
            c.verdict = Verdict::Partial;
            c.note = "empty sensitive group: term skipped";
        } else {
            c.verdict = c.observed <= c.bound + kVerdictTol ? Verdict::Holds
                                                            : Verdict::Violated;
        }
    }
    return out;
}

namespace {

// Small random instance with all four EO groups guaranteed nonempty.
AttributedGraph random_instance_graph(Rng& rng, std::size_t zeta, std::uint64_t seed) {
    for (int attempt = 0; attempt < 32; ++attempt) {
        SyntheticSpec spec;
        spec.n = rng.uniform_index(30, 80);
        spec.zeta = zeta;
        spec.mu1 = rng.uniform(-1.0, 1.0);
        spec.mu0 = rng.uniform(-1.0, 1.0);
        spec.sigma1 = rng.uniform(0.5, 1.5);
        spec.sigma0 = rng.uniform(0.5, 1.5);
        spec.target_u_signed = rng.uniform(-0.3, 0.5);
        spec.group_fraction = rng.uniform(0.3, 0.7);
        spec.label_rule = LabelRule::Coin;
        spec.label_prob = 0.5;
        spec.mean_degree = rng.uniform(4.0, 10.0);
        spec.seed = seed + static_cast<std::uint64_t>(attempt) * 7919;
        const UPrimeRange r = achievable_u_range(
            static_cast<std::size_t>(std::llround(spec.group_fraction * spec.n)),
            spec.n - static_cast<std::size_t>(std::llround(spec.group_fraction * spec.n)),
            spec.mean_degree);
        if (spec.target_u_signed < r.lo + 0.05) spec.target_u_signed = r.lo + 0.05;
        AttributedGraph g = sample_gaussian_graph(spec);
        if (!group_partition(g).any_eo_empty()) return g;
    }
    throw ContractError("random_instance_graph: could not realize all EO groups");
}

}  // namespace

RandomSuiteResult random_certificate_suite(std::size_t count, std::uint64_t base_seed,
                                           bool keep_certificates) {
    RandomSuiteResult res;
    res.total = count;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(base_seed + i);
        const std::size_t zeta = rng.uniform_index(4, 8);
        AttributedGraph g_train = random_instance_graph(rng, zeta, base_seed + i * 1000);
        AttributedGraph g_test = random_instance_graph(rng, zeta, base_seed + i * 1000 + 500);

        ModelDims dims;
        dims.zeta = zeta;
        dims.hidden = 8;
        dims.repr = 8;
        dims.cls_hidden = 8;
        dims.disc_hidden = 8;
        dims.gen_hidden = 8;
        FatraModel m = FatraModel::init(dims, base_seed + i);

        BoundCertificate c36 = check_thm36(g_train, m);
        if (c36.verdict == Verdict::Holds) res.holds36 += 1;
        CrossGraphCertificates c38 = check_thm38(g_train, g_test, m);
        if (c38.eo.verdict == Verdict::Holds) res.holds38_eo += 1;
        if (c38.dp.verdict == Verdict::Holds) res.holds38_dp += 1;
        if (keep_certificates) {
            res.certificates.push_back(std::move(c36));
            res.certificates.push_back(std::move(c38.eo));
            res.certificates.push_back(std::move(c38.dp));
        }
    }
    return res;
}

}  // namespace fatra
