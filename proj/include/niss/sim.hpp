#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "niss/distribution.hpp"
#include "niss/errors.hpp"
#include "niss/quantum.hpp"
#include "niss/rng.hpp"
#include "niss/synthesis.hpp"

namespace niss {

struct RunConfig {
    std::uint64_t n_samples = 1;
    std::uint64_t seed = 0;
    int d = 1;

    void validate() const {
        if (n_samples < 1) throw std::invalid_argument("RunConfig: n_samples must be >= 1");
        if (d < 0 || d > 12) throw std::invalid_argument("RunConfig: d out of range");
    }
};

struct EmpiricalReport {
    JointDistribution empirical;
    double tv_to_target = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::string generator{kGeneratorName};
    Moments moments;  // +-1 moments; meaningful for scheme runs
};

/// IID draws of realization pairs (x^d, y^d), encoded as d-bit masks
/// (bit i-1 set means coordinate i is +1). Deterministic per (seed, d, n):
/// the draw order is fixed and only the "source" stream is consumed.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_source(
    const BivariateBinarySource& src, const RunConfig& cfg) {
    cfg.validate();
    auto g = make_stream(cfg.seed, "source");
    const double pp = src.prob(1, 1);
    const double pm = src.prob(1, -1);
    const double mp = src.prob(-1, 1);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    out.reserve(cfg.n_samples);
    for (std::uint64_t k = 0; k < cfg.n_samples; ++k) {
        std::uint32_t x = 0, y = 0;
        for (int i = 0; i < cfg.d; ++i) {
            double u = uniform01(g);
            if (u < pp) {
                x |= 1u << i;
                y |= 1u << i;
            } else if (u < pp + pm) {
                x |= 1u << i;
            } else if (u < pp + pm + mp) {
                y |= 1u << i;
            }
        }
        out.emplace_back(x, y);
    }
    return out;
}

namespace detail {

inline JointDistribution empirical_2x2(const std::uint64_t counts[2][2], std::uint64_t n) {
    double inv = 1.0 / static_cast<double>(n);
    return JointDistribution({1, -1}, {1, -1},
                             {{counts[0][0] * inv, counts[0][1] * inv},
                              {counts[1][0] * inv, counts[1][1] * inv}});
}

}  // namespace detail

/// Runs an affine scheme: per sample, a fair shared bit from the "z" stream,
/// then each party draws its output from its own local stream.
inline EmpiricalReport run_affine_monte_carlo(const AffineScheme& sch, const RunConfig& cfg,
                                              const BinaryTarget& target) {
    cfg.validate();
    sch.validate();
    auto gz = make_stream(cfg.seed, "z");
    auto ga = make_stream(cfg.seed, "alice");
    auto gb = make_stream(cfg.seed, "bob");
    AffinePair fa = sch.alice(), gbp = sch.bob();
    std::uint64_t counts[2][2] = {{0, 0}, {0, 0}};
    double su = 0.0, sv = 0.0, suv = 0.0;
    for (std::uint64_t k = 0; k < cfg.n_samples; ++k) {
        int z = fair_sign(gz);
        int u = bernoulli_sign(ga, fa.prob_plus(z));
        int v = bernoulli_sign(gb, gbp.prob_plus(z));
        ++counts[u == 1 ? 0 : 1][v == 1 ? 0 : 1];
        su += u;
        sv += v;
        suv += u * v;
    }
    EmpiricalReport rep;
    rep.empirical = detail::empirical_2x2(counts, cfg.n_samples);
    rep.tv_to_target = total_variation(rep.empirical, target.q);
    rep.n = cfg.n_samples;
    rep.seed = cfg.seed;
    double inv = 1.0 / static_cast<double>(cfg.n_samples);
    rep.moments = {su * inv, sv * inv, suv * inv};
    return rep;
}

/// Runs a patched scheme: realization pair from the "source" stream, fair
/// shared bit from "z", Bob's mixing coin from "t", party outputs from
/// "alice"/"bob". TV is measured against the exact output distribution.
inline EmpiricalReport run_patched_monte_carlo(const PatchedScheme& ps,
                                               const BivariateBinarySource& src,
                                               const RunConfig& cfg) {
    cfg.validate();
    ps.validate();
    if (cfg.d != ps.d) throw std::invalid_argument("run_patched_monte_carlo: d mismatch");
    auto pairs = sample_source(src, cfg);
    auto gz = make_stream(cfg.seed, "z");
    auto gt = make_stream(cfg.seed, "t");
    auto ga = make_stream(cfg.seed, "alice");
    auto gb = make_stream(cfg.seed, "bob");
    std::uint64_t counts[2][2] = {{0, 0}, {0, 0}};
    double su = 0.0, sv = 0.0, suv = 0.0;
    for (auto [x, y] : pairs) {
        int z = fair_sign(gz);
        int t = bernoulli_sign(gt, ps.p_ts);
        int u = bernoulli_sign(ga, ps.f_plus[x].prob_plus(z));
        const AffinePair& gv = (t == 1) ? ps.g_plus[y] : ps.g_minus[y];
        int v = bernoulli_sign(gb, gv.prob_plus(z));
        ++counts[u == 1 ? 0 : 1][v == 1 ? 0 : 1];
        su += u;
        sv += v;
        suv += u * v;
    }
    EmpiricalReport rep;
    rep.empirical = detail::empirical_2x2(counts, cfg.n_samples);
    rep.tv_to_target =
        total_variation(rep.empirical, evaluate_patched_joint_exact(ps, realization_weights(src, ps.d)));
    rep.n = cfg.n_samples;
    rep.seed = cfg.seed;
    double inv = 1.0 / static_cast<double>(cfg.n_samples);
    rep.moments = {su * inv, sv * inv, suv * inv};
    return rep;
}

/// Builds per-realization targets from an entanglement-assisted instance
/// where each party's binary measurement may depend on its own classical
/// sequence. The trace law makes each party's outcome marginal independent
/// of the other side's choice, so no-signaling holds by construction; it is
/// re-validated all the same.
inline RealizationTargets ea_instance_to_targets(const std::vector<Povm>& alice_povms,
                                                 const std::vector<Povm>& bob_povms,
                                                 const BivariateBinarySource& src, int d) {
    const std::size_t n = std::size_t{1} << d;
    if (alice_povms.size() != n || bob_povms.size() != n)
        throw std::invalid_argument("ea_instance_to_targets: expected 2^d measurements per party");
    for (const auto& m : alice_povms)
        if (!m.binary()) throw povm_error("ea_instance_to_targets: Alice measurement not binary");
    for (const auto& m : bob_povms)
        if (!m.binary()) throw povm_error("ea_instance_to_targets: Bob measurement not binary");
    std::vector<BinaryTarget> targets;
    targets.reserve(n * n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            targets.push_back(BinaryTarget::from_joint(bell_joint_distribution(alice_povms[x], bob_povms[y])));
    RealizationTargets rt(d, src, std::move(targets));
    rt.validate();
    return rt;
}

}  // namespace niss
