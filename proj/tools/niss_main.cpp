// Command-line front end: measurement statistics on the shared Bell state,
// feasibility checks, scheme synthesis, Monte Carlo simulation and quantum
// advantage certification, all with JSON I/O.
//
// Exit codes: 0 = pass, 1 = semantic fail (infeasible target, condition
// violation, certified advantage), 2 = input or validation error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "niss/niss.hpp"

namespace {

using niss::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot write " + out_path);
        out << j.dump(2) << std::endl;
    }
}

int fail_with(const std::string& kind, const std::string& message, int code) {
    std::cout << json{{"error", message}, {"kind", kind}}.dump(2) << std::endl;
    return code;
}

std::uint64_t seed_fallback() {
    if (const char* env = std::getenv("NISS_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

/// Resolves the two measurement slots from positional paths plus the
/// repeatable --trine flag (each occurrence fills one remaining slot).
std::pair<niss::Povm, niss::Povm> resolve_povms(const std::vector<std::string>& paths,
                                                int trine_count) {
    std::vector<niss::Povm> sides;
    for (const auto& p : paths) sides.push_back(niss::povm_from_json(niss::load_json_file(p)));
    while (sides.size() < 2 && trine_count-- > 0) sides.push_back(niss::trine_povm());
    if (sides.size() != 2)
        throw std::invalid_argument("need two measurements (two files, or --trine per missing side)");
    return {sides[0], sides[1]};
}

int cmd_measure(const std::vector<std::string>& paths, int trine_count, double tol,
                const std::string& out_path) {
    auto [m1, m2] = resolve_povms(paths, trine_count);
    auto joint = niss::bell_joint_distribution(m1, m2, tol);
    auto [row, col] = niss::marginals(joint);
    json out = niss::to_json(joint);
    out["row_marginal"] = row;
    out["col_marginal"] = col;
    emit(out, out_path);
    return kExitPass;
}

int cmd_check(const std::string& dist_path, const std::string& mode, double tol,
              const std::string& out_path) {
    auto joint = niss::joint_from_json(niss::load_json_file(dist_path));
    if (mode == "binary") {
        auto verdict = niss::check_binary_cr_feasible(niss::BinaryTarget::from_joint(joint));
        emit(niss::to_json(verdict), out_path);
        return verdict.feasible ? kExitPass : kExitFail;
    }
    if (mode == "condition") {
        auto rep = niss::check_diagonal_product_condition(joint, tol);
        emit(niss::to_json(rep), out_path);
        return rep.pass ? kExitPass : kExitFail;
    }
    if (mode == "rank") {
        auto [rank, sv] = niss::rank_certificate(joint);
        emit(json{{"rank_estimate", rank}, {"singular_values", sv}}, out_path);
        return rank >= 3 ? kExitFail : kExitPass;
    }
    throw std::invalid_argument("unknown --mode " + mode);
}

int cmd_synthesize(const std::string& target_path, const std::string& out_path) {
    auto target = niss::BinaryTarget::from_joint(niss::joint_from_json(niss::load_json_file(target_path)));
    auto scheme = niss::synthesize_binary_scheme(target);
    emit(niss::to_json(scheme), out_path);
    return kExitPass;
}

int cmd_simulate(const std::string& scheme_path, std::uint64_t n, std::uint64_t seed, int batches,
                 const std::string& csv_path, const std::string& out_path) {
    auto scheme_json = niss::load_json_file(scheme_path);
    std::vector<niss::EmpiricalReport> reports;
    for (int b = 0; b < batches; ++b) {
        niss::RunConfig cfg{n, seed + static_cast<std::uint64_t>(b), 1};
        if (scheme_json.contains("f_plus")) {
            auto ps = niss::patched_from_json(scheme_json);
            cfg.d = ps.d;
            reports.push_back(niss::run_patched_monte_carlo(ps, ps.source, cfg));
        } else {
            auto sch = niss::affine_from_json(scheme_json);
            auto target = niss::BinaryTarget::from_joint(niss::evaluate_scheme_exact(sch));
            reports.push_back(niss::run_affine_monte_carlo(sch, cfg, target));
        }
    }
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw std::invalid_argument("cannot write " + csv_path);
        csv << niss::reports_to_csv(reports);
    }
    if (reports.size() == 1) {
        emit(niss::to_json(reports[0]), out_path);
    } else {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(niss::to_json(r));
        emit(json{{"batches", arr}}, out_path);
    }
    return kExitPass;
}

int cmd_certify(const std::vector<std::string>& paths, int trine_count, const std::string& out_path) {
    auto [m1, m2] = resolve_povms(paths, trine_count);
    auto rep = niss::certify_advantage(m1, m2);
    emit(niss::to_json(rep), out_path);
    return rep.advantage ? kExitFail : kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Source-simulation toolkit: Bell-state measurement statistics, shared-bit "
                 "feasibility, scheme synthesis and Monte Carlo verification"};
    app.require_subcommand(1);

    std::string out_path;
    double tol = 1e-10;
    double cond_tol = 1e-9;
    auto add_out = [&out_path](CLI::App* sub) {
        sub->add_option("--out", out_path, "write the JSON result here instead of stdout");
    };

    auto* measure = app.add_subcommand("measure", "joint outcome statistics of two measurements on the Bell state");
    std::vector<std::string> measure_paths;
    int measure_trine = 0;
    measure->add_option("povm", measure_paths, "POVM JSON files (up to two)")->expected(0, 2);
    measure->add_flag("--trine", measure_trine, "use the built-in trine measurement for a missing side");
    measure->add_option("--tol", tol, "validation tolerance");
    add_out(measure);

    auto* check = app.add_subcommand("check", "feasibility / condition / rank checks on a distribution");
    std::string check_path, check_mode = "binary";
    check->add_option("dist", check_path, "distribution JSON file")->required();
    check->add_option("--mode", check_mode, "binary | condition | rank")->capture_default_str();
    check->add_option("--tol", cond_tol, "condition residual tolerance");
    add_out(check);

    auto* synth = app.add_subcommand("synthesize", "degree-1 shared-bit scheme for a binary target");
    std::string synth_path;
    synth->add_option("target", synth_path, "binary target distribution JSON")->required();
    add_out(synth);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo run of a scheme JSON (affine or patched)");
    std::string sim_path, csv_path;
    std::uint64_t sim_n = 100000;
    std::uint64_t sim_seed = seed_fallback();
    int sim_batches = 1;
    sim->add_option("scheme", sim_path, "scheme JSON file")->required();
    sim->add_option("--n", sim_n, "samples per batch")->capture_default_str();
    sim->add_option("--seed", sim_seed, "base seed (NISS_SEED env is the fallback)");
    sim->add_option("--batches", sim_batches, "consecutive-seed batches")->capture_default_str();
    sim->add_option("--csv", csv_path, "write per-batch summary CSV here");
    add_out(sim);

    auto* certify = app.add_subcommand("certify", "quantum-advantage certificate for a measurement pair");
    std::vector<std::string> certify_paths;
    int certify_trine = 0;
    certify->add_option("povm", certify_paths, "POVM JSON files (up to two)")->expected(0, 2);
    certify->add_flag("--trine", certify_trine, "use the built-in trine measurement for a missing side");
    add_out(certify);

    auto* example = app.add_subcommand("example-trine", "emit the built-in trine POVM as JSON");
    add_out(example);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitError;  // --help exits clean
    }

    try {
        if (measure->parsed()) return cmd_measure(measure_paths, measure_trine, tol, out_path);
        if (check->parsed()) return cmd_check(check_path, check_mode, cond_tol, out_path);
        if (synth->parsed()) return cmd_synthesize(synth_path, out_path);
        if (sim->parsed()) return cmd_simulate(sim_path, sim_n, sim_seed, sim_batches, csv_path, out_path);
        if (certify->parsed()) return cmd_certify(certify_paths, certify_trine, out_path);
        if (example->parsed()) {
            emit(niss::to_json(niss::trine_povm()), out_path);
            return kExitPass;
        }
    } catch (const niss::infeasible_error& e) {
        return fail_with("infeasible", e.what(), kExitFail);
    } catch (const niss::povm_error& e) {
        return fail_with("povm", e.what(), kExitError);
    } catch (const niss::numeric_error& e) {
        return fail_with("numeric", e.what(), kExitError);
    } catch (const niss::no_signaling_error& e) {
        return fail_with("no_signaling", e.what(), kExitError);
    } catch (const nlohmann::json::exception& e) {
        return fail_with("parse", e.what(), kExitError);
    } catch (const std::exception& e) {
        return fail_with("input", e.what(), kExitError);
    }
    return kExitError;
}
