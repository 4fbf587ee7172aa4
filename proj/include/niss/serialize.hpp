#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "niss/distribution.hpp"
#include "niss/feasibility.hpp"
#include "niss/fourier.hpp"
#include "niss/quantum.hpp"
#include "niss/sim.hpp"
#include "niss/synthesis.hpp"

namespace niss {

using json = nlohmann::json;

/// Accepts plain numbers plus exact tokens: "p/q", "sqrt(n)", "sqrt(n)/d",
/// each optionally negated. Exact forms exist so tables like the built-in
/// trine can round-trip without decimal truncation.
inline double parse_real(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw std::invalid_argument("expected number or numeric string");
    std::string s = v.get<std::string>();
    double sign = 1.0;
    std::size_t pos = 0;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        if (s[0] == '-') sign = -1.0;
        pos = 1;
    }
    auto body = s.substr(pos);
    auto slash = body.find('/');
    std::string num = slash == std::string::npos ? body : body.substr(0, slash);
    double numerator;
    if (num.rfind("sqrt(", 0) == 0 && num.back() == ')') {
        numerator = std::sqrt(std::stod(num.substr(5, num.size() - 6)));
    } else {
        numerator = std::stod(num);
    }
    double denom = 1.0;
    if (slash != std::string::npos) {
        denom = std::stod(body.substr(slash + 1));
        if (denom == 0.0) throw std::invalid_argument("zero denominator in \"" + s + "\"");
    }
    return sign * numerator / denom;
}

inline Complex parse_complex(const json& v) {
    if (v.is_number() || v.is_string()) return {parse_real(v), 0.0};
    if (v.is_array() && v.size() == 2) return {parse_real(v[0]), parse_real(v[1])};
    throw std::invalid_argument("expected [re, im] pair");
}

// ---- POVM ----

inline json to_json(const Povm& m) {
    json ops = json::array();
    for (const auto& op : m.operators) {
        json rows = json::array();
        for (int j = 0; j < 2; ++j) {
            json row = json::array();
            for (int k = 0; k < 2; ++k) row.push_back({op(j, k).real(), op(j, k).imag()});
            rows.push_back(row);
        }
        ops.push_back(rows);
    }
    return json{{"outcomes", m.outcomes}, {"operators", ops}};
}

inline Povm povm_from_json(const json& j) {
    if (!j.contains("outcomes") || !j.contains("operators"))
        throw std::invalid_argument("POVM JSON needs \"outcomes\" and \"operators\"");
    Povm m;
    m.outcomes = j.at("outcomes").get<std::vector<int>>();
    for (const auto& op : j.at("operators")) {
        if (!op.is_array() || op.size() != 2 || !op[0].is_array() || op[0].size() != 2 ||
            !op[1].is_array() || op[1].size() != 2)
            throw povm_error("operator is not a 2x2 matrix");
        m.operators.push_back(Operator2x2(parse_complex(op[0][0]), parse_complex(op[0][1]),
                                          parse_complex(op[1][0]), parse_complex(op[1][1])));
    }
    if (m.outcomes.size() != m.operators.size())
        throw povm_error("POVM outcome/operator count mismatch");
    return m;
}

// ---- distributions ----

inline json to_json(const JointDistribution& d) {
    return json{{"row_alphabet", d.row_alphabet},
                {"col_alphabet", d.col_alphabet},
                {"pmf", d.pmf}};
}

inline JointDistribution joint_from_json(const json& j) {
    std::vector<std::vector<double>> pmf;
    for (const auto& row : j.at("pmf")) {
        std::vector<double> r;
        for (const auto& v : row) r.push_back(parse_real(v));
        pmf.push_back(std::move(r));
    }
    std::vector<int> rows, cols;
    if (j.contains("row_alphabet")) {
        rows = j.at("row_alphabet").get<std::vector<int>>();
        cols = j.at("col_alphabet").get<std::vector<int>>();
    } else {
        // bare pmf: label rows/cols 1..n, except 2x2 which defaults to [1,-1]
        auto label = [](std::size_t n) {
            std::vector<int> out;
            if (n == 2) return std::vector<int>{1, -1};
            for (std::size_t i = 1; i <= n; ++i) out.push_back(static_cast<int>(i));
            return out;
        };
        rows = label(pmf.size());
        cols = label(pmf.empty() ? 0 : pmf[0].size());
    }
    return JointDistribution(std::move(rows), std::move(cols), std::move(pmf));
}

inline json to_json(const BivariateBinarySource& s) { return to_json(s.as_joint()); }

inline BivariateBinarySource source_from_json(const json& j) {
    return BivariateBinarySource::from_joint(joint_from_json(j));
}

// ---- Fourier coefficients: object keyed by subset bitmask ----

inline json to_json(const FourierCoefficients& c) {
    json coeffs = json::object();
    for (Mask s = 0; s < c.coeffs.size(); ++s)
        if (c.coeffs[s] != 0.0) coeffs[std::to_string(s)] = c.coeffs[s];
    return json{{"d", c.d}, {"coeffs", coeffs}};
}

inline FourierCoefficients coeffs_from_json(const json& j) {
    int d = j.at("d").get<int>();
    FourierCoefficients c(d, std::vector<double>(std::size_t{1} << d, 0.0));
    for (auto it = j.at("coeffs").begin(); it != j.at("coeffs").end(); ++it) {
        unsigned long mask = std::stoul(it.key());
        if (mask >> d) throw std::invalid_argument("coefficient mask above 2^d");
        c.coeffs[mask] = parse_real(it.value());
    }
    return c;
}

// ---- schemes ----

inline json to_json(const AffineScheme& s) {
    return json{{"a", s.a}, {"b", s.b}, {"f1", s.f1}, {"g1", s.g1}};
}

inline AffineScheme affine_from_json(const json& j) {
    AffineScheme s{parse_real(j.at("a")), parse_real(j.at("b")), parse_real(j.at("f1")),
                   parse_real(j.at("g1"))};
    s.validate();
    return s;
}

inline json to_json(const PatchedScheme& s) {
    auto table = [](const std::vector<AffinePair>& t) {
        json arr = json::array();
        for (const auto& p : t) arr.push_back({p.f0, p.f1});
        return arr;
    };
    return json{{"d", s.d},           {"f_plus", table(s.f_plus)},
                {"g_plus", table(s.g_plus)}, {"g_minus", table(s.g_minus)},
                {"p_ts", s.p_ts},     {"source", to_json(s.source)}};
}

inline PatchedScheme patched_from_json(const json& j) {
    auto table = [](const json& arr) {
        std::vector<AffinePair> out;
        for (const auto& p : arr) out.push_back({parse_real(p.at(0)), parse_real(p.at(1))});
        return out;
    };
    PatchedScheme s{j.at("d").get<int>(),      table(j.at("f_plus")),
                    table(j.at("g_plus")),     table(j.at("g_minus")),
                    parse_real(j.at("p_ts")),  source_from_json(j.at("source"))};
    s.validate();
    return s;
}

// ---- reports ----

inline json to_json(const FeasibilityVerdict& v) {
    return json{{"feasible", v.feasible}, {"margin", v.margin}, {"zeta", v.zeta}, {"beta", v.beta}};
}

inline json to_json(const PovmReport& r) {
    json ops = json::array();
    for (const auto& o : r.per_operator)
        ops.push_back({{"hermiticity_residual", o.hermiticity_residual},
                       {"min_eigenvalue", o.min_eigenvalue},
                       {"max_eigenvalue", o.max_eigenvalue}});
    return json{{"pass", r.pass},
                {"completeness_residual", r.completeness_residual},
                {"tolerance", r.tolerance},
                {"per_operator", ops}};
}

inline json to_json(const ConditionReport& r) {
    return json{{"labels", r.labels},
                {"residuals", r.residuals},
                {"max_abs_residual", r.max_abs_residual},
                {"pass", r.pass},
                {"rank_estimate", r.rank_estimate},
                {"singular_values", r.singular_values}};
}

inline json to_json(const AdvantageReport& r) {
    json out{{"advantage", r.advantage},
             {"binary_case", r.binary_case},
             {"joint", to_json(r.joint)}};
    if (r.binary_verdict) out["binary_verdict"] = to_json(*r.binary_verdict);
    if (r.condition) out["condition"] = to_json(*r.condition);
    return out;
}

inline json to_json(const Moments& m) {
    return json{{"eu", m.eu}, {"ev", m.ev}, {"euv", m.euv}};
}

inline json to_json(const EmpiricalReport& r) {
    return json{{"empirical", to_json(r.empirical)},
                {"tv_to_target", r.tv_to_target},
                {"n", r.n},
                {"seed", r.seed},
                {"generator", r.generator},
                {"moments", to_json(r.moments)}};
}

/// One CSV row per report; header matches the field order.
inline std::string reports_to_csv(const std::vector<EmpiricalReport>& reports) {
    std::ostringstream os;
    os << "seed,n,tv_to_target,eu,ev,euv\n";
    os.precision(17);
    for (const auto& r : reports)
        os << r.seed << ',' << r.n << ',' << r.tv_to_target << ',' << r.moments.eu << ','
           << r.moments.ev << ',' << r.moments.euv << '\n';
    return os.str();
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace niss
