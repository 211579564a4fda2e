#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "orbispec/catalog.hpp"
#include "orbispec/crystal.hpp"
#include "orbispec/heat.hpp"
#include "orbispec/spectrum.hpp"
#include "orbispec/strata.hpp"
#include "orbispec/trace.hpp"

namespace orbispec {

using json = nlohmann::ordered_json;

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Floats are emitted through a fixed 17-significant-digit rendering and parsed
// back, so JSON output is byte-stable and value-exact across runs.
inline json json_double(double x) { return json::parse(format_double(x)); }

// ---------------------------------------------------------------------------
// Crystal group schema
// { "dimension": d, "gram": [["p/q",...],...],
//   "generators": [ { "matrix": [[int,...],...], "translation": ["p/q",...] } ] }
// ---------------------------------------------------------------------------

inline CrystalGroup parse_group_json(const json& j, const std::string& context = "") {
    auto fail = [&](const std::string& msg) -> SchemaError {
        return SchemaError(context.empty() ? msg : context + ": " + msg);
    };
    if (!j.is_object()) throw fail("group document must be a JSON object");
    if (!j.contains("dimension") || !j["dimension"].is_number_integer())
        throw fail("missing integer field 'dimension'");
    const int d = j["dimension"].get<int>();
    if (d < 1 || d > 32) throw fail("dimension out of range");
    if (!j.contains("gram") || !j["gram"].is_array() || j["gram"].size() != static_cast<std::size_t>(d))
        throw fail("'gram' must be a d x d array of rational strings");
    QMat g(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const auto& row = j["gram"][static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
            throw fail("'gram' must be a d x d array of rational strings");
        for (int k = 0; k < d; ++k) {
            const auto& cell = row[static_cast<std::size_t>(k)];
            if (!cell.is_string()) throw fail("gram entries must be rational strings");
            g(i, k) = parse_rational(cell.get<std::string>());
        }
    }
    LatticeGram L(d, g);

    std::vector<AffineElement> gens;
    if (j.contains("generators")) {
        if (!j["generators"].is_array()) throw fail("'generators' must be an array");
        for (const auto& gen : j["generators"]) {
            if (!gen.is_object() || !gen.contains("matrix") || !gen.contains("translation"))
                throw fail("each generator needs 'matrix' and 'translation'");
            const auto& mj = gen["matrix"];
            if (!mj.is_array() || mj.size() != static_cast<std::size_t>(d))
                throw fail("generator matrix must be d x d integers");
            ZMat m(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) {
                const auto& row = mj[static_cast<std::size_t>(i)];
                if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
                    throw fail("generator matrix must be d x d integers");
                for (int k = 0; k < d; ++k) {
                    const auto& cell = row[static_cast<std::size_t>(k)];
                    if (!cell.is_number_integer()) throw fail("matrix entries must be integers");
                    m(i, k) = Integer(cell.get<long long>());
                }
            }
            const auto& tj = gen["translation"];
            if (!tj.is_array() || tj.size() != static_cast<std::size_t>(d))
                throw fail("generator translation must have d rational strings");
            std::vector<Rational> a(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) {
                const auto& cell = tj[static_cast<std::size_t>(i)];
                if (!cell.is_string()) throw fail("translation entries must be rational strings");
                a[static_cast<std::size_t>(i)] = parse_rational(cell.get<std::string>());
            }
            gens.emplace_back(std::move(m), std::move(a));
        }
    }
    CrystalGroup grp = build_group(L, gens);
    if (j.contains("name") && j["name"].is_string()) grp.name = j["name"].get<std::string>();
    return grp;
}

inline CrystalGroup load_group_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open group file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError("invalid JSON in '" + path + "': " + e.what());
    }
    CrystalGroup g = parse_group_json(j, path);
    if (g.name.empty()) g.name = path;
    return g;
}

inline json group_to_json(const CrystalGroup& g) {
    json j;
    j["name"] = g.name;
    j["dimension"] = g.dim();
    json gram = json::array();
    for (int i = 0; i < g.dim(); ++i) {
        json row = json::array();
        for (int k = 0; k < g.dim(); ++k) row.push_back(to_string(g.L.G(i, k)));
        gram.push_back(row);
    }
    j["gram"] = gram;
    json gens = json::array();
    for (const auto& gen : g.generators) {
        json gj;
        json mj = json::array();
        for (std::size_t i = 0; i < gen.g.rows(); ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < gen.g.cols(); ++k)
                row.push_back(gen.g(i, k).convert_to<long long>());
            mj.push_back(row);
        }
        gj["matrix"] = mj;
        json tj = json::array();
        for (const auto& a : gen.a) tj.push_back(to_string(a));
        gj["translation"] = tj;
        gens.push_back(gj);
    }
    j["generators"] = gens;
    return j;
}

// ---------------------------------------------------------------------------
// Result serialization
// ---------------------------------------------------------------------------

inline json spectrum_to_json(const SpectrumTable& t) {
    json j;
    j["p"] = t.p;
    j["bound"] = to_string(t.bound);
    json entries = json::array();
    for (const auto& [mu2, m] : t.entries) {
        json e;
        e["mu2"] = to_string(mu2);
        e["eigenvalue"] = json_double(eigenvalue_of(mu2));
        e["multiplicity"] = m;
        entries.push_back(e);
    }
    j["entries"] = entries;
    return j;
}

inline std::string spectrum_to_csv(const SpectrumTable& t) {
    std::ostringstream os;
    os << "mu2,multiplicity\n";
    for (const auto& [mu2, m] : t.entries) os << to_string(mu2) << ',' << m << '\n';
    return os.str();
}

inline json compare_to_json(const CompareResult& r, int p, const Rational& bound) {
    json j;
    j["p"] = p;
    j["bound"] = to_string(bound);
    j["equal"] = r.equal;
    if (!r.equal) {
        json d;
        d["mu2"] = to_string(r.mu2);
        d["a"] = r.mult_a;
        d["b"] = r.mult_b;
        j["first_difference"] = d;
    }
    return j;
}

inline json strata_to_json(const std::vector<Stratum>& strata) {
    json arr = json::array();
    for (const auto& st : strata) {
        json j;
        j["dim"] = st.dim;
        j["codim"] = st.codim;
        j["volume"] = json_double(st.volume);
        j["volume_sq"] = to_string(st.volume_sq);
        j["isotropy_order"] = st.isotropy_order;
        j["component_count_upstairs"] = st.component_count_upstairs;
        j["primary"] = st.primary();
        json types = json::array();
        for (const auto& et : st.iso_max_types) types.push_back(et.to_string());
        j["iso_max_types"] = types;
        arr.push_back(j);
    }
    return arr;
}

inline json parity_to_json(const ParityInvariant& inv) {
    json j;
    if (inv.codim)
        j["codim"] = *inv.codim;
    else
        j["codim"] = nullptr;
    j["value"] = json_double(inv.value);
    if (inv.exact)
        j["exact"] = to_string(*inv.exact);
    else
        j["exact"] = nullptr;
    return j;
}

inline json expansion_to_json(const AsymptoticExpansion& e) {
    json arr = json::array();
    for (const auto& [te, term] : e.terms) {
        json j;
        j["exponent"] = exponent_string(te);
        j["coefficient"] = json_double(term.coefficient);
        if (term.exact)
            j["exact"] = to_string(*term.exact);
        else
            j["exact"] = nullptr;
        arr.push_back(j);
    }
    return arr;
}

inline json heat_to_json(const CrystalGroup& group, int p) {
    std::vector<Stratum> st = strata(group);
    AsymptoticExpansion exp = assemble_expansion(group, st, p);
    ParityInvariants inv = parity_invariants(group, st, p);
    json j;
    j["p"] = p;
    j["expansion"] = expansion_to_json(exp);
    json par;
    par["minus"] = parity_to_json(inv.minus);
    par["plus"] = parity_to_json(inv.plus);
    j["parity"] = par;
    return j;
}

inline json trace_check_to_json(const TraceSample& s, double expansion_value) {
    json j;
    j["p"] = s.p;
    j["t"] = json_double(s.t);
    j["value"] = json_double(s.value);
    j["tail_estimate"] = json_double(s.tail_estimate);
    j["expansion_value"] = json_double(expansion_value);
    j["residual"] = json_double(std::abs(s.value - expansion_value));
    return j;
}

} // namespace orbispec
