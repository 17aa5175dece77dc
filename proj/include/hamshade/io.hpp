// io.hpp — document schemas (system definitions, sections, pseudo-orbit
// files, analysis reports) and plot-ready CSV writers. JSON for structured
// reports, CSV for time series; files are written atomically (temp+rename)
// and reports embed every tolerance they used.

#pragma once

#include "hamshade/orbits.hpp"
#include "hamshade/shades.hpp"
#include "hamshade/spectra.hpp"
#include "hamshade/splitting.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace hamshade {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// System definition documents
// ---------------------------------------------------------------------------

/// {"name": str, "builtin": str|null, "n": int, "polynomial":
///  [{"coeff": float, "powers": [int;2n]}] | null}
inline HamiltonianSystem system_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("system document must be a JSON object");
    if (doc.contains("builtin") && !doc["builtin"].is_null()) {
        return make_builtin(doc["builtin"].get<std::string>());
    }
    if (!doc.contains("n") || !doc["n"].is_number_integer())
        throw ConfigError("system document needs integer field 'n'");
    const int n = doc["n"].get<int>();
    if (n < 2) throw ConfigError("user systems need n >= 2 (the 2n >= 4 convention)");
    if (!doc.contains("polynomial") || !doc["polynomial"].is_array())
        throw ConfigError("user systems need a 'polynomial' term array");
    std::vector<PolyTerm> terms;
    for (const auto& t : doc["polynomial"]) {
        PolyTerm term;
        term.coeff = t.at("coeff").get<double>();
        term.powers = t.at("powers").get<std::vector<int>>();
        if (static_cast<int>(term.powers.size()) != 2 * n)
            throw ConfigError("polynomial term powers must have length 2n");
        for (int p : term.powers)
            if (p < 0) throw ConfigError("polynomial powers must be nonnegative");
        terms.push_back(std::move(term));
    }
    const std::string name = doc.contains("name") ? doc["name"].get<std::string>() : "user";
    return HamiltonianSystem::from_polynomial(name, n, std::move(terms));
}

/// Accepts "builtin:NAME" or a path to a JSON system document.
inline HamiltonianSystem load_system(const std::string& spec) {
    if (spec.rfind("builtin:", 0) == 0) return make_builtin(spec.substr(8));
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot open system file: " + spec);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("system file is not valid JSON: ") + e.what());
    }
    return system_from_json(doc);
}

inline json system_to_json(const HamiltonianSystem& sys) {
    json doc;
    doc["name"] = sys.name();
    doc["n"] = sys.dof();
    const bool is_builtin = sys.name() == "pedro" || sys.name() == "harmonic" ||
                            sys.name() == "henon-heiles" || sys.name() == "saddle-center";
    doc["builtin"] = is_builtin ? json(sys.name()) : json(nullptr);
    if (!sys.polynomial_terms().empty() && !is_builtin) {
        json terms = json::array();
        for (const auto& t : sys.polynomial_terms()) terms.push_back({{"coeff", t.coeff}, {"powers", t.powers}});
        doc["polynomial"] = terms;
    } else {
        doc["polynomial"] = nullptr;
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Sections and pseudo-orbit files
// ---------------------------------------------------------------------------

/// {"normal": [float;2n], "offset": float, "direction": +1|-1}
inline AffineSection section_from_json(const json& doc, int dim) {
    AffineSection sec;
    const auto normal = doc.at("normal").get<std::vector<double>>();
    if (static_cast<int>(normal.size()) != dim) throw ConfigError("section normal must have length 2n");
    sec.normal = Eigen::Map<const Vec>(normal.data(), dim);
    if (sec.normal.norm() == 0.0) throw ConfigError("section normal must be nonzero");
    sec.offset = doc.at("offset").get<double>();
    sec.direction = doc.at("direction").get<int>();
    if (sec.direction != 1 && sec.direction != -1) throw ConfigError("section direction must be +1 or -1");
    return sec;
}

/// {"delta": float, "T": float, "entries": [{"x": [float;2n], "t": float}]}
inline PseudoOrbit pseudo_orbit_from_json(const HamiltonianSystem& sys, const json& doc,
                                          const FlowPolicy& fpol = {}) {
    const double delta = doc.at("delta").get<double>();
    const double T = doc.at("T").get<double>();
    std::vector<Vec> points;
    std::vector<double> times;
    for (const auto& e : doc.at("entries")) {
        const auto x = e.at("x").get<std::vector<double>>();
        if (static_cast<int>(x.size()) != sys.dim())
            throw ConfigError("pseudo-orbit entry has wrong dimension");
        points.push_back(Eigen::Map<const Vec>(x.data(), sys.dim()));
        times.push_back(e.at("t").get<double>());
    }
    return build_pseudo_orbit(sys, points, times, delta, T, 0, fpol);
}

inline json pseudo_orbit_to_json(const PseudoOrbit& po) {
    json doc;
    doc["delta"] = po.delta;
    doc["T"] = po.T_min;
    json entries = json::array();
    for (size_t k = 0; k < po.points.size(); ++k) {
        json e;
        e["x"] = std::vector<double>(po.points[k].data(), po.points[k].data() + po.points[k].size());
        e["t"] = po.times[k];
        entries.push_back(std::move(e));
    }
    doc["entries"] = entries;
    return doc;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json vec_to_json(const Vec& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

/// {point, period, residual, eigenvalues: [{re, im, modulus}], classification}
inline json orbit_report_json(const PeriodicOrbit& orbit) {
    json doc;
    doc["point"] = vec_to_json(orbit.p);
    doc["period"] = orbit.period;
    doc["residual"] = orbit.residual;
    json evs = json::array();
    Eigen::EigenSolver<Mat> solver(orbit.monodromy);
    for (int i = 0; i < orbit.monodromy.rows(); ++i) {
        const auto s = solver.eigenvalues()[i];
        evs.push_back({{"re", s.real()}, {"im", s.imag()}, {"modulus", std::abs(s)}});
    }
    doc["eigenvalues"] = evs;
    doc["classification"] = orbit.classification.str();
    return doc;
}

/// {verdict, scale, worst_product, witness_index, block_dims, theta}
inline json splitting_report_json(const SplittingReport& rep) {
    json doc;
    doc["verdict"] = verdict_str(rep.verdict);
    doc["scale"] = rep.scale;
    doc["worst_product"] = rep.worst_product;
    doc["witness_index"] = rep.witness;
    doc["block_dims"] = rep.block_dims;
    doc["theta"] = rep.theta;
    return doc;
}

inline json shadow_report_json(const ShadowReport& rep) {
    json doc;
    doc["success"] = rep.success;
    doc["z"] = rep.z ? vec_to_json(*rep.z) : json(nullptr);
    if (rep.alpha) {
        json bps = json::array();
        for (const auto& [t, a] : rep.alpha->breakpoints) bps.push_back({t, a});
        doc["alpha"] = {{"breakpoints", bps}, {"epsilon_class", rep.alpha->epsilon_class}};
    } else {
        doc["alpha"] = nullptr;
    }
    doc["achieved_eps"] = rep.achieved_eps;
    doc["budget_spent"] = rep.budget_spent;
    doc["note"] = rep.note;
    return doc;
}

inline json spectrum_report_json(const LyapunovSpectrum& spec) {
    json doc;
    doc["T"] = spec.T;
    doc["renorm_interval"] = spec.renorm_interval;
    doc["exponents"] = spec.exponents;
    doc["pairing_defect"] = spec.pairing_defect;
    doc["sum_defect"] = spec.sum_defect;
    return doc;
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// "t,q1..qn,p1..pn,energy_error"
inline std::string trajectory_csv(const HamiltonianSystem& sys, const TrajectorySample& traj) {
    std::ostringstream out;
    out << "t";
    for (int i = 1; i <= sys.dof(); ++i) out << ",q" << i;
    for (int i = 1; i <= sys.dof(); ++i) out << ",p" << i;
    out << ",energy_error\n";
    const double e0 = traj.points.empty() ? 0.0 : sys.eval_h(traj.points.front());
    for (size_t k = 0; k < traj.times.size(); ++k) {
        out << detail::format_double(traj.times[k]);
        for (int i = 0; i < sys.dim(); ++i) out << ',' << detail::format_double(traj.points[k][i]);
        out << ',' << detail::format_double(sys.eval_h(traj.points[k]) - e0) << '\n';
    }
    return out.str();
}

/// "T,lambda_1..lambda_m,pairing_defect,sum_defect"; one row per progress
/// snapshot plus the final row.
class SpectrumCsv {
public:
    explicit SpectrumCsv(int exponents) : m_(exponents) {
        std::ostringstream head;
        head << "T";
        for (int i = 1; i <= m_; ++i) head << ",lambda_" << i;
        head << ",pairing_defect,sum_defect\n";
        body_ = head.str();
    }

    void add_row(double T, const std::vector<double>& sorted_exponents) {
        LyapunovSpectrum tmp;
        tmp.exponents = sorted_exponents;
        spectrum_diagnostics(tmp);
        std::ostringstream row;
        row << detail::format_double(T);
        for (double l : sorted_exponents) row << ',' << detail::format_double(l);
        row << ',' << detail::format_double(tmp.pairing_defect) << ',' << detail::format_double(tmp.sum_defect)
            << '\n';
        body_ += row.str();
    }

    const std::string& str() const { return body_; }

private:
    int m_;
    std::string body_;
};

/// Write atomically: temp file in the same directory, then rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open for writing: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const json& doc) {
    atomic_write(path, doc.dump(2) + "\n");
}

}  // namespace hamshade
