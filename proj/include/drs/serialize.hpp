#pragma once

// JSON and CSV serialization for configs, samples, and reports. JSON uses the
// vendored single-header nlohmann library; doubles are printed with enough
// digits to roundtrip exactly, which is what makes rerun artifacts
// byte-identical for a fixed config and seed.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "drs/wave.hpp"

namespace drs {

using nlohmann::json;

// %.17g round-trips every finite double through text.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string write_csv(const CsvTable& table) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.header.size(); ++c)
        out << (c ? "," : "") << csv_escape(table.header[c]);
    out << '\n';
    for (const auto& row : table.rows) {
        require(row.size() == table.header.size(),
                "write_csv: row width does not match the header");
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << csv_escape(row[c]);
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Space descriptors
// ---------------------------------------------------------------------------

// Accepts "heisenberg", "heisenberg:k=2", "quaternionic:k=1".
inline json space_shorthand_to_json(const std::string& text) {
    std::string family = text;
    long k = 1;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        family = text.substr(0, colon);
        const std::string rest = text.substr(colon + 1);
        require(rest.rfind("k=", 0) == 0,
                "space shorthand: expected '<family>:k=<count>', got '" + text + "'");
        std::size_t used = 0;
        try {
            k = std::stol(rest.substr(2), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used > 0 && used == rest.size() - 2 && k >= 1,
                "space shorthand: bad block count in '" + text + "'");
    }
    require(family == "heisenberg" || family == "quaternionic",
            "space shorthand: unknown family '" + family + "'");
    return json{{"family", family}, {"k", k}};
}

inline void check_known_fields(const json& obj, const char* where,
                               std::initializer_list<const char*> known) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* name : known)
            if (item.key() == name) ok = true;
        require(ok, std::string(where) + ": unknown field '" + item.key() + "'");
    }
}

// Either {"family": ..., "k": ...} or an explicit structure
// {"m_v": ..., "m_z": ..., "j_maps": [[row-major m_v*m_v], ...]}.
// Explicit generators go through the validating builder, so a perturbed
// (non-anticommuting) set fails with the residual in the message.
inline DamekRicciSpace space_from_json(const json& desc) {
    require(desc.is_object(), "space: descriptor must be a JSON object");
    if (desc.contains("family")) {
        check_known_fields(desc, "space", {"family", "k"});
        const std::string family = desc.at("family").get<std::string>();
        const int k = desc.value("k", 1);
        require(k >= 1, "space: k must be >= 1");
        if (family == "heisenberg") return make_space(heisenberg_structure(k));
        if (family == "quaternionic") return make_space(quaternionic_structure(k));
        throw std::invalid_argument("space: unknown family '" + family + "'");
    }
    check_known_fields(desc, "space", {"m_v", "m_z", "j_maps"});
    require(desc.contains("m_v") && desc.contains("m_z") && desc.contains("j_maps"),
            "space: explicit descriptor needs m_v, m_z, and j_maps");
    const int m_v = desc.at("m_v").get<int>();
    const int m_z = desc.at("m_z").get<int>();
    const json& maps = desc.at("j_maps");
    require(maps.is_array(), "space: j_maps must be an array of matrices");
    std::vector<Mat> j_maps;
    for (const json& flat : maps) {
        require(flat.is_array() &&
                    flat.size() == static_cast<std::size_t>(m_v) * m_v,
                "space: each j_map must hold m_v*m_v row-major entries");
        Mat J(m_v, m_v);
        for (int r = 0; r < m_v; ++r)
            for (int c = 0; c < m_v; ++c)
                J(r, c) = flat[static_cast<std::size_t>(r) * m_v + c].get<double>();
        j_maps.push_back(std::move(J));
    }
    return make_space(build_htype(m_v, m_z, std::move(j_maps)));
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    json space = json{{"family", "heisenberg"}, {"k", 1}};
    TransformOptions grid;  // defaults: lambda_max 200, r_max 20
    std::uint64_t mc_samples = 200000;
    std::uint64_t seed = 1;
    std::vector<std::string> suites;  // validate: empty means "all"
    bool suites_given = false;        // distinguishes explicit [] from absent
    std::string out;                  // empty: stdout
    std::string format = "csv";      // csv | json

    // tabulation parameters
    std::vector<double> phi_lambda_values = {0.0, 1.0, 2.0, 5.0, 10.0};
    int phi_r_count = 121;
    double cfun_lambda_min = 0.5;
    double cfun_lambda_max = 200.0;
    int cfun_count = 121;
    std::string kernel_symbol = "heat";  // heat | wave-cosine | wave-sinc
    double wave_t = 1.0;
    double wave_alpha = 0.0;
    double wave_p = 2.0;
    double wave_t_lo = 2.0;
    double wave_t_hi = 20.0;
    int wave_t_count = 8;
    double data_width = 0.5;
    int atom_count = 4;
    double atom_alpha = 1.5;
};

inline void grid_from_json(const json& g, TransformOptions& o) {
    check_known_fields(g, "grid",
                       {"lambda_max", "r_max", "t_max", "tail_tol", "level"});
    o.lambda_max = g.value("lambda_max", o.lambda_max);
    o.r_max = g.value("r_max", o.r_max);
    o.t_max = g.value("t_max", o.t_max);
    o.tail_tol = g.value("tail_tol", o.tail_tol);
    o.level = g.value("level", o.level);
    require(o.tail_tol > 0.0, "grid: tail_tol must be positive");
}

inline RunConfig run_config_from_json(const json& doc) {
    require(doc.is_object(), "config: top level must be a JSON object");
    check_known_fields(doc, "config",
                       {"space", "grid", "mc", "suites", "out", "format", "phi",
                        "cfun", "kernel", "wave", "atoms"});
    RunConfig cfg;
    if (doc.contains("space")) {
        cfg.space = doc.at("space").is_string()
                        ? space_shorthand_to_json(doc.at("space").get<std::string>())
                        : doc.at("space");
        space_from_json(cfg.space);  // validate now, fail early
    }
    if (doc.contains("grid")) grid_from_json(doc.at("grid"), cfg.grid);
    if (doc.contains("mc")) {
        const json& mc = doc.at("mc");
        check_known_fields(mc, "mc", {"samples", "seed"});
        cfg.mc_samples = mc.value("samples", cfg.mc_samples);
        require(cfg.mc_samples == 0 || mc.contains("seed"),
                "mc: a seed is required whenever sampling is scheduled");
        cfg.seed = mc.value("seed", cfg.seed);
    }
    if (doc.contains("suites")) {
        require(doc.at("suites").is_array(), "config: suites must be an array");
        cfg.suites_given = true;
        for (const json& s : doc.at("suites"))
            cfg.suites.push_back(s.get<std::string>());
    }
    cfg.out = doc.value("out", cfg.out);
    cfg.format = doc.value("format", cfg.format);
    require(cfg.format == "csv" || cfg.format == "json",
            "config: format must be 'csv' or 'json'");
    if (doc.contains("phi")) {
        const json& p = doc.at("phi");
        check_known_fields(p, "phi", {"lambda_values", "r_count"});
        if (p.contains("lambda_values"))
            cfg.phi_lambda_values = p.at("lambda_values").get<std::vector<double>>();
        cfg.phi_r_count = p.value("r_count", cfg.phi_r_count);
        require(!cfg.phi_lambda_values.empty() && cfg.phi_r_count >= 2,
                "phi: need at least one lambda and two radii");
    }
    if (doc.contains("cfun")) {
        const json& c = doc.at("cfun");
        check_known_fields(c, "cfun", {"lambda_min", "lambda_max", "count"});
        cfg.cfun_lambda_min = c.value("lambda_min", cfg.cfun_lambda_min);
        cfg.cfun_lambda_max = c.value("lambda_max", cfg.cfun_lambda_max);
        cfg.cfun_count = c.value("count", cfg.cfun_count);
        require(cfg.cfun_lambda_min > 0.0 &&
                    cfg.cfun_lambda_max > cfg.cfun_lambda_min && cfg.cfun_count >= 2,
                "cfun: need 0 < lambda_min < lambda_max and count >= 2");
    }
    if (doc.contains("kernel")) {
        const json& k = doc.at("kernel");
        check_known_fields(k, "kernel", {"symbol", "t", "alpha"});
        cfg.kernel_symbol = k.value("symbol", cfg.kernel_symbol);
        cfg.wave_t = k.value("t", cfg.wave_t);
        cfg.wave_alpha = k.value("alpha", cfg.wave_alpha);
        require(cfg.kernel_symbol == "heat" || cfg.kernel_symbol == "wave-cosine" ||
                    cfg.kernel_symbol == "wave-sinc",
                "kernel: symbol must be heat, wave-cosine, or wave-sinc");
    }
    if (doc.contains("wave")) {
        const json& w = doc.at("wave");
        check_known_fields(w, "wave",
                           {"p", "alpha", "t", "t_lo", "t_hi", "t_count", "data_width"});
        cfg.wave_p = w.value("p", cfg.wave_p);
        cfg.wave_alpha = w.value("alpha", cfg.wave_alpha);
        cfg.wave_t = w.value("t", cfg.wave_t);
        cfg.wave_t_lo = w.value("t_lo", cfg.wave_t_lo);
        cfg.wave_t_hi = w.value("t_hi", cfg.wave_t_hi);
        cfg.wave_t_count = w.value("t_count", cfg.wave_t_count);
        cfg.data_width = w.value("data_width", cfg.data_width);
        require(cfg.wave_t_lo > 0.0 && cfg.wave_t_hi > cfg.wave_t_lo &&
                    cfg.wave_t_count >= 4 && cfg.data_width > 0.0,
                "wave: need 0 < t_lo < t_hi, t_count >= 4, data_width > 0");
    }
    if (doc.contains("atoms")) {
        const json& a = doc.at("atoms");
        check_known_fields(a, "atoms", {"count", "alpha"});
        cfg.atom_count = a.value("count", cfg.atom_count);
        cfg.atom_alpha = a.value("alpha", cfg.atom_alpha);
        require(cfg.atom_count >= 1 && cfg.atom_alpha >= 0.0,
                "atoms: need count >= 1 and alpha >= 0");
    }
    return cfg;
}

inline json run_config_to_json(const RunConfig& cfg) {
    json doc;
    doc["space"] = cfg.space;
    doc["grid"] = {{"lambda_max", cfg.grid.lambda_max},
                   {"r_max", cfg.grid.r_max},
                   {"t_max", cfg.grid.t_max},
                   {"tail_tol", cfg.grid.tail_tol},
                   {"level", cfg.grid.level}};
    doc["mc"] = {{"samples", cfg.mc_samples}, {"seed", cfg.seed}};
    if (cfg.suites_given) doc["suites"] = cfg.suites;
    doc["out"] = cfg.out;
    doc["format"] = cfg.format;
    doc["phi"] = {{"lambda_values", cfg.phi_lambda_values},
                  {"r_count", cfg.phi_r_count}};
    doc["cfun"] = {{"lambda_min", cfg.cfun_lambda_min},
                   {"lambda_max", cfg.cfun_lambda_max},
                   {"count", cfg.cfun_count}};
    doc["kernel"] = {{"symbol", cfg.kernel_symbol},
                     {"t", cfg.wave_t},
                     {"alpha", cfg.wave_alpha}};
    doc["wave"] = {{"p", cfg.wave_p},         {"alpha", cfg.wave_alpha},
                   {"t", cfg.wave_t},         {"t_lo", cfg.wave_t_lo},
                   {"t_hi", cfg.wave_t_hi},   {"t_count", cfg.wave_t_count},
                   {"data_width", cfg.data_width}};
    doc["atoms"] = {{"count", cfg.atom_count}, {"alpha", cfg.atom_alpha}};
    return doc;
}

// Every JSON artifact carries its schema tag and the full config that
// produced it.
inline json artifact_envelope(const std::string& kind, const RunConfig& cfg) {
    json doc;
    doc["schema"] = "drs." + kind + ".v1";
    doc["config"] = run_config_to_json(cfg);
    return doc;
}

// ---------------------------------------------------------------------------
// Samples and reports
// ---------------------------------------------------------------------------

inline json radial_samples_to_json(const RadialSamples& f) {
    json doc;
    doc["r"] = f.r_grid;
    std::vector<double> re(f.values.size()), im(f.values.size());
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        re[j] = f.values[j].real();
        im[j] = f.values[j].imag();
    }
    doc["re"] = re;
    doc["im"] = im;
    return doc;
}

inline RadialSamples radial_samples_from_json(const TransformPlan& plan, const json& doc) {
    check_known_fields(doc, "radial samples", {"r", "re", "im"});
    RadialSamples f;
    f.r_grid = doc.at("r").get<std::vector<double>>();
    const auto re = doc.at("re").get<std::vector<double>>();
    const auto im = doc.at("im").get<std::vector<double>>();
    require(re.size() == f.r_grid.size() && im.size() == f.r_grid.size(),
            "radial samples: arrays must share one length");
    f.values.resize(re.size());
    for (std::size_t j = 0; j < re.size(); ++j) f.values[j] = Cplx{re[j], im[j]};
    f.grid_spec = RadialGridSpec{plan.opts.r_max, plan.opts.tail_tol,
                                 plan.r_panels.edges.size() - 1, plan.r_panels.order, true};
    detail::require_on_plan_r_grid(plan, f, "radial_samples_from_json");
    return f;
}

inline json atom_to_json(const Atom& atom) {
    json doc;
    doc["radius"] = atom.ball_radius;
    doc["kind"] = atom.kind == AtomKind::standard ? "standard" : "global";
    doc["profile"] = radial_samples_to_json(atom.profile);
    return doc;
}

inline Atom atom_from_json(const TransformPlan& plan, const json& doc) {
    check_known_fields(doc, "atom", {"radius", "kind", "profile"});
    Atom atom;
    atom.ball_radius = doc.at("radius").get<double>();
    const std::string kind = doc.at("kind").get<std::string>();
    require(kind == "standard" || kind == "global", "atom: unknown kind '" + kind + "'");
    atom.kind = kind == "standard" ? AtomKind::standard : AtomKind::global;
    require(atom.ball_radius > 0.0 && atom.ball_radius <= 1.0,
            "atom: radius must lie in (0, 1]");
    atom.profile = radial_samples_from_json(plan, doc.at("profile"));
    return atom;
}

inline json wave_report_to_json(const WaveSolutionReport& rep) {
    json doc;
    doc["p"] = rep.p;
    doc["alpha0"] = rep.alpha0;
    doc["alpha1"] = rep.alpha1;
    doc["t"] = rep.t_values;
    doc["norms"] = rep.norms;
    doc["fitted_exponent"] = rep.fitted_exponent;
    doc["fit_residual"] = rep.fit_residual;
    return doc;
}

inline CsvTable wave_report_to_csv(const WaveSolutionReport& rep) {
    CsvTable t;
    t.header = {"p", "alpha0", "t", "norm", "fitted_exponent", "fit_residual"};
    for (std::size_t i = 0; i < rep.t_values.size(); ++i)
        t.rows.push_back({format_double(rep.p), format_double(rep.alpha0),
                          format_double(rep.t_values[i]), format_double(rep.norms[i]),
                          format_double(rep.fitted_exponent),
                          format_double(rep.fit_residual)});
    return t;
}

inline json probe_table_to_json(const AtomProbeTable& tab) {
    json doc;
    doc["alpha"] = tab.alpha;
    doc["t"] = tab.t_values;
    doc["ratios"] = tab.ratios;
    doc["max_ratio"] = tab.max_ratio;
    doc["spread"] = tab.spread;
    return doc;
}

inline AtomProbeTable probe_table_from_json(const json& doc) {
    check_known_fields(doc, "probe table", {"alpha", "t", "ratios", "max_ratio", "spread"});
    AtomProbeTable tab;
    tab.alpha = doc.at("alpha").get<double>();
    tab.t_values = doc.at("t").get<std::vector<double>>();
    tab.ratios = doc.at("ratios").get<std::vector<std::vector<double>>>();
    tab.max_ratio = doc.at("max_ratio").get<std::vector<double>>();
    tab.spread = doc.at("spread").get<double>();
    for (const auto& row : tab.ratios)
        require(row.size() == tab.t_values.size(),
                "probe table: ratio rows must match the time grid");
    require(tab.max_ratio.size() == tab.t_values.size(),
            "probe table: max_ratio must match the time grid");
    return tab;
}

inline CsvTable probe_table_to_csv(const AtomProbeTable& tab) {
    CsvTable t;
    t.header = {"alpha", "atom", "t", "ratio"};
    for (std::size_t a = 0; a < tab.ratios.size(); ++a)
        for (std::size_t i = 0; i < tab.t_values.size(); ++i)
            t.rows.push_back({format_double(tab.alpha), std::to_string(a),
                              format_double(tab.t_values[i]),
                              format_double(tab.ratios[a][i])});
    return t;
}

// ---------------------------------------------------------------------------
// File output
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot open '" + path + "' for writing");
    out << content;
    require(out.good(), "write to '" + path + "' failed");
}

}  // namespace drs
