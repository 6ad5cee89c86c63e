#pragma once

// Versioned JSON serialization for representations and the partition/code
// cache. Doubles round-trip exactly through nlohmann's shortest-digit
// printing; extended-precision values are stored as [hi, lo] pairs. The
// cache records a content hash over its canonical dump for invalidation.

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "teich/scaling.hpp"

namespace teich {

inline constexpr int kFormatVersion = 1;

inline nlohmann::json real_to_json(double x) { return x; }
inline nlohmann::json real_to_json(const dd& x) { return nlohmann::json::array({x.hi, x.lo}); }

inline void real_from_json(const nlohmann::json& j, double& x) {
    x = j.is_array() ? j.at(0).get<double>() : j.get<double>();
}
inline void real_from_json(const nlohmann::json& j, dd& x) {
    if (j.is_array())
        x = dd(j.at(0).get<double>(), j.at(1).get<double>());
    else
        x = dd(j.get<double>());
}

template <class R>
nlohmann::json cplx_to_json(const Cplx<R>& z) {
    return nlohmann::json::array({real_to_json(z.re), real_to_json(z.im)});
}
template <class R>
Cplx<R> cplx_from_json(const nlohmann::json& j) {
    Cplx<R> z;
    real_from_json(j.at(0), z.re);
    real_from_json(j.at(1), z.im);
    return z;
}

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// ---- representations -------------------------------------------------------

template <class R>
nlohmann::json rep_to_json(const SurfaceGroupRep<R>& rep) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "surface_group_rep";
    j["genus"] = rep.genus;
    j["is_standard"] = rep.is_standard;
    j["relation_residual"] = rep.relation_residual;
    nlohmann::json gens = nlohmann::json::array();
    for (int i = 0; i < rep.count(); ++i) {
        nlohmann::json g;
        g["label"] = rep.labels[i];
        g["a"] = cplx_to_json(rep.generators[i].a);
        g["b"] = cplx_to_json(rep.generators[i].b);
        gens.push_back(std::move(g));
    }
    j["generators"] = std::move(gens);
    nlohmann::json prov = nlohmann::json::array();
    for (const auto& ev : rep.provenance) {
        nlohmann::json e;
        e["kind"] = ev.kind;
        if (ev.kind == "twist") {
            e["curve"] = ev.curve;
            e["t"] = ev.t;
        } else {
            e["m"] = {ev.m_a_re, ev.m_a_im, ev.m_b_re, ev.m_b_im};
        }
        prov.push_back(std::move(e));
    }
    j["provenance"] = std::move(prov);
    return j;
}

template <class R>
SurfaceGroupRep<R> rep_from_json(const nlohmann::json& j) {
    if (!j.contains("kind") || j["kind"] != "surface_group_rep")
        throw BadInput("not a surface group representation file");
    if (j.at("format_version").get<int>() != kFormatVersion)
        throw BadInput("unsupported representation format version");
    SurfaceGroupRep<R> rep;
    rep.genus = j.at("genus").get<int>();
    rep.is_standard = j.at("is_standard").get<bool>();
    rep.relation_residual = j.at("relation_residual").get<double>();
    for (const auto& g : j.at("generators")) {
        rep.labels.push_back(g.at("label").get<std::string>());
        rep.generators.emplace_back(cplx_from_json<R>(g.at("a")), cplx_from_json<R>(g.at("b")),
                                    false);
    }
    if (rep.count() != 4 * rep.genus) throw BadInput("generator count does not match genus");
    if (rep.labels != generator_labels(rep.genus)) throw BadInput("unexpected generator labels");
    for (const auto& e : j.at("provenance")) {
        ProvenanceEvent ev;
        ev.kind = e.at("kind").get<std::string>();
        if (ev.kind == "twist") {
            ev.curve = e.at("curve").get<std::string>();
            ev.t = e.at("t").get<double>();
        } else if (e.contains("m")) {
            ev.m_a_re = e["m"].at(0).get<double>();
            ev.m_a_im = e["m"].at(1).get<double>();
            ev.m_b_re = e["m"].at(2).get<double>();
            ev.m_b_im = e["m"].at(3).get<double>();
        }
        rep.provenance.push_back(std::move(ev));
    }
    return rep;
}

// ---- cache ------------------------------------------------------------------

template <class R>
nlohmann::json constants_to_json(const DistortionConstants& dc) {
    nlohmann::json j;
    j["m"] = dc.m;
    j["M_bound"] = dc.M_bound;
    j["A_len"] = dc.A_len;
    j["mu"] = dc.mu;
    j["B"] = dc.B;
    j["C_lip"] = dc.C_lip;
    j["mu_fit"] = dc.mu_fit;
    j["A_fit"] = dc.A_fit;
    j["nu_measured"] = dc.nu_measured;
    j["chain_depth"] = dc.chain_depth;
    return j;
}

inline DistortionConstants constants_from_json(const nlohmann::json& j) {
    DistortionConstants dc;
    dc.m = j.at("m").get<double>();
    dc.M_bound = j.at("M_bound").get<double>();
    dc.A_len = j.at("A_len").get<double>();
    dc.mu = j.at("mu").get<double>();
    dc.B = j.at("B").get<double>();
    dc.C_lip = j.at("C_lip").get<double>();
    dc.mu_fit = j.at("mu_fit").get<double>();
    dc.A_fit = j.at("A_fit").get<double>();
    dc.nu_measured = j.at("nu_measured").get<std::vector<double>>();
    dc.chain_depth = j.at("chain_depth").get<int>();
    return dc;
}

template <class R>
nlohmann::json cache_to_json(const MarkovSystem<R>& sys, const std::vector<PreperiodicCode>& codes,
                             const DistortionConstants* dc = nullptr) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "markov_cache";
    j["tolerance"] = kAngleTol;
    j["group"] = rep_to_json(sys.rep);
    j["genus"] = sys.genus;
    nlohmann::json w = nlohmann::json::array();
    for (const auto& a : sys.W) w.push_back(real_to_json(a));
    j["W"] = std::move(w);
    j["first"] = sys.first;
    j["W_sources"] = sys.W_sources;
    nlohmann::json geos = nlohmann::json::array();
    for (const auto& g : sys.geodesics)
        geos.push_back(nlohmann::json::array({real_to_json(g.first), real_to_json(g.second)}));
    j["geodesics"] = std::move(geos);
    j["branch_gen"] = sys.branch_gen;
    j["branch_side"] = sys.branch_side;
    j["branch_alternatives"] = sys.branch_alternatives;
    j["img_lo"] = sys.img_lo;
    j["img_hi"] = sys.img_hi;
    nlohmann::json jv = nlohmann::json::array();
    for (const auto& t : sys.jv)
        jv.push_back({{"vertex", t.vertex}, {"w", t.w_index}, {"wp", t.w_prime_index}});
    j["jv"] = std::move(jv);
    j["markov_residual"] = sys.markov_residual;
    j["lambda0"] = sys.lambda0;
    j["depth_used"] = sys.depth_used;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : codes) {
        cs.push_back({{"point", c.point},
                      {"pre", c.preperiod},
                      {"per", c.period},
                      {"residual", c.residual}});
    }
    j["codes"] = std::move(cs);
    if (dc) j["constants"] = constants_to_json<R>(*dc);
    j["content_hash"] = hash_hex(fnv1a64(j.dump()));
    return j;
}

template <class R>
MarkovSystem<R> cache_from_json(const nlohmann::json& j, std::vector<PreperiodicCode>* codes_out,
                                DistortionConstants* dc_out) {
    if (!j.contains("kind") || j["kind"] != "markov_cache") throw BadInput("not a cache file");
    if (j.at("format_version").get<int>() != kFormatVersion)
        throw BadInput("unsupported cache format version");
    nlohmann::json copy = j;
    std::string stored = copy.at("content_hash").get<std::string>();
    copy.erase("content_hash");
    if (hash_hex(fnv1a64(copy.dump())) != stored)
        throw BadInput("cache content hash mismatch");

    MarkovSystem<R> sys;
    sys.rep = rep_from_json<R>(j.at("group"));
    sys.genus = j.at("genus").get<int>();
    for (const auto& a : j.at("W")) {
        R v;
        real_from_json(a, v);
        sys.W.push_back(v);
    }
    sys.first = j.at("first").get<int>();
    sys.W_sources = j.at("W_sources").get<std::vector<std::vector<int>>>();
    for (const auto& g : j.at("geodesics")) {
        R a, b;
        real_from_json(g.at(0), a);
        real_from_json(g.at(1), b);
        sys.geodesics.emplace_back(a, b);
    }
    sys.branch_gen = j.at("branch_gen").get<std::vector<int>>();
    sys.branch_side = j.at("branch_side").get<std::vector<int>>();
    sys.branch_alternatives = j.at("branch_alternatives").get<std::vector<int>>();
    sys.img_lo = j.at("img_lo").get<std::vector<int>>();
    sys.img_hi = j.at("img_hi").get<std::vector<int>>();
    for (const auto& t : j.at("jv")) {
        JvArc<R> a;
        a.vertex = t.at("vertex").get<int>();
        a.w_index = t.at("w").get<int>();
        a.w_prime_index = t.at("wp").get<int>();
        a.arc = Arc<R>::from_endpoints(CirclePoint<R>(sys.W[a.w_index]),
                                       CirclePoint<R>(sys.W[a.w_prime_index]));
        sys.jv.push_back(std::move(a));
    }
    sys.markov_residual = j.at("markov_residual").get<double>();
    sys.lambda0 = j.at("lambda0").get<double>();
    sys.depth_used = j.at("depth_used").get<int>();
    for (int g : sys.branch_gen) sys.branch.push_back(sys.rep.generators[g]);

    if (codes_out) {
        codes_out->clear();
        for (const auto& c : j.at("codes")) {
            PreperiodicCode pc;
            pc.point = c.at("point").get<int>();
            pc.preperiod = c.at("pre").get<std::vector<int>>();
            pc.period = c.at("per").get<std::vector<int>>();
            pc.residual = c.at("residual").get<double>();
            codes_out->push_back(std::move(pc));
        }
    }
    if (dc_out && j.contains("constants")) *dc_out = constants_from_json(j.at("constants"));
    return sys;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadInput("cannot open for writing: " + path);
    out << text;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadInput("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw BadInput(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

} // namespace teich
