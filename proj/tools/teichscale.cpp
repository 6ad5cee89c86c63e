// teichscale: Bowen-Series boundary maps for genus-g surface groups,
// scaling functions with certified error bounds, maximum-metric comparisons,
// and transfer-operator thermodynamics on the dual subshift.
//
// Exit codes: 0 success, 2 certificate failure (Markov/expansion/order),
// 3 input error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "teich/io.hpp"
#include "teich/qs.hpp"
#include "teich/thermo.hpp"

using nlohmann::json;

namespace {

struct Options {
    int genus = 2;
    int depth = 6;
    std::string precision = "double";
    double tol = 1e-9;
    uint64_t seed = 7;
    std::string cache;
    std::string out;
    std::string format = "json";

    // per-command extras
    std::vector<std::string> twists;
    std::string conjugate;   // "t@p,q": translation by t along geodesic(p, q)
    double conjugate_rotation = 0.0;
    std::string rep_path, rep_path_b;
    std::string words;
    bool all_words = false;
    std::string curve = "a1";
    std::string t_list = "0.4,0.2,0.1,0.05";
    double delta = 1e-2;
    int depth_from = 0, depth_to = 0;
    bool birkhoff = true;
    bool halving = false;
    int measured_depth = 10;
    int dmax_cap = 1000000;
    int dmax_samples = 20000;
    std::string m_grid = "1:4:100";
    int qs_samples = 10000;
    double qs_sample_m = 1.5;
    int qs_sample_depth = 12;
    std::string command;
};

void emit(const Options& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        teich::write_text_file(opt.out, text);
    }
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

// words are written oldest to newest with 1-based symbols: "12.5.140"
std::vector<teich::Word> parse_words(const std::string& s, int k) {
    std::vector<teich::Word> out;
    std::stringstream ss(s);
    std::string wtxt;
    while (std::getline(ss, wtxt, ';')) {
        teich::Word w;
        std::stringstream ws(wtxt);
        std::string sym;
        while (std::getline(ws, sym, '.')) {
            int v = std::stoi(sym);
            if (v < 1 || v > k) throw teich::BadInput("symbol out of range: " + sym);
            w.push_back(v - 1);
        }
        if (!w.empty()) out.push_back(std::move(w));
    }
    return out;
}

std::string word_str(const teich::Word& w) {
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(w[i] + 1);
    }
    return s;
}

template <class R>
struct Runner {
    Options opt;

    teich::SurfaceGroupRep<R> load_rep(const std::string& path) {
        return teich::rep_from_json<R>(teich::read_json_file(path));
    }

    teich::MarkovSystem<R> system_for(const teich::SurfaceGroupRep<R>& rep) {
        teich::MarkovSystem<R> base = teich::standard_system<R>(rep.genus);
        if (rep.is_standard) return base;
        return teich::conjugated_system(base, teich::Marking<R>::make(base.rep, rep));
    }

    // cache-aware standard system
    teich::MarkovSystem<R> standard_cached(int genus) {
        if (!opt.cache.empty()) {
            std::ifstream probe(opt.cache);
            if (probe.good()) {
                auto sys = teich::cache_from_json<R>(teich::read_json_file(opt.cache), nullptr,
                                                     nullptr);
                if (sys.genus == genus) return sys;
                throw teich::BadInput("cache holds a different genus");
            }
        }
        auto sys = teich::standard_system<R>(genus);
        if (!opt.cache.empty()) {
            auto codes = teich::compute_codes(sys);
            auto dc = teich::distortion_constants(sys, opt.measured_depth);
            teich::write_text_file(opt.cache, teich::cache_to_json(sys, codes, &dc).dump(2));
        }
        return sys;
    }

    int cmd_build_group() {
        auto [rep, poly] = teich::build_standard_group<R>(opt.genus);
        teich::SurfaceGroupRep<R> cur = rep;
        for (const auto& tw : opt.twists) {
            auto pos = tw.find(':');
            if (pos == std::string::npos)
                throw teich::BadInput("twist must look like curve:t, got " + tw);
            auto [next, marking] =
                teich::twist_deform(cur, tw.substr(0, pos), R(std::stod(tw.substr(pos + 1))));
            cur = next;
        }
        if (!opt.conjugate.empty()) {
            auto at = opt.conjugate.find('@');
            auto comma = opt.conjugate.find(',', at);
            if (at == std::string::npos || comma == std::string::npos)
                throw teich::BadInput("conjugate must look like t@p,q");
            double t = std::stod(opt.conjugate.substr(0, at));
            double p = std::stod(opt.conjugate.substr(at + 1, comma - at - 1));
            double q = std::stod(opt.conjugate.substr(comma + 1));
            auto mv = teich::translation_along(
                teich::Geodesic<R>(teich::CirclePoint<R>(R(p)), teich::CirclePoint<R>(R(q))),
                R(t));
            auto [next, marking] = teich::conjugate_rep(cur, mv);
            cur = next;
        }
        if (opt.conjugate_rotation != 0.0) {
            auto [next, marking] =
                teich::conjugate_rep(cur, teich::DiskMobius<R>::rotation(R(opt.conjugate_rotation)));
            cur = next;
        }
        emit(opt, teich::rep_to_json(cur).dump(2));
        return 0;
    }

    int cmd_show_partition() {
        teich::MarkovSystem<R> sys = opt.rep_path.empty() ? standard_cached(opt.genus)
                                                          : system_for(load_rep(opt.rep_path));
        auto A = teich::transition_matrix(sys);
        auto tr = teich::check_transitive(A);
        json j;
        j["genus"] = sys.genus;
        j["k"] = sys.size();
        json w = json::array();
        for (const auto& a : sys.W) w.push_back(teich::real_to_json(a));
        j["W"] = std::move(w);
        j["first"] = sys.first;
        json table = json::array();
        for (int i = 0; i < sys.size(); ++i) {
            json row;
            row["interval"] = i + 1;
            row["start"] = teich::real_to_json(sys.W[i]);
            row["length"] = teich::to_double(sys.interval(i).length);
            row["branch"] = sys.rep.labels[sys.branch_gen[i]];
            row["side"] = sys.branch_side[i];
            row["alternatives"] = sys.branch_alternatives[i];
            table.push_back(std::move(row));
        }
        j["intervals"] = std::move(table);
        json rows = json::array();
        for (int i = 0; i < sys.size(); ++i) {
            json cols = json::array();
            int span = sys.row_sum(i);
            for (int o = 0; o < span; ++o) cols.push_back((sys.img_lo[i] + o) % sys.size() + 1);
            rows.push_back(std::move(cols));
        }
        j["A_rows"] = std::move(rows);
        j["lambda0"] = sys.lambda0;
        j["expansion_depth"] = sys.depth_used;
        j["markov_residual"] = sys.markov_residual;
        j["transitive"] = tr.transitive;
        j["n_mix"] = tr.n_mix;
        j["primitive_exponent"] = tr.primitive_exponent;
        emit(opt, j.dump(2));
        return 0;
    }

    int cmd_scaling() {
        teich::MarkovSystem<R> sys = opt.rep_path.empty() ? standard_cached(opt.genus)
                                                          : system_for(load_rep(opt.rep_path));
        auto dc = teich::distortion_constants(sys, opt.measured_depth);
        std::ostringstream csv;
        csv << "dual_word,value,error_bound\n";
        csv.precision(17);
        json rows = json::array();
        auto emit_row = [&](const teich::Word& w) {
            auto s = teich::scaling_estimate(sys, dc, w, int(w.size()) - 1);
            if (opt.format == "csv") {
                csv << word_str(s.dual_word) << "," << s.value << "," << s.error_bound << "\n";
            } else {
                rows.push_back({{"dual_word", word_str(s.dual_word)},
                                {"value", s.value},
                                {"error_bound", s.error_bound}});
            }
        };
        if (opt.all_words) {
            // stream every admissible word of depth+1 symbols
            std::vector<teich::Word> stack;
            for (int i = sys.size() - 1; i >= 0; --i) stack.push_back(teich::Word{i});
            while (!stack.empty()) {
                teich::Word w = std::move(stack.back());
                stack.pop_back();
                if (int(w.size()) == opt.depth + 1) {
                    emit_row(w);
                    continue;
                }
                int span = sys.row_sum(w.back());
                for (int o = span - 1; o >= 0; --o) {
                    teich::Word w2 = w;
                    w2.push_back((sys.img_lo[w.back()] + o) % sys.size());
                    stack.push_back(std::move(w2));
                }
            }
        } else {
            if (opt.words.empty())
                throw teich::BadInput("scaling needs --words or --all");
            for (const auto& w : parse_words(opt.words, sys.size())) {
                if (int(w.size()) != opt.depth + 1)
                    throw teich::BadInput("each word must have depth+1 symbols");
                emit_row(w);
            }
        }
        if (opt.format == "csv")
            emit(opt, csv.str());
        else
            emit(opt, json{{"depth", opt.depth}, {"rows", rows}}.dump(2));
        return 0;
    }

    json dmax_json(const teich::DMaxResult& r) {
        return json{{"depth", r.depth},
                    {"lower", r.lower},
                    {"upper", r.upper},
                    {"max_measured", r.max_measured},
                    {"argmax_word", word_str(r.argmax)},
                    {"sampled", r.sampled},
                    {"words_examined", r.words_examined},
                    {"err_x", r.err_x},
                    {"err_y", r.err_y}};
    }

    int cmd_compare() {
        auto ra = load_rep(opt.rep_path);
        auto rb = load_rep(opt.rep_path_b);
        if (ra.genus != rb.genus) throw teich::CombinatoricsMismatch("genus mismatch");
        auto sa = system_for(ra);
        auto sb = system_for(rb);
        auto dca = teich::distortion_constants(sa, opt.measured_depth);
        auto dcb = teich::distortion_constants(sb, opt.measured_depth);
        teich::DMaxOptions dopt;
        dopt.full_enumeration_cap = opt.dmax_cap;
        dopt.min_samples = opt.dmax_samples;
        dopt.seed = opt.seed;
        auto r = teich::d_max_estimate(sa, sb, dca, dcb, opt.depth, dopt);
        json j = dmax_json(r);
        j["constants_x"] = teich::constants_to_json<R>(dca);
        j["constants_y"] = teich::constants_to_json<R>(dcb);
        emit(opt, j.dump(2));
        return 0;
    }

    int cmd_twist_path() {
        auto sys = standard_cached(opt.genus);
        auto dc0 = teich::distortion_constants(sys, opt.measured_depth);
        teich::DMaxOptions dopt;
        dopt.full_enumeration_cap = opt.dmax_cap;
        dopt.min_samples = opt.dmax_samples;
        dopt.seed = opt.seed;
        json arr = json::array();
        double prev_upper = 1e300;
        bool decreasing = true;
        for (double t : parse_list(opt.t_list)) {
            auto [tsys, marking] = teich::twisted_system(sys, opt.curve, R(t));
            auto dct = teich::distortion_constants(tsys, opt.measured_depth);
            auto r = teich::d_max_estimate(sys, tsys, dc0, dct, opt.depth, dopt);
            json e = dmax_json(r);
            e["t"] = t;
            e["lambda0"] = tsys.lambda0;
            e["expansion_depth"] = tsys.depth_used;
            arr.push_back(std::move(e));
            decreasing = decreasing && r.upper < prev_upper;
            prev_upper = r.upper;
        }
        emit(opt, json{{"curve", opt.curve}, {"depth", opt.depth}, {"entries", arr},
                       {"uppers_strictly_decreasing", decreasing}}
                      .dump(2));
        return 0;
    }

    int cmd_pressure() {
        teich::MarkovSystem<R> sys = opt.rep_path.empty() ? standard_cached(opt.genus)
                                                          : system_for(load_rep(opt.rep_path));
        int from = opt.depth_from > 0 ? opt.depth_from : opt.depth;
        int to = opt.depth_to > 0 ? opt.depth_to : opt.depth;
        if (from < 2 || to < from) throw teich::BadInput("bad depth range");
        auto ws = teich::build_word_space(sys, to);
        json arr = json::array();
        for (int n = from; n <= to; ++n) {
            auto sd = teich::transfer_spectral(ws, teich::potential_from_scaling(ws, n));
            arr.push_back({{"depth", n},
                           {"pressure", sd.pressure},
                           {"residual", std::fabs(sd.pressure)},
                           {"iterations", sd.iterations},
                           {"bracket", sd.bracket}});
        }
        emit(opt, json{{"genus", sys.genus}, {"entries", arr}}.dump(2));
        return 0;
    }

    int cmd_pmetric() {
        auto sys = standard_cached(opt.genus);
        auto ws0 = teich::build_word_space(sys, opt.depth);
        auto run_at = [&](double d) {
            auto [sp, m1] = teich::twisted_system(sys, opt.curve, R(d));
            auto [sm, m2] = teich::twisted_system(sys, opt.curve, R(-d));
            auto wsp = teich::build_word_space(sp, opt.depth);
            auto wsm = teich::build_word_space(sm, opt.depth);
            return teich::pressure_metric(ws0, wsp, wsm, d, opt.depth, opt.birkhoff, opt.seed);
        };
        auto res = run_at(opt.delta);
        double base_pressure = teich::pressure(ws0, teich::potential_from_scaling(ws0, opt.depth));
        json diag{{"h", 1e-3},
                  {"delta", opt.delta},
                  {"mean_residual", res.mean_residual},
                  {"psi_norm", res.psi_norm},
                  {"denominator", res.denominator}};
        if (opt.halving) {
            auto half = run_at(opt.delta / 2);
            diag["halved_pmetric"] = half.value;
            diag["halved_rel_change"] = std::fabs(half.value - res.value) /
                                        std::max(1e-300, std::fabs(res.value));
        }
        json j{{"depth", opt.depth},
               {"pressure", base_pressure},
               {"residual", std::fabs(base_pressure)},
               {"variance_a", res.variance},
               {"variance_b", opt.birkhoff ? json(res.variance_birkhoff) : json()},
               {"pmetric", res.value},
               {"diagnostics", diag}};
        emit(opt, j.dump(2));
        return 0;
    }

    int cmd_qsbounds() {
        auto parts = parse_list([&] {
            std::string g = opt.m_grid;
            for (auto& c : g)
                if (c == ':') c = ',';
            return g;
        }());
        if (parts.size() != 3) throw teich::BadInput("m-grid must be lo:hi:count");
        double lo = parts[0], hi = parts[1];
        int count = int(parts[2]);
        if (lo < 1.0 || hi < lo || count < 1) throw teich::InvalidM("bad M grid");

        json table = json::array();
        json flagged = json::array(), printed_flagged = json::array();
        std::ostringstream csv;
        csv.precision(17);
        csv << "M,zeta,closed_form,gap,printed_form_gap\n";
        for (int i = 0; i < count; ++i) {
            double M = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
            double z = teich::zeta(M);
            double cf = teich::zeta_closed_form(M);
            double gap = teich::zeta_form_gap(M);
            double pgap = teich::zeta_printed_form_gap(M);
            if (gap > 1e-12) flagged.push_back(M);
            if (pgap > 1e-12) printed_flagged.push_back(M);
            if (opt.format == "csv")
                csv << M << "," << z << "," << cf << "," << gap << "," << pgap << "\n";
            else
                table.push_back({{"M", M},
                                 {"zeta", z},
                                 {"closed_form", cf},
                                 {"gap", gap},
                                 {"printed_form_gap", pgap}});
        }

        long violations = 0;
        double max_ratio = 0.0;
        double zref = teich::zeta(opt.qs_sample_m);
        for (int s = 0; s < opt.qs_samples; ++s) {
            auto m = teich::sample_dyadic_qs(opt.qs_sample_m, opt.qs_sample_depth,
                                             opt.seed + uint64_t(s));
            double dev = m.deviation();
            if (dev > zref + 1e-12) ++violations;
            max_ratio = std::max(max_ratio, dev / zref);
        }
        json sampling{{"samples", opt.qs_samples},
                      {"M", opt.qs_sample_m},
                      {"depth", opt.qs_sample_depth},
                      {"violations", violations},
                      {"max_deviation_over_zeta", max_ratio}};
        if (opt.format == "csv") {
            csv << "# sampling: M=" << opt.qs_sample_m << " samples=" << opt.qs_samples
                << " violations=" << violations << " max_ratio=" << max_ratio << "\n";
            emit(opt, csv.str());
        } else {
            emit(opt, json{{"table", table},
                           {"series_vs_closed_form_flagged", flagged},
                           {"series_vs_printed_form_flagged", printed_flagged},
                           {"sampling", sampling}}
                          .dump(2));
        }
        return 0;
    }

    int run() {
        if (opt.command == "build-group") return cmd_build_group();
        if (opt.command == "show-partition") return cmd_show_partition();
        if (opt.command == "scaling") return cmd_scaling();
        if (opt.command == "compare") return cmd_compare();
        if (opt.command == "twist-path") return cmd_twist_path();
        if (opt.command == "pressure") return cmd_pressure();
        if (opt.command == "pmetric") return cmd_pmetric();
        if (opt.command == "qsbounds") return cmd_qsbounds();
        throw teich::BadInput("unknown command");
    }
};

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Bowen-Series scaling functions of surface groups"};
    app.require_subcommand(1);

    app.add_option("--precision", opt.precision, "double | extended:<bits> (up to 106)");
    app.add_option("--tol", opt.tol, "angle identification tolerance (default 1e-9)");
    app.add_option("--seed", opt.seed, "seed for randomized procedures");
    app.add_option("--out", opt.out, "output file (default stdout)");
    app.add_option("--format", opt.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--cache", opt.cache, "partition/code cache file");

    auto add_genus = [&](CLI::App* c) { c->add_option("--genus", opt.genus, "genus >= 2"); };
    auto add_depth = [&](CLI::App* c) { c->add_option("--depth", opt.depth, "dual word depth"); };

    auto* bg = app.add_subcommand("build-group", "construct a marked surface group");
    add_genus(bg);
    bg->add_option("--twist", opt.twists, "curve:t twist, repeatable (applied in order)");
    bg->add_option("--conjugate", opt.conjugate, "t@p,q conjugate by a translation");
    bg->add_option("--conjugate-rotation", opt.conjugate_rotation, "conjugate by a rotation");

    auto* sp = app.add_subcommand("show-partition", "partition, branches, transition data");
    add_genus(sp);
    sp->add_option("--rep", opt.rep_path, "representation JSON (default: standard)");

    auto* sc = app.add_subcommand("scaling", "pre-scaling samples with certified bounds");
    add_genus(sc);
    add_depth(sc);
    sc->add_option("--rep", opt.rep_path, "representation JSON (default: standard)");
    sc->add_option("--words", opt.words,
                   "semicolon-separated words of depth+1 dot-joined symbols");
    sc->add_flag("--all", opt.all_words, "every admissible word at this depth");
    sc->add_option("--measured-depth", opt.measured_depth, "exact cylinder measurement depth");

    auto* cp = app.add_subcommand("compare", "maximum-metric estimate between two surfaces");
    cp->add_option("repA", opt.rep_path, "first representation")->required();
    cp->add_option("repB", opt.rep_path_b, "second representation")->required();
    add_depth(cp);
    cp->add_option("--measured-depth", opt.measured_depth, "exact cylinder measurement depth");
    cp->add_option("--samples", opt.dmax_samples, "minimum samples when stratified");
    cp->add_option("--cap", opt.dmax_cap, "full enumeration cap");

    auto* tp = app.add_subcommand("twist-path", "d_max along a twist family");
    add_genus(tp);
    add_depth(tp);
    tp->add_option("--curve", opt.curve, "twist curve label (a_i or b_i)");
    tp->add_option("--t-list", opt.t_list, "comma-separated twist parameters");
    tp->add_option("--measured-depth", opt.measured_depth, "exact cylinder measurement depth");
    tp->add_option("--samples", opt.dmax_samples, "minimum samples when stratified");

    auto* pr = app.add_subcommand("pressure", "pressure of the depth-n scaling potential");
    add_genus(pr);
    add_depth(pr);
    pr->add_option("--rep", opt.rep_path, "representation JSON (default: standard)");
    pr->add_option("--depth-from", opt.depth_from, "sweep start");
    pr->add_option("--depth-to", opt.depth_to, "sweep end");

    auto* pm = app.add_subcommand("pmetric", "pressure metric along a twist path");
    add_genus(pm);
    add_depth(pm);
    pm->add_option("--curve", opt.curve, "twist curve label");
    pm->add_option("--delta", opt.delta, "path derivative step");
    pm->add_flag("--birkhoff,!--no-birkhoff", opt.birkhoff,
                 "Birkhoff variance estimate (default on)");
    pm->add_flag("--halving", opt.halving, "re-run at delta/2 and report stability");

    auto* qs = app.add_subcommand("qsbounds", "zeta(M) tables and dyadic sampling");
    qs->add_option("--m-grid", opt.m_grid, "lo:hi:count grid of M values");
    qs->add_option("--samples", opt.qs_samples, "dyadic maps to sample");
    qs->add_option("--sample-m", opt.qs_sample_m, "M for the sampler");
    qs->add_option("--sample-depth", opt.qs_sample_depth, "dyadic depth for the sampler");

    for (auto* sub : {bg, sp, sc, cp, tp, pr, pm, qs}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    for (auto* sub : app.get_subcommands()) opt.command = sub->get_name();
    teich::kAngleTol = opt.tol;

    try {
        if (opt.precision == "double") {
            Runner<double> r{opt};
            return r.run();
        }
        if (opt.precision.rfind("extended:", 0) == 0) {
            int bits = std::stoi(opt.precision.substr(9));
            if (bits <= 53) {
                Runner<double> r{opt};
                return r.run();
            }
            if (bits <= 106) {
                Runner<teich::dd> r{opt};
                return r.run();
            }
            throw teich::BadInput("extended precision supports up to 106 mantissa bits");
        }
        throw teich::BadInput("unknown precision mode: " + opt.precision);
    } catch (const teich::Error& e) {
        json err{{"error", {{"type", e.type}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return e.kind == teich::ErrorKind::certificate ? 2 : 3;
    } catch (const std::exception& e) {
        json err{{"error", {{"type", "Unexpected"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 3;
    }
}
