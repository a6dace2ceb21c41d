#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "bbr/bogolyubov.hpp"
#include "bbr/gen.hpp"
#include "bbr/io.hpp"
#include "bbr/phi.hpp"
#include "bbr/pipeline.hpp"
#include "bbr/report.hpp"
#include "bbr/verify.hpp"

namespace {

// Accepts "3/4", "2", and decimal literals like "0.25" (read exactly).
mpq_class parse_rational(const std::string& s) {
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac = s.size() - dot - 1;
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw std::runtime_error("bad rational: " + s);
        mpz_class num(digits, 10), den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::runtime_error("bad rational: " + s);
    q.canonicalize();
    if (q < 0) throw std::runtime_error("rational must be nonnegative: " + s);
    return q;
}

bbr::CountMode parse_mode(const std::string& s) {
    if (s == "exact") return bbr::CountMode::Exact;
    if (s == "float") return bbr::CountMode::Float;
    throw std::runtime_error("mode must be exact or float");
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-")
        std::cout << content;
    else
        bbr::spit(out_path, content);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bilinear set toolkit"};
    app.require_subcommand(1);

    bbr::GeneratorSpec spec;
    std::string in_path, out_path, report_path, variety_path, set_path;
    std::string word = bbr::Word::standard().letters;
    std::string mode = "exact";
    std::string eps_str, rho_str;
    bool robust = false, table = false, timings = false;
    uint64_t seed = 0, cap = uint64_t(1) << 16;
    uint32_t samples = 512, t_max = 64, attempts = 32, verify_samples = 256;

    CLI::App* gen = app.add_subcommand("gen", "Generate a set file");
    gen->add_option("--kind", spec.kind, "random | product | planted_variety | graph | from_file");
    gen->add_option("--p", spec.p, "field characteristic");
    gen->add_option("--m", spec.m, "x-side dimension");
    gen->add_option("--n", spec.n, "y-side dimension");
    gen->add_option("--density", spec.density, "target density for kind=random");
    gen->add_option("--codims", spec.codims, "codimensions (two for product, three for planted_variety)");
    gen->add_option("--deletion", spec.deletion, "deletion rate for kind=planted_variety");
    gen->add_option("--base", spec.base_path, "input file for kind=graph / from_file");
    gen->add_flag("--linear", spec.linear, "one-dimensional set over F_p^n (random, product, from_file)");
    gen->add_option("--seed", spec.seed, "rng seed");
    gen->add_option("--out", out_path, "output set file (default stdout)");

    CLI::App* phi = app.add_subcommand("phi", "Apply a difference word to a set");
    phi->add_option("--in", in_path, "input grid set file")->required();
    phi->add_option("--word", word, "letters h and v, applied rightmost first");
    phi->add_option("--eps", eps_str, "density threshold; selects the robust operator");
    phi->add_option("--mode", mode, "exact | float");
    phi->add_flag("--table", table, "emit the full count table as CSV");
    phi->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* bog = app.add_subcommand("bogolyubov", "Subspace inside the two-fold difference set");
    bog->add_option("--in", in_path, "input linear set file (kind=linear)")->required();
    bog->add_option("--rho", rho_str, "squared spectral threshold (default alpha/2)");
    bog->add_option("--out", out_path, "output subspace as a set file (default stdout)");

    CLI::App* pipe = app.add_subcommand("pipeline", "Run the full reduction on a grid set");
    pipe->add_option("--in", in_path, "input grid set file")->required();
    pipe->add_flag("--robust", robust, "thread counting certificates through every step");
    pipe->add_option("--word", word, "difference word (guarantees hold for the default)");
    pipe->add_option("--mode", mode, "exact | float");
    pipe->add_option("--seed", seed, "rng seed");
    pipe->add_option("--samples", samples, "triple samples per discovery round");
    pipe->add_option("--tmax", t_max, "discovery round cap");
    pipe->add_option("--attempts", attempts, "search attempts per round");
    pipe->add_option("--cap", cap, "enumeration cap for certification");
    pipe->add_option("--verify-samples", verify_samples, "sampled checks above the cap");
    pipe->add_flag("--timings", timings, "record wall-clock step timings in the report");
    pipe->add_option("--report", report_path, "report JSON path (default stdout)");
    pipe->add_option("--variety", variety_path, "output variety file");

    CLI::App* ver = app.add_subcommand("verify", "Re-check a variety against a set from scratch");
    ver->add_option("--variety", variety_path, "variety file")->required();
    ver->add_option("--set", set_path, "grid set file")->required();
    ver->add_option("--word", word, "difference word");
    ver->add_option("--eps", eps_str, "required normalized count (omit for plain positivity)");
    ver->add_option("--cap", cap, "enumeration cap");
    ver->add_option("--seed", seed, "seed for sampled checks above the cap");
    ver->add_option("--verify-samples", verify_samples, "sampled checks above the cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) {
            emit(out_path, spec.linear ? bbr::write_dense_set(bbr::generate_linear(spec))
                                       : bbr::write_grid_set(bbr::generate(spec)));
            return 0;
        }
        if (phi->parsed()) {
            bbr::GridSet a = bbr::read_grid_set(bbr::slurp(in_path));
            bbr::Word w(word);
            bbr::CountMode cm = parse_mode(mode);
            if (table) {
                emit(out_path, bbr::write_count_csv(bbr::count_table(a, w, cm)));
            } else if (!eps_str.empty()) {
                emit(out_path, bbr::write_grid_set(bbr::phi_robust(a, w, parse_rational(eps_str), cm)));
            } else {
                emit(out_path, bbr::write_grid_set(bbr::phi_word(a, w)));
            }
            return 0;
        }
        if (bog->parsed()) {
            bbr::DenseSet a = bbr::read_dense_set(bbr::slurp(in_path));
            std::optional<mpq_class> rho;
            if (!rho_str.empty()) rho = parse_rational(rho_str);
            bbr::SpectralResult res = bbr::bogolyubov_subspace(a, rho);
            emit(out_path, bbr::write_dense_set(bbr::DenseSet::of_subspace(res.v)));
            nlohmann::ordered_json j;
            j["dim"] = res.v.dim();
            j["codim"] = res.v.codim();
            j["rho"] = res.cert.rho_sq.get_str();
            j["codim_bound"] = res.cert.codim_bound;
            j["min_normalized_count"] = res.cert.min_normalized.get_str();
            j["robust_floor"] = res.cert.robust_floor.get_str();
            j["sound"] = res.cert.sound;
            std::cerr << j.dump(2) << "\n";
            return res.cert.sound ? 0 : 1;
        }
        if (pipe->parsed()) {
            bbr::GridSet a = bbr::read_grid_set(bbr::slurp(in_path));
            bbr::PipelineConfig cfg;
            cfg.word = bbr::Word(word);
            cfg.robust = robust;
            cfg.arithmetic = parse_mode(mode);
            cfg.triple_samples = samples;
            cfg.t_max = t_max;
            cfg.search_attempts = attempts;
            cfg.seed = seed;
            cfg.enumeration_cap = cap;
            cfg.verify_samples = verify_samples;
            cfg.timings = timings;
            bbr::PipelineResult res = bbr::run_pipeline(a, cfg);
            emit(report_path, bbr::report_string(res));
            if (!variety_path.empty()) bbr::spit(variety_path, bbr::write_variety(res.variety));
            return res.cert.pass ? 0 : 1;
        }
        if (ver->parsed()) {
            bbr::BilinearVariety bv = bbr::read_variety(bbr::slurp(variety_path));
            bbr::GridSet a = bbr::read_grid_set(bbr::slurp(set_path));
            std::optional<mpq_class> eps;
            if (!eps_str.empty()) eps = parse_rational(eps_str);
            bbr::VerifyOutcome out = bbr::verify_variety(a, bbr::Word(word), bv, eps, cap, seed, verify_samples);
            nlohmann::ordered_json j;
            j["checked"] = out.checked;
            j["exhaustive"] = out.exhaustive;
            j["min_normalized_count"] = out.min_normalized.get_str();
            j["pass"] = out.pass;
            if (out.first_fail) j["first_fail"] = {{"x", out.first_fail->first}, {"y", out.first_fail->second}};
            std::cout << j.dump(2) << "\n";
            return out.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
