#include "lab/lab.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "lab/profile.hpp"

namespace lab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    if (!j.is_object()) throw std::invalid_argument("config: " + ctx + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + ctx);
    }
}

std::string fmt_double(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double_or_nan(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc())
        throw std::invalid_argument("csv: cannot parse number '" + s + "'");
    return v;
}

// JSON cannot carry non-finite numbers; encode them as tagged strings
json num_encode(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double num_decode(const json& v) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw std::invalid_argument("summary: bad numeric string '" + s + "'");
    }
    return v.get<double>();
}

} // namespace

RadialFunction profile_from_json(const json& j) {
    check_keys(j, {"kind", "M", "amplitude", "power", "path", "scale"}, "data profile");
    const std::string kind = j.at("kind").get<std::string>();
    const double scale = j.value("scale", 1.0);
    RadialFunction f;
    if (kind == "zero") {
        f = RadialFunction::zero(j.value("M", 1.0));
    } else if (kind == "bump") {
        f = RadialFunction::bump(j.value("M", 1.0), j.value("amplitude", 1.0));
    } else if (kind == "poly_bump") {
        f = RadialFunction::poly_bump(j.value("M", 1.0), j.value("power", 3));
    } else if (kind == "csv") {
        f = RadialFunction::from_csv(j.at("path").get<std::string>());
    } else {
        throw std::invalid_argument("config: unknown profile kind '" + kind + "'");
    }
    if (scale != 1.0) f = RadialFunction::scaled(f, scale);
    return f;
}

RadialFunction profile_from_preset(const std::string& preset) {
    // "bump:M=1,amp=1" | "poly:M=1,power=3" | "zero" | "csv:PATH"
    const auto colon = preset.find(':');
    const std::string kind = preset.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : preset.substr(colon + 1);
    if (kind == "zero") return RadialFunction::zero();
    if (kind == "csv") return RadialFunction::from_csv(rest);
    double M = 1.0, amp = 1.0;
    int power = 3;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("preset: expected key=value in '" + preset + "'");
        const std::string key = item.substr(0, eq);
        const double val = std::stod(item.substr(eq + 1));
        if (key == "M") M = val;
        else if (key == "amp") amp = val;
        else if (key == "power") power = int(val);
        else throw std::invalid_argument("preset: unknown key '" + key + "'");
    }
    if (kind == "bump") return RadialFunction::bump(M, amp);
    if (kind == "poly") {
        RadialFunction f = RadialFunction::poly_bump(M, power);
        return amp != 1.0 ? RadialFunction::scaled(f, amp) : f;
    }
    throw std::invalid_argument("preset: unknown profile '" + preset + "'");
}

nlohmann::json profile_to_json(const RadialFunction& f) {
    json j;
    if (f.is_zero()) {
        j["kind"] = "zero";
        j["M"] = f.support_radius();
        return j;
    }
    switch (f.tag()) {
        case SmoothnessTag::c_infinity_bump: j["kind"] = "bump"; break;
        case SmoothnessTag::polynomial_bump: j["kind"] = "poly_bump"; break;
        case SmoothnessTag::tabulated: j["kind"] = "csv"; break;
    }
    j["M"] = f.support_radius();
    return j;
}

WaveSpeed wavespeed_from_json(const json& j) {
    check_keys(j, {"kind", "k", "alpha", "beta"}, "wavespeed");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "affine") return WaveSpeed::affine(j.value("k", 1.0));
    if (kind == "quadratic") return WaveSpeed::quadratic(j.value("k", 1.0));
    if (kind == "cubic") return WaveSpeed::cubic(j.value("k", 1.0));
    if (kind == "exp_half") return WaveSpeed::exp_half();
    if (kind == "unit") return WaveSpeed::unit();
    if (kind == "liquid_crystal")
        return WaveSpeed::liquid_crystal(j.at("alpha").get<double>(), j.at("beta").get<double>());
    throw std::invalid_argument("config: unknown wavespeed kind '" + kind + "'");
}

LabConfig LabConfig::from_json(const json& j) {
    check_keys(j, {"data", "wavespeed", "form", "epsilons", "grid", "budgets", "seed"}, "config");
    LabConfig cfg;
    const json& data = j.at("data");
    check_keys(data, {"u0", "u1"}, "data");
    cfg.u0 = profile_from_json(data.at("u0"));
    cfg.u1 = profile_from_json(data.at("u1"));
    cfg.speed = wavespeed_from_json(j.at("wavespeed"));

    const std::string form = j.value("form", "divergence");
    if (form == "divergence") cfg.form = EquationForm::divergence;
    else if (form == "variational") cfg.form = EquationForm::variational;
    else throw std::invalid_argument("config: unknown form '" + form + "'");

    if (j.contains("epsilons")) cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
    for (double e : cfg.epsilons)
        if (!(e > 0)) throw std::invalid_argument("config: epsilons must be positive");

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"dr", "cfl", "domain", "window_width", "r_max", "record_dt"}, "grid");
        cfg.dr = g.value("dr", 0.02);
        cfg.cfl = g.value("cfl", 0.4);
        const std::string dom = g.value("domain", "moving_window");
        if (dom == "moving_window") cfg.domain.kind = DomainPolicy::Kind::moving_window;
        else if (dom == "fixed") cfg.domain.kind = DomainPolicy::Kind::fixed;
        else throw std::invalid_argument("config: unknown domain '" + dom + "'");
        cfg.domain.width = g.value("window_width", 0.0);
        cfg.domain.r_max = g.value("r_max", 0.0);
        cfg.record_dt = g.value("record_dt", 0.0);
    }
    if (j.contains("budgets")) {
        const json& b = j.at("budgets");
        check_keys(b, {"t_max", "t_max_safety", "slow_time_cap", "threshold_scale"}, "budgets");
        cfg.t_max = b.value("t_max", 0.0);
        cfg.t_max_safety = b.value("t_max_safety", 2.5);
        cfg.slow_time_cap = b.value("slow_time_cap", 0.0);
        cfg.threshold_scale = b.value("threshold_scale", 0.0);
    }
    cfg.seed = j.value("seed", 0u);

    cfg.canonical = j;
    cfg.hash = sha256_hex(j.dump());
    return cfg;
}

LabConfig LabConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: JSON parse error in " + path + ": " + e.what());
    }
    return from_json(j);
}

SimConfig LabConfig::sim_config(double epsilon, double dr_override) const {
    SimConfig sc;
    sc.epsilon = epsilon;
    sc.speed = speed;
    sc.form = form;
    sc.u0 = u0;
    sc.u1 = u1;
    sc.dr = dr_override > 0 ? dr_override : dr;
    sc.cfl = cfl;
    sc.domain = domain;
    sc.t_max = t_max > 0 ? t_max : 1000.0;
    sc.slow_time_cap = slow_time_cap > 0 ? slow_time_cap : kInf;
    sc.blowup_threshold_scale = threshold_scale;
    sc.record_dt = record_dt;
    return sc;
}

Prediction predict(const RadiationField& rf, bool var2_numeric) {
    Prediction p;
    p.tau0 = rf.tau0;
    p.nu0 = rf.nu0;
    p.rho0 = rf.rho0;
    p.rho0_tilde = rf.rho0_tilde;
    p.div_I = rf.tau0;
    p.div_II = rf.nu0;
    p.var_I = std::isfinite(rf.tau0) ? 2.0 * rf.tau0 : kInf;
    if (var2_numeric && !rf.trivial)
        p.var_II = profile_blowup_time(rf, ModelVariant::var_II, &p.var_II_error);
    return p;
}

namespace {

// amplification of the predicted 2 eps |F0'(rho)| scale that counts as blowup
constexpr double kAmplification = 2.5;

// auto time budget for one sweep row: comfortably past the predicted lifespan
double auto_t_max(const LabConfig& cfg, CaseTag tag, const Prediction& pred, double eps) {
    if (cfg.t_max > 0) return cfg.t_max;
    if (tag == CaseTag::case_I && std::isfinite(pred.tau0)) {
        const double c = cfg.form == EquationForm::divergence ? pred.tau0 : 2.0 * pred.tau0;
        return cfg.t_max_safety * (c / eps) * (c / eps);
    }
    // case II moderate-eps probes and the global case: fall back to a flat cap
    return cfg.t_max_safety * 2000.0;
}

SweepRow run_row(const LabConfig& cfg, const Prediction& pred, CaseTag tag, double eps,
                 double w1_scale) {
    SweepRow row;
    row.epsilon = eps;
    row.dr = cfg.dr;
    row.config_hash = cfg.hash;

    auto make_sim = [&](double dr_run) {
        SimConfig sc = cfg.sim_config(eps, dr_run);
        sc.t_max = auto_t_max(cfg, tag, pred, eps);
        // auto threshold: a fixed amplification of the radiation-field w1 scale
        if (cfg.threshold_scale <= 0 && w1_scale > 0)
            sc.blowup_threshold_scale = kAmplification * w1_scale;
        // diagnostics cadence resolving the slow clock near the crossing
        sc.diag_dt = sc.t_max / 4000.0;
        return sc;
    };

    RadialWaveSolver solver(make_sim(cfg.dr));
    BlowupReport rep = solver.run();

    // convergence companion at the coarser grid (2 dr)
    RadialWaveSolver solver_c(make_sim(cfg.dr * 2.0));
    BlowupReport rep_c = solver_c.run();

    row.censored = rep.outcome != BlowupReport::Outcome::blowup;
    row.fit_r2 = rep.fit_r2;
    if (!row.censored) {
        row.T_eps = rep.T_eps;
        row.scaled = tag == CaseTag::case_II ? eps * eps * std::log(rep.T_eps)
                                             : eps * std::sqrt(rep.T_eps);
        if (rep_c.outcome == BlowupReport::Outcome::blowup) {
            row.T_half_dr = rep_c.T_eps;
            row.converged = std::abs(rep_c.T_eps - rep.T_eps) <= 0.05 * rep.T_eps;
        }
    }
    const bool case2 = tag == CaseTag::case_II;
    for (const DiagSample& d : rep.series) {
        if (d.max_w1 <= 0) continue;
        row.clock_series.push_back(case2 ? std::log1p(d.t) : std::sqrt(1.0 + d.t));
        row.invw_series.push_back(1.0 / d.max_w1);
    }
    return row;
}

} // namespace

ScalingReport sweep(const LabConfig& cfg, int threads) {
    ScalingReport rep;
    rep.form = cfg.form;
    rep.case_tag = classify_wavespeed(cfg.speed);
    rep.config_hash = cfg.hash;

    RadiationField rf = radiation_field(cfg.u0, cfg.u1);
    rep.prediction = predict(rf);
    const double rho = rep.case_tag == CaseTag::case_II ? rf.rho0_tilde : rf.rho0;
    const double w1_scale = rf.trivial ? 0.0 : 2.0 * std::abs(rf.f0_prime_at(rho));

    std::vector<double> eps = cfg.epsilons;
    std::sort(eps.rbegin(), eps.rend()); // descending
    rep.rows.resize(eps.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= eps.size()) return;
            rep.rows[i] = run_row(cfg, rep.prediction, rep.case_tag, eps[i], w1_scale);
        }
    };
    const int nw = std::max(1, std::min<int>(threads, int(eps.size())));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // eps^{1/2} extrapolation over the three smallest non-censored epsilons
    std::vector<double> xs, ys;
    for (auto it = rep.rows.rbegin(); it != rep.rows.rend() && xs.size() < 3; ++it) {
        if (it->censored) continue;
        xs.push_back(std::sqrt(it->epsilon));
        ys.push_back(it->scaled);
    }
    if (xs.size() == 3) {
        const LineFit fit = fit_line(xs, ys);
        rep.extrapolated_limit = fit.intercept;
        rep.extrapolated_coeff = fit.slope;
        double resid = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            resid += sqr(ys[i] - (fit.intercept + fit.slope * xs[i]));
        rep.fit_residual = std::sqrt(resid / double(xs.size()));
    }
    return rep;
}

void write_report(const ScalingReport& rep, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    {
        std::ofstream csv(fs::path(out_dir) / "results.csv");
        if (!csv) throw std::runtime_error("write_report: cannot write results.csv in " + out_dir);
        csv << "epsilon,T,scaled,dr,converged,censored,config_hash\n";
        for (const SweepRow& r : rep.rows)
            csv << fmt_double(r.epsilon) << ',' << fmt_double(r.T_eps) << ','
                << fmt_double(r.scaled) << ',' << fmt_double(r.dr) << ','
                << (r.converged ? 1 : 0) << ',' << (r.censored ? 1 : 0) << ','
                << r.config_hash << '\n';
    }

    json summary;
    summary["case"] = to_string(rep.case_tag);
    summary["form"] = to_string(rep.form);
    summary["config_hash"] = rep.config_hash;
    summary["prediction"] = {
        {"tau0", num_encode(rep.prediction.tau0)},
        {"nu0", num_encode(rep.prediction.nu0)},
        {"rho0", num_encode(rep.prediction.rho0)},
        {"rho0_tilde", num_encode(rep.prediction.rho0_tilde)},
        {"div_I", num_encode(rep.prediction.div_I)},
        {"div_II", num_encode(rep.prediction.div_II)},
        {"var_I", num_encode(rep.prediction.var_I)},
        {"var_II", num_encode(rep.prediction.var_II)},
        {"var_II_error", num_encode(rep.prediction.var_II_error)}};
    summary["extrapolated_limit"] = num_encode(rep.extrapolated_limit);
    summary["extrapolated_coeff"] = num_encode(rep.extrapolated_coeff);
    summary["fit_residual"] = num_encode(rep.fit_residual);
    json rows = json::array();
    for (const SweepRow& r : rep.rows) {
        json jr;
        jr["epsilon"] = r.epsilon;
        jr["dr"] = r.dr;
        jr["censored"] = r.censored;
        jr["converged"] = r.converged;
        jr["T"] = num_encode(r.T_eps);
        jr["scaled"] = num_encode(r.scaled);
        jr["T_half_dr"] = num_encode(r.T_half_dr);
        jr["fit_r2"] = r.fit_r2;
        jr["config_hash"] = r.config_hash;
        rows.push_back(std::move(jr));
    }
    summary["rows"] = std::move(rows);
    {
        std::ofstream js(fs::path(out_dir) / "summary.json");
        if (!js) throw std::runtime_error("write_report: cannot write summary.json in " + out_dir);
        js << summary.dump(2) << '\n';
    }

    // plot data: scaled lifespan vs epsilon, and 1/max|w1| vs clock per row
    {
        std::ofstream sc(fs::path(out_dir) / "scaling.csv");
        sc << "epsilon,scaled,prediction\n";
        const double pred = rep.form == EquationForm::divergence
                                ? (rep.case_tag == CaseTag::case_II ? rep.prediction.nu0
                                                                    : rep.prediction.tau0)
                                : (rep.case_tag == CaseTag::case_II ? rep.prediction.var_II
                                                                    : rep.prediction.var_I);
        for (const SweepRow& r : rep.rows)
            if (!r.censored)
                sc << fmt_double(r.epsilon) << ',' << fmt_double(r.scaled) << ','
                   << fmt_double(pred) << '\n';
    }
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        std::ofstream ws(fs::path(out_dir) / ("w1_clock_" + std::to_string(i) + ".csv"));
        ws << "clock,inv_max_w1\n";
        const SweepRow& r = rep.rows[i];
        for (std::size_t k = 0; k < r.clock_series.size(); ++k)
            ws << fmt_double(r.clock_series[k]) << ',' << fmt_double(r.invw_series[k]) << '\n';
    }
    {
        std::ofstream gp(fs::path(out_dir) / "scaling.gp");
        gp << "set datafile separator ','\n"
              "set key left\n"
              "set xlabel 'epsilon'\n"
              "set ylabel 'scaled lifespan'\n"
              "plot 'scaling.csv' using 1:2 skip 1 with linespoints title 'measured', \\\n"
              "     'scaling.csv' using 1:3 skip 1 with lines dashtype 2 title 'prediction'\n";
    }
}

ScalingReport load_report(const std::string& out_dir) {
    std::ifstream js(fs::path(out_dir) / "summary.json");
    if (!js) throw std::runtime_error("load_report: cannot open summary.json in " + out_dir);
    json summary;
    js >> summary;

    ScalingReport rep;
    const std::string case_s = summary.at("case").get<std::string>();
    rep.case_tag = case_s == "case_I" ? CaseTag::case_I
                                      : (case_s == "case_II" ? CaseTag::case_II
                                                             : CaseTag::global_existence);
    rep.form = summary.at("form").get<std::string>() == "variational" ? EquationForm::variational
                                                                      : EquationForm::divergence;
    rep.config_hash = summary.at("config_hash").get<std::string>();
    const json& p = summary.at("prediction");
    rep.prediction.tau0 = num_decode(p.at("tau0"));
    rep.prediction.nu0 = num_decode(p.at("nu0"));
    rep.prediction.rho0 = num_decode(p.at("rho0"));
    rep.prediction.rho0_tilde = num_decode(p.at("rho0_tilde"));
    rep.prediction.div_I = num_decode(p.at("div_I"));
    rep.prediction.div_II = num_decode(p.at("div_II"));
    rep.prediction.var_I = num_decode(p.at("var_I"));
    rep.prediction.var_II = num_decode(p.at("var_II"));
    rep.prediction.var_II_error = num_decode(p.at("var_II_error"));
    rep.extrapolated_limit = num_decode(summary.at("extrapolated_limit"));
    rep.extrapolated_coeff = num_decode(summary.at("extrapolated_coeff"));
    rep.fit_residual = num_decode(summary.at("fit_residual"));
    std::size_t idx = 0;
    for (const json& jr : summary.at("rows")) {
        SweepRow r;
        r.epsilon = jr.at("epsilon").get<double>();
        r.dr = jr.at("dr").get<double>();
        r.censored = jr.at("censored").get<bool>();
        r.converged = jr.at("converged").get<bool>();
        r.T_eps = num_decode(jr.at("T"));
        r.scaled = num_decode(jr.at("scaled"));
        r.T_half_dr = num_decode(jr.at("T_half_dr"));
        r.fit_r2 = jr.at("fit_r2").get<double>();
        r.config_hash = jr.at("config_hash").get<std::string>();
        std::ifstream ws(fs::path(out_dir) / ("w1_clock_" + std::to_string(idx) + ".csv"));
        if (ws) {
            std::string line;
            std::getline(ws, line); // header
            while (std::getline(ws, line)) {
                const auto comma = line.find(',');
                if (comma == std::string::npos) continue;
                r.clock_series.push_back(parse_double_or_nan(line.substr(0, comma)));
                r.invw_series.push_back(parse_double_or_nan(line.substr(comma + 1)));
            }
        }
        rep.rows.push_back(std::move(r));
        ++idx;
    }
    return rep;
}

} // namespace lab
