#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "vicious/validation.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace vicious;

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_failure = 2, exit_validation = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

// Uniform grid lo, lo + step, ..., hi.
struct Axis {
    std::string name;
    double lo = 0, hi = 0, step = 1;

    std::size_t count() const { return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1; }
    double at(std::size_t i) const { return i + 1 == count() ? hi : lo + step * static_cast<double>(i); }

    void validate(double min, double max) const {
        require(std::isfinite(lo) && std::isfinite(hi) && std::isfinite(step), name + ": non-finite grid bound");
        require(step > 0, name + ": step must be positive");
        require(lo <= hi, name + ": minimum exceeds maximum");
        require(lo >= min - 1e-12 && hi <= max + 1e-12,
                name + ": grid must lie in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
        require((hi - lo) / step < 1e6, name + ": more than a million grid points");
        require(std::abs(lo + step * static_cast<double>(count() - 1) - hi) <= 1e-9 * std::max(1.0, std::abs(hi)),
                name + ": range is not a whole number of steps");
    }

    json describe() const { return {{"min", lo}, {"max", hi}, {"step", step}}; }
};

void add_axis(CLI::App* app, Axis& axis, const std::string& flag, bool bare_step = false) {
    app->add_option("--" + flag + "-min", axis.lo, axis.name + " grid minimum")->capture_default_str();
    app->add_option("--" + flag + "-max", axis.hi, axis.name + " grid maximum")->capture_default_str();
    app->add_option((bare_step ? "--step,--" : "--") + flag + "-step", axis.step, axis.name + " grid step")
        ->capture_default_str();
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    json provenance = json::object();
};

struct Artifact {
    Table table;
    json summary = json::object();
    json parameters = json::object();
    bool validation_failed = false;
};

std::string csv_field(const json& v) {
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
    out += "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
        out += "\r\n";
    }
    return out;
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string to_json(const std::string& command, const Artifact& a) {
    json doc;
    doc["schema"] = 1;
    doc["command"] = command;
    doc["generated_at"] = utc_timestamp();
    doc["parameters"] = a.parameters;
    doc["provenance"] = a.table.provenance;
    doc["summary"] = a.summary;
    doc["columns"] = a.table.columns;
    doc["rows"] = a.table.rows;
    return doc.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path), tmp = target.string() + ".partial";
    std::error_code status_ec;
    if (fs::exists(target, status_ec) && !fs::is_regular_file(target, status_ec)) {
        // devices and pipes are written in place
        std::ofstream os(target, std::ios::binary);
        os << content;
        if (!os.flush()) throw std::runtime_error("write to " + path + " failed");
        return;
    }
    try {
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
            os << content;
            os.flush();
            if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
        }
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

struct Common {
    std::string output;
    std::string format = "csv";
    unsigned threads = 0;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("-o,--output", c.output, "output file (default: standard output)");
    app->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app->add_option("--threads", c.threads, "worker threads (0: hardware concurrency)")->capture_default_str();
}

const PainleveSolution& painleve() {
    static const PainleveSolution sol = solve_hastings_mcleod();
    return sol;
}

const JointDensity& joint_density() {
    static const JointDensity jd = JointDensity::build();
    return jd;
}

// Domain of the limiting density on the default grids.
constexpr double density_s_min = -12.0, density_s_max = 10.0, density_w_abs = 6.0;

struct TwF1 {
    Common common;
    Axis s{"s", -6.0, 4.0, 0.1};

    void validate() const { s.validate(-12.0, 10.0); }

    Artifact run() const {
        Artifact a;
        a.parameters = {{"s", s.describe()}};
        a.table.columns = {"s", "q", "q_prime", "F1_painleve", "F1_fredholm", "discrepancy"};
        a.table.provenance = {
            {"q", "Hastings-McLeod solution of Painleve II (Numerov boundary-value solve)"},
            {"q_prime", "derivative of the Hastings-McLeod solution"},
            {"F1_painleve", "GOE Tracy-Widom distribution from tail integrals of q"},
            {"F1_fredholm", "GOE Tracy-Widom distribution as a Fredholm determinant of the Airy kernel"},
            {"discrepancy", "absolute difference of the two F1 routes"}};
        std::vector<std::vector<json>> rows(s.count());
        detail::parallel_for(rows.size(), common.threads, [&](std::size_t i) {
            const double x = s.at(i), p = tracy_widom_f1(x, painleve()), f = fredholm_f1(x);
            rows[i] = {x, painleve().q(x), painleve().q_prime(x), p, f, std::abs(p - f)};
        });
        double worst = 0;
        for (const auto& r : rows) worst = std::max(worst, r[5].get<double>());
        a.table.rows = std::move(rows);
        a.summary = {{"rows", a.table.rows.size()}, {"max_discrepancy", worst}};
        return a;
    }
};

struct Jpdf {
    Common common;
    Axis s{"s", -4.0, 4.0, 0.1};
    Axis w{"w", -2.0, 2.0, 0.1};

    void validate() const {
        s.validate(density_s_min, density_s_max);
        w.validate(-density_w_abs, density_w_abs);
        const double ratio = s.step / 0.01;
        require(std::abs(ratio - std::round(ratio)) < 1e-9 && std::abs(s.lo / 0.01 - std::round(s.lo / 0.01)) < 1e-9,
                "s: grid must be aligned with the 0.01 density grid");
    }

    Artifact run() const {
        Artifact a;
        a.parameters = {{"s", s.describe()}, {"w", w.describe()}};
        a.table.columns = {"s", "w", "P"};
        a.table.provenance = {{"P", "joint density of the rescaled maximum s and its rescaled location w, from the "
                                    "Lax-pair solutions of Painleve II along a rotated spectral ray"}};
        const JointDensity& jd = joint_density();
        const SGrid& g = jd.s_grid();
        std::vector<std::vector<double>> columns(w.count());
        detail::parallel_for(columns.size(), common.threads, [&](std::size_t i) { columns[i] = jd.joint_pdf_column(w.at(i)); });
        for (std::size_t i = 0; i < w.count(); ++i)
            for (std::size_t j = 0; j < s.count(); ++j) {
                const std::size_t k = g.nearest(s.at(j));
                a.table.rows.push_back({g.at(k), w.at(i), columns[i].at(k)});
            }
        a.summary = {{"rows", a.table.rows.size()}};
        return a;
    }
};

struct Marginal {
    Common common;
    Axis w{"w", 0.0, 4.0, 0.1};

    void validate() const { w.validate(-density_w_abs, density_w_abs); }

    Artifact run() const {
        Artifact a;
        a.parameters = {{"w", w.describe()}};
        a.table.columns = {"w", "P_w"};
        a.table.provenance = {{"P_w", "marginal density of the rescaled location, joint density integrated over "
                                      "s in [-10, 8]"}};
        const JointDensity& jd = joint_density();
        std::vector<std::vector<json>> rows(w.count());
        detail::parallel_for(rows.size(), common.threads, [&](std::size_t i) { rows[i] = {w.at(i), jd.marginal_w(w.at(i))}; });
        a.table.rows = std::move(rows);
        a.summary = {{"rows", a.table.rows.size()}};
        if (w.hi >= 3.0) {
            TailFit fit = fit_marginal_tail(jd, tail_analysis(jd.painleve()), 2.5, w.hi);
            a.summary["tail_fit_window"] = {2.5, w.hi};
            a.summary["tail_coefficient"] = fit.slope;
            a.summary["tail_coefficient_over_one_twelfth"] = 12 * fit.slope;
            a.table.provenance["tail_coefficient"] = "least-squares slope of -log P(w) against w^3";
        }
        return a;
    }
};

struct Airy2 {
    Common common;
    Axis m{"m", -1.0, 1.0, 0.5};
    Axis t{"t", 0.0, 1.0, 0.25};

    void validate() const {
        m.validate(density_s_min / density_constants::airy_m_scale, density_s_max / density_constants::airy_m_scale);
        t.validate(-density_w_abs / density_constants::airy_t_scale, density_w_abs / density_constants::airy_t_scale);
    }

    Artifact run() const {
        Artifact a;
        a.parameters = {{"m", m.describe()}, {"t", t.describe()}};
        a.table.columns = {"m", "t", "hP_painleve", "hP_fredholm", "discrepancy"};
        a.table.provenance = {
            {"hP_painleve", "Airy2-minus-parabola argmax density from the rescaled Painleve joint density"},
            {"hP_fredholm", "same density from the Airy-kernel resolvent formula"},
            {"discrepancy", "absolute difference of the two routes"}};
        const JointDensity& jd = joint_density();
        std::vector<std::vector<json>> rows(m.count() * t.count());
        detail::parallel_for(rows.size(), common.threads, [&](std::size_t i) {
            const double mm = m.at(i / t.count()), tt = t.at(i % t.count());
            const double p = airy2_jpdf(jd, mm, tt), f = mfqr_jpdf(mm, tt).density;
            rows[i] = {mm, tt, p, f, std::abs(p - f)};
        });
        double worst = 0;
        for (const auto& r : rows) worst = std::max(worst, r[4].get<double>());
        a.table.rows = std::move(rows);
        a.summary = {{"rows", a.table.rows.size()}, {"max_discrepancy", worst}};
        return a;
    }
};

struct FiniteN {
    Common common;
    int N = 2;
    std::string quantity = "jpdf";
    Axis M{"M", 1.0, 3.0, 0.5};
    Axis tau{"tau", 0.05, 0.95, 0.05};
    Axis s{"s", -4.0, 2.0, 0.05};

    void validate() const {
        require(N >= 1 && N <= 64, "N: must lie in [1, 64]");
        if (quantity == "convergence") {
            s.validate(-12.0, 10.0);
            require(scaling::height_from_s(s.lo, N) > 0, "s: rescaled height must be positive");
            require(scaling::height_from_s(s.hi, N) <= max_height(N), "s: rescaled height above the supported range");
            return;
        }
        M.validate(quantity == "cdf" ? 0.0 : 0.5, max_height(N));
        if (quantity == "jpdf") tau.validate(0.0, 1.0);
    }

    Artifact run() const {
        Artifact a;
        a.parameters = {{"N", N}, {"quantity", quantity}};
        if (quantity == "jpdf") {
            a.parameters["M"] = M.describe();
            a.parameters["tau"] = tau.describe();
            a.table.columns = {"M", "tau", "P_N"};
            a.table.provenance = {{"P_N", "exact joint density of the top-walker maximum M and its time tau for N "
                                          "non-intersecting excursions, from the orthogonal-polynomial reduction"}};
            std::vector<std::vector<std::vector<json>>> blocks(M.count());
            detail::parallel_for(blocks.size(), common.threads, [&](std::size_t i) {
                FiniteNModel model = build_op_table(M.at(i), N);
                for (std::size_t j = 0; j < tau.count(); ++j)
                    blocks[i].push_back({M.at(i), tau.at(j), jpdf_finite_n(model, tau.at(j))});
            });
            for (auto& b : blocks)
                for (auto& r : b) a.table.rows.push_back(std::move(r));
        } else if (quantity == "cdf") {
            a.parameters["M"] = M.describe();
            a.table.columns = {"M", "F_N"};
            a.table.provenance = {{"F_N", "exact distribution of the top-walker maximum for N non-intersecting excursions"}};
            std::vector<std::vector<json>> rows(M.count());
            detail::parallel_for(rows.size(), common.threads,
                                 [&](std::size_t i) { rows[i] = {M.at(i), cdf_max_finite_n(M.at(i), N)}; });
            a.table.rows = std::move(rows);
        } else {
            a.parameters["s"] = s.describe();
            a.table.columns = {"s", "M", "F_N", "F1", "difference"};
            a.table.provenance = {{"F_N", "exact finite-N distribution at the edge-rescaled height"},
                                  {"F1", "GOE Tracy-Widom distribution (Painleve route)"},
                                  {"difference", "F_N minus F1"}};
            std::vector<std::vector<json>> rows(s.count());
            detail::parallel_for(rows.size(), common.threads, [&](std::size_t i) {
                const double x = s.at(i), height = scaling::height_from_s(x, N);
                const double fn = cdf_max_finite_n(height, N), f1 = tracy_widom_f1(x, painleve());
                rows[i] = {x, height, fn, f1, fn - f1};
            });
            double worst = 0;
            for (const auto& r : rows) worst = std::max(worst, std::abs(r[4].get<double>()));
            a.table.rows = std::move(rows);
            a.summary["sup_distance"] = worst;
        }
        a.summary["rows"] = a.table.rows.size();
        return a;
    }
};

struct Ldev {
    Common common;
    double M = 10.0;
    Axis c{"c", 0.2, 1.0, 0.1};
    Axis u{"u", -0.4, 0.4, 0.1};

    void validate() const {
        require(std::isfinite(M) && M > 0, "M: must be positive");
        c.validate(1e-12, 1.0);
        require(c.lo > 0, "c: must be positive");
        u.validate(-0.5, 0.5);
        require(std::abs(u.lo) < 0.5 && std::abs(u.hi) < 0.5, "u: |u| < 1/2 required");
    }

    Artifact run() const {
        Artifact a;
        a.parameters = {{"M", M}, {"c", c.describe()}, {"u", u.describe()}};
        a.table.columns = {"c", "u", "y_star", "phi_star", "phi_second", "varphi", "log_jpdf_estimate"};
        a.table.provenance = {{"y_star", "saddle point of the large-M exponent"},
                              {"varphi", "large-deviation rate function of the top walker position"},
                              {"log_jpdf_estimate", "-M^2 varphi, leading large-deviation estimate of log P_N"}};
        for (std::size_t i = 0; i < c.count(); ++i)
            for (std::size_t j = 0; j < u.count(); ++j) {
                LargeDeviation ld = large_deviation_eval(c.at(i), u.at(j), M);
                a.table.rows.push_back({c.at(i), u.at(j), ld.y_star, ld.phi_star, ld.phi_pp, ld.varphi, ld.log_jpdf_estimate});
            }
        a.summary = {{"rows", a.table.rows.size()}};
        return a;
    }
};

struct Mc {
    Common common;
    int N = 2;
    std::size_t samples = 10000;
    int steps = 2000;
    std::uint64_t seed = 1;
    std::string mode = "matrix";
    std::string correction = "bridge";
    double min_acceptance = 1e-6;
    std::string dump;

    SamplerConfig config() const {
        SamplerConfig cfg;
        cfg.N = N;
        cfg.samples = samples;
        cfg.steps = steps;
        cfg.seed = seed;
        cfg.mode = mode == "matrix" ? SamplerMode::MatrixBridge : SamplerMode::VervaatRejection;
        cfg.correction = correction == "bridge" ? MaxCorrection::BridgeMax : MaxCorrection::GridOnly;
        cfg.min_acceptance = min_acceptance;
        cfg.threads = common.threads;
        return cfg;
    }

    void validate() const {
        require(N >= 1 && N <= 64, "N: must lie in [1, 64]");
        require(mode == "matrix" || N <= 4, "N: rejection sampling supports N <= 4");
        require(steps >= 2000, "steps: at least 2000 required");
        require(samples > 0, "samples: must be positive");
        require(min_acceptance > 0 && min_acceptance < 1, "min-acceptance: must lie in (0, 1)");
    }

    Artifact run() const {
        Artifact a;
        a.parameters = {{"N", N},          {"samples", samples}, {"steps", steps},
                        {"seed", seed},    {"mode", mode},       {"correction", correction},
                        {"min_acceptance", min_acceptance}};
        PathEnsemble e = sample_ensemble(config());
        const HistogramSpec spec = HistogramSpec::defaults(N);
        ExtremeStats s = extreme_stats(e, spec);
        a.table.columns = {"seed", "M_lo", "M_hi", "tau_lo", "tau_hi", "count"};
        a.table.provenance = {{"count", "Monte-Carlo histogram of (maximum, argmax) of the top walker"}};
        const Histogram2D& h = s.histogram;
        for (std::size_t i = 0; i < h.m_bins(); ++i)
            for (std::size_t j = 0; j < h.tau_bins(); ++j)
                a.table.rows.push_back({seed, spec.m_edges[i], spec.m_edges[i + 1], spec.tau_edges[j],
                                        spec.tau_edges[j + 1], h.at(i, j)});
        a.summary = {{"seed", seed},
                     {"attempts", e.attempts},
                     {"acceptance_rate", e.acceptance_rate},
                     {"mean_M", s.mean_M},
                     {"stderr_M", s.stderr_M},
                     {"mean_tau", s.mean_tau},
                     {"stderr_tau", s.stderr_tau},
                     {"correlation", s.correlation},
                     {"correlation_stderr", s.correlation_stderr},
                     {"offset_correlation", s.offset_correlation},
                     {"outside_histogram", h.outside}};
        if (N <= 3) {
            ExactFiniteN exact(N);
            ComparisonReport r = compare_to_exact(e, exact, spec);
            a.summary["comparison"] = {{"ks_M", r.ks_M},     {"p_M", r.p_M},         {"ks_tau", r.ks_tau},
                                       {"p_tau", r.p_tau},   {"chi2", r.chi2},       {"chi2_dof", r.chi2_dof},
                                       {"chi2_p", r.chi2_p}, {"pooled_bins", r.pooled_bins}};
            a.table.provenance["comparison"] = "exact finite-N marginals by quadrature of the orthogonal-polynomial density";
        }
        if (!dump.empty()) write_samples(dump, e);
        return a;
    }
};

struct Validate {
    Common common;
    std::vector<int> criteria;
    AcceptanceOptions options;

    void validate() const {
        for (int id : criteria)
            require(id >= 1 && id <= AcceptanceSuite::criterion_count, "criteria: ids must lie in [1, 12]");
        require(options.mc_samples > 0, "mc-samples: must be positive");
        require(options.mc_steps >= 2000, "mc-steps: at least 2000 required");
    }

    Artifact run() const {
        Artifact a;
        a.parameters = {{"mc_samples", options.mc_samples}, {"mc_steps", options.mc_steps}, {"seed", options.seed}};
        a.table.columns = {"id", "title", "passed", "seconds", "detail"};
        a.table.provenance = {{"passed", "acceptance criterion outcome at the stated tolerances"}};
        AcceptanceSuite suite(options);
        std::vector<int> ids = criteria;
        if (ids.empty())
            for (int i = 1; i <= AcceptanceSuite::criterion_count; ++i) ids.push_back(i);
        int passed = 0;
        for (int id : ids) {
            CriterionResult r = suite.run(id);
            std::cerr << AcceptanceSuite::format(r) << "\n";
            a.table.rows.push_back({r.id, r.title, r.passed, r.seconds, r.detail});
            passed += r.passed;
        }
        a.summary = {{"criteria", ids.size()}, {"passed", passed}, {"seed", options.seed}};
        a.validation_failed = passed != static_cast<int>(ids.size());
        return a;
    }
};

template <class Command>
int execute(const std::string& name, const Command& cmd) {
    try {
        cmd.validate();
    } catch (const UsageError& e) {
        std::cerr << "vicious " << name << ": " << e.what() << "\n";
        return exit_usage;
    }
    try {
        Artifact a = cmd.run();
        const std::string text = cmd.common.format == "json" ? to_json(name, a) : to_csv(a.table);
        if (cmd.common.output.empty() || cmd.common.output == "-")
            std::cout << text;
        else
            write_atomically(cmd.common.output, text);
        std::cerr << name << ": " << a.summary.dump() << "\n";
        return a.validation_failed ? exit_validation : exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "vicious " << name << ": " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extreme statistics of non-intersecting Brownian excursions"};
    app.require_subcommand(1);

    TwF1 tw;
    auto* tw_cmd = app.add_subcommand("tw-f1", "tabulate F1 by the Painleve and Fredholm routes");
    add_common(tw_cmd, tw.common);
    add_axis(tw_cmd, tw.s, "s", true);

    Jpdf jpdf;
    auto* jpdf_cmd = app.add_subcommand("jpdf", "grid of the limiting joint density P(s, w)");
    add_common(jpdf_cmd, jpdf.common);
    add_axis(jpdf_cmd, jpdf.s, "s");
    add_axis(jpdf_cmd, jpdf.w, "w");

    Marginal marginal;
    auto* marginal_cmd = app.add_subcommand("marginal", "location marginal P(w) and its cubic tail fit");
    add_common(marginal_cmd, marginal.common);
    add_axis(marginal_cmd, marginal.w, "w");

    Airy2 airy2;
    auto* airy2_cmd = app.add_subcommand("airy2", "Airy2 argmax density with the Fredholm cross-check");
    add_common(airy2_cmd, airy2.common);
    add_axis(airy2_cmd, airy2.m, "m");
    add_axis(airy2_cmd, airy2.t, "t");

    FiniteN finite;
    auto* finite_cmd = app.add_subcommand("finite-n", "exact finite-N density, distribution or edge convergence");
    add_common(finite_cmd, finite.common);
    finite_cmd->add_option("-n,--walkers", finite.N, "number of walkers")->capture_default_str();
    finite_cmd->add_option("--quantity", finite.quantity, "jpdf, cdf or convergence")
        ->check(CLI::IsMember({"jpdf", "cdf", "convergence"}))
        ->capture_default_str();
    add_axis(finite_cmd, finite.M, "M");
    add_axis(finite_cmd, finite.tau, "tau");
    add_axis(finite_cmd, finite.s, "s");

    Ldev ldev;
    auto* ldev_cmd = app.add_subcommand("ldev", "large-deviation rate function surface");
    add_common(ldev_cmd, ldev.common);
    ldev_cmd->add_option("--M", ldev.M, "wall height")->capture_default_str();
    add_axis(ldev_cmd, ldev.c, "c");
    add_axis(ldev_cmd, ldev.u, "u");

    Mc mc;
    auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo ensemble with exact comparison");
    add_common(mc_cmd, mc.common);
    mc_cmd->add_option("-n,--walkers", mc.N, "number of walkers")->capture_default_str();
    mc_cmd->add_option("--samples", mc.samples, "number of samples")->capture_default_str();
    mc_cmd->add_option("--steps", mc.steps, "time steps per path")->capture_default_str();
    mc_cmd->add_option("--seed", mc.seed, "base seed")->capture_default_str();
    mc_cmd->add_option("--mode", mc.mode, "matrix or rejection")
        ->check(CLI::IsMember({"matrix", "rejection"}))
        ->capture_default_str();
    mc_cmd->add_option("--correction", mc.correction, "bridge or grid")
        ->check(CLI::IsMember({"bridge", "grid"}))
        ->capture_default_str();
    mc_cmd->add_option("--min-acceptance", mc.min_acceptance, "rejection-mode acceptance floor")->capture_default_str();
    mc_cmd->add_option("--dump", mc.dump, "binary sample dump path");

    Validate val;
    val.common.format = "json";
    auto* val_cmd = app.add_subcommand("validate", "run the acceptance suite");
    add_common(val_cmd, val.common);
    val_cmd->add_option("--criteria", val.criteria, "criterion ids (default: all)");
    val_cmd->add_option("--mc-samples", val.options.mc_samples, "Monte-Carlo samples per N")->capture_default_str();
    val_cmd->add_option("--mc-steps", val.options.mc_steps, "Monte-Carlo time steps")->capture_default_str();
    val_cmd->add_option("--seed", val.options.seed, "Monte-Carlo base seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (*tw_cmd) return execute("tw-f1", tw);
    if (*jpdf_cmd) return execute("jpdf", jpdf);
    if (*marginal_cmd) return execute("marginal", marginal);
    if (*airy2_cmd) return execute("airy2", airy2);
    if (*finite_cmd) return execute("finite-n", finite);
    if (*ldev_cmd) return execute("ldev", ldev);
    if (*mc_cmd) return execute("mc", mc);
    return execute("validate", val);
}
