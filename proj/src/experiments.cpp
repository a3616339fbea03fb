#include "rtm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rtm/concentration.hpp"
#include "rtm/conditions.hpp"
#include "rtm/errors.hpp"
#include "rtm/esp.hpp"
#include "rtm/index_space.hpp"
#include "rtm/mp_law.hpp"
#include "rtm/spectra.hpp"
#include "rtm/tensor_model.hpp"

namespace rtm {

using nlohmann::ordered_json;

namespace {

ordered_json report_head(const char* command, ordered_json config) {
    ordered_json r;
    r["version"] = kVersion;
    r["command"] = command;
    r["config"] = std::move(config);
    return r;
}

// Echoes the knobs that determine the result. The thread count is execution
// strategy only (results are bit-identical across it), so it stays out of the
// report and reruns compare byte for byte.
void echo_common(ordered_json& cfg, const CommonConfig& c) {
    cfg["seed"] = c.seed;
    cfg["max_p"] = c.max_p;
}

// Index-based quartiles on a copy; stable across platforms (no interpolation).
struct Quartiles {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
};

std::optional<Quartiles> quartiles(std::vector<double> v) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const auto pick = [&](double f) {
        const std::size_t i =
            std::min(v.size() - 1, static_cast<std::size_t>(f * static_cast<double>(v.size())));
        return v[i];
    };
    return Quartiles{pick(0.25), pick(0.5), pick(0.75)};
}

} // namespace

ordered_json run_mp_esd(const MpEsdConfig& cfg) {
    ordered_json config;
    config["n"] = cfg.n;
    config["d"] = cfg.d;
    config["N"] = cfg.N;
    config["dist"] = cfg.dist;
    echo_common(config, cfg.common);
    ordered_json r = report_head("mp-esd", std::move(config));

    const EntryDistribution dist = EntryDistribution::parse(cfg.dist);
    const TensorModelSpec spec(cfg.n, cfg.d, dist);
    const RngStream rng{cfg.common.seed, 0};
    const SymMatrix cov =
        sample_covariance(spec, cfg.N, rng, cfg.common.max_p, cfg.common.threads);
    const ESD esd = eigenvalues_sym(cov);

    const std::size_t p = esd.size();
    const double rho = static_cast<double>(p) / static_cast<double>(cfg.N);
    const MPParams mp = MPParams::from_rho(rho);

    ordered_json row;
    row["n"] = cfg.n;
    row["d"] = cfg.d;
    row["N"] = cfg.N;
    row["p"] = p;
    row["rho"] = rho;
    row["ks"] = ks_distance(esd, mp);
    row["wasserstein1"] = wasserstein1(esd, mp);
    row["esd_mean"] = esd_moment(esd, 1);
    row["esd_m2"] = esd_moment(esd, 2);
    row["mp_m2"] = 1.0 + rho; // second moment of the MP law
    row["small_p_warning"] = p < 30;

    // Fixed histogram grid; eigenvalues past the edge land in an overflow
    // counter (and tiny negatives from roundoff in bin 0).
    constexpr int kBins = 100;
    const double hi = 1.2 * mp.a_plus;
    std::vector<std::uint64_t> counts(kBins, 0);
    std::uint64_t above = 0;
    for (double lam : esd.eigenvalues) {
        if (lam >= hi) {
            ++above;
            continue;
        }
        const int b = std::clamp(static_cast<int>(std::floor(lam / hi * kBins)), 0, kBins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    ordered_json hist;
    hist["lo"] = 0.0;
    hist["hi"] = hi;
    hist["bins"] = kBins;
    hist["counts"] = counts;
    hist["above_range"] = above;

    r["rows"] = ordered_json::array({row});
    r["histogram"] = std::move(hist);
    return r;
}

ordered_json run_qform_var(const QformVarConfig& cfg) {
    ordered_json config;
    config["n"] = cfg.n;
    config["d"] = cfg.d;
    config["dist"] = cfg.dist;
    config["matrices"] = cfg.matrices;
    config["reps"] = cfg.reps;
    echo_common(config, cfg.common);
    ordered_json r = report_head("qform-var", std::move(config));

    const EntryDistribution dist = EntryDistribution::parse(cfg.dist);
    const TensorModelSpec spec(cfg.n, cfg.d, dist);
    const BigCount pc = spec.p();
    if (pc > BigCount(static_cast<std::uint64_t>(cfg.common.max_p)))
        throw cap_exceeded("qform-var: p = " + pc.str() + " exceeds the dense cap " +
                           std::to_string(cfg.common.max_p) + " (raise --max-p to override)");
    const std::size_t p = static_cast<std::size_t>(pc.to_u64());
    const RngStream rng{cfg.common.seed, 0};
    const std::optional<double> k4 = dist.fourth_moment();

    ordered_json rows = ordered_json::array();
    for (std::size_t m = 0; m < cfg.matrices.size(); ++m) {
        const std::string& mspec = cfg.matrices[m];
        ordered_json row;
        row["matrix"] = mspec;
        try {
            std::unique_ptr<QformOperator> op;
            if (mspec == "identity") {
                op = make_identity_op(p);
            } else if (mspec == "zero-diag-signs") {
                op = make_zero_diag_signs_op(p, rng.substream(0xA0 + m));
            } else if (mspec.rfind("projection:", 0) == 0) {
                op = make_projection_op(p, std::stod(mspec.substr(11)), rng.substream(0xA0 + m));
            } else {
                throw precondition_error("unknown matrix spec: " + mspec);
            }
            row["kind"] = matrix_kind_name(op->kind());
            row["trace"] = op->trace();
            row["tr_aat"] = op->tr_aat();
            row["norm_estimate"] = op->spectral_norm_estimate();
            if (!k4)
                throw precondition_error("bound requires a finite fourth moment (" + dist.name() +
                                         " has none)");
            const double bound = variance_upper_bound(op->kind(), static_cast<double>(p), op->tr_aat(),
                                                *k4, cfg.d, cfg.n);
            const VarEstimate mc = mc_variance(spec, *op, cfg.reps, rng.substream(m), 20,
                                               cfg.common.threads);
            row["K"] = *k4;
            row["bound"] = bound;
            row["mc_point"] = mc.point;
            row["mc_std_error"] = mc.std_error;
            row["reps"] = mc.reps;
            row["bound_ok"] = mc.point - 3.0 * mc.std_error <= bound;
            if (mspec == "identity") {
                row["hoeffding_lower"] =
                    hoeffding_lower(static_cast<double>(p), *k4, cfg.d, cfg.n);
                try {
                    row["exact_variance"] = exact_variance_diag_oracle(spec);
                } catch (const cap_exceeded&) {
                    row["exact_variance"] = nullptr;
                }
            }
        } catch (const precondition_error& e) {
            row["error"] = e.what();
        }
        rows.push_back(std::move(row));
    }
    r["rows"] = std::move(rows);
    return r;
}

ordered_json run_esp_lln(const EspLlnConfig& cfg) {
    ordered_json config;
    config["z_dist"] = cfg.z_dist;
    config["d_rule"] = cfg.d_rule;
    config["n_grid"] = cfg.n_grid;
    config["reps"] = cfg.reps;
    echo_common(config, cfg.common);
    ordered_json r = report_head("esp-lln", std::move(config));

    const ZDistribution zdist = ZDistribution::parse(cfg.z_dist);
    const auto d_of_n = parse_d_rule(cfg.d_rule);
    const RngStream rng{cfg.common.seed, 0};

    ordered_json rows = ordered_json::array();
    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        const int n = cfg.n_grid[gi];
        const int d = std::min(d_of_n(n), n - 1 > 0 ? n - 1 : 1);
        std::vector<double> gaps, logus, dsn, rhos;
        std::uint64_t maclaurin_fail = 0, saddle_fallback = 0;
        for (std::uint64_t rep = 0; rep < cfg.reps; ++rep) {
            CounterRng gen(rng.substream(gi).substream(rep));
            std::vector<double> z(static_cast<std::size_t>(n));
            for (double& v : z) v = zdist.sample(gen);

            const LogValue lu = log_ustat(z, d);
            double sn = 0.0;
            for (double v : z) sn += v;
            dsn.push_back(d * (sn / n - 1.0));
            if (!maclaurin_check(z, d)) ++maclaurin_fail;
            const SaddleResult saddle = solve_rho(z, d);
            if (!saddle.satisfied_equation) {
                ++saddle_fallback;
            } else {
                rhos.push_back(saddle.rho);
                if (lu.sign > 0) {
                    logus.push_back(lu.log_magnitude);
                    gaps.push_back(
                        std::abs(lu.log_magnitude - asymptotic_log_ustat(z, d, saddle)));
                }
            }
        }

        ordered_json row;
        row["n"] = n;
        row["d"] = d;
        row["reps"] = cfg.reps;
        const auto put = [&row](const char* key, const std::optional<Quartiles>& q) {
            const std::string k(key);
            if (q) {
                row[k + "_q1"] = q->q1;
                row[k + "_median"] = q->median;
                row[k + "_q3"] = q->q3;
            } else {
                row[k + "_q1"] = nullptr;
                row[k + "_median"] = nullptr;
                row[k + "_q3"] = nullptr;
            }
        };
        put("gap", quartiles(gaps));
        put("log_u", quartiles(logus));
        put("d_sn_dev", quartiles(dsn));
        put("rho", quartiles(rhos));
        row["maclaurin_violations"] = maclaurin_fail;
        row["saddle_fallbacks"] = saddle_fallback;
        rows.push_back(std::move(row));
    }
    r["rows"] = std::move(rows);
    return r;
}

ordered_json run_gamma(const GammaConfig& cfg) {
    ordered_json config;
    config["n_max"] = cfg.n_max;
    config["d_max"] = cfg.d_max;
    echo_common(config, cfg.common);
    ordered_json r = report_head("gamma", std::move(config));

    ordered_json rows = ordered_json::array();
    for (int n = 2; n <= cfg.n_max; ++n)
        for (int d = 1; d <= std::min(cfg.d_max, n); ++d)
            for (int t = 0; t < d; ++t)
                for (int s = 0; s <= t + 1; ++s) { // s = t+1 exercises the 1(s<=t) zero
                    ordered_json row;
                    row["n"] = n;
                    row["d"] = d;
                    row["t"] = t;
                    row["s"] = s;
                    if (2 * d - t > n) {
                        row["skipped"] = "no base pair (2d - t > n)";
                        rows.push_back(std::move(row));
                        continue;
                    }
                    const BigCount exact = gamma_exact(n, d, s, t);
                    const double bound = gamma_bound(n, d, s, t);
                    row["exact"] = exact.str();
                    row["bound"] = bound;
                    row["exact_le_bound"] = exact.to_double() <= bound * (1.0 + 1e-12);
                    try {
                        const BigCount brute = gamma_brute(n, d, s, t);
                        row["brute"] = brute.str();
                        row["exact_eq_brute"] = exact == brute;
                    } catch (const cap_exceeded& e) {
                        row["skipped"] = e.what();
                    }
                    rows.push_back(std::move(row));
                }
    r["rows"] = std::move(rows);
    return r;
}

ordered_json run_conditions(const ConditionsConfig& cfg) {
    ordered_json config;
    config["dist"] = cfg.dist;
    config["d_rule"] = cfg.d_rule;
    config["n_grid"] = cfg.n_grid;
    config["reps"] = cfg.reps;
    echo_common(config, cfg.common);
    ordered_json r = report_head("conditions", std::move(config));

    const EntryDistribution dist = EntryDistribution::parse(cfg.dist);
    const RngStream rng{cfg.common.seed, 0};
    const RegimeTable table = regime_classifier([&dist](int) { return dist; },
                                                parse_d_rule(cfg.d_rule), cfg.n_grid,
                                                rng.substream(7), cfg.reps);

    ordered_json rows = ordered_json::array();
    for (const RegimePoint& pt : table.points) {
        ordered_json row;
        row["n"] = pt.n;
        row["d"] = pt.d;
        row["term_tail"] = pt.report.term_tail;
        row["term_fourth"] = pt.report.term_fourth;
        row["analytic"] = pt.report.analytic;
        if (pt.report.analytic) {
            const auto [tail, body] = second_moment_split(dist, pt.d, pt.n);
            row["decomposition_residual"] = tail + body - 1.0;
        } else {
            row["mc_reps"] = pt.report.reps;
            row["tail_std_error"] = pt.report.tail_std_error;
            row["fourth_std_error"] = pt.report.fourth_std_error;
        }
        rows.push_back(std::move(row));
    }
    r["rows"] = std::move(rows);
    r["tail_trending_down"] = table.tail_trending_down;
    r["fourth_trending_down"] = table.fourth_trending_down;
    return r;
}

std::string to_csv(const ordered_json& report) {
    const auto it = report.find("rows");
    if (it == report.end() || !it->is_array()) return "";
    // Header: union of row keys in first-seen order.
    std::vector<std::string> cols;
    for (const auto& row : *it)
        for (const auto& kv : row.items())
            if (std::find(cols.begin(), cols.end(), kv.key()) == cols.end())
                cols.push_back(kv.key());

    const auto cell = [](const ordered_json& v) -> std::string {
        if (v.is_null()) return "";
        if (v.is_string()) {
            std::string s = v.get<std::string>();
            if (s.find_first_of(",\"\n") != std::string::npos) {
                std::string q = "\"";
                for (char c : s) {
                    if (c == '"') q += '"';
                    q += c;
                }
                q += '"';
                return q;
            }
            return s;
        }
        return v.dump();
    };

    std::string out;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out += ',';
        out += cols[c];
    }
    out += '\n';
    for (const auto& row : *it) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ',';
            const auto f = row.find(cols[c]);
            if (f != row.end()) out += cell(*f);
        }
        out += '\n';
    }
    return out;
}

} // namespace rtm
