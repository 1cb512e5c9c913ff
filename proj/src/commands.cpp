#include "anlab/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "anlab/design.hpp"
#include "anlab/parallel.hpp"
#include "anlab/sim.hpp"

#ifndef ANLAB_VERSION
#define ANLAB_VERSION "unknown"
#endif

namespace anlab {

namespace {

constexpr double kN0 = 1.0;
constexpr double kSymbolPeriod = 1.0;
constexpr std::uint64_t kMinFixedTrials = 10'000;
constexpr std::uint64_t kMinBlocks = 1'000;

double from_db(double db) { return std::pow(10.0, db / 10.0); }

Constellation constellation_at(int m, double em_over_n0_db) {
    return {m, half_distance_from_energy(from_db(em_over_n0_db) * kN0, kSymbolPeriod, m), kSymbolPeriod};
}

NoiseModel unit_noise() { return NoiseModel::from_psd(kN0, kSymbolPeriod); }

std::string phase_text(std::optional<PhaseChoice> p) { return p ? std::string(to_string(*p)) : "random"; }

struct Budget {
    std::uint64_t trials;
    std::uint64_t seed;
};

Budget budget(const ExperimentSpec& spec, const RunOptions& opt) {
    return {opt.trials.value_or(spec.trials), opt.seed.value_or(spec.seed)};
}

void require_fixed_trials(std::uint64_t trials) {
    if (trials != 0 && trials < kMinFixedTrials) throw ConfigError("trials must be 0 or at least 10^4");
}

const FixedChannel& fixed_channel(const ExperimentSpec& spec, const char* command) {
    if (const auto* ch = std::get_if<FixedChannel>(&spec.channel)) return *ch;
    throw ConfigError(std::string(command) + " requires channel.type = fixed");
}

const RayleighChannel& rayleigh_channel(const ExperimentSpec& spec, const char* command) {
    if (const auto* ch = std::get_if<RayleighChannel>(&spec.channel)) return *ch;
    throw ConfigError(std::string(command) + " requires channel.type = rayleigh");
}

/// Stream ids are (sweep point, design slot) so every curve point owns its
/// own random stream whatever the thread count.
RngSpec stream(std::uint64_t seed, std::size_t point, std::size_t slot) {
    return {seed, (static_cast<std::uint64_t>(point) << 8) | slot};
}

std::size_t slot(DesignKind k) { return static_cast<std::size_t>(k); }
constexpr std::size_t kPhaseSlot = 16;
constexpr std::size_t kInstantaneousSlot = 32;

void attach(CsvRow& row, const SerEstimate& est) {
    row.ser_sim = est.mean;
    row.ci_half_width = est.half_width_95;
}

CsvRow law_row(double ez_db, DesignKind kind, const TwoPointPowerLaw& law, double value) {
    CsvRow r;
    r.ez_over_n0_db = ez_db;
    r.design = to_string(kind);
    r.x1 = law.x1();
    r.x2 = law.x2();
    r.p = law.p();
    r.phase1 = phase_text(law.phase1());
    r.phase2 = phase_text(law.phase2());
    r.ser_analytic = value;
    return r;
}

CsvRow plain_row(double ez_db, std::string_view design, std::optional<double> analytic) {
    CsvRow r;
    r.ez_over_n0_db = ez_db;
    r.design = design;
    r.ser_analytic = analytic;
    return r;
}

CsvRow failure_row(double ez_db, DesignKind kind) {
    CsvRow r = plain_row(ez_db, to_string(kind), std::nullopt);
    r.region_label = "optimizer_failure";
    return r;
}

CommandOutput collect(const std::vector<std::vector<CsvRow>>& rows) {
    CommandOutput out;
    out.csv = std::string(CsvRow::header()) + "\n";
    for (const auto& point : rows)
        for (const auto& r : point) {
            out.csv += r.to_csv();
            out.csv += '\n';
            if (r.region_label == "optimizer_failure") ++out.failed_rows;
        }
    return out;
}

void require_designs(const ExperimentSpec& spec, std::initializer_list<DesignKind> allowed, const char* command) {
    for (auto k : spec.designs)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError(std::string(command) + " does not support design '" + std::string(to_string(k)) + "'");
}

}  // namespace

CommandOutput cmd_threshold(const ExperimentSpec& spec, const RunOptions& opt) {
    const auto aos = spec.threshold_a_over_sigma.values();
    const std::size_t n = spec.threshold_orders.size() * aos.size();
    std::vector<PhaseThreshold> results(n);
    parallel_for(n, opt.threads, [&](std::size_t i) {
        results[i] = phase_threshold(aos[i % aos.size()], spec.threshold_orders[i / aos.size()]);
    });
    CsvWriter w("m,a_over_sigma,threshold,crossover");
    for (std::size_t i = 0; i < n; ++i)
        w.row({std::to_string(spec.threshold_orders[i / aos.size()]), format_number(aos[i % aos.size()]),
               format_number(results[i].value), results[i].crossover ? "true" : "false"});
    return {w.text(), 0};
}

CommandOutput cmd_ser_curve(const ExperimentSpec& spec, const RunOptions& opt) {
    const auto& ch = fixed_channel(spec, "ser-curve");
    const auto b = budget(spec, opt);
    require_fixed_trials(b.trials);
    const auto noise = unit_noise();
    const double aos = spec.curve_a_over_sigma.value_or(a_over_sigma(from_db(spec.em_over_n0_db) * kN0, kN0,
                                                                     spec.modulation));
    const InstantaneousContext ctx{Constellation(spec.modulation, aos * noise.sigma(), kSymbolPeriod),
                                   {ch.h, ch.g}, noise};
    const auto zs = spec.curve_z_over_sigma.values();

    std::vector<std::vector<std::string>> rows(zs.size());
    parallel_for(zs.size(), opt.threads, [&](std::size_t i) {
        const double z = zs[i] * noise.sigma();
        const double rot = ser_phase_amp(0.0, z, ctx);
        const double qam = ser_phase_amp(std::numbers::pi / 4.0, z, ctx);
        const auto best = ser_best_phase(z, ctx);
        std::vector<std::string> f{format_number(zs[i]), format_number(rot), format_number(qam),
                                   format_number(best.value), std::string(to_string(best.phase))};
        for (auto phase : {PhaseChoice::RotatedQam, PhaseChoice::Qam}) {
            if (b.trials == 0) {
                f.insert(f.end(), {"", ""});
                continue;
            }
            const auto gen = deterministic_at_phase(z * z, phase_angle(phase), ctx.channel);
            const auto est = simulate_ser_fixed_channel(ctx, gen, b.trials, stream(b.seed, i, kPhaseSlot + static_cast<int>(phase)));
            f.push_back(format_number(est.mean));
            f.push_back(format_number(est.half_width_95));
        }
        rows[i] = std::move(f);
    });
    CsvWriter w("z_over_sigma,ser_rotated,ser_qam,ser_best,best_phase,sim_rotated,ci_rotated,sim_qam,ci_qam");
    for (const auto& r : rows) w.row(r);
    return {w.text(), 0};
}

CommandOutput cmd_power_opt(const ExperimentSpec& spec, const RunOptions& opt) {
    const auto& ch = fixed_channel(spec, "power-opt");
    require_designs(spec, {DesignKind::TwoPoint, DesignKind::Deterministic}, "power-opt");
    const auto b = budget(spec, opt);
    require_fixed_trials(b.trials);
    const InstantaneousContext ctx{constellation_at(spec.modulation, spec.em_over_n0_db), {ch.h, ch.g},
                                   unit_noise()};
    const auto ez = spec.ez_over_n0_db.values();
    const double blind = non_informative_ser(spec.modulation);

    std::vector<std::vector<CsvRow>> rows(ez.size());
    std::vector<std::optional<DesignReport>> reports(ez.size());
    parallel_for(ez.size(), opt.threads, [&](std::size_t i) {
        const double p_bar = from_db(ez[i]) * kN0 / kSymbolPeriod;
        auto& out = rows[i];
        for (auto kind : spec.designs) {
            if (kind == DesignKind::TwoPoint) {
                try {
                    reports[i] = optimize_two_point_instantaneous(p_bar, ctx);
                } catch (const OptimizerError&) {
                    out.push_back(failure_row(ez[i], kind));
                    continue;
                }
                auto row = law_row(ez[i], kind, reports[i]->law, reports[i]->achieved_ser);
                if (b.trials)
                    attach(row, simulate_ser_fixed_channel(ctx, two_point_for_channel(reports[i]->law, ctx.channel),
                                                           b.trials, stream(b.seed, i, slot(kind))));
                out.push_back(std::move(row));
            } else {
                for (auto phase : {PhaseChoice::RotatedQam, PhaseChoice::Qam}) {
                    const auto law = TwoPointPowerLaw::deterministic(p_bar, phase);
                    auto row = law_row(ez[i], kind, law, ser_phase_amp(phase_angle(phase), std::sqrt(p_bar), ctx));
                    if (b.trials) {
                        const auto gen = deterministic_at_phase(p_bar, phase_angle(phase), ctx.channel);
                        attach(row, simulate_ser_fixed_channel(ctx, gen, b.trials,
                                                               stream(b.seed, i, kPhaseSlot + static_cast<int>(phase))));
                    }
                    out.push_back(std::move(row));
                }
            }
        }
        out.push_back(plain_row(ez[i], "non_informative", blind));
    });

    // Regions are labelled over the contiguous runs of successful designs.
    std::vector<DesignReport> run;
    std::vector<std::size_t> run_index;
    auto flush = [&] {
        if (run.size() >= 3) {
            const auto labels = region_classify(run);
            for (std::size_t k = 0; k < run.size(); ++k)
                for (auto& r : rows[run_index[k]])
                    if (r.design == to_string(DesignKind::TwoPoint)) r.region_label = to_string(labels[k]);
        }
        run.clear();
        run_index.clear();
    };
    for (std::size_t i = 0; i < ez.size(); ++i) {
        if (reports[i]) {
            run.push_back(*reports[i]);
            run_index.push_back(i);
        } else {
            flush();
        }
    }
    flush();
    return collect(rows);
}

CommandOutput cmd_ser_vs_ez(const ExperimentSpec& spec, const RunOptions& opt) {
    const auto& ch = fixed_channel(spec, "ser-vs-ez");
    require_designs(spec, {DesignKind::TwoPoint, DesignKind::Deterministic, DesignKind::Gaussian, DesignKind::None},
                    "ser-vs-ez");
    const auto b = budget(spec, opt);
    require_fixed_trials(b.trials);
    const InstantaneousContext ctx{constellation_at(spec.modulation, spec.em_over_n0_db), {ch.h, ch.g},
                                   unit_noise()};
    const auto ez = spec.ez_over_n0_db.values();
    const double blind = non_informative_ser(spec.modulation);

    std::vector<std::vector<CsvRow>> rows(ez.size());
    parallel_for(ez.size(), opt.threads, [&](std::size_t i) {
        const double e_z = from_db(ez[i]) * kN0;
        const double p_bar = e_z / kSymbolPeriod;
        auto& out = rows[i];
        for (auto kind : spec.designs) {
            CsvRow row;
            AnGenerator gen = an::None{};
            switch (kind) {
            case DesignKind::TwoPoint: {
                std::optional<DesignReport> rep;
                try {
                    rep = optimize_two_point_instantaneous(p_bar, ctx);
                } catch (const OptimizerError&) {
                    out.push_back(failure_row(ez[i], kind));
                    continue;
                }
                row = law_row(ez[i], kind, rep->law, rep->achieved_ser);
                gen = two_point_for_channel(rep->law, ctx.channel);
                break;
            }
            case DesignKind::Deterministic: {
                const auto best = ser_best_phase(std::sqrt(p_bar), ctx);
                row = law_row(ez[i], kind, TwoPointPowerLaw::deterministic(p_bar, best.phase), best.value);
                gen = deterministic_at_phase(p_bar, phase_angle(best.phase), ctx.channel);
                break;
            }
            case DesignKind::Gaussian:
                row = plain_row(ez[i], to_string(kind), ser_gaussian_an(e_z, ctx));
                gen = an::Gaussian{p_bar};
                break;
            default:
                row = plain_row(ez[i], to_string(kind), ser_awgn(ctx));
                break;
            }
            if (b.trials) attach(row, simulate_ser_fixed_channel(ctx, gen, b.trials, stream(b.seed, i, slot(kind))));
            out.push_back(std::move(row));
        }
        out.push_back(plain_row(ez[i], "non_informative", blind));
    });
    return collect(rows);
}

CommandOutput cmd_aser(const ExperimentSpec& spec, const RunOptions& opt) {
    const auto& ch = rayleigh_channel(spec, "aser");
    const auto b = budget(spec, opt);
    const std::uint64_t blocks = b.trials / spec.symbols_per_block;
    if (b.trials != 0 && blocks < kMinBlocks)
        throw ConfigError("aser: trials / symbols_per_block must be 0 or at least 10^3 blocks");
    if (opt.with_instantaneous_expectation && spec.instantaneous_draws < 200)
        throw ConfigError("run.instantaneous_draws must be at least 200");
    const StatisticalContext sctx{constellation_at(spec.modulation, spec.em_over_n0_db),
                                  {ch.sigma_h_sq, ch.sigma_g_sq}, unit_noise()};
    validate(sctx);
    const auto ez = spec.ez_over_n0_db.values();
    const double blind = non_informative_ser(spec.modulation);

    std::vector<std::vector<CsvRow>> rows(ez.size());
    parallel_for(ez.size(), opt.threads, [&](std::size_t i) {
        const double p_bar = from_db(ez[i]) * kN0 / kSymbolPeriod;
        auto& out = rows[i];
        for (auto kind : spec.designs) {
            CsvRow row;
            AnGenerator gen = an::None{};
            switch (kind) {
            case DesignKind::TwoPoint: {
                std::optional<DesignReport> rep;
                try {
                    rep = optimize_two_point_statistical(p_bar, sctx);
                } catch (const OptimizerError&) {
                    out.push_back(failure_row(ez[i], kind));
                    continue;
                }
                row = law_row(ez[i], kind, rep->law, rep->achieved_ser);
                gen = an::TwoPoint{rep->law, 0.0, 0.0};
                break;
            }
            case DesignKind::Deterministic:
                row = law_row(ez[i], kind, TwoPointPowerLaw::deterministic(p_bar, std::nullopt),
                              aser_fixed_an_power(p_bar, sctx));
                gen = an::Deterministic{p_bar, std::nullopt};
                break;
            case DesignKind::Gaussian:
                // |z|^2 of circular Gaussian AN is exponential with a uniform phase.
                row = plain_row(ez[i], to_string(kind),
                                aser_mixture({PowerDensity::Kind::Exponential, p_bar}, sctx));
                gen = an::Gaussian{p_bar};
                break;
            case DesignKind::UniformPower:
                row = plain_row(ez[i], to_string(kind), aser_mixture({PowerDensity::Kind::Uniform, p_bar}, sctx));
                gen = an::UniformPower{p_bar};
                break;
            case DesignKind::ExponentialPower:
                row = plain_row(ez[i], to_string(kind),
                                aser_mixture({PowerDensity::Kind::Exponential, p_bar}, sctx));
                gen = an::ExponentialPower{p_bar};
                break;
            case DesignKind::None:
                row = plain_row(ez[i], to_string(kind), aser_fixed_an_power(0.0, sctx));
                break;
            }
            if (b.trials)
                attach(row, simulate_aser_rayleigh(sctx, gen, blocks, spec.symbols_per_block,
                                                   stream(b.seed, i, slot(kind))));
            out.push_back(std::move(row));
        }
        if (opt.with_instantaneous_expectation) {
            auto row = plain_row(ez[i], "instantaneous_expectation", std::nullopt);
            try {
                attach(row, simulate_instantaneous_design_over_fading(sctx, p_bar, spec.instantaneous_draws,
                                                                      stream(b.seed, i, kInstantaneousSlot)));
            } catch (const OptimizerError&) {
                row.region_label = "optimizer_failure";
            }
            out.push_back(std::move(row));
        }
        out.push_back(plain_row(ez[i], "non_informative", blind));
    });
    return collect(rows);
}

// ---------------------------------------------------------------------------
// verify

namespace {

struct Verifier {
    std::uint64_t seed;
    std::uint64_t trials;
    int threads;
    double scale;
    VerifyReport report;
    std::uint64_t next_stream = 1;

    void reference(std::string name, double value, double expected, double tolerance) {
        const double tol = tolerance * scale;
        report.checks.push_back({"reference", std::move(name), value, expected, tol,
                                 std::abs(value - expected) <= tol});
    }

    void agree(std::string name, const SerEstimate& est, double analytic) {
        const double tol = 3.0 * est.std_error() * scale;
        report.checks.push_back({"agreement", std::move(name), est.mean, analytic, tol,
                                 std::abs(est.mean - analytic) <= tol});
    }

    RngSpec rng() { return {seed, next_stream++}; }

    void fixed(std::string name, const InstantaneousContext& ctx, const AnGenerator& gen, double analytic) {
        agree(std::move(name), simulate_ser_fixed_channel(ctx, gen, trials, rng(), threads), analytic);
    }

    void fading(std::string name, const StatisticalContext& sctx, const AnGenerator& gen, double analytic) {
        agree(std::move(name), simulate_aser_rayleigh(sctx, gen, trials, 1, rng(), threads), analytic);
    }
};

InstantaneousContext unit_channel(int m, double em_over_n0_db) {
    return {constellation_at(m, em_over_n0_db), {}, unit_noise()};
}

StatisticalContext unit_fading(int m, double em_over_n0_db) {
    return {constellation_at(m, em_over_n0_db), {1.0, 1.0}, unit_noise()};
}

}  // namespace

VerifyReport cmd_verify(std::uint64_t seed, std::uint64_t trials, int threads, double tolerance_scale) {
    if (trials < kMinFixedTrials) throw ConfigError("verify: trials must be at least 10^4");
    Verifier v{seed, trials, threads, tolerance_scale, {}};

    // Fixed-channel worked example: M = 16, a = sqrt(10), sigma^2 = 1/2, P = 3.9811.
    const auto worked = unit_channel(16, 20.0);
    const double worked_p = 3.9811;
    const auto design = optimize_two_point_instantaneous(worked_p, worked);
    const double det = ser_best_phase(std::sqrt(worked_p), worked).value;
    v.reference("worked_example_x1", design.law.x1(), 0.0, 0.05);
    v.reference("worked_example_x2", design.law.x2(), 13.7098, 0.1);
    v.reference("worked_example_ser_tilde_x2", ser_best_phase(std::sqrt(design.law.x2()), worked).value, 0.5832, 0.005);
    v.reference("worked_example_ser_max", design.achieved_ser, 0.1694, 0.001);
    v.reference("worked_example_deterministic", det, 0.0371, 0.001);
    v.reference("worked_example_gain_ratio", design.achieved_ser / det, 4.57, 0.05);

    const auto qpsk = unit_channel(4, 10.0);
    v.reference("no_an_4qam_em10db", ser_awgn(qpsk), 0.0016, 1e-4);
    v.reference("optimal_4qam_em10db_ez2db", optimize_two_point_instantaneous(from_db(2.0), qpsk).achieved_ser, 0.05,
            0.005);
    double worst_high = 1.0;
    for (int db = 16; db <= 30; ++db)
        worst_high = std::min(worst_high, optimize_two_point_instantaneous(from_db(db), qpsk).achieved_ser);
    v.reference("non_informative_4qam_ez16to30db", worst_high, 0.75, 0.01);

    const auto fading16 = unit_fading(16, 10.0);
    const double p30 = from_db(30.0);
    const double worst_aser = std::min({optimize_two_point_statistical(p30, fading16).achieved_ser,
                                        aser_mixture({PowerDensity::Kind::Uniform, p30}, fading16),
                                        aser_mixture({PowerDensity::Kind::Exponential, p30}, fading16)});
    v.reference("non_informative_16qam_aser_ez30db", worst_aser, 15.0 / 16.0, 0.01);

    v.fixed("no_an_4qam_em10db", qpsk, an::None{}, ser_awgn(qpsk));
    v.fixed("two_point_worked_example", worked, two_point_for_channel(design.law, worked.channel),
            design.achieved_ser);
    const cdouble s = cdouble{5.0, 5.0} * worked.noise.sigma();
    v.fixed("effective_an_5p5j_16qam", worked, deterministic_at_phase(std::norm(s), std::arg(s), worked.channel),
            ser_given_s(s, worked));
    v.fixed("qam_phase_16qam", worked, deterministic_at_phase(worked_p, std::numbers::pi / 4.0, worked.channel),
            ser_phase_amp(std::numbers::pi / 4.0, std::sqrt(worked_p), worked));
    v.fixed("gaussian_an_4qam_ez10db", qpsk, an::Gaussian{from_db(10.0)}, ser_gaussian_an(from_db(10.0), qpsk));

    const auto fading4 = unit_fading(4, 10.0);
    const double p10 = from_db(10.0);
    v.fading("aser_no_an_4qam", fading4, an::None{}, aser_fixed_an_power(0.0, fading4));
    v.fading("aser_deterministic_16qam", fading16, an::Deterministic{p10, std::nullopt},
             aser_fixed_an_power(p10, fading16));
    v.fading("aser_two_point_16qam", fading16,
             an::TwoPoint{TwoPointPowerLaw::make(0.0, 2.0 * p10, p10, std::nullopt, std::nullopt), 0.0, 0.0},
             aser_expected_two_point(0.0, 2.0 * p10, p10, fading16));
    v.fading("aser_uniform_16qam", fading16, an::UniformPower{p10},
             aser_mixture({PowerDensity::Kind::Uniform, p10}, fading16));
    v.fading("aser_exponential_16qam", fading16, an::ExponentialPower{p10},
             aser_mixture({PowerDensity::Kind::Exponential, p10}, fading16));
    v.fading("aser_gaussian_16qam", fading16, an::Gaussian{p10},
             aser_mixture({PowerDensity::Kind::Exponential, p10}, fading16));
    return std::move(v.report);
}

bool VerifyReport::all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

std::string VerifyReport::csv() const {
    CsvWriter w("category,check,value,reference,tolerance,status");
    for (const auto& c : checks)
        w.row({c.category, c.name, format_number(c.value), format_number(c.reference), format_number(c.tolerance),
               c.passed ? "pass" : "fail"});
    return w.text();
}

std::string VerifyReport::text() const {
    std::string s;
    std::size_t passed = 0;
    for (const auto& c : checks) {
        passed += c.passed;
        s += c.passed ? "PASS " : "FAIL ";
        s += c.category + "/" + c.name + " value=" + format_number(c.value) +
             " reference=" + format_number(c.reference) + " tolerance=" + format_number(c.tolerance) + "\n";
    }
    s += "verify: " + std::to_string(passed) + "/" + std::to_string(checks.size()) + " checks passed\n";
    return s;
}

std::string run_manifest(const std::string& command, const std::string& config_text, std::uint64_t seed,
                         double wall_seconds) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64(config_text));
    return "command = " + command + "\nconfig_hash = fnv1a64:" + hash + "\nseed = " + std::to_string(seed) +
           "\nversion = " + std::string(library_version()) + "\nwall_time_s = " + format_number(wall_seconds) +
           "\n";
}

std::string_view library_version() noexcept { return ANLAB_VERSION; }

}  // namespace anlab
