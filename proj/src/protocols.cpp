#include "cvclone/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "cvclone/errors.hpp"
#include "cvclone/symplectic.hpp"

namespace cvclone {
namespace {

constexpr double kGainTol = 1e-9;
const double kSqrt2 = std::sqrt(2.0);

struct Ancillae {
    GaussianState a;
    GaussianState b;
};

struct Run {
    GaussianState final;
    std::vector<std::string> names;
    std::vector<std::size_t> clone_modes;
    std::vector<GaussianState> trace;
    std::optional<double> outcome;
};

bool is_measurement_based(ProtocolKind kind) { return kind != ProtocolKind::TwoPass; }

Ancillae default_ancillae(const ProtocolConfig &cfg) {
    switch (cfg.protocol) {
    case ProtocolKind::AsymmetricSinglePass:
        return {make_squeezed_vacuum(cfg.asymmetry_V, Axis::X), make_squeezed_vacuum(cfg.asymmetry_V, Axis::P)};
    default:
        return {make_vacuum(), make_vacuum()};
    }
}

// Light L=0 and atoms A=1, B=2.
constexpr ModeLabel kLight{0, ModeRole::Light};
constexpr ModeLabel kAtomA{1, ModeRole::AtomA};
constexpr ModeLabel kAtomB{2, ModeRole::AtomB};

GaussianState step(std::vector<GaussianState> &trace, const SymplecticOp &op, const GaussianState &s) {
    trace.push_back(apply(op, s));
    return trace.back();
}

Run simulate(const ProtocolConfig &cfg, double ax, double ay, const OutcomeSource &source, const Ancillae &anc) {
    Run run{tensor({make_coherent(ax, ay), anc.a, anc.b}), {}, {}, {}, std::nullopt};
    run.trace.push_back(run.final);
    GaussianState s = run.final;
    const double k = cfg.kappa;
    const double g = cfg.feedback_gain;

    switch (cfg.protocol) {
    case ProtocolKind::TwoPass:
        s = step(run.trace, qnd_xp(k, kLight, kAtomA), s);
        s = step(run.trace, qnd_xp(k, kLight, kAtomB), s);
        s = step(run.trace, qnd_xp(-k, kAtomA, kLight), s);
        s = step(run.trace, qnd_xp(-k, kAtomB, kLight), s);
        run.names = {"L", "A", "B"};
        run.clone_modes = {1, 2};
        break;

    case ProtocolKind::SinglePass:
    case ProtocolKind::AsymmetricSinglePass:
    case ProtocolKind::SqueezePrep: {
        s = step(run.trace, qnd_xp(k, kLight, kAtomA), s);
        s = step(run.trace, qnd_xp(k, kLight, kAtomB), s);
        const FeedbackRule rule{{{kAtomA, Axis::P, g}, {kAtomB, Axis::P, g}}};
        auto fed = measure_and_feed(s, kLight, Axis::P, rule, source);
        if (!fed.marginalized)
            run.outcome = fed.outcome;
        s = fed.state;
        run.trace.push_back(s);
        run.names = {"A", "B"};
        run.clone_modes = {0, 1};
        break;
    }

    case ProtocolKind::AtomsLight:
    case ProtocolKind::AtomsLightUnsqueezed: {
        // Mode 2 is the vacuum port of the beam splitter and carries clone B.
        s = step(run.trace, qnd_xp(k, kLight, kAtomA), s);
        s = step(run.trace, beam_splitter_balanced(kLight, ModeLabel{2, ModeRole::Light}), s);
        const FeedbackRule rule{{{kAtomA, Axis::P, kSqrt2 * g}, {ModeLabel{2}, Axis::P, g}}};
        auto fed = measure_and_feed(s, kLight, Axis::P, rule, source);
        if (!fed.marginalized)
            run.outcome = fed.outcome;
        s = fed.state;
        run.trace.push_back(s);
        if (cfg.protocol == ProtocolKind::AtomsLightUnsqueezed)
            s = step(run.trace, squeezer(kSqrt2, ModeLabel{1}), s);
        run.names = {"A", "B"};
        run.clone_modes = {0, 1};
        break;
    }
    }
    run.final = s;
    return run;
}

GaussianState clone_state(const Run &run, std::size_t i) { return reduced_state(run.final, {ModeLabel{run.clone_modes[i]}}); }

std::vector<double> analytic_fidelities(const ProtocolConfig &cfg) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool design_point = cfg.kappa == 1.0 && cfg.feedback_gain == 1.0;
    if (!design_point)
        return {nan, nan};
    switch (cfg.protocol) {
    case ProtocolKind::TwoPass:
    case ProtocolKind::SinglePass:
    case ProtocolKind::AtomsLightUnsqueezed:
        return {2.0 / 3.0, 2.0 / 3.0};
    case ProtocolKind::AtomsLight: {
        // Raw light clone: mean (ax/sqrt2, sqrt2 ap), variances (1/2, 2).
        const double dx = cfg.alpha_x / kSqrt2 - cfg.alpha_x;
        const double dp = kSqrt2 * cfg.alpha_p - cfg.alpha_p;
        const double fb = std::exp(-0.5 * (dx * dx / 1.0 + dp * dp / 2.5)) / std::sqrt(1.0 * 2.5);
        return {2.0 / 3.0, fb};
    }
    case ProtocolKind::AsymmetricSinglePass:
    case ProtocolKind::SqueezePrep: {
        const double v = cfg.asymmetry_V;
        return {1.0 / (1.0 + v), 4.0 * v / (4.0 * v + 1.0)};
    }
    }
    return {nan, nan};
}

template <class F>
void parallel_for(std::size_t n, F &&body) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers)
                    body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto &t : pool)
        t.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

ProtocolReport build_report(const ProtocolConfig &cfg, const Ancillae &anc) {
    cfg.validate();
    const Run run = simulate(cfg, cfg.alpha_x, cfg.alpha_p, cfg.outcome, anc);

    // The deterministic channel: outcome averaged out.
    const auto marg = OutcomeSource::marginalized();
    const Run at_alpha = simulate(cfg, cfg.alpha_x, cfg.alpha_p, marg, anc);
    const Run at_zero = simulate(cfg, 0.0, 0.0, marg, anc);
    const Run at_x = simulate(cfg, 1.0, 0.0, marg, anc);
    const Run at_p = simulate(cfg, 0.0, 1.0, marg, anc);

    const auto analytic = analytic_fidelities(cfg);

    ProtocolReport report{cfg, {}, run.final, run.names, {}, run.trace, run.outcome};
    for (std::size_t i = 0; i < run.clone_modes.size(); ++i) {
        const auto state = clone_state(run, i);
        CloneReport c;
        c.name = run.names[run.clone_modes[i]];
        c.mean = state.mean();
        c.cov = state.cov();
        c.fidelity = fidelity_with_coherent(state, cfg.alpha_x, cfg.alpha_p);
        c.analytic_fidelity = analytic[i];

        const Eigen::Vector2d m0 = clone_state(at_zero, i).mean();
        c.mean_gain.col(0) = clone_state(at_x, i).mean() - m0;
        c.mean_gain.col(1) = clone_state(at_p, i).mean() - m0;
        const bool unit_gain = (c.mean_gain - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= kGainTol;
        c.universal_fidelity = unit_gain ? fidelity_with_coherent(clone_state(at_alpha, i), cfg.alpha_x, cfg.alpha_p) : 0.0;
        report.clones.push_back(std::move(c));
    }

    if (cfg.outcome.kind == OutcomeSource::Kind::Sampled && cfg.trials > 1 && is_measurement_based(cfg.protocol)) {
        const auto mc = run_montecarlo(cfg, false);
        for (std::size_t i = 0; i < report.clones.size(); ++i) {
            report.clones[i].fidelity = mc.clones[i].mean_fidelity;
            report.clones[i].fidelity_stderr = mc.clones[i].fidelity_stderr;
        }
    }
    return report;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Ancillae ancillae_for(const ProtocolConfig &cfg, std::vector<GaussianState> *prepared) {
    if (cfg.protocol != ProtocolKind::SqueezePrep)
        return default_ancillae(cfg);
    auto prep = run_squeeze_prep(cfg);
    if (prepared) {
        prepared->push_back(prep.atom_a);
        prepared->push_back(prep.atom_b);
    }
    return {prep.atom_a, prep.atom_b};
}

} // namespace

std::string to_string(ProtocolKind kind) {
    switch (kind) {
    case ProtocolKind::TwoPass:
        return "two-pass";
    case ProtocolKind::SinglePass:
        return "single-pass";
    case ProtocolKind::AtomsLight:
        return "atoms-light";
    case ProtocolKind::AtomsLightUnsqueezed:
        return "atoms-light-unsqueezed";
    case ProtocolKind::AsymmetricSinglePass:
        return "asymmetric";
    case ProtocolKind::SqueezePrep:
        return "squeeze-prep";
    }
    return "?";
}

ProtocolKind protocol_from_string(const std::string &name) {
    for (auto kind : {ProtocolKind::TwoPass, ProtocolKind::SinglePass, ProtocolKind::AtomsLight,
                      ProtocolKind::AtomsLightUnsqueezed, ProtocolKind::AsymmetricSinglePass,
                      ProtocolKind::SqueezePrep})
        if (to_string(kind) == name)
            return kind;
    throw DomainError("unknown protocol '" + name + "'");
}

void ProtocolConfig::validate() const {
    if (!std::isfinite(alpha_x) || !std::isfinite(alpha_p))
        throw DomainError("alpha must be finite");
    if (!(asymmetry_V > 0.0) || !std::isfinite(asymmetry_V))
        throw DomainError("V must be positive");
    if (!std::isfinite(kappa) || !std::isfinite(feedback_gain))
        throw DomainError("kappa and feedback gain must be finite");
    if (trials < 1)
        throw DomainError("trials must be at least 1");
    if (protocol == ProtocolKind::SqueezePrep && !(asymmetry_V < 0.5))
        throw DomainError("squeeze preparation needs 0 < V < 1/2");
}

const CloneReport &ProtocolReport::clone(const std::string &name) const {
    for (const auto &c : clones)
        if (c.name == name)
            return c;
    throw DomainError("report has no clone '" + name + "'");
}

ProtocolReport run_two_pass(const ProtocolConfig &cfg) {
    if (cfg.protocol != ProtocolKind::TwoPass)
        throw DomainError("run_two_pass needs protocol two-pass");
    return build_report(cfg, default_ancillae(cfg));
}

ProtocolReport run_single_pass(const ProtocolConfig &cfg) {
    if (cfg.protocol != ProtocolKind::SinglePass)
        throw DomainError("run_single_pass needs protocol single-pass");
    return build_report(cfg, default_ancillae(cfg));
}

ProtocolReport run_atoms_light(const ProtocolConfig &cfg) {
    if (cfg.protocol != ProtocolKind::AtomsLight && cfg.protocol != ProtocolKind::AtomsLightUnsqueezed)
        throw DomainError("run_atoms_light needs protocol atoms-light or atoms-light-unsqueezed");
    return build_report(cfg, default_ancillae(cfg));
}

ProtocolReport run_asymmetric(const ProtocolConfig &cfg) {
    if (cfg.protocol != ProtocolKind::AsymmetricSinglePass)
        throw DomainError("run_asymmetric needs protocol asymmetric");
    return build_report(cfg, default_ancillae(cfg));
}

double squeeze_prep_kappa(double variance) {
    if (!(variance > 0.0) || !(variance < 0.5))
        throw DomainError("squeeze preparation needs 0 < V < 1/2");
    return std::sqrt(0.25 / variance - 0.5);
}

SqueezePrepResult run_squeeze_prep(const ProtocolConfig &cfg) {
    if (!(cfg.asymmetry_V > 0.0) || !(cfg.asymmetry_V < 0.5))
        throw DomainError("squeeze preparation needs 0 < V < 1/2");
    const double kappa = squeeze_prep_kappa(cfg.asymmetry_V);

    // A=0, B=1, probes 2 and 3. Probe P couples through H = p_P (x_A +- p_B),
    // i.e. x_P picks up kappa (x_A +- p_B); the QND variable is untouched.
    const ModeLabel a{0, ModeRole::AtomA}, b{1, ModeRole::AtomB};
    SqueezePrepResult result{make_vacuum(), make_vacuum(), kappa, {}, {}};
    GaussianState s = make_vacuum(4);
    result.trace.push_back(s);

    auto probe = [&](std::size_t probe_index, double sign, std::uint64_t seed_salt) {
        const ModeLabel p{probe_index, ModeRole::Light};
        s = step(result.trace, qnd_xp(kappa, a, p), s);
        s = step(result.trace, qnd_pp(sign * kappa, b, p), s);

        OutcomeSource src = cfg.outcome;
        if (src.kind == OutcomeSource::Kind::Sampled)
            src.seed = splitmix64(src.seed ^ seed_salt);

        // Cancel the acquired coherent component with the conditional-mean gain.
        const auto probe_stats = homodyne(s, p, Axis::X, OutcomeSource::mean_value());
        FeedbackRule zeroing;
        for (std::size_t m = 0; m + 1 < s.num_modes(); ++m)
            for (Axis axis : {Axis::X, Axis::P}) {
                const double k = probe_stats.gain(static_cast<Eigen::Index>(quadrature_index(m, axis)));
                if (k != 0.0)
                    zeroing.gains.push_back({ModeLabel{m < probe_index ? m : m + 1}, axis, -k});
            }
        // The probe mean is the prior mean of the record; feedback acts on the
        // deviation from it, which equals the raw outcome here (all means zero).
        auto fed = measure_and_feed(s, p, Axis::X, zeroing, src);
        if (!fed.marginalized)
            result.outcomes.push_back(fed.outcome);
        s = fed.state;
        result.trace.push_back(s);
    };
    probe(2, +1.0, 0x51);
    probe(2, -1.0, 0x52); // the first probe was removed; the second now sits at index 2

    result.atom_a = reduced_state(s, {ModeLabel{0}});
    result.atom_b = reduced_state(s, {ModeLabel{1}});
    return result;
}

ProtocolReport run_squeeze_prep_cloner(const ProtocolConfig &cfg) {
    if (cfg.protocol != ProtocolKind::SqueezePrep)
        throw DomainError("run_squeeze_prep_cloner needs protocol squeeze-prep");
    cfg.validate();
    std::vector<GaussianState> prepared;
    const auto anc = ancillae_for(cfg, &prepared);
    auto report = build_report(cfg, anc);
    report.prepared_ancillae = std::move(prepared);
    return report;
}

ProtocolReport run_protocol(const ProtocolConfig &cfg) {
    switch (cfg.protocol) {
    case ProtocolKind::TwoPass:
        return run_two_pass(cfg);
    case ProtocolKind::SinglePass:
        return run_single_pass(cfg);
    case ProtocolKind::AtomsLight:
    case ProtocolKind::AtomsLightUnsqueezed:
        return run_atoms_light(cfg);
    case ProtocolKind::AsymmetricSinglePass:
        return run_asymmetric(cfg);
    case ProtocolKind::SqueezePrep:
        return run_squeeze_prep_cloner(cfg);
    }
    throw DomainError("unknown protocol");
}

SweepParameter sweep_parameter_from_string(const std::string &name) {
    if (name == "V")
        return SweepParameter::V;
    if (name == "kappa")
        return SweepParameter::Kappa;
    if (name == "gain")
        return SweepParameter::Gain;
    throw DomainError("unknown sweep parameter '" + name + "'");
}

std::string to_string(SweepParameter p) {
    switch (p) {
    case SweepParameter::V:
        return "V";
    case SweepParameter::Kappa:
        return "kappa";
    case SweepParameter::Gain:
        return "gain";
    }
    return "?";
}

std::vector<double> grid(double start, double stop, double step) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) || !(step > 0.0))
        throw DomainError("grid needs finite bounds and a positive step");
    if (stop < start)
        throw DomainError("empty range");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = start + static_cast<double>(i) * step;
    return values;
}

std::vector<ProtocolReport> sweep(SweepParameter parameter, const std::vector<double> &values,
                                  const ProtocolConfig &cfg) {
    if (values.empty())
        throw DomainError("empty range");
    std::vector<std::optional<ProtocolReport>> rows(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        ProtocolConfig c = cfg;
        switch (parameter) {
        case SweepParameter::V:
            c.asymmetry_V = values[i];
            break;
        case SweepParameter::Kappa:
            c.kappa = values[i];
            break;
        case SweepParameter::Gain:
            c.feedback_gain = values[i];
            break;
        }
        rows[i] = run_protocol(c);
    });
    std::vector<ProtocolReport> out;
    out.reserve(rows.size());
    for (auto &r : rows)
        out.push_back(std::move(*r));
    return out;
}

std::uint64_t trial_seed(std::uint64_t root_seed, std::uint64_t trial) {
    return splitmix64(root_seed ^ splitmix64(trial));
}

std::string covariance_digest(const Matrix &cov) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index r = 0; r < cov.rows(); ++r)
        for (Eigen::Index c = 0; c < cov.cols(); ++c) {
            char buf[32];
            const int len = std::snprintf(buf, sizeof buf, "%.12e", cov(r, c));
            for (int i = 0; i < len; ++i) {
                h ^= static_cast<unsigned char>(buf[i]);
                h *= 0x100000001b3ULL;
            }
        }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

MonteCarloSummary run_montecarlo(const ProtocolConfig &cfg, bool keep_records) {
    cfg.validate();
    if (!is_measurement_based(cfg.protocol))
        throw DomainError("Monte Carlo needs a measurement-based protocol");

    const auto anc = ancillae_for(cfg, nullptr);
    const std::size_t n = cfg.trials;
    const std::uint64_t root = cfg.outcome.seed;

    struct Trial {
        double outcome;
        std::vector<Eigen::Vector2d> means;
        std::vector<double> fidelities;
        Matrix cov;
    };
    std::vector<Trial> trials(n);
    parallel_for(n, [&](std::size_t t) {
        const Run run = simulate(cfg, cfg.alpha_x, cfg.alpha_p, OutcomeSource::sampled(trial_seed(root, t)), anc);
        Trial tr{run.outcome.value_or(0.0), {}, {}, run.final.cov()};
        for (std::size_t i = 0; i < run.clone_modes.size(); ++i) {
            const auto c = clone_state(run, i);
            tr.means.push_back(c.mean());
            tr.fidelities.push_back(fidelity_with_coherent(c, cfg.alpha_x, cfg.alpha_p));
        }
        trials[t] = std::move(tr);
    });

    const Run reference = simulate(cfg, cfg.alpha_x, cfg.alpha_p, OutcomeSource::marginalized(), anc);
    const auto analytic = analytic_fidelities(cfg);
    MonteCarloSummary summary{cfg, n, root, {}, {}};
    const double nd = static_cast<double>(n);

    for (std::size_t i = 0; i < reference.clone_modes.size(); ++i) {
        MonteCarloClone c;
        c.name = reference.names[reference.clone_modes[i]];
        const auto ref = clone_state(reference, i);
        c.analytic_mean = ref.mean();
        c.analytic_cov = ref.cov();
        c.analytic_fidelity = analytic[i];

        Eigen::Vector2d sum_m = Eigen::Vector2d::Zero();
        double sum_f = 0.0;
        for (const auto &tr : trials) {
            sum_m += tr.means[i];
            sum_f += tr.fidelities[i];
        }
        c.empirical_mean = sum_m / nd;
        c.mean_fidelity = sum_f / nd;

        Eigen::Matrix2d spread = Eigen::Matrix2d::Zero();
        double var_f = 0.0;
        for (const auto &tr : trials) {
            const Eigen::Vector2d d = tr.means[i] - c.empirical_mean;
            spread += d * d.transpose();
            var_f += (tr.fidelities[i] - c.mean_fidelity) * (tr.fidelities[i] - c.mean_fidelity);
        }
        const double dof = n > 1 ? nd - 1.0 : 1.0;
        spread /= dof;
        var_f /= dof;

        // Conditional covariance is outcome independent; use trial 0's.
        const auto q = static_cast<Eigen::Index>(2 * reference.clone_modes[i]);
        const Eigen::Matrix2d conditional = trials.front().cov.block(q, q, 2, 2);
        c.empirical_cov = conditional + spread;
        c.mean_stderr = (spread.diagonal() / nd).cwiseSqrt();
        c.fidelity_stderr = std::sqrt(var_f / nd);
        summary.clones.push_back(std::move(c));
    }

    if (keep_records) {
        summary.records.reserve(n);
        for (std::size_t t = 0; t < n; ++t)
            summary.records.push_back({t, trials[t].outcome, trials[t].means, covariance_digest(trials[t].cov)});
    }
    return summary;
}

void check_report_invariants(const ProtocolReport &report) {
    for (const auto &s : report.trace) {
        const auto nu = s.symplectic_eigenvalues();
        if (nu.front() < kVacuumVariance - kStructuralTol)
            throw InvariantViolation("uncertainty", "symplectic eigenvalue " + std::to_string(nu.front()) + " < 1/2");
    }
    for (const auto &c : report.clones) {
        if (!(c.fidelity > 0.0 && c.fidelity <= 1.0 + 1e-12))
            throw InvariantViolation("fidelity-range", "clone " + c.name + " fidelity " + std::to_string(c.fidelity));
        if (!(c.universal_fidelity >= 0.0 && c.universal_fidelity <= 1.0 + 1e-12))
            throw InvariantViolation("fidelity-range", "clone " + c.name + " universal fidelity out of range");
    }
    const auto kind = report.config.protocol;
    const bool symmetric = kind == ProtocolKind::TwoPass || kind == ProtocolKind::SinglePass ||
                           kind == ProtocolKind::AtomsLightUnsqueezed ||
                           ((kind == ProtocolKind::AsymmetricSinglePass) && report.config.asymmetry_V == 0.5);
    const bool deterministic = report.config.outcome.kind == OutcomeSource::Kind::Marginalized;
    if (symmetric && deterministic && report.clones.size() == 2 &&
        std::abs(report.clones[0].universal_fidelity - report.clones[1].universal_fidelity) > 1e-12)
        throw InvariantViolation("symmetric-clones", "clones A and B have different fidelities");
}

} // namespace cvclone
