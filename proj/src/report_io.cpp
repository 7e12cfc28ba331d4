#include "cvclone/report_io.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace cvclone {
namespace {

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

nlohmann::json vec2(const Eigen::Vector2d &v) { return nlohmann::json::array({v(0), v(1)}); }

nlohmann::json mat2(const Eigen::Matrix2d &m) {
    return nlohmann::json::array({nlohmann::json::array({m(0, 0), m(0, 1)}), nlohmann::json::array({m(1, 0), m(1, 1)})});
}

std::string outcome_kind(OutcomeSource::Kind k) {
    switch (k) {
    case OutcomeSource::Kind::Sampled:
        return "sampled";
    case OutcomeSource::Kind::Forced:
        return "forced";
    case OutcomeSource::Kind::MeanValue:
        return "mean";
    case OutcomeSource::Kind::Marginalized:
        return "marginalized";
    }
    return "?";
}

std::string csv_number(double v) {
    if (std::isnan(v))
        return "";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double abs_difference(const CloneReport &c) { return std::abs(c.fidelity - c.analytic_fidelity); }

} // namespace

nlohmann::json config_to_json(const ProtocolConfig &cfg) {
    nlohmann::json outcome{{"kind", outcome_kind(cfg.outcome.kind)}};
    if (cfg.outcome.kind == OutcomeSource::Kind::Forced)
        outcome["value"] = cfg.outcome.value;
    if (cfg.outcome.kind == OutcomeSource::Kind::Sampled)
        outcome["seed"] = cfg.outcome.seed;
    return {{"protocol", to_string(cfg.protocol)},
            {"alpha", nlohmann::json::array({cfg.alpha_x, cfg.alpha_p})},
            {"V", cfg.asymmetry_V},
            {"kappa", cfg.kappa},
            {"gain", cfg.feedback_gain},
            {"outcome", outcome},
            {"trials", cfg.trials}};
}

nlohmann::json report_to_json(const ProtocolReport &report) {
    nlohmann::json clones = nlohmann::json::array();
    for (const auto &c : report.clones)
        clones.push_back({{"name", c.name},
                          {"fidelity", c.fidelity},
                          {"fidelity_stderr", c.fidelity_stderr},
                          {"universal_fidelity", c.universal_fidelity},
                          {"analytic_fidelity", number_or_null(c.analytic_fidelity)},
                          {"abs_difference", number_or_null(abs_difference(c))},
                          {"mean_gain", mat2(c.mean_gain)},
                          {"mean", vec2(c.mean)},
                          {"cov", mat2(c.cov)}});

    nlohmann::json out{{"schema", kReportSchema},
                       {"config", config_to_json(report.config)},
                       {"clones", clones},
                       {"output_modes", report.output_modes},
                       {"output", report.output},
                       {"outcome", report.outcome ? nlohmann::json(*report.outcome) : nlohmann::json(nullptr)}};
    if (!report.prepared_ancillae.empty())
        out["prepared_ancillae"] = report.prepared_ancillae;
    return out;
}

nlohmann::json record_to_json(const TrajectoryRecord &record) {
    nlohmann::json means = nlohmann::json::array();
    for (const auto &m : record.clone_means)
        means.push_back(vec2(m));
    return {{"trial", record.trial},
            {"outcome", record.outcome},
            {"clone_means", means},
            {"clone_cov_digest", record.clone_cov_digest}};
}

nlohmann::json summary_to_json(const MonteCarloSummary &summary) {
    nlohmann::json clones = nlohmann::json::array();
    for (const auto &c : summary.clones) {
        const Eigen::Matrix2d cov_dev = c.empirical_cov - c.analytic_cov;
        const Eigen::Vector2d mean_dev = c.empirical_mean - c.analytic_mean;
        clones.push_back({{"name", c.name},
                          {"empirical_mean", vec2(c.empirical_mean)},
                          {"mean_stderr", vec2(c.mean_stderr)},
                          {"analytic_mean", vec2(c.analytic_mean)},
                          {"mean_abs_difference", vec2(mean_dev.cwiseAbs())},
                          {"empirical_cov", mat2(c.empirical_cov)},
                          {"analytic_cov", mat2(c.analytic_cov)},
                          {"cov_max_abs_difference", cov_dev.cwiseAbs().maxCoeff()},
                          {"mean_fidelity", c.mean_fidelity},
                          {"fidelity_stderr", c.fidelity_stderr},
                          {"analytic_fidelity", number_or_null(c.analytic_fidelity)},
                          {"fidelity_abs_difference", number_or_null(std::abs(c.mean_fidelity - c.analytic_fidelity))}});
    }
    return {{"schema", kReportSchema},
            {"config", config_to_json(summary.config)},
            {"trials", summary.trials},
            {"root_seed", summary.root_seed},
            {"clones", clones}};
}

std::vector<std::string> csv_header() {
    std::vector<std::string> h{"protocol", "alpha_x", "alpha_p", "V", "kappa", "gain"};
    for (const char *c : {"A", "B"})
        for (const char *field : {"fidelity", "universal_fidelity", "analytic_fidelity", "abs_difference", "mean_x",
                                  "mean_p", "var_x", "var_p"})
            h.push_back(std::string(c) + "_" + field);
    return h;
}

void write_csv(std::ostream &os, const std::vector<ProtocolReport> &reports) {
    os << kCsvSchemaLine << "\n";
    const auto header = csv_header();
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto &r : reports) {
        const auto &cfg = r.config;
        os << to_string(cfg.protocol) << "," << csv_number(cfg.alpha_x) << "," << csv_number(cfg.alpha_p) << ","
           << csv_number(cfg.asymmetry_V) << "," << csv_number(cfg.kappa) << "," << csv_number(cfg.feedback_gain);
        for (const auto &c : r.clones)
            os << "," << csv_number(c.fidelity) << "," << csv_number(c.universal_fidelity) << ","
               << csv_number(c.analytic_fidelity) << "," << csv_number(abs_difference(c)) << ","
               << csv_number(c.mean(0)) << "," << csv_number(c.mean(1)) << "," << csv_number(c.cov(0, 0)) << ","
               << csv_number(c.cov(1, 1));
        os << "\n";
    }
}

void write_pretty(std::ostream &os, const ProtocolReport &report) {
    const auto &cfg = report.config;
    os << "protocol " << to_string(cfg.protocol) << "  alpha=(" << cfg.alpha_x << ", " << cfg.alpha_p
       << ")  V=" << cfg.asymmetry_V << "  kappa=" << cfg.kappa << "  gain=" << cfg.feedback_gain << "\n";
    os << std::fixed << std::setprecision(12);
    for (const auto &c : report.clones) {
        os << "  clone " << c.name << "\n";
        os << "    fidelity at alpha          " << c.fidelity << "\n";
        os << "    worst case over inputs     " << c.universal_fidelity << "\n";
        if (!std::isnan(c.analytic_fidelity))
            os << "    closed form                " << c.analytic_fidelity << "  |diff| " << std::scientific
               << std::setprecision(2) << abs_difference(c) << std::fixed << std::setprecision(12) << "\n";
        os << "    mean                       (" << c.mean(0) << ", " << c.mean(1) << ")\n";
        os << "    variances (x, p)           (" << c.cov(0, 0) << ", " << c.cov(1, 1) << ")\n";
    }
    os << std::defaultfloat;
}

void write_pretty(std::ostream &os, const MonteCarloSummary &summary) {
    os << "monte carlo  protocol " << to_string(summary.config.protocol) << "  trials=" << summary.trials
       << "  seed=" << summary.root_seed << "\n";
    os << std::setprecision(8);
    for (const auto &c : summary.clones) {
        os << "  clone " << c.name << "\n";
        os << "    empirical mean   (" << c.empirical_mean(0) << ", " << c.empirical_mean(1) << ")  +/- ("
           << c.mean_stderr(0) << ", " << c.mean_stderr(1) << ")\n";
        os << "    analytic mean    (" << c.analytic_mean(0) << ", " << c.analytic_mean(1) << ")\n";
        os << "    empirical cov    [[" << c.empirical_cov(0, 0) << ", " << c.empirical_cov(0, 1) << "], ["
           << c.empirical_cov(1, 0) << ", " << c.empirical_cov(1, 1) << "]]\n";
        os << "    mean fidelity    " << c.mean_fidelity << " +/- " << c.fidelity_stderr << "  (closed form "
           << c.analytic_fidelity << ")\n";
    }
    os << std::defaultfloat;
}

} // namespace cvclone
