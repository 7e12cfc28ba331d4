#include "cvclone/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cvclone/errors.hpp"
#include "cvclone/feasibility.hpp"
#include "cvclone/protocols.hpp"
#include "cvclone/report_io.hpp"

namespace cvclone::cli {
namespace {

// Raised for anything the user can fix by changing arguments or config.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::string protocol;
    std::string alpha;
    std::optional<double> V, kappa, gain;
    std::optional<std::uint64_t> trials, seed;
    std::string outcome;
    std::string format = "json";
    std::string out_path;

    // sweep
    std::string param = "V";
    std::optional<double> from, to, step;

    // montecarlo
    std::string log_path;

    // feasibility
    std::string params_path;
    std::optional<double> optical_density, margin;
};

std::pair<double, double> parse_pair(const std::string &text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ConfigError("--alpha expects X,P");
    try {
        std::size_t used_x = 0, used_p = 0;
        const double x = std::stod(text.substr(0, comma), &used_x);
        const double p = std::stod(text.substr(comma + 1), &used_p);
        if (used_x != comma || used_p != text.size() - comma - 1)
            throw ConfigError("--alpha expects X,P");
        return {x, p};
    } catch (const std::logic_error &) {
        throw ConfigError("--alpha expects two numbers X,P");
    }
}

nlohmann::json load_json(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
}

OutcomeSource parse_outcome(const std::string &text, std::uint64_t seed) {
    if (text.empty() || text == "marginalized")
        return OutcomeSource::marginalized();
    if (text == "mean")
        return OutcomeSource::mean_value();
    if (text == "sampled")
        return OutcomeSource::sampled(seed);
    if (text.rfind("forced:", 0) == 0) {
        try {
            return OutcomeSource::forced(std::stod(text.substr(7)));
        } catch (const std::logic_error &) {
            throw ConfigError("--outcome forced:<value> needs a number");
        }
    }
    throw ConfigError("unknown outcome source '" + text + "'");
}

// File values first, then flags on top.
ProtocolConfig build_config(const Options &o, const std::string &default_outcome) {
    ProtocolConfig cfg;
    std::string outcome = default_outcome;
    std::uint64_t seed = 0;
    std::string protocol = "two-pass";

    try {
        if (!o.config_path.empty()) {
            const auto j = load_json(o.config_path);
            protocol = j.value("protocol", protocol);
            if (j.contains("alpha")) {
                const auto a = j.at("alpha").get<std::vector<double>>();
                if (a.size() != 2)
                    throw ConfigError("config 'alpha' must have two entries");
                cfg.alpha_x = a[0];
                cfg.alpha_p = a[1];
            }
            cfg.asymmetry_V = j.value("V", cfg.asymmetry_V);
            cfg.kappa = j.value("kappa", cfg.kappa);
            cfg.feedback_gain = j.value("gain", cfg.feedback_gain);
            cfg.trials = j.value("trials", cfg.trials);
            seed = j.value("seed", seed);
            outcome = j.value("outcome", outcome);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }

    if (!o.protocol.empty())
        protocol = o.protocol;
    if (!o.alpha.empty())
        std::tie(cfg.alpha_x, cfg.alpha_p) = parse_pair(o.alpha);
    if (o.V)
        cfg.asymmetry_V = *o.V;
    if (o.kappa)
        cfg.kappa = *o.kappa;
    if (o.gain)
        cfg.feedback_gain = *o.gain;
    if (o.trials)
        cfg.trials = *o.trials;
    if (o.seed)
        seed = *o.seed;
    if (!o.outcome.empty())
        outcome = o.outcome;

    try {
        cfg.protocol = protocol_from_string(protocol);
        cfg.outcome = parse_outcome(outcome, seed);
        cfg.validate();
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

class Sink {
  public:
    Sink(const std::string &path, std::ostream &fallback) {
        if (path.empty() || path == "-") {
            os_ = &fallback;
        } else {
            file_.open(path);
            if (!file_)
                throw ConfigError("cannot write to '" + path + "'");
            os_ = &file_;
        }
    }
    std::ostream &stream() { return *os_; }

  private:
    std::ofstream file_;
    std::ostream *os_ = nullptr;
};

void check_format(const std::string &format) {
    if (format != "json" && format != "csv" && format != "pretty")
        throw ConfigError("unknown format '" + format + "'");
}

int cmd_run(const Options &o, std::ostream &out) {
    check_format(o.format);
    const auto cfg = build_config(o, "marginalized");
    Sink sink(o.out_path, out);
    const auto report = run_protocol(cfg);
    check_report_invariants(report);
    if (o.format == "json")
        sink.stream() << report_to_json(report).dump(2) << "\n";
    else if (o.format == "csv")
        write_csv(sink.stream(), {report});
    else
        write_pretty(sink.stream(), report);
    return kExitOk;
}

int cmd_sweep(const Options &o, std::ostream &out) {
    check_format(o.format);
    const auto cfg = build_config(o, "marginalized");
    if (!o.from || !o.to || !o.step)
        throw ConfigError("sweep needs --from, --to and --step");
    SweepParameter parameter;
    std::vector<double> values;
    try {
        parameter = sweep_parameter_from_string(o.param);
        values = grid(*o.from, *o.to, *o.step);
        for (double v : values) {
            ProtocolConfig probe = cfg;
            if (parameter == SweepParameter::V)
                probe.asymmetry_V = v;
            probe.validate();
        }
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }

    Sink sink(o.out_path, out);
    const auto reports = sweep(parameter, values, cfg);
    for (const auto &r : reports)
        check_report_invariants(r);

    if (o.format == "csv") {
        write_csv(sink.stream(), reports);
    } else if (o.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &r : reports)
            rows.push_back(report_to_json(r));
        sink.stream() << nlohmann::json{{"parameter", to_string(parameter)}, {"values", values}, {"rows", rows}}.dump(2)
                      << "\n";
    } else {
        for (const auto &r : reports)
            write_pretty(sink.stream(), r);
    }
    return kExitOk;
}

int cmd_montecarlo(const Options &o, std::ostream &out) {
    check_format(o.format);
    if (o.format == "csv")
        throw ConfigError("montecarlo supports json and pretty formats");
    auto cfg = build_config(o, "sampled");
    if (cfg.outcome.kind != OutcomeSource::Kind::Sampled)
        cfg.outcome = OutcomeSource::sampled(cfg.outcome.seed);

    Sink log(o.log_path, out);
    Sink sink(o.out_path, out);
    MonteCarloSummary summary;
    try {
        summary = run_montecarlo(cfg, !o.log_path.empty());
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    for (const auto &r : summary.records)
        log.stream() << record_to_json(r).dump() << "\n";
    if (o.format == "json")
        sink.stream() << summary_to_json(summary).dump(2) << "\n";
    else
        write_pretty(sink.stream(), summary);
    return kExitOk;
}

int cmd_feasibility(const Options &o, std::ostream &out) {
    check_format(o.format);
    feasibility::CouplingParams params;
    double margin = 10.0;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!o.params_path.empty())
            j = load_json(o.params_path);
        if (o.kappa)
            j["kappa"] = *o.kappa;
        if (o.optical_density)
            j["optical_density"] = *o.optical_density;
        if (j.contains("margin"))
            margin = j.at("margin").get<double>();
        if (o.margin)
            margin = *o.margin;
        params = feasibility::params_from_json(j);
        feasibility::kappa_from_physical(params);
        if (!(margin > 0.0) || !(params.optical_density > 0.0))
            throw DomainError("margin and optical density must be positive");
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("bad parameter value: ") + e.what());
    }

    const auto report = feasibility::feasibility_check(params, margin);
    Sink sink(o.out_path, out);
    if (o.format == "json") {
        nlohmann::json j = report;
        sink.stream() << j.dump(2) << "\n";
    } else if (o.format == "csv") {
        sink.stream() << "# cvclone-feasibility-csv v1\nkappa,eta,bound,margin,pass,required_optical_density\n"
                      << std::setprecision(17) << report.kappa << "," << report.eta << "," << report.bound << ","
                      << report.margin << "," << (report.pass ? "true" : "false") << ","
                      << report.required_optical_density << "\n";
    } else {
        sink.stream() << "coupling kappa                 " << report.kappa << "\n"
                      << "spontaneous emission eta       " << report.eta << "  (kappa^2 / optical density)\n"
                      << "bound 1/(1+kappa^2)            " << report.bound << "\n"
                      << "margin                         " << report.margin << "\n"
                      << "optical density needed         " << report.required_optical_density << "\n"
                      << "result                         " << (report.pass ? "PASS" : "FAIL") << "\n";
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Gaussian simulator for light-to-atoms coherent-state cloning"};
    app.require_subcommand(1);
    Options o;

    auto add_protocol_flags = [&o](CLI::App *sub) {
        sub->add_option("--config", o.config_path, "JSON config file; flags override its values");
        sub->add_option("--protocol", o.protocol,
                        "two-pass | single-pass | atoms-light | atoms-light-unsqueezed | asymmetric | squeeze-prep");
        sub->add_option("--alpha", o.alpha, "input coherent amplitude as X,P");
        sub->add_option("--V", o.V, "squeezed ancilla variance");
        sub->add_option("--kappa", o.kappa, "light-atom coupling strength");
        sub->add_option("--gain", o.gain, "feedback gain scale");
        sub->add_option("--trials", o.trials, "number of trials");
        sub->add_option("--seed", o.seed, "root seed for sampled outcomes");
        sub->add_option("--outcome", o.outcome, "marginalized | mean | sampled | forced:<value>");
        sub->add_option("--format", o.format, "json | csv | pretty");
        sub->add_option("--out", o.out_path, "output file (default stdout)");
    };

    auto *run_cmd = app.add_subcommand("run", "run one protocol");
    add_protocol_flags(run_cmd);

    auto *sweep_cmd = app.add_subcommand("sweep", "grid sweep over V, kappa or gain");
    add_protocol_flags(sweep_cmd);
    sweep_cmd->add_option("--param", o.param, "V | kappa | gain");
    sweep_cmd->add_option("--from", o.from, "first grid value");
    sweep_cmd->add_option("--to", o.to, "last grid value (inclusive)");
    sweep_cmd->add_option("--step", o.step, "grid step");

    auto *mc_cmd = app.add_subcommand("montecarlo", "sampled-outcome ensemble");
    add_protocol_flags(mc_cmd);
    mc_cmd->add_option("--log", o.log_path, "trajectory log (JSON lines); '-' for stdout");

    auto *feas_cmd = app.add_subcommand("feasibility", "spontaneous-emission feasibility check");
    feas_cmd->add_option("--params", o.params_path, "JSON parameter file");
    feas_cmd->add_option("--kappa", o.kappa, "coupling strength (overrides the file)");
    feas_cmd->add_option("--optical-density", o.optical_density, "optical density of the sample");
    feas_cmd->add_option("--margin", o.margin, "factor interpreting 'much smaller than' (default 10)");
    feas_cmd->add_option("--format", o.format, "json | csv | pretty");
    feas_cmd->add_option("--out", o.out_path, "output file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (*run_cmd)
            return cmd_run(o, out);
        if (*sweep_cmd)
            return cmd_sweep(o, out);
        if (*mc_cmd)
            return cmd_montecarlo(o, out);
        return cmd_feasibility(o, out);
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const InvariantViolation &e) {
        err << "invariant violated [" << e.invariant() << "]: " << e.what() << "\n";
        return kExitInvariantViolation;
    } catch (const DomainError &e) {
        err << "invariant violated [numeric]: " << e.what() << "\n";
        return kExitInvariantViolation;
    }
}

} // namespace cvclone::cli
