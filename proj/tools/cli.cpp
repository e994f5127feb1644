#include "hyswitch/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "hyswitch/simulator.hpp"

namespace hyswitch::cli {

namespace fs = std::filesystem;

namespace {

const char* const kTool = "hyswitch " HYSWITCH_VERSION;

std::string label(std::size_t zero_based) { return std::to_string(zero_based + 1); }

std::string outcome_name(const OutcomeLabel& o) {
    switch (o.kind) {
    case OutcomeLabel::Kind::Fixation:
        return "fixation:" + label(o.vertex);
    case OutcomeLabel::Kind::Polymorphic:
        return "polymorphic";
    case OutcomeLabel::Kind::Undecided:
        break;
    }
    return "undecided";
}

std::string leader_name(const Leader& l) {
    if (l.genotype)
        return label(*l.genotype);
    std::string s = "tie:";
    for (std::size_t i = 0; i < l.tied.size(); ++i)
        s += (i ? "+" : "") + label(l.tied[i]);
    return s;
}

std::string tied_list(const std::vector<Genotype>& tied) {
    std::string s;
    for (std::size_t i = 0; i < tied.size(); ++i)
        s += (i ? ", " : "") + label(tied[i]);
    return s;
}

// ---- config parsing -------------------------------------------------------

const std::set<std::string> kExperimentKeys = {
    "kind",    "t_end",   "dt",    "epsilon", "runs",  "grid_resolution", "samples", "annulus",
    "initial_state", "initial_regime", "start", "initial_regime_policy", "escape", "deltas"};

double positive(const Json& j, const std::string& key) {
    if (!j.is_number())
        throw ConfigError("experiment." + key + " must be a number");
    const double v = j.get<double>();
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError("experiment." + key + " must be positive");
    return v;
}

std::size_t positive_count(const Json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<long long>() < 1)
        throw ConfigError("experiment." + key + " must be a positive integer");
    return j.get<std::size_t>();
}

std::size_t one_based(const Json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<long long>() < 1)
        throw ConfigError(key + " must be a 1-based index");
    return j.get<std::size_t>() - 1;
}

SimplexState parse_state(const Json& j, const std::string& key) {
    try {
        return SimplexState(parse_vector(j, key));
    } catch (const InvalidArgument& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

OutputFormat parse_format(const std::string& s) {
    if (s == "csv")
        return OutputFormat::Csv;
    if (s == "summary")
        return OutputFormat::Summary;
    if (s == "both")
        return OutputFormat::Both;
    throw ConfigError("output format must be csv, summary or both");
}

} // namespace

std::optional<ExperimentKind> parse_kind(const std::string& s) {
    if (s == "simulate")
        return ExperimentKind::Simulate;
    if (s == "ensemble")
        return ExperimentKind::Ensemble;
    if (s == "certify")
        return ExperimentKind::Certify;
    if (s == "partition")
        return ExperimentKind::Partition;
    if (s == "validate")
        return ExperimentKind::Validate;
    return std::nullopt;
}

std::string kind_name(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::Simulate:
        return "simulate";
    case ExperimentKind::Ensemble:
        return "ensemble";
    case ExperimentKind::Certify:
        return "certify";
    case ExperimentKind::Partition:
        return "partition";
    case ExperimentKind::Validate:
        break;
    }
    return "validate";
}

ExperimentConfig parse_config(const Json& doc) {
    if (!doc.is_object())
        throw ConfigError("config: expected a JSON object");
    if (!doc.contains("model"))
        throw ConfigError("config: missing 'model'");
    ExperimentConfig cfg;
    cfg.model = parse_model(doc["model"]);
    const std::size_t m = cfg.model.genotypes();

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned())
            throw ConfigError("seed must be a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        if (o.contains("directory"))
            cfg.output_directory = o["directory"].get<std::string>();
        if (o.contains("format"))
            cfg.format = parse_format(o["format"].get<std::string>());
    }
    if (!doc.contains("experiment"))
        return cfg;

    const auto& e = doc["experiment"];
    if (!e.is_object())
        throw ConfigError("experiment: expected an object");
    for (const auto& [key, _] : e.items())
        if (!kExperimentKeys.count(key))
            throw ConfigError("experiment: unknown key '" + key + "'");

    if (e.contains("kind")) {
        cfg.kind = parse_kind(e["kind"].get<std::string>());
        if (!cfg.kind)
            throw ConfigError("experiment.kind must be simulate, ensemble, certify, partition or validate");
    }
    if (e.contains("t_end"))
        cfg.t_end = positive(e["t_end"], "t_end");
    if (e.contains("dt"))
        cfg.dt = positive(e["dt"], "dt");
    if (e.contains("epsilon"))
        cfg.epsilon = positive(e["epsilon"], "epsilon");
    if (e.contains("runs"))
        cfg.runs = positive_count(e["runs"], "runs");
    if (e.contains("grid_resolution"))
        cfg.grid_resolution = positive_count(e["grid_resolution"], "grid_resolution");
    if (e.contains("samples"))
        cfg.samples = positive_count(e["samples"], "samples");
    if (e.contains("annulus")) {
        const Vector a = parse_vector(e["annulus"], "experiment.annulus");
        if (a.size() != 2 || !(a[0] > 0.0 && a[0] < a[1] && a[1] <= 1.0))
            throw ConfigError("experiment.annulus must be [rho, r] with 0 < rho < r <= 1");
        cfg.annulus_inner = a[0];
        cfg.annulus_outer = a[1];
    }
    if (e.contains("initial_state"))
        cfg.initial_state = parse_state(e["initial_state"], "experiment.initial_state");
    if (e.contains("initial_regime"))
        cfg.initial_regime = one_based(e["initial_regime"], "experiment.initial_regime");
    cfg.initial_regime_policy = InitialRegime::fixed(cfg.initial_regime);
    if (e.contains("initial_regime_policy")) {
        const auto p = e["initial_regime_policy"].get<std::string>();
        if (p == "uniform")
            cfg.initial_regime_policy = InitialRegime::uniform();
        else if (p != "fixed")
            throw ConfigError("experiment.initial_regime_policy must be fixed or uniform");
    }
    if (e.contains("start")) {
        const auto& s = e["start"];
        const std::string type = s.value("type", "");
        if (type == "uniform_interior") {
            cfg.start = UniformInterior{};
        } else if (type == "near_vertex") {
            const auto v = one_based(s.value("vertex", Json()), "experiment.start.vertex");
            const double delta = s.value("delta", 0.0);
            if (v >= m || !(delta > 0.0 && delta < 1.0))
                throw ConfigError("experiment.start: vertex out of range or delta outside (0, 1)");
            cfg.start = NearVertex{v, delta};
        } else if (type == "point") {
            cfg.start = FixedStart{parse_state(s.value("state", Json()), "experiment.start.state")};
        } else {
            throw ConfigError("experiment.start.type must be uniform_interior, near_vertex or point");
        }
    }
    if (e.contains("escape")) {
        const auto& s = e["escape"];
        const auto target = one_based(s.value("target", Json()), "experiment.escape.target");
        const double r = s.value("r", 0.0);
        if (target >= m || !(r > 0.0 && r < 1.0))
            throw ConfigError("experiment.escape: target out of range or r outside (0, 1)");
        cfg.escape = EscapeCriterion{target, r};
    }
    if (e.contains("deltas")) {
        if (!cfg.escape)
            throw ConfigError("experiment.deltas requires experiment.escape");
        const Vector d = parse_vector(e["deltas"], "experiment.deltas");
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (!(d[i] > 0.0 && d[i] < cfg.escape->r) || (i > 0 && !(d[i] < d[i - 1])))
                throw ConfigError("experiment.deltas must be strictly decreasing and inside (0, r)");
            cfg.deltas.push_back(d[i]);
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path);
    Json doc;
    try {
        in >> doc;
    } catch (const Json::exception& e) {
        throw IoError("cannot read " + path + ": " + e.what());
    }
    try {
        return parse_config(doc);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

namespace {

// ---- output helpers -------------------------------------------------------

struct Provenance {
    std::string fingerprint;
    std::uint64_t seed;
};

Provenance provenance(const ExperimentConfig& cfg) {
    return {fingerprint_hex(model_fingerprint(cfg.model)), cfg.seed};
}

std::string csv_preamble(const Provenance& p) {
    return std::string("# tool=") + kTool + "\n# fingerprint=" + p.fingerprint + "\n# seed=" + std::to_string(p.seed) +
           "\n";
}

Json json_header(const Provenance& p, const std::string& format) {
    return Json{{"format", format}, {"version", 1}, {"tool", kTool}, {"fingerprint", p.fingerprint}, {"seed", p.seed}};
}

bool wants_csv(const ExperimentConfig& cfg) { return cfg.format != OutputFormat::Summary; }
bool wants_summary(const ExperimentConfig& cfg) { return cfg.format != OutputFormat::Csv; }

void write_file(const ExperimentConfig& cfg, const std::string& name, const std::string& content) {
    std::error_code ec;
    fs::create_directories(cfg.output_directory, ec);
    const auto path = fs::path(cfg.output_directory) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << content;
    if (!f)
        throw IoError("cannot write " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

bool check_model(const ModelSpec& model, std::ostream& err) {
    const auto report = validate_model(model);
    for (const auto& e : report.errors)
        err << "error: " << e << "\n";
    return report.ok();
}

Json state_json(const SimplexState& p) { return json_vector(p.values()); }

} // namespace

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return kIoError;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kValidationError;
    }
    const auto report = validate_model(cfg.model);
    out << "model: " << cfg.model.genotypes() << " genotypes, " << cfg.model.environments() << " environments, "
        << (cfg.model.generator.is_constant() ? "constant" : "state-dependent") << " generator\n";
    out << "fingerprint: " << fingerprint_hex(model_fingerprint(cfg.model)) << "\n";
    for (const auto& e : report.errors)
        out << "error: " << e << "\n";
    for (const auto& w : report.warnings)
        out << "warning: " << w << "\n";
    for (const auto& n : report.notes)
        out << "note: " << n << "\n";
    out << (report.ok() ? "valid" : "invalid") << "\n";
    return report.ok() ? kOk : kValidationError;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!check_model(cfg.model, err))
        return kValidationError;
    const auto m = cfg.model.genotypes();
    const SimplexState p0 = cfg.initial_state.value_or(SimplexState::uniform(m));
    if (p0.size() != m || cfg.initial_regime >= cfg.model.environments()) {
        err << "error: initial state or regime does not match the model\n";
        return kValidationError;
    }
    HybridTrajectory traj;
    try {
        traj = simulate(cfg.model, p0, cfg.initial_regime, cfg.t_end, cfg.dt, cfg.seed);
    } catch (const SimulationError& e) {
        err << "simulation failed at t=" << format_number(e.time()) << ": " << e.what() << "\n";
        return kRuntimeError;
    } catch (const Error& e) {
        err << "simulation failed: " << e.what() << "\n";
        return kRuntimeError;
    }
    const auto prov = provenance(cfg);
    const auto outcome = classify_outcome(traj, cfg.epsilon);

    if (wants_csv(cfg)) {
        std::ostringstream csv;
        csv << csv_preamble(prov) << "t,regime";
        for (std::size_t i = 0; i < m; ++i)
            csv << ",P_" << i + 1;
        csv << ",jump\n";
        for (const auto& s : traj.samples) {
            csv << format_number(s.t) << ',' << s.regime + 1;
            for (std::size_t i = 0; i < m; ++i)
                csv << ',' << format_number(s.state[i]);
            csv << ',' << (s.jumped ? 1 : 0) << '\n';
        }
        write_file(cfg, "trajectory.csv", csv.str());
    }
    if (wants_summary(cfg)) {
        Json doc = json_header(prov, "hyswitch-run-summary");
        doc["t_end"] = json_number(cfg.t_end);
        doc["dt"] = json_number(cfg.dt);
        doc["epsilon"] = json_number(cfg.epsilon);
        doc["initial_state"] = state_json(p0);
        doc["initial_regime"] = cfg.initial_regime + 1;
        doc["outcome"] = outcome_name(outcome);
        doc["final_state"] = state_json(outcome.final_state);
        doc["final_distance"] = json_number(outcome.distance);
        doc["final_regime"] = traj.samples.back().regime + 1;
        doc["jump_count"] = traj.jumps.size();
        write_file(cfg, "summary.json", dump(doc));
    }
    out << "outcome: " << outcome_name(outcome) << " (distance " << format_number(outcome.distance) << "), "
        << traj.jumps.size() << " jumps\n";
    return kOk;
}

int cmd_ensemble(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!check_model(cfg.model, err))
        return kValidationError;
    EnsembleParams params{cfg.runs, cfg.t_end, cfg.dt, cfg.epsilon, cfg.seed};
    EnsembleReport rep;
    std::vector<CurvePoint> curve;
    try {
        rep = run_ensemble(cfg.model, cfg.start, cfg.initial_regime_policy, params, cfg.escape);
        if (!cfg.deltas.empty())
            curve = stability_curve(cfg.model, cfg.escape->target, cfg.deltas, cfg.escape->r,
                                    cfg.initial_regime_policy, params);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const Error& e) {
        err << "ensemble failed: " << e.what() << "\n";
        return kRuntimeError;
    }
    const auto prov = provenance(cfg);
    const auto m = cfg.model.genotypes();

    if (wants_csv(cfg)) {
        std::ostringstream csv;
        csv << csv_preamble(prov) << "run,seed,outcome,final_dist,jumps\n";
        for (const auto& r : rep.records)
            csv << r.run + 1 << ',' << r.seed << ',' << outcome_name(r.outcome) << ','
                << format_number(r.outcome.distance) << ',' << r.jumps << '\n';
        write_file(cfg, "outcomes.csv", csv.str());
        if (!curve.empty()) {
            std::ostringstream c;
            c << csv_preamble(prov) << "delta,escape_frequency,std_error\n";
            for (const auto& p : curve)
                c << format_number(p.delta) << ',' << format_number(p.frequency) << ','
                  << format_number(p.std_error) << '\n';
            write_file(cfg, "curve.csv", c.str());
        }
    }
    if (wants_summary(cfg)) {
        Json doc = json_header(prov, "hyswitch-ensemble-report");
        doc["parameters"] = Json{{"runs", rep.runs},
                                 {"t_end", json_number(cfg.t_end)},
                                 {"dt", json_number(cfg.dt)},
                                 {"epsilon", json_number(cfg.epsilon)},
                                 {"master_seed", cfg.seed}};
        if (rep.delta)
            doc["parameters"]["delta"] = json_number(*rep.delta);
        Json fix = Json::array();
        for (std::size_t i = 0; i < m; ++i)
            fix.push_back(Json{{"vertex", i + 1},
                               {"count", rep.fixation[i]},
                               {"frequency", json_number(rep.fixation_frequency(i))},
                               {"std_error", json_number(rep.std_error(rep.fixation[i]))}});
        doc["fixation"] = fix;
        doc["polymorphic"] = Json{{"count", rep.polymorphic},
                                  {"frequency", json_number(rep.frequency(rep.polymorphic))},
                                  {"std_error", json_number(rep.std_error(rep.polymorphic))}};
        doc["undecided"] = Json{{"count", rep.undecided},
                                {"frequency", json_number(rep.frequency(rep.undecided))},
                                {"std_error", json_number(rep.std_error(rep.undecided))}};
        if (rep.escape)
            doc["escape"] = Json{{"target", rep.escape->target + 1},
                                 {"r", json_number(rep.escape->r)},
                                 {"count", rep.escape->escaped},
                                 {"frequency", json_number(rep.escape->frequency)},
                                 {"std_error", json_number(rep.escape->std_error)},
                                 {"note", "finite-horizon estimate; a lower bound on the escape probability"}};
        Json failures = Json::array();
        for (const auto& r : rep.records)
            if (!r.failure.empty())
                failures.push_back(Json{{"run", r.run + 1}, {"note", r.failure}});
        doc["failures"] = failures;
        if (!curve.empty()) {
            Json c = Json::array();
            for (const auto& p : curve)
                c.push_back(Json{{"delta", json_number(p.delta)},
                                 {"escape_frequency", json_number(p.frequency)},
                                 {"std_error", json_number(p.std_error)}});
            doc["stability_curve"] = c;
        }
        write_file(cfg, "ensemble.json", dump(doc));
    }

    for (std::size_t i = 0; i < m; ++i)
        out << "fixation at e" << i + 1 << ": " << format_number(rep.fixation_frequency(i)) << "\n";
    out << "polymorphic: " << format_number(rep.frequency(rep.polymorphic))
        << ", undecided: " << format_number(rep.frequency(rep.undecided)) << "\n";
    if (rep.escape)
        out << "escape from e" << rep.escape->target + 1 << ": " << format_number(rep.escape->frequency) << " +- "
            << format_number(rep.escape->std_error) << "\n";
    if (rep.failures == rep.runs) {
        err << "all " << rep.runs << " runs failed\n";
        return kRuntimeError;
    }
    return kOk;
}

namespace {

Json certificate_json(const StabilityCertificate& c, const VerificationReport& v) {
    Json terms = Json::array();
    for (const auto& t : c.terms)
        terms.push_back(Json{{"genotype", t.coordinate + 1},
                             {"a", json_vector(t.a)},
                             {"beta", json_number(t.beta)},
                             {"c", json_vector(t.c)},
                             {"residual", json_number(t.residual)},
                             {"coefficients_positive", t.coefficients_positive}});
    return Json{{"kind", c.kind == CertificateKind::Stability ? "stability" : "instability"},
                {"target", c.target + 1},
                {"gamma", json_number(c.gamma)},
                {"gamma_bound", json_number(c.gamma_bound)},
                {"terms", terms},
                {"verification",
                 Json{{"annulus", Json::array({json_number(v.rho), json_number(v.r)})},
                      {"samples", v.samples},
                      {"seed", v.seed},
                      {"max_lie_derivative", json_number(v.max_lie)},
                      {"worst_point", json_vector(v.worst_point)},
                      {"worst_regime", v.worst_regime + 1},
                      {"v_inner", json_number(v.v_inner)},
                      {"v_outer", json_number(v.v_outer)},
                      {"boundary_ok", v.boundary_ok},
                      {"result", v.pass ? "PASS" : "FAIL"}}}};
}

int certify_state_dependent(const ExperimentConfig& cfg, std::ostream& out) {
    const auto prov = provenance(cfg);
    Json doc = json_header(prov, "hyswitch-certificates");
    doc["heuristic"] = true;
    doc["note"] = "state-dependent generator: local analysis from stationary distributions of Q(e_i); "
                  "no certificate is constructed";
    Json vertices = Json::array();
    for (const auto& v : local_analysis(cfg.model)) {
        vertices.push_back(Json{{"vertex", v.vertex + 1},
                                {"pi", json_vector(v.pi.pi)},
                                {"pi_unique", v.pi.unique},
                                {"means", json_vector(v.means)},
                                {"leader", leader_name(v.leader)},
                                {"locally_stable", v.locally_stable}});
        out << "e" << v.vertex + 1 << ": leader under pi(Q(e" << v.vertex + 1 << ")) is " << leader_name(v.leader)
            << " -> " << (v.locally_stable ? "locally stable" : "locally unstable") << " (heuristic)\n";
    }
    doc["vertices"] = vertices;
    write_file(cfg, "certificates.json", dump(doc));
    return kOk;
}

} // namespace

int cmd_certify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!check_model(cfg.model, err))
        return kValidationError;
    if (!cfg.model.generator.is_constant())
        return certify_state_dependent(cfg, out);

    const auto& landscape = cfg.model.landscape;
    const Matrix& q = cfg.model.generator.constant();
    std::vector<StabilityCertificate> certs;
    MeanFitnessReport means;
    try {
        means = mean_fitness_report(landscape, q);
        certs.push_back(build_stability_certificate(landscape, q));
        for (Genotype i = 0; i < landscape.genotypes(); ++i)
            if (i != certs.front().leader)
                certs.push_back(build_instability_certificate(landscape, q, i));
    } catch (const CertificateError& e) {
        err << "certificate construction failed: " << e.what();
        if (!e.tied().empty())
            err << " (tied genotypes: " << tied_list(e.tied()) << ")";
        err << "\n";
        return e.kind() == CertificateError::Kind::Precondition ? kValidationError : kDegenerate;
    } catch (const Error& e) {
        err << "certificate construction failed: " << e.what() << "\n";
        return kRuntimeError;
    }

    const auto prov = provenance(cfg);
    Json doc = json_header(prov, "hyswitch-certificates");
    doc["heuristic"] = false;
    doc["pi"] = json_vector(means.pi.pi);
    doc["means"] = json_vector(means.means);
    doc["leader"] = leader_name(means.leader);
    doc["certificates"] = Json::array();
    bool all_pass = landscape.genotypes() >= 2;
    for (std::size_t idx = 0; idx < certs.size(); ++idx) {
        const auto& c = certs[idx];
        VerificationReport v;
        if (landscape.genotypes() >= 2) {
            v = verify_certificate(c, landscape, q, cfg.annulus_inner, cfg.annulus_outer, cfg.samples,
                                   derive_seed(cfg.seed, idx));
        }
        all_pass = all_pass && v.pass;
        doc["certificates"].push_back(certificate_json(c, v));
        out << (c.kind == CertificateKind::Stability ? "stability" : "instability") << " certificate for e"
            << c.target + 1 << ": gamma=" << format_number(c.gamma) << ", max LV=" << format_number(v.max_lie)
            << " -> " << (v.pass ? "PASS" : "FAIL") << "\n";
    }
    doc["all_pass"] = all_pass;
    write_file(cfg, "certificates.json", dump(doc));
    if (landscape.genotypes() < 2) {
        out << "single genotype: nothing to verify\n";
        return kOk;
    }
    return all_pass ? kOk : kRuntimeError;
}

int cmd_partition(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!check_model(cfg.model, err))
        return kValidationError;
    const auto& landscape = cfg.model.landscape;
    const auto map = partition_sweep(landscape, cfg.grid_resolution);
    const auto prov = provenance(cfg);
    const auto m = landscape.genotypes();
    const auto n = landscape.environments();

    if (wants_csv(cfg)) {
        std::ostringstream csv;
        csv << csv_preamble(prov);
        if (n == 2) {
            csv << "q";
        } else {
            for (std::size_t k = 0; k < n; ++k)
                csv << (k ? "," : "") << "pi_" << k + 1;
        }
        for (std::size_t i = 0; i < m; ++i)
            csv << ",mean_" << i + 1;
        csv << ",winner\n";
        for (std::size_t g = 0; g < map.grid.size(); ++g) {
            if (n == 2) {
                csv << format_number(map.grid[g][0]);
            } else {
                for (std::size_t k = 0; k < n; ++k)
                    csv << (k ? "," : "") << format_number(map.grid[g][static_cast<Eigen::Index>(k)]);
            }
            for (std::size_t i = 0; i < m; ++i)
                csv << ',' << format_number(map.means[g][static_cast<Eigen::Index>(i)]);
            csv << ',' << leader_name(map.winners[g]) << '\n';
        }
        write_file(cfg, "partition.csv", csv.str());
    }
    Json bounds = Json::array();
    for (const auto& b : map.boundaries) {
        Json j{{"pi", json_vector(b.pi)}, {"before", b.before + 1}, {"after", b.after + 1}};
        if (n == 2)
            j["q"] = json_number(b.pi[0]);
        bounds.push_back(j);
        char buf[64];
        if (n == 2) {
            std::snprintf(buf, sizeof buf, "%.9f", b.pi[0]);
            out << "boundary q=" << buf;
        } else {
            out << "boundary pi=(";
            for (Eigen::Index k = 0; k < b.pi.size(); ++k) {
                std::snprintf(buf, sizeof buf, "%.9f", b.pi[k]);
                out << (k ? "," : "") << buf;
            }
            out << ")";
        }
        out << " between genotypes " << b.before + 1 << " and " << b.after + 1 << "\n";
    }
    if (wants_summary(cfg)) {
        Json doc = json_header(prov, "hyswitch-partition");
        doc["grid_resolution"] = cfg.grid_resolution;
        doc["grid_points"] = map.grid.size();
        doc["boundaries"] = bounds;
        std::set<std::string> winners;
        for (const auto& w : map.winners)
            winners.insert(leader_name(w));
        doc["winners"] = Json(std::vector<std::string>(winners.begin(), winners.end()));
        write_file(cfg, "partition.json", dump(doc));
    }
    if (map.boundaries.empty())
        out << "no boundaries: winner " << leader_name(map.winners.front()) << " everywhere\n";
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Replicator dynamics under Markov-switching environments"};
    app.set_version_flag("--version", kTool);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::string format;

    auto add_common = [&](CLI::App* sub, bool full) {
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
        if (!full)
            return;
        sub->add_option("--seed", seed, "Master seed; overrides the config");
        sub->add_option("--out", out_dir, "Output directory; overrides the config");
        sub->add_option("--format", format, "csv | summary | both")->check(CLI::IsMember({"csv", "summary", "both"}));
    };
    auto* validate = app.add_subcommand("validate", "Validate a model file");
    add_common(validate, false);
    std::vector<std::pair<CLI::App*, std::optional<ExperimentKind>>> commands;
    commands.emplace_back(app.add_subcommand("simulate", "Simulate one hybrid trajectory"), ExperimentKind::Simulate);
    commands.emplace_back(app.add_subcommand("ensemble", "Monte Carlo fixation / escape ensemble"),
                          ExperimentKind::Ensemble);
    commands.emplace_back(app.add_subcommand("certify", "Build and audit Lyapunov certificates"),
                          ExperimentKind::Certify);
    commands.emplace_back(app.add_subcommand("partition", "Mean-fitness partition of stationary distributions"),
                          ExperimentKind::Partition);
    commands.emplace_back(app.add_subcommand("run", "Run the experiment kind named in the config"), std::nullopt);
    for (auto& [sub, _] : commands)
        add_common(sub, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kIoError;
    }

    if (validate->parsed())
        return cmd_validate(config_path, out, err);

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return kIoError;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kValidationError;
    }
    if (seed)
        cfg.seed = *seed;
    if (out_dir)
        cfg.output_directory = *out_dir;
    if (!format.empty())
        cfg.format = parse_format(format);

    std::optional<ExperimentKind> kind;
    for (auto& [sub, k] : commands)
        if (sub->parsed())
            kind = k ? k : cfg.kind;
    if (!kind) {
        err << "config does not name an experiment kind\n";
        return kValidationError;
    }

    try {
        switch (*kind) {
        case ExperimentKind::Simulate:
            return cmd_simulate(cfg, out, err);
        case ExperimentKind::Ensemble:
            return cmd_ensemble(cfg, out, err);
        case ExperimentKind::Certify:
            return cmd_certify(cfg, out, err);
        case ExperimentKind::Partition:
            return cmd_partition(cfg, out, err);
        case ExperimentKind::Validate:
            return cmd_validate(config_path, out, err);
        }
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return kIoError;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kRuntimeError;
    }
    return kRuntimeError;
}

} // namespace hyswitch::cli
