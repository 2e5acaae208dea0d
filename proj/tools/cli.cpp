#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "bn2o/approx.hpp"
#include "bn2o/engine.hpp"
#include "bn2o/gen.hpp"
#include "bn2o/model.hpp"
#include "bn2o/oracle.hpp"
#include "bn2o/quickscore.hpp"

namespace bn2o::cli {

namespace {

constexpr int kDigits = 12;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Network load_network(const std::string& path) {
    try {
        return parse_network(read_file(path));
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    }
}

CaseEvidence load_case(const std::string& path, const Network& net) {
    try {
        return parse_case(read_file(path), net);
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    }
}

// "LO:HI" or a single value "P" (meaning P:P).
Interval parse_interval(const std::string& text, const char* flag) {
    Interval iv;
    const auto colon = text.find(':');
    try {
        std::size_t used = 0;
        if (colon == std::string::npos) {
            iv.lo = iv.hi = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } else {
            const std::string lo = text.substr(0, colon), hi = text.substr(colon + 1);
            iv.lo = std::stod(lo, &used);
            if (used != lo.size()) throw std::invalid_argument(text);
            iv.hi = std::stod(hi, &used);
            if (used != hi.size()) throw std::invalid_argument(text);
        }
    } catch (const std::logic_error&) {
        throw InputError(std::string("invalid ") + flag + " value '" + text + "'");
    }
    return iv;
}

std::pair<std::size_t, std::size_t> parse_count_range(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            const auto n = std::stoul(text);
            return {n, n};
        }
        return {std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw InputError("invalid --parents value '" + text + "'");
    }
}

void write_costs_tsv(std::ostream& out, const CostCounters& c) {
    out << "# multiplications\t" << c.multiplications << '\n'
        << "# additions\t" << c.additions << '\n'
        << "# distributions\t" << c.distributions << '\n'
        << "# partition_calls\t" << c.partition_calls << '\n'
        << "# savings\t" << c.savings << '\n';
}

nlohmann::ordered_json costs_json(const CostCounters& c) {
    return {{"multiplications", c.multiplications},
            {"additions", c.additions},
            {"distributions", c.distributions},
            {"partition_calls", c.partition_calls},
            {"savings", c.savings}};
}

struct InferArgs {
    std::string net, evidence, engine = "recursive", target;
    bool costs = false, json = false, time = false;
};

int cmd_infer(const InferArgs& a, std::ostream& out, std::ostream& err) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const Network net = load_network(a.net);
    const CaseEvidence evidence = load_case(a.evidence, net);
    const double parse_seconds = std::chrono::duration<double>(Clock::now() - start).count();

    std::optional<DiseaseIndex> target;
    if (!a.target.empty()) {
        target = net.find_disease(a.target);
        if (!target) throw InputError("unknown disease " + a.target);
    }

    PhaseTimings timings;
    EngineOptions options;
    options.timings = &timings;

    double p_evidence = 0.0;
    std::vector<double> marginals;
    std::optional<CostCounters> cost;
    std::optional<std::uint64_t> terms;
    const auto eval_start = Clock::now();
    if (a.engine == "recursive") {
        if (target) {
            const SinglePosterior single = posterior_single(net, evidence, *target, options);
            p_evidence = single.p_evidence;
            marginals.assign(net.num_diseases(), 0.0);
            marginals[*target] = single.probability;
            cost = single.cost;
        } else {
            PosteriorResult post = posteriors(net, evidence, options);
            p_evidence = post.p_evidence;
            marginals = std::move(post.marginals);
            cost = post.cost;
        }
    } else if (a.engine == "quickscore") {
        QuickscoreResult qs = quickscore_posteriors(net, evidence);
        p_evidence = qs.z;
        marginals = std::move(qs.marginals);
        cost = qs.cost;
        terms = qs.terms;
    } else {
        OracleResult oracle = enumerate_posteriors(net, evidence);
        p_evidence = oracle.p_evidence;
        marginals = std::move(oracle.marginals);
    }
    const double eval_seconds = std::chrono::duration<double>(Clock::now() - eval_start).count();

    std::vector<DiseaseIndex> rows;
    if (target) rows.push_back(*target);
    else {
        rows.resize(net.num_diseases());
        for (DiseaseIndex i = 0; i < rows.size(); ++i) rows[i] = i;
    }
    std::sort(rows.begin(), rows.end(), [&](DiseaseIndex x, DiseaseIndex y) {
        if (marginals[x] != marginals[y]) return marginals[x] > marginals[y];
        return net.diseases[x].id < net.diseases[y].id;
    });

    if (a.json) {
        nlohmann::ordered_json doc;
        doc["p_evidence"] = p_evidence;
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (DiseaseIndex i : rows) m[net.diseases[i].id] = marginals[i];
        doc["marginals"] = std::move(m);
        if (cost) {
            nlohmann::ordered_json c(costs_json(*cost));
            if (terms) c["terms"] = *terms;
            doc["costs"] = std::move(c);
        } else {
            doc["costs"] = nullptr;
        }
        out << doc.dump(2) << '\n';
    } else {
        for (DiseaseIndex i : rows)
            out << net.diseases[i].id << '\t' << format_significant(marginals[i], kDigits) << '\n';
        if (a.costs && cost) {
            write_costs_tsv(out, *cost);
            if (terms) out << "# terms\t" << *terms << '\n';
        }
    }

    if (a.time) {
        err << "time\tparse\t" << parse_seconds << '\n';
        if (a.engine == "recursive") {
            err << "time\tabsorption\t" << timings.absorption << '\n'
                << "time\tpartitioning\t" << timings.partitioning << '\n'
                << "time\tevaluation\t" << timings.evaluation << '\n';
        } else {
            err << "time\tevaluation\t" << eval_seconds << '\n';
        }
    }
    return kOk;
}

struct ApproxArgs {
    std::string net, evidence, order = "heuristic", prior_mode = "marginal";
    std::size_t k = 8;
    std::optional<std::size_t> max_steps;
    bool metrics = false;
};

std::vector<FindingIndex> load_order(const std::string& path, const Network& net) {
    std::istringstream in(read_file(path));
    std::vector<FindingIndex> order;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream words(line);
        std::string id;
        while (words >> id) {
            auto j = net.find_finding(id);
            if (!j) throw InputError(path + ": unknown finding " + id);
            order.push_back(*j);
        }
    }
    return order;
}

int cmd_approx(const ApproxArgs& a, std::ostream& out) {
    const Network net = load_network(a.net);
    const CaseEvidence evidence = load_case(a.evidence, net);

    OrderPolicy policy;
    if (a.order == "heuristic") policy = OrderPolicy::heuristic(a.k);
    else if (a.order == "ascending") policy = OrderPolicy::ascending();
    else if (a.order == "descending") policy = OrderPolicy::descending();
    else if (a.order.starts_with("given:"))
        policy = OrderPolicy::explicit_order(load_order(a.order.substr(6), net));
    else throw InputError("unknown --order '" + a.order + "'");

    ApproxOptions options;
    options.prior_mode = a.prior_mode == "exact" ? PriorMode::kExact : PriorMode::kMarginal;
    options.max_steps = a.max_steps;

    const ApproxTrace trace = run_incremental(net, evidence, policy, options);
    write_trace_tsv(out, trace, net);
    if (a.metrics) {
        const SettlingMetrics m = settling_metrics(trace);
        out << "# metrics\n"
            << "one_ip\t" << m.one_ip << '\n'
            << "four_is\t" << m.four_is << '\n'
            << "four_ip\t" << m.four_ip << '\n'
            << "error_top\t" << format_significant(m.error_top, kDigits) << '\n'
            << "lep\t" << format_significant(m.lep, kDigits) << '\n'
            << "flep\t" << format_significant(m.flep, kDigits) << '\n';
    }
    return kOk;
}

struct GenArgs {
    std::size_t diseases = 0, findings = 0, chain = 0;
    std::string parents, prior, activation, leak;
    std::uint64_t seed = 0;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
    if (a.chain > 0) {
        const Interval prior = a.prior.empty() ? Interval{0.5, 0.5} : parse_interval(a.prior, "--prior");
        const Interval act =
            a.activation.empty() ? Interval{0.8, 0.8} : parse_interval(a.activation, "--activation");
        if (prior.lo != prior.hi || act.lo != act.hi)
            throw InputError("--chain takes single values for --prior and --activation");
        Network net;
        try {
            net = chain_network(a.chain, prior.lo, act.lo);
        } catch (const ValidationError& e) {
            throw InputError(e.what());
        }
        out << serialize_network(net);
        return kOk;
    }
    if (a.parents.empty()) throw InputError("--parents MIN:MAX is required");
    RandomNetworkParams params;
    params.n_diseases = a.diseases;
    params.n_findings = a.findings;
    std::tie(params.parents_min, params.parents_max) = parse_count_range(a.parents);
    if (!a.prior.empty()) params.prior = parse_interval(a.prior, "--prior");
    if (!a.activation.empty()) params.activation = parse_interval(a.activation, "--activation");
    if (!a.leak.empty()) params.leak = parse_interval(a.leak, "--leak");
    params.seed = a.seed;
    out << serialize_network(random_network(params));
    return kOk;
}

struct SampleArgs {
    std::string net;
    std::uint64_t seed = 0;
    double report = 1.0;
};

int cmd_sample_case(const SampleArgs& a, std::ostream& out) {
    const Network net = load_network(a.net);
    out << serialize_case(sample_case(net, a.seed, a.report), net);
    return kOk;
}

struct PartitionArgs {
    std::string net, evidence, rule = "max";
};

int cmd_partition_stats(const PartitionArgs& a, std::ostream& out) {
    const Network net = load_network(a.net);
    const CaseEvidence evidence = load_case(a.evidence, net);
    EngineOptions options;
    options.rule = a.rule == "min" ? SelectionRule::kMinParents : SelectionRule::kMaxParents;
    const PosteriorResult post = posteriors(net, evidence, options);

    out << "remaining_findings\tpartition_sizes\n";
    for (const PartitionEvent& event : post.trace) {
        out << event.findings << '\t';
        for (std::size_t k = 0; k < event.sizes.size(); ++k) out << (k ? "," : "") << event.sizes[k];
        out << '\n';
    }
    out << "savings\t" << post.cost.savings << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact and incremental inference for two-level noisy-or networks", "bn2o"};
    app.require_subcommand(1);

    InferArgs infer;
    auto* infer_cmd = app.add_subcommand("infer", "Posterior marginals for a case");
    infer_cmd->add_option("--net", infer.net, "Network file")->required();
    infer_cmd->add_option("--case", infer.evidence, "Case file")->required();
    infer_cmd->add_option("--engine", infer.engine, "recursive | quickscore | oracle")
        ->check(CLI::IsMember({"recursive", "quickscore", "oracle"}));
    infer_cmd->add_option("--target", infer.target, "Report a single disease");
    infer_cmd->add_flag("--costs", infer.costs, "Append arithmetic cost counters");
    infer_cmd->add_flag("--json", infer.json, "JSON report");
    infer_cmd->add_flag("--time", infer.time, "Per-phase wall-clock times on stderr");

    ApproxArgs approx;
    auto* approx_cmd = app.add_subcommand("approx", "Incremental processing trace");
    approx_cmd->add_option("--net", approx.net, "Network file")->required();
    approx_cmd->add_option("--case", approx.evidence, "Case file")->required();
    approx_cmd->add_option("--order", approx.order,
                           "heuristic | ascending | descending | given:FILE");
    approx_cmd->add_option("--k", approx.k, "Findings taken by parent count before scoring");
    approx_cmd->add_option("--prior-mode", approx.prior_mode, "exact | marginal")
        ->check(CLI::IsMember({"exact", "marginal"}));
    approx_cmd->add_option("--max-steps", approx.max_steps, "Stop after this many positives");
    approx_cmd->add_flag("--metrics", approx.metrics, "Append settling metrics");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a network file");
    gen_cmd->add_option("--diseases", gen.diseases, "Number of diseases");
    gen_cmd->add_option("--findings", gen.findings, "Number of findings");
    gen_cmd->add_option("--parents", gen.parents, "Parent count range MIN:MAX");
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--prior", gen.prior, "Prior range LO:HI");
    gen_cmd->add_option("--activation", gen.activation, "Activation range LO:HI");
    gen_cmd->add_option("--leak", gen.leak, "Leak range LO:HI");
    gen_cmd->add_option("--chain", gen.chain, "Emit a chain of M findings instead");
    gen_cmd->callback([&] {
        if (gen.chain == 0 && (gen_cmd->count("--diseases") == 0 || gen_cmd->count("--findings") == 0))
            throw CLI::RequiredError("--diseases and --findings");
    });

    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample-case", "Sample a case from a network");
    sample_cmd->add_option("--net", sample.net, "Network file")->required();
    sample_cmd->add_option("--seed", sample.seed, "Sampler seed");
    sample_cmd->add_option("--report", sample.report, "Probability each finding is observed")
        ->check(CLI::Range(0.0, 1.0));

    PartitionArgs part;
    auto* part_cmd = app.add_subcommand("partition-stats", "Partition trace of the exact engine");
    part_cmd->add_option("--net", part.net, "Network file")->required();
    part_cmd->add_option("--case", part.evidence, "Case file")->required();
    part_cmd->add_option("--rule", part.rule, "max | min parent selection")
        ->check(CLI::IsMember({"max", "min"}));

    std::vector<const char*> argv{"bn2o"};
    for (const std::string& s : args) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "bn2o: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (*infer_cmd) return cmd_infer(infer, out, err);
        if (*approx_cmd) return cmd_approx(approx, out);
        if (*gen_cmd) return cmd_gen(gen, out);
        if (*sample_cmd) return cmd_sample_case(sample, out);
        if (*part_cmd) return cmd_partition_stats(part, out);
    } catch (const InputError& e) {
        err << "bn2o: " << e.what() << '\n';
        return kInputError;
    } catch (const ValidationError& e) {
        err << "bn2o: " << e.what() << '\n';
        return kInputError;
    } catch (const ZeroEvidence& e) {
        err << "bn2o: " << e.what() << '\n';
        return kZeroEvidence;
    } catch (const CapExceeded& e) {
        err << "bn2o: " << e.what() << '\n';
        return kCapExceeded;
    }
    return kInputError;
}

}  // namespace bn2o::cli
