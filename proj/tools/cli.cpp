#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>
#include <zlib.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>

#include "chromnet/dataset.hpp"
#include "chromnet/learner.hpp"
#include "chromnet/metrics.hpp"
#include "chromnet/nn/checkpoint.hpp"
#include "chromnet/nn/trainer.hpp"
#include "chromnet/report.hpp"

namespace chromnet::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

// Bad flag values found after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string crc32_of_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "";
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08lx", crc);
    return buf;
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) { return fs::path(base.string() + suffix); }

// One manifest per invocation, written beside the primary output.
class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& args)
        : start_(std::chrono::steady_clock::now()) {
        doc_["tool"] = "chromnet";
        doc_["version"] = kVersion;
        doc_["command"] = std::move(command);
        doc_["argv"] = args;
        doc_["flags"] = json::object();
        doc_["seeds"] = json::object();
        doc_["inputs"] = json::array();
        doc_["outputs"] = json::array();
    }
    json& flags() { return doc_["flags"]; }
    json& seeds() { return doc_["seeds"]; }
    json& extra() { return doc_; }
    void input(const fs::path& p) { doc_["inputs"].push_back({{"path", p.string()}, {"crc32", crc32_of_file(p)}}); }
    void output(const fs::path& p) { doc_["outputs"].push_back({{"path", p.string()}, {"crc32", crc32_of_file(p)}}); }

    void write(const fs::path& primary) {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        doc_["wall_seconds"] = secs;
        metrics::write_text(with_suffix(primary, ".manifest.json"), doc_.dump(2) + "\n");
    }

private:
    json doc_;
    std::chrono::steady_clock::time_point start_;
};

void apply_threads(int threads) {
    if (threads > 0) {
        omp_set_num_threads(threads);
        return;
    }
    if (const char* env = std::getenv("CHROMNET_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw UsageError("CHROMNET_THREADS must be a positive integer");
        omp_set_num_threads(static_cast<int>(v));
    }
}

int active_threads() { return omp_get_max_threads(); }

// ---- generate -----------------------------------------------------------

struct GenerateOpts {
    int max_order = 50;
    int per_order = 1;
    std::uint64_t seed = 0;
    std::string split = "train";
    std::string out;
    int threads = 0;
    bool no_label = false;
    std::uint64_t node_budget = oracle::SolverLimits{}.node_budget;
    int max_attempts = 8;
};

int cmd_generate(const GenerateOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
    apply_threads(o.threads);
    const gen::GenConfig cfg{o.max_order, o.per_order, o.seed};
    const auto split = data::parse_split(o.split);
    Manifest m("generate", argv);
    m.flags() = {{"max_order", o.max_order}, {"per_order", o.per_order}, {"split", o.split},
                 {"no_label", o.no_label}, {"node_budget", o.node_budget}, {"max_attempts", o.max_attempts},
                 {"threads", active_threads()}};
    m.seeds()["generator"] = o.seed;

    data::Dataset ds;
    data::BuildReport report;
    if (o.no_label) {
        ds = data::build_unlabeled(cfg, split);
    } else {
        data::LabelOptions lo;
        lo.limits.node_budget = o.node_budget;
        lo.max_attempts = o.max_attempts;
        ds = data::build_dataset(cfg, split, lo, &report);
    }
    data::write_dataset(ds, o.out);
    m.extra()["records"] = ds.size();
    m.extra()["regenerated"] = report.regenerated;
    m.output(o.out);
    m.write(o.out);
    out << "wrote " << ds.size() << " records to " << o.out;
    if (report.regenerated) out << " (" << report.regenerated << " regenerated after solver budget)";
    out << '\n';
    return ok;
}

// ---- label --------------------------------------------------------------

struct LabelOpts {
    std::string in, out;
    int threads = 0;
    std::uint64_t node_budget = oracle::SolverLimits{}.node_budget;
};

int cmd_label(const LabelOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
    apply_threads(o.threads);
    Manifest m("label", argv);
    m.input(o.in);
    auto ds = data::read_dataset(o.in);
    data::LabelOptions lo;
    lo.limits.node_budget = o.node_budget;
    data::label_dataset(ds, lo);
    data::write_dataset(ds, o.out);
    m.flags() = {{"node_budget", o.node_budget}, {"threads", active_threads()}};
    m.seeds()["generator"] = ds.gen_seed;
    m.output(o.out);
    m.write(o.out);
    out << "labelled " << ds.size() << " records into " << o.out << '\n';
    return ok;
}

// ---- stats --------------------------------------------------------------

struct StatsOpts {
    std::string in, target = "chi", out, svg;
};

void require_labels(const data::Dataset& ds, const std::string& path) {
    for (const auto& r : ds.records)
        if (!r.labeled()) throw data::DatasetError(data::DatasetError::Kind::invalid_dataset, path + " has unlabelled records");
}

int cmd_stats(const StatsOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
    const auto target = data::parse_target(o.target);
    Manifest m("stats", argv);
    m.input(o.in);
    const auto ds = data::read_dataset(o.in);
    require_labels(ds, o.in);
    const auto st = data::compute_stats(ds, target);
    const std::string t = data::to_string(target);
    std::size_t below10 = 0;
    for (const auto& [v, c] : st.histogram)
        if (v < 10) below10 += c;
    std::vector<metrics::ReportRow> rows = {
        {"n", t, "data", static_cast<double>(st.total)},
        {"min", t, "data", static_cast<double>(st.min)},
        {"median", t, "data", st.median},
        {"max", t, "data", static_cast<double>(st.max)},
        {"fraction_below_10", t, "data", static_cast<double>(below10) / static_cast<double>(st.total)},
    };
    for (const auto& [v, c] : st.histogram) rows.push_back({"count_" + std::to_string(v), t, "data", static_cast<double>(c)});
    metrics::write_text(o.out, metrics::report_csv(rows));
    m.output(o.out);
    if (!o.svg.empty()) {
        metrics::write_text(o.svg, metrics::svg_histogram(st.histogram, "Distribution of " + t, t));
        m.output(o.svg);
    }
    m.flags() = {{"target", t}};
    m.write(o.out);
    out << t << ": n=" << st.total << " min=" << st.min << " median=" << st.median << " max=" << st.max
        << " below10=" << static_cast<double>(below10) / static_cast<double>(st.total) << '\n';
    return ok;
}

// ---- export / split ------------------------------------------------------

int cmd_export(const std::string& in, const std::string& dest, const std::vector<std::string>& argv, std::ostream& out) {
    Manifest m("export", argv);
    m.input(in);
    const auto ds = data::read_dataset(in);
    data::export_csv(ds, dest);
    m.output(dest);
    m.write(dest);
    out << "exported " << ds.size() << " records to " << dest << '\n';
    return ok;
}

struct SplitOpts {
    std::string in, prefix;
    std::vector<double> fractions{0.8, 0.1, 0.1};
    std::uint64_t seed = 0;
};

int cmd_split(const SplitOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
    if (o.fractions.size() != 3) throw UsageError("--fractions takes three values");
    Manifest m("split", argv);
    m.input(o.in);
    const auto ds = data::read_dataset(o.in);
    Rng rng(o.seed);
    auto parts = data::split_dataset(ds.records, {o.fractions[0], o.fractions[1], o.fractions[2]}, rng);
    for (auto* p : {&parts.train, &parts.valid, &parts.test}) {
        p->gen_seed = ds.gen_seed;
        const fs::path path = o.prefix + "." + data::to_string(p->split) + ".chrg";
        data::write_dataset(*p, path);
        m.output(path);
        out << "wrote " << p->size() << " records to " << path.string() << '\n';
    }
    m.seeds()["split"] = o.seed;
    m.flags() = {{"fractions", o.fractions}};
    m.write(o.prefix);
    return ok;
}

// ---- train --------------------------------------------------------------

struct TrainOpts {
    std::string train, valid, arch = "regression", target = "chi", out;
    double scale = 1.0;
    int epochs = 100;
    int patience = 10;
    int batch = 128;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    int threads = 0;
    bool quiet = false;
};

int cmd_train(const TrainOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
    apply_threads(o.threads);
    const auto target = data::parse_target(o.target);
    const learn::ArchitectureId id{learn::parse_family(o.arch), o.scale};
    id.validate();
    const fs::path prefix = o.out;
    Manifest m("train", argv);
    m.flags() = {{"arch", o.arch}, {"scale", o.scale}, {"target", data::to_string(target)}, {"epochs", o.epochs},
                 {"patience", o.patience}, {"batch", o.batch}, {"lr", o.lr}, {"threads", active_threads()}};
    m.seeds()["train"] = o.seed;

    m.input(o.train);
    const auto train_ds = data::read_dataset(o.train);
    require_labels(train_ds, o.train);

    if (id.family == learn::Family::regression) {
        const auto model = learn::fit_regression(train_ds, target);
        const fs::path reg = with_suffix(prefix, ".reg");
        metrics::write_text(reg, learn::regression_to_text(model, target));
        m.output(reg);
        m.extra()["coefficients"] = {{"slope", model.slope}, {"intercept", model.intercept}};
        m.write(prefix);
        out << "regression " << data::to_string(target) << " = " << model.slope << " * edges + " << model.intercept
            << " -> " << reg.string() << '\n';
        return ok;
    }

    if (o.valid.empty()) throw UsageError("--valid is required for network architectures");
    m.input(o.valid);
    const auto valid_ds = data::read_dataset(o.valid);
    require_labels(valid_ds, o.valid);
    if (valid_ds.order != train_ds.order) {
        throw data::DatasetError(data::DatasetError::Kind::invalid_dataset, "train and valid orders differ");
    }

    const auto spec = learn::build_network(id, train_ds.order);
    nn::Network<float> net(spec);
    const auto train_set = nn::make_samples<float>(train_ds, target);
    const auto valid_set = nn::make_samples<float>(valid_ds, target);

    nn::TrainConfig cfg;
    cfg.adam.learning_rate = o.lr;
    cfg.batch_size = o.batch;
    cfg.max_epochs = o.epochs;
    cfg.patience = o.patience;
    cfg.seed = o.seed;
    if (!o.quiet) {
        cfg.on_epoch = [&out](int epoch, double tr, double va) {
            out << "epoch " << epoch << " train_mae " << tr << " valid_mae " << va << std::endl;
        };
    }
    const auto res = nn::train(net, train_set, valid_set, cfg);

    const fs::path arch = with_suffix(prefix, ".arch");
    const fs::path ckpt = with_suffix(prefix, ".ckpt");
    const fs::path hist = with_suffix(prefix, ".history.csv");
    metrics::write_text(arch, nn::to_text(spec));
    nn::write_checkpoint(net, ckpt);
    std::string csv = "epoch,train_mae,valid_mae\n";
    for (const auto& e : res.history)
        csv += std::to_string(e.epoch) + ',' + std::to_string(e.train_mae) + ',' + std::to_string(e.valid_mae) + '\n';
    metrics::write_text(hist, csv);
    for (const auto& p : {arch, ckpt, hist}) m.output(p);
    m.extra()["best_epoch"] = res.best_epoch;
    m.extra()["best_valid_mae"] = res.best_valid_mae;
    m.extra()["epochs_run"] = res.history.size();
    m.extra()["parameters"] = nn::parameter_count(spec);
    m.write(prefix);
    out << "best epoch " << res.best_epoch << " valid_mae " << res.best_valid_mae << " -> " << ckpt.string() << '\n';
    return ok;
}

// ---- eval ---------------------------------------------------------------

struct EvalOpts {
    std::string model, test, target, out;
    int threads = 0;
};

int cmd_eval(const EvalOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
    apply_threads(o.threads);
    const auto target = data::parse_target(o.target);
    Manifest m("eval", argv);
    m.input(o.test);
    const auto ds = data::read_dataset(o.test);
    require_labels(ds, o.test);
    if (ds.empty()) throw data::DatasetError(data::DatasetError::Kind::invalid_dataset, "test set is empty");

    std::vector<double> actual;
    for (const auto& r : ds.records) actual.push_back(r.label(target));

    std::vector<double> pred;
    std::string model_name;
    const fs::path model_path = o.model;
    if (o.model == "oracle") {
        model_name = "oracle";
        pred = actual;
    } else if (model_path.extension() == ".reg") {
        m.input(model_path);
        data::Target stored{};
        const auto reg = learn::parse_regression_text(metrics::read_text(model_path), &stored);
        if (stored != target) {
            throw UsageError(std::string("model was fitted for ") + data::to_string(stored) + ", not " +
                             data::to_string(target));
        }
        model_name = "regression";
        pred = learn::predict_regression(reg, ds);
    } else if (model_path.extension() == ".ckpt") {
        fs::path arch = model_path;
        arch.replace_extension(".arch");
        m.input(arch);
        m.input(model_path);
        fs::path trained = model_path;
        trained.replace_extension(".manifest.json");
        if (fs::exists(trained)) {
            const auto doc = json::parse(metrics::read_text(trained), nullptr, false);
            if (!doc.is_discarded() && doc.contains("flags") && doc["flags"].contains("target") &&
                doc["flags"]["target"] != data::to_string(target)) {
                throw UsageError("model was trained for " + doc["flags"]["target"].get<std::string>() + ", not " +
                                 data::to_string(target));
            }
        }
        const auto spec = nn::parse_model_text(metrics::read_text(arch));
        nn::Network<float> net(spec);
        nn::read_checkpoint(model_path, net);
        const auto samples = nn::make_samples<float>(ds, target);
        const auto y = net.predict(samples.inputs, samples.size());
        pred.assign(y.begin(), y.end());
        model_name = spec.name;
    } else {
        throw UsageError("--model must be a .reg file, a .ckpt file or 'oracle'");
    }

    const auto report = metrics::evaluate(actual, pred);
    const std::string t = data::to_string(target);
    const fs::path prefix = o.out;
    const fs::path report_csv = with_suffix(prefix, ".report.csv");
    const fs::path groups = with_suffix(prefix, ".groups_ae.csv");
    const fs::path groups_ape = with_suffix(prefix, ".groups_ape.csv");
    const fs::path svg_ae = with_suffix(prefix, ".ae.svg");
    const fs::path svg_ape = with_suffix(prefix, ".ape.svg");
    metrics::write_text(report_csv, metrics::report_csv(metrics::report_rows(report, t, model_name)));
    metrics::write_text(groups, metrics::grouped_csv(report.per_group));
    metrics::write_text(groups_ape, metrics::grouped_csv(report.per_group_ape));
    metrics::write_text(svg_ae, metrics::svg_boxplot(report.per_group, "Absolute error by " + t + " (" + model_name + ")", "AE"));
    metrics::write_text(svg_ape, metrics::svg_boxplot(report.per_group_ape, "Absolute percentage error by " + t + " (" + model_name + ")", "APE %"));
    for (const auto& p : {report_csv, groups, groups_ape, svg_ae, svg_ape}) m.output(p);
    m.flags() = {{"target", t}, {"model", o.model}, {"threads", active_threads()}};
    m.extra()["metrics"] = {{"mae", report.mae}, {"p_0.5", report.p_half}, {"p_1", report.p_one},
                            {"mape", report.mape}, {"n", report.n}};
    m.write(prefix);
    out << model_name << ' ' << t << ": mae " << report.mae << " p_0.5 " << report.p_half << " p_1 " << report.p_one
        << " mape " << report.mape << " n " << report.n << '\n';
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random graphs with exact chromatic and clique numbers, and neural regressors for them", "chromnet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    GenerateOpts gen_o;
    auto* gen = app.add_subcommand("generate", "generate a labelled dataset of random embedded graphs");
    gen->add_option("--max-order", gen_o.max_order, "vertex count N of every graph")->check(CLI::Range(2, 255));
    gen->add_option("--per-order", gen_o.per_order, "graphs per source order n")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_o.seed, "generator seed");
    gen->add_option("--split", gen_o.split, "train|valid|test")->check(CLI::IsMember({"train", "valid", "test"}));
    gen->add_option("--out", gen_o.out, "output dataset file")->required();
    gen->add_option("--threads", gen_o.threads, "worker threads (default: CHROMNET_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    gen->add_flag("--no-label", gen_o.no_label, "store graphs without labels");
    gen->add_option("--node-budget", gen_o.node_budget, "search nodes per graph before regenerating")
        ->check(CLI::PositiveNumber);
    gen->add_option("--max-attempts", gen_o.max_attempts, "fresh graphs tried per slot")->check(CLI::PositiveNumber);

    LabelOpts label_o;
    auto* label = app.add_subcommand("label", "compute exact labels for a dataset");
    label->add_option("--in", label_o.in)->required();
    label->add_option("--out", label_o.out)->required();
    label->add_option("--threads", label_o.threads)->check(CLI::NonNegativeNumber);
    label->add_option("--node-budget", label_o.node_budget)->check(CLI::PositiveNumber);

    StatsOpts stats_o;
    auto* stats = app.add_subcommand("stats", "label distribution of a dataset");
    stats->add_option("--in", stats_o.in)->required();
    stats->add_option("--target", stats_o.target, "chi|omega")->required();
    stats->add_option("--out", stats_o.out, "report CSV")->required();
    stats->add_option("--svg", stats_o.svg, "histogram SVG");

    std::string export_in, export_out;
    auto* exp = app.add_subcommand("export", "write a dataset as CSV");
    exp->add_option("--in", export_in)->required();
    exp->add_option("--out", export_out)->required();

    SplitOpts split_o;
    auto* split = app.add_subcommand("split", "partition one dataset into train/valid/test files");
    split->add_option("--in", split_o.in)->required();
    split->add_option("--out-prefix", split_o.prefix)->required();
    split->add_option("--fractions", split_o.fractions)->expected(3)->delimiter(',');
    split->add_option("--seed", split_o.seed);

    TrainOpts train_o;
    auto* train = app.add_subcommand("train", "fit a model");
    train->add_option("--train", train_o.train)->required();
    train->add_option("--valid", train_o.valid, "validation set (network architectures)");
    train->add_option("--arch", train_o.arch)->check(CLI::IsMember({"regression", "dense", "seq_cnn", "wide_cnn"}));
    train->add_option("--scale", train_o.scale, "width multiplier in (0, 1]");
    train->add_option("--target", train_o.target, "chi|omega")->required();
    train->add_option("--epochs", train_o.epochs)->check(CLI::PositiveNumber);
    train->add_option("--patience", train_o.patience)->check(CLI::PositiveNumber);
    train->add_option("--batch", train_o.batch)->check(CLI::PositiveNumber);
    train->add_option("--lr", train_o.lr)->check(CLI::PositiveNumber);
    train->add_option("--seed", train_o.seed);
    train->add_option("--threads", train_o.threads)->check(CLI::NonNegativeNumber);
    train->add_option("--out", train_o.out, "output prefix")->required();
    train->add_flag("--quiet", train_o.quiet, "no per-epoch lines");

    EvalOpts eval_o;
    auto* eval = app.add_subcommand("eval", "evaluate a model on a test set");
    eval->add_option("--model", eval_o.model, "PREFIX.reg, PREFIX.ckpt or 'oracle'")->required();
    eval->add_option("--test", eval_o.test)->required();
    eval->add_option("--target", eval_o.target, "chi|omega")->required();
    eval->add_option("--out", eval_o.out, "output prefix")->required();
    eval->add_option("--threads", eval_o.threads)->check(CLI::NonNegativeNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "chromnet: " << e.what() << '\n';
        err << "run 'chromnet --help' for usage\n";
        return usage;
    }

    try {
        if (*gen) return cmd_generate(gen_o, args, out);
        if (*label) return cmd_label(label_o, args, out);
        if (*stats) return cmd_stats(stats_o, args, out);
        if (*exp) return cmd_export(export_in, export_out, args, out);
        if (*split) return cmd_split(split_o, args, out);
        if (*train) return cmd_train(train_o, args, out);
        if (*eval) return cmd_eval(eval_o, args, out);
    } catch (const UsageError& e) {
        err << "chromnet: " << e.what() << '\n';
        return usage;
    } catch (const oracle::BudgetExceeded& e) {
        err << "chromnet: solver budget exhausted: " << e.what() << '\n';
        return solver_budget;
    } catch (const nn::NumericError& e) {
        err << "chromnet: " << e.what() << '\n';
        return numeric;
    } catch (const std::invalid_argument& e) {
        err << "chromnet: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "chromnet: " << e.what() << '\n';
        return data_error;
    }
    return usage;
}

} // namespace chromnet::cli
