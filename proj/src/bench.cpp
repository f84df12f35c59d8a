#include "onebatch/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "onebatch/baselines.hpp"

namespace onebatch {

using nlohmann::json;

double delta_relative_objective(double objective, double best_objective) {
    if (!(best_objective > 0.0)) throw ZeroBestObjective("best objective must be positive");
    return objective / best_objective - 1.0;
}

double relative_time(double time, double reference_time) {
    if (!(reference_time > 0.0)) throw ZeroReferenceTime("reference time must be positive");
    return time / reference_time;
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept {
    return a.mean_time <= b.mean_time && a.mean_objective <= b.mean_objective &&
           (a.mean_time < b.mean_time || a.mean_objective < b.mean_objective);
}

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].mean_time != points[b].mean_time) return points[a].mean_time < points[b].mean_time;
        return points[a].mean_objective < points[b].mean_objective;
    });

    // Sweep by increasing time; a point survives when nothing earlier in the
    // sweep has a strictly smaller objective, or an equal objective at a
    // strictly smaller time.
    std::vector<ParetoPoint> front;
    double best_obj = std::numeric_limits<double>::infinity();
    double best_obj_time = std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        const auto& p = points[idx];
        bool dominated = best_obj < p.mean_objective || (best_obj == p.mean_objective && best_obj_time < p.mean_time);
        if (!dominated) front.push_back(p);
        if (p.mean_objective < best_obj) {
            best_obj = p.mean_objective;
            best_obj_time = p.mean_time;
        }
    }
    return front;
}

// ---------------------------------------------------------------------------
// Algorithm registry

namespace {

const std::map<std::string, std::set<std::string>>& known_params() {
    static const std::map<std::string, std::set<std::string>> table = {
        {"onebatchpam", {"variant", "batch_size", "max_passes", "epsilon"}},
        {"fasterpam", {"max_passes"}},
        {"random", {}},
        {"clara", {"reps", "subsample_size", "max_passes"}},
        {"alternate", {"max_iters"}},
        {"kmeanspp", {"exponent"}},
        {"kmc2", {"chain_length", "exponent"}},
        {"lskmeanspp", {"ls_steps", "exponent"}},
    };
    return table;
}

bool is_auto(const json& v) { return v.is_string() && v.get<std::string>() == "AUTO"; }

std::size_t count_param(const json& params, const char* key, std::size_t fallback, std::size_t min_value) {
    if (!params.contains(key)) return fallback;
    const json& v = params.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min_value))
        throw InvalidConfig(std::string("parameter '") + key + "' must be an integer >= " + std::to_string(min_value));
    return v.get<std::size_t>();
}

std::optional<std::size_t> auto_count_param(const json& params, const char* key) {
    if (!params.contains(key) || is_auto(params.at(key))) return std::nullopt;
    return count_param(params, key, 0, 1);
}

double real_param(const json& params, const char* key, double fallback, double min_value) {
    if (!params.contains(key)) return fallback;
    const json& v = params.at(key);
    if (!v.is_number() || !(v.get<double>() >= min_value))
        throw InvalidConfig(std::string("parameter '") + key + "' must be a number >= " + std::to_string(min_value));
    return v.get<double>();
}

std::optional<double> exponent_param(const json& params) {
    if (!params.contains("exponent") || is_auto(params.at("exponent"))) return std::nullopt;
    double e = real_param(params, "exponent", 1.0, 0.0);
    if (!(e > 0.0)) throw InvalidConfig("parameter 'exponent' must be positive");
    return e;
}

BatchStrategy variant_param(const json& params) {
    if (!params.contains("variant")) return BatchStrategy::NNIW;
    const json& v = params.at("variant");
    if (!v.is_string()) throw InvalidConfig("parameter 'variant' must be a string");
    return parse_strategy(v.get<std::string>());
}

std::string scalar_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

void validate_algorithm(const AlgorithmSpec& spec) {
    auto it = known_params().find(spec.name);
    if (it == known_params().end()) throw InvalidConfig("unknown algorithm '" + spec.name + "'");
    if (!spec.params.is_object()) throw InvalidConfig("params of '" + spec.name + "' must be an object");
    for (const auto& [key, value] : spec.params.items())
        if (!it->second.contains(key)) throw InvalidConfig("unknown parameter '" + key + "' for " + spec.name);

    const json& p = spec.params;
    if (spec.name == "onebatchpam") {
        variant_param(p);
        auto_count_param(p, "batch_size");
        count_param(p, "max_passes", 10, 1);
        real_param(p, "epsilon", 0.0, 0.0);
    } else if (spec.name == "fasterpam") {
        count_param(p, "max_passes", 10, 1);
    } else if (spec.name == "clara") {
        count_param(p, "reps", 5, 1);
        auto_count_param(p, "subsample_size");
        count_param(p, "max_passes", 10, 1);
    } else if (spec.name == "alternate") {
        count_param(p, "max_iters", 100, 1);
    } else if (spec.name == "kmeanspp" || spec.name == "kmc2" || spec.name == "lskmeanspp") {
        exponent_param(p);
        count_param(p, "chain_length", 200, 1);
        count_param(p, "ls_steps", 10, 0);
    }
}

std::string AlgorithmSpec::display_label() const {
    if (!label.empty()) return label;
    if (name == "onebatchpam") return name + "-" + std::string(strategy_name(variant_param(params)));
    if (name == "clara") return name + "-" + std::to_string(count_param(params, "reps", 5, 1));
    if (name == "kmc2") return name + "-" + std::to_string(count_param(params, "chain_length", 200, 1));
    if (name == "lskmeanspp") return name + "-" + std::to_string(count_param(params, "ls_steps", 10, 0));
    return name;
}

std::string AlgorithmSpec::params_string() const {
    std::string out;
    for (const auto& [key, value] : params.items()) {
        if (!out.empty()) out += ';';
        out += key + "=" + scalar_text(value);
    }
    return out;
}

RunResult run_algorithm(const DataMatrix& data, const AlgorithmSpec& spec, std::size_t k, Metric metric,
                        RandomSeed seed, bool evaluate_exact) {
    validate_algorithm(spec);
    const json& p = spec.params;
    RunResult result;
    if (spec.name == "onebatchpam") {
        OneBatchOptions o;
        o.k = k;
        o.metric = metric;
        o.strategy = variant_param(p);
        o.batch_size = auto_count_param(p, "batch_size");
        o.max_passes = count_param(p, "max_passes", 10, 1);
        o.epsilon = real_param(p, "epsilon", 0.0, 0.0);
        o.seed = seed;
        o.evaluate_exact = evaluate_exact;
        result = one_batch_pam(data, o);
    } else if (spec.name == "fasterpam") {
        result = faster_pam(data, {k, metric, count_param(p, "max_passes", 10, 1), 0.0, seed, {}});
    } else if (spec.name == "random") {
        result = random_select(data, {k, metric, seed, evaluate_exact});
    } else if (spec.name == "clara") {
        result = clara(data, {k, metric, count_param(p, "reps", 5, 1), auto_count_param(p, "subsample_size"),
                              count_param(p, "max_passes", 10, 1), seed});
    } else if (spec.name == "alternate") {
        result = alternate(data, {k, metric, count_param(p, "max_iters", 100, 1), seed});
    } else {
        SeedingOptions o;
        o.k = k;
        o.metric = metric;
        o.exponent = exponent_param(p);
        o.chain_length = count_param(p, "chain_length", 200, 1);
        o.ls_steps = count_param(p, "ls_steps", 10, 0);
        o.seed = seed;
        o.evaluate_exact = evaluate_exact;
        if (spec.name == "kmeanspp")
            result = kmeanspp_seed(data, o);
        else if (spec.name == "kmc2")
            result = kmc2_seed(data, o);
        else
            result = ls_kmeanspp(data, o);
    }
    result.algorithm = spec.display_label();
    return result;
}

json to_json(const RunResult& r) {
    json out;
    out["algorithm"] = r.algorithm;
    out["medoids"] = std::vector<std::size_t>(r.medoids.rows().begin(), r.medoids.rows().end());
    out["est_objective"] = r.est_objective ? json(*r.est_objective) : json(nullptr);
    out["exact_objective"] = r.exact_objective ? json(*r.exact_objective) : json(nullptr);
    out["swaps"] = r.swaps;
    out["passes"] = r.passes;
    out["batch_size"] = r.batch_size;
    out["dissim_evals"] = r.dissim_evals;
    out["wall_millis"] = r.wall_millis;
    if (!r.objective_trace.empty()) out["objective_trace"] = r.objective_trace;
    return out;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw InvalidConfig(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw InvalidConfig("unknown key '" + key + "' in " + where);
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw InvalidConfig("missing key '" + std::string(key) + "' in " + where);
    return obj.at(key);
}

std::uint64_t as_u64(const json& v, const std::string& what) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw InvalidConfig(what + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

SyntheticSpec parse_synthetic(const json& j) {
    reject_unknown(j, {"n_points", "dimension", "n_blobs", "blob_spread", "seed"}, "dataset.synthetic");
    SyntheticSpec s;
    s.n_points = as_u64(require(j, "n_points", "dataset.synthetic"), "n_points");
    s.dimension = as_u64(require(j, "dimension", "dataset.synthetic"), "dimension");
    if (j.contains("n_blobs")) s.n_blobs = as_u64(j.at("n_blobs"), "n_blobs");
    if (j.contains("blob_spread")) {
        if (!j.at("blob_spread").is_number()) throw InvalidConfig("blob_spread must be a number");
        s.blob_spread = j.at("blob_spread").get<double>();
    }
    if (j.contains("seed")) s.seed = RandomSeed{as_u64(j.at("seed"), "dataset seed")};
    return s;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
    try {
        reject_unknown(j, {"dataset", "metric", "algorithms", "k_values", "seeds", "output_path"}, "config");
        ExperimentConfig cfg;

        const json& ds = require(j, "dataset", "config");
        reject_unknown(ds, {"csv", "has_header", "drop_columns", "synthetic"}, "dataset");
        if (ds.contains("csv") == ds.contains("synthetic"))
            throw InvalidConfig("dataset needs exactly one of 'csv' or 'synthetic'");
        if (ds.contains("csv")) {
            cfg.dataset.csv = ds.at("csv").get<std::string>();
            if (ds.contains("has_header")) cfg.dataset.csv_options.has_header = ds.at("has_header").get<bool>();
            if (ds.contains("drop_columns"))
                cfg.dataset.csv_options.drop_columns = ds.at("drop_columns").get<std::vector<std::size_t>>();
        } else {
            if (ds.contains("has_header") || ds.contains("drop_columns"))
                throw InvalidConfig("has_header/drop_columns only apply to csv datasets");
            cfg.dataset.synthetic = parse_synthetic(ds.at("synthetic"));
        }

        if (j.contains("metric")) cfg.metric = parse_metric(j.at("metric").get<std::string>());

        std::set<std::string> labels;
        for (const json& a : require(j, "algorithms", "config")) {
            reject_unknown(a, {"name", "params", "label"}, "algorithm entry");
            AlgorithmSpec spec;
            spec.name = require(a, "name", "algorithm entry").get<std::string>();
            if (a.contains("params")) spec.params = a.at("params");
            if (a.contains("label")) spec.label = a.at("label").get<std::string>();
            validate_algorithm(spec);
            if (!labels.insert(spec.display_label()).second)
                throw InvalidConfig("duplicate algorithm label '" + spec.display_label() + "'; set 'label'");
            cfg.algorithms.push_back(std::move(spec));
        }
        for (const json& k : require(j, "k_values", "config")) {
            std::uint64_t kv = as_u64(k, "k");
            if (kv == 0) throw InvalidConfig("k must be positive");
            cfg.k_values.push_back(kv);
        }
        for (const json& s : require(j, "seeds", "config")) cfg.seeds.push_back(RandomSeed{as_u64(s, "seed")});
        cfg.output_path = require(j, "output_path", "config").get<std::string>();

        if (cfg.algorithms.empty() || cfg.k_values.empty() || cfg.seeds.empty())
            throw InvalidConfig("algorithms, k_values and seeds must be non-empty");
        return cfg;
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("malformed config: ") + e.what());
    }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidConfig("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_experiment_config(j);
}

DataMatrix load_dataset(const DatasetSource& source) {
    if (source.csv) return load_csv(*source.csv, source.csv_options);
    if (source.synthetic) return generate_blobs(*source.synthetic);
    throw InvalidConfig("dataset source is empty");
}

// ---------------------------------------------------------------------------
// Records and summary

std::string records_csv_header() { return "algorithm,params,k,seed,objective,wall_millis,dissim_evals,swaps"; }

std::string to_csv_row(const BenchRecord& r) {
    std::ostringstream out;
    out.precision(17);
    out << r.algorithm << ',' << r.params << ',' << r.k << ',' << r.seed << ',' << r.objective << ','
        << r.wall_millis << ',' << r.dissim_evals << ',' << r.swaps;
    return out.str();
}

namespace {

struct Stats {
    double mean = 0.0;
    double std = 0.0;
};

Stats stats_of(const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

}  // namespace

json summarize(std::span<const BenchRecord> records) {
    // k -> labels in first-seen order
    std::map<std::size_t, std::vector<std::string>> order;
    std::map<std::pair<std::size_t, std::string>, std::vector<const BenchRecord*>> groups;
    for (const auto& r : records) {
        auto key = std::make_pair(r.k, r.algorithm);
        if (!groups.contains(key)) order[r.k].push_back(r.algorithm);
        groups[key].push_back(&r);
    }

    json cells = json::array();
    for (const auto& [k, labels] : order) {
        struct Row {
            std::string label;
            std::string params;
            Stats objective, time, evals, swaps;
            std::size_t runs;
        };
        std::vector<Row> rows;
        for (const auto& label : labels) {
            const auto& g = groups.at({k, label});
            std::vector<double> obj, time, evals, swaps;
            for (const auto* r : g) {
                obj.push_back(r->objective);
                time.push_back(r->wall_millis);
                evals.push_back(static_cast<double>(r->dissim_evals));
                swaps.push_back(static_cast<double>(r->swaps));
            }
            rows.push_back({label, g.front()->params, stats_of(obj), stats_of(time), stats_of(evals), stats_of(swaps),
                            g.size()});
        }

        std::size_t best = 0;
        for (std::size_t a = 1; a < rows.size(); ++a)
            if (rows[a].objective.mean < rows[best].objective.mean) best = a;

        bool rt_fallback = false;
        std::optional<double> reference_time;
        if (rows[best].time.mean > 0.0) {
            reference_time = rows[best].time.mean;
        } else {
            rt_fallback = true;
            for (const auto& row : rows)
                if (row.time.mean > 0.0 && (!reference_time || row.time.mean < *reference_time))
                    reference_time = row.time.mean;
        }

        json algos = json::array();
        std::vector<ParetoPoint> points;
        for (const auto& row : rows) {
            json a;
            a["algorithm"] = row.label;
            a["params"] = row.params;
            a["runs"] = row.runs;
            a["objective_mean"] = row.objective.mean;
            a["objective_std"] = row.objective.std;
            a["wall_millis_mean"] = row.time.mean;
            a["wall_millis_std"] = row.time.std;
            a["dissim_evals_mean"] = row.evals.mean;
            a["swaps_mean"] = row.swaps.mean;
            a["delta_relative_objective"] = rows[best].objective.mean > 0.0
                                                ? json(delta_relative_objective(row.objective.mean,
                                                                                rows[best].objective.mean))
                                                : json(nullptr);
            a["relative_time"] = reference_time ? json(relative_time(row.time.mean, *reference_time)) : json(nullptr);
            algos.push_back(std::move(a));
            points.push_back({row.label, row.time.mean, row.objective.mean});
        }

        json front = json::array();
        for (const auto& p : pareto_front(points))
            front.push_back({{"algorithm", p.label}, {"mean_time", p.mean_time}, {"mean_objective", p.mean_objective}});

        json cell;
        cell["k"] = k;
        cell["best_algorithm"] = rows[best].label;
        cell["relative_time_fallback"] = rt_fallback;
        cell["algorithms"] = std::move(algos);
        cell["pareto_front"] = std::move(front);
        cells.push_back(std::move(cell));
    }
    return json{{"cells", std::move(cells)}};
}

std::filesystem::path summary_path_for(const std::filesystem::path& records_path) {
    auto p = records_path;
    return p.replace_extension(".summary.json");
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    DataMatrix data = load_dataset(config.dataset);
    for (std::size_t k : config.k_values)
        if (k > data.n())
            throw InvalidConfig("k = " + std::to_string(k) + " exceeds dataset size " + std::to_string(data.n()));

    const bool write = !config.output_path.empty();
    std::ofstream csv;
    if (write) {
        if (config.output_path.has_parent_path()) std::filesystem::create_directories(config.output_path.parent_path());
        csv.open(config.output_path);
        if (!csv) throw IoError("cannot write " + config.output_path.string());
        csv << records_csv_header() << '\n';
    }

    ExperimentOutput out;
    for (std::size_t k : config.k_values) {
        for (const auto& algo : config.algorithms) {
            for (RandomSeed seed : config.seeds) {
                RunResult r;
                try {
                    r = run_algorithm(data, algo, k, config.metric, seed, true);
                } catch (const std::exception& e) {
                    if (write) csv.flush();
                    throw CellError("cell algorithm=" + algo.display_label() + " k=" + std::to_string(k) +
                                    " seed=" + std::to_string(seed.value) + " failed: " + e.what());
                }
                BenchRecord rec{algo.display_label(), algo.params_string(), k,           seed.value,
                                *r.exact_objective,  r.wall_millis,         r.dissim_evals, r.swaps};
                if (write) csv << to_csv_row(rec) << '\n' << std::flush;
                out.records.push_back(std::move(rec));
            }
        }
    }
    out.summary = summarize(out.records);
    out.summary["dataset"] = {{"n", data.n()}, {"p", data.p()}};
    out.summary["metric"] = std::string(metric_name(config.metric));
    if (write) {
        std::ofstream js(summary_path_for(config.output_path));
        if (!js) throw IoError("cannot write summary next to " + config.output_path.string());
        js << out.summary.dump(2) << '\n';
    }
    return out;
}

}  // namespace onebatch
