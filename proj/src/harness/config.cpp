#include "genboot/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace genboot::harness {

using nlohmann::json;

std::string method_name(Method method) {
    switch (method) {
        case Method::Gb: return "gb";
        case Method::Cbb: return "cbb";
        case Method::Oracle: return "oracle";
    }
    return "?";
}

namespace {

Method parse_method(const std::string& s, const std::string& key) {
    if (s == "gb") return Method::Gb;
    if (s == "cbb") return Method::Cbb;
    if (s == "oracle") return Method::Oracle;
    throw ConfigError(key + ": unknown method '" + s + "' (expected gb, cbb or oracle)");
}

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

const char* kind(const json& v) {
    if (v.is_number_unsigned()) return "non-negative integer";
    if (v.is_number()) return "number";
    return v.type_name();
}

bool compatible(const json& want, const json& got) {
    if (want.is_number_unsigned()) return got.is_number_unsigned();
    if (want.is_number()) return got.is_number();
    return want.type() == got.type();
}

// Overlays `user` on `base`, which holds the defaults and therefore the schema.
void merge(json& base, const json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
    for (const auto& [key, value] : user.items()) {
        const std::string at = join(path, key);
        if (!base.contains(key)) throw ConfigError("unknown key '" + at + "'");
        json& slot = base[key];
        if (slot.is_object()) {
            merge(slot, value, at);
        } else if (!compatible(slot, value)) {
            throw ConfigError(at + ": expected " + kind(slot) + ", got " + kind(value));
        } else {
            slot = value;
        }
    }
}

class Reader {
public:
    explicit Reader(const json& doc) : doc_(doc) {}

    const json& at(const std::string& dotted) const {
        const json* node = &doc_;
        std::size_t start = 0;
        while (true) {
            const auto dot = dotted.find('.', start);
            node = &node->at(dotted.substr(start, dot - start));
            if (dot == std::string::npos) return *node;
            start = dot + 1;
        }
    }

    std::size_t count(const std::string& key) const { return unsigned_value(at(key), key); }
    double number(const std::string& key) const { return at(key).get<double>(); }
    std::string text(const std::string& key) const { return at(key).get<std::string>(); }

    std::vector<std::size_t> counts(const std::string& key) const {
        std::vector<std::size_t> out;
        for (const auto& v : at(key)) out.push_back(unsigned_value(v, key));
        return out;
    }
    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (const auto& v : at(key)) {
            if (!v.is_number()) throw ConfigError(key + ": expected numbers, got " + kind(v));
            out.push_back(v.get<double>());
        }
        return out;
    }
    std::vector<std::string> texts(const std::string& key) const {
        std::vector<std::string> out;
        for (const auto& v : at(key)) {
            if (!v.is_string()) throw ConfigError(key + ": expected strings, got " + kind(v));
            out.push_back(v.get<std::string>());
        }
        return out;
    }

private:
    static std::size_t unsigned_value(const json& v, const std::string& key) {
        if (!v.is_number_unsigned()) throw ConfigError(key + ": expected non-negative integers, got " + kind(v));
        return v.get<std::size_t>();
    }

    const json& doc_;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

json default_document() { return to_json(ExperimentConfig{}); }

}  // namespace

bool ExperimentConfig::uses(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

void ExperimentConfig::validate() const {
    require(!phis.empty(), "dgp.phi: needs at least one value");
    for (double phi : phis) require(std::isfinite(phi) && std::abs(phi) < 1.0, "dgp.phi: every value needs |phi| < 1");
    require(std::isfinite(sigma) && sigma > 0.0, "dgp.sigma: must be positive");
    require(length >= 2, "dgp.length: must be at least 2");
    try {
        gan.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("gan: ") + e.what());
    }
    require(gb.block_length >= 1 && gb.block_length < length, "gb.block_length: must be in [1, dgp.length)");
    require(gan.hyper.batch_size <= length - gb.block_length + 1,
            "gan.training.batch_size: exceeds the number of training blocks (dgp.length - gb.block_length + 1)");
    require(gb.samples >= 2, "gb.samples: must be at least 2");
    require(gb.replications >= 1, "gb.replications: must be at least 1");
    require(!cbb.block_lengths.empty(), "cbb.block_lengths: needs at least one value");
    for (auto b : cbb.block_lengths) require(b >= 1 && b <= length, "cbb.block_lengths: every value must be in [1, dgp.length]");
    require(cbb.replications >= 1, "cbb.replications: must be at least 1");
    require(cbb.resamples >= 2, "cbb.resamples: must be at least 2");
    require(!methods.empty(), "experiment.methods: needs at least one method");
    require(!levels.empty(), "experiment.levels: needs at least one level");
    for (double l : levels) require(l > 0.0 && l < 1.0, "experiment.levels: every level must be in (0, 1)");
    require(max_lag >= 1 && max_lag < std::min(length, sample_length()),
            "experiment.max_lag: must be at least 1 and below the path and sample lengths");
    require(theory_replications >= 1, "experiment.theory_replications: must be at least 1");
}

json to_json(const ExperimentConfig& c) {
    const auto& g = c.gan.generator;
    const auto& d = c.gan.discriminator;
    const auto& h = c.gan.hyper;
    std::vector<std::string> methods;
    for (auto m : c.methods) methods.push_back(method_name(m));
    return json{
        {"schema_version", kSchemaVersion},
        {"seed", c.seed},
        {"workers", c.workers},
        {"output_dir", c.output_dir},
        {"dgp", {{"phi", c.phis}, {"sigma", c.sigma}, {"length", c.length}}},
        {"gan",
         {{"objective", gan::objective_name(c.gan.objective)},
          {"generator",
           {{"filters", g.filters}, {"dilations", g.dilations}, {"kernel_size", g.kernel_size}, {"noise_dim", g.noise_dim}}},
          {"discriminator",
           {{"filters", d.filters},
            {"dilations", d.dilations},
            {"kernel_size", d.kernel_size},
            {"pool_taps", d.pool_taps},
            {"pool_bins", d.pool_bins},
            {"hidden", d.hidden},
            {"leaky_slope", d.leaky_slope}}},
          {"training",
           {{"lr_d", h.lr_d},
            {"lr_g", h.lr_g},
            {"lambda", h.lambda},
            {"batch_size", h.batch_size},
            {"n_init", h.n_init},
            {"n_discriminator", h.n_discriminator},
            {"n_generator", h.n_generator},
            {"steps", h.total_steps},
            {"init_sigma", h.init.sigma},
            {"adam", {{"beta1", h.adam.beta1}, {"beta2", h.adam.beta2}, {"epsilon", h.adam.epsilon}}}}}}},
        {"gb",
         {{"block_length", c.gb.block_length},
          {"sample_length", c.gb.sample_length},
          {"samples", c.gb.samples},
          {"replications", c.gb.replications}}},
        {"cbb",
         {{"block_lengths", c.cbb.block_lengths}, {"replications", c.cbb.replications}, {"resamples", c.cbb.resamples}}},
        {"oracle", {{"phi", c.oracle_phi == OraclePhi::True ? "true" : "estimated"}}},
        {"experiment",
         {{"methods", methods},
          {"statistic", c.statistic == CoverageStatistic::Mean ? "mean" : "ls"},
          {"levels", c.levels},
          {"max_lag", c.max_lag},
          {"theory_replications", c.theory_replications}}},
        {"input", {{"path", c.input_path}, {"checkpoint", c.checkpoint}}},
    };
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    if (!doc.contains("schema_version")) throw ConfigError("schema_version: missing");
    const json& version = doc.at("schema_version");
    if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion) {
        throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion) + ", got " + version.dump());
    }
    json merged = default_document();
    merge(merged, doc, "");
    const Reader r(merged);

    ExperimentConfig c;
    c.seed = r.at("seed").get<std::uint64_t>();
    c.workers = r.count("workers");
    c.output_dir = r.text("output_dir");
    c.phis = r.numbers("dgp.phi");
    c.sigma = r.number("dgp.sigma");
    c.length = r.count("dgp.length");

    try {
        c.gan.objective = gan::parse_objective(r.text("gan.objective"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("gan.objective: ") + e.what());
    }
    auto& g = c.gan.generator;
    g.filters = r.counts("gan.generator.filters");
    g.dilations = r.counts("gan.generator.dilations");
    g.kernel_size = r.count("gan.generator.kernel_size");
    g.noise_dim = r.count("gan.generator.noise_dim");
    auto& d = c.gan.discriminator;
    d.filters = r.counts("gan.discriminator.filters");
    d.dilations = r.counts("gan.discriminator.dilations");
    d.kernel_size = r.count("gan.discriminator.kernel_size");
    d.pool_taps = r.counts("gan.discriminator.pool_taps");
    d.pool_bins = r.count("gan.discriminator.pool_bins");
    d.hidden = r.count("gan.discriminator.hidden");
    d.leaky_slope = r.number("gan.discriminator.leaky_slope");
    auto& h = c.gan.hyper;
    h.lr_d = r.number("gan.training.lr_d");
    h.lr_g = r.number("gan.training.lr_g");
    h.lambda = r.number("gan.training.lambda");
    h.batch_size = r.count("gan.training.batch_size");
    h.n_init = r.count("gan.training.n_init");
    h.n_discriminator = r.count("gan.training.n_discriminator");
    h.n_generator = r.count("gan.training.n_generator");
    h.total_steps = r.count("gan.training.steps");
    h.init.sigma = r.number("gan.training.init_sigma");
    h.adam.beta1 = r.number("gan.training.adam.beta1");
    h.adam.beta2 = r.number("gan.training.adam.beta2");
    h.adam.epsilon = r.number("gan.training.adam.epsilon");

    c.gb.block_length = r.count("gb.block_length");
    c.gb.sample_length = r.count("gb.sample_length");
    c.gb.samples = r.count("gb.samples");
    c.gb.replications = r.count("gb.replications");
    c.cbb.block_lengths = r.counts("cbb.block_lengths");
    c.cbb.replications = r.count("cbb.replications");
    c.cbb.resamples = r.count("cbb.resamples");

    const auto oracle = r.text("oracle.phi");
    if (oracle == "estimated") {
        c.oracle_phi = OraclePhi::Estimated;
    } else if (oracle == "true") {
        c.oracle_phi = OraclePhi::True;
    } else {
        throw ConfigError("oracle.phi: expected 'estimated' or 'true', got '" + oracle + "'");
    }

    c.methods.clear();
    for (const auto& m : r.texts("experiment.methods")) {
        const Method parsed = parse_method(m, "experiment.methods");
        if (c.uses(parsed)) throw ConfigError("experiment.methods: '" + m + "' listed twice");
        c.methods.push_back(parsed);
    }
    const auto statistic = r.text("experiment.statistic");
    if (statistic == "ls") {
        c.statistic = CoverageStatistic::Ls;
    } else if (statistic == "mean") {
        c.statistic = CoverageStatistic::Mean;
    } else {
        throw ConfigError("experiment.statistic: expected 'ls' or 'mean', got '" + statistic + "'");
    }
    c.levels = r.numbers("experiment.levels");
    c.max_lag = r.count("experiment.max_lag");
    c.theory_replications = r.count("experiment.theory_replications");
    c.input_path = r.text("input.path");
    c.checkpoint = r.text("input.checkpoint");

    c.validate();
    return c;
}

json read_config_file(const std::filesystem::path& path) {
    if (path.empty()) return json{{"schema_version", kSchemaVersion}};
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "': expected key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override '" + key + "': empty key component");
        if (!node->is_object()) throw ConfigError("override '" + key + "': '" + part + "' is not inside an object");
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

std::string provenance(const ExperimentConfig& config, std::string_view command) {
    json doc = to_json(config);
    doc.erase("workers");
    doc.erase("output_dir");
    std::ostringstream out;
    out << "genboot " << command << "\nmaster_seed " << config.seed << "\nconfig " << doc.dump();
    return out.str();
}

}  // namespace genboot::harness
