#include "rumour/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rumour/error.hpp"

namespace fs = std::filesystem;

namespace rumour {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw UsageError(key + ": expected a number, got \"" + v + "\"");
    return d;
}

long long to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long n = 0;
    try {
        n = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw UsageError(key + ": expected an integer, got \"" + v + "\"");
    return n;
}

// Shortest "%.Ng" that reads back to the same double.
std::string real(double v) {
    char buf[40];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void set_train_field(TrainConfig& c, const std::string& field, const std::string& v, const std::string& key) {
    if (field == "learning_rate") c.learning_rate = to_double(key, v);
    else if (field == "batch_size") c.batch_size = static_cast<int>(to_int(key, v));
    else if (field == "epochs") c.epochs = static_cast<int>(to_int(key, v));
    else if (field == "weight_decay") c.weight_decay = to_double(key, v);
    else if (field == "dropout_p") c.dropout_p = to_double(key, v);
    else if (field == "k_neighbors") c.k_neighbors = static_cast<int>(to_int(key, v));
    else if (field == "boost_rounds") c.boost_rounds = static_cast<int>(to_int(key, v));
    else if (field == "svm_lambda") c.svm_lambda = to_double(key, v);
    else if (field == "hidden_sizes") {
        const auto parts = split_list(v);
        if (parts.size() != 2) throw UsageError(key + ": expected two comma-separated sizes");
        c.hidden_sizes = {static_cast<int>(to_int(key, parts[0])), static_cast<int>(to_int(key, parts[1]))};
    } else {
        throw UsageError("unknown config key " + key);
    }
}

std::string train_lines(const std::string& prefix, const TrainConfig& c) {
    std::ostringstream out;
    out << prefix << "batch_size=" << c.batch_size << '\n'
        << prefix << "boost_rounds=" << c.boost_rounds << '\n'
        << prefix << "dropout_p=" << real(c.dropout_p) << '\n'
        << prefix << "epochs=" << c.epochs << '\n'
        << prefix << "hidden_sizes=" << c.hidden_sizes[0] << ',' << c.hidden_sizes[1] << '\n'
        << prefix << "k_neighbors=" << c.k_neighbors << '\n'
        << prefix << "learning_rate=" << real(c.learning_rate) << '\n'
        << prefix << "svm_lambda=" << real(c.svm_lambda) << '\n'
        << prefix << "weight_decay=" << real(c.weight_decay) << '\n';
    return out.str();
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F name) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + std::string(name(items[i]));
    return s;
}

}  // namespace

void RunConfig::set(const std::string& dotted_key, const std::string& raw) {
    const std::string v = trim(raw);
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos) throw UsageError("config key needs a section: " + dotted_key);
    const std::string section = dotted_key.substr(0, dot);
    const std::string key = dotted_key.substr(dot + 1);

    auto path_or_none = [&]() -> std::optional<fs::path> {
        if (v.empty()) return std::nullopt;
        return fs::path(v);
    };
    if (section == "data") {
        if (key == "dataset") dataset = path_or_none();
        else if (key == "pheme_root") pheme_root = path_or_none();
        else if (key == "features") features_csv = path_or_none();
        else if (key == "embeddings") embedding_store = path_or_none();
        else if (key == "lexicons") lexicon_dir = path_or_none();
        else throw UsageError("unknown config key " + dotted_key);
    } else if (section == "run") {
        if (key == "seed") {
            const auto n = to_int(dotted_key, v);
            if (n < 0) throw UsageError("run.seed must be >= 0");
            seed = static_cast<std::uint64_t>(n);
        } else if (key == "split_fraction") split_fraction = to_double(dotted_key, v);
        else if (key == "cv_k") cv_k = static_cast<int>(to_int(dotted_key, v));
        else if (key == "out") output_dir = v;
        else if (key == "representations") {
            representations.clear();
            for (const auto& r : split_list(v)) representations.push_back(parse_representation(r));
        } else if (key == "algorithms") {
            algorithms.clear();
            for (const auto& a : split_list(v)) algorithms.push_back(parse_algorithm(a));
        } else if (key == "cv_algorithms") {
            cv_algorithms.clear();
            for (const auto& a : split_list(v)) cv_algorithms.push_back(parse_algorithm(a));
        } else if (key == "cv_representation") cv_representation = parse_representation(v);
        else throw UsageError("unknown config key " + dotted_key);
    } else if (section == "provider") {
        if (key == "mode") {
            if (v == "precomputed") provider.mode = ProviderConfig::Mode::precomputed;
            else if (v == "remote") provider.mode = ProviderConfig::Mode::remote;
            else throw UsageError("provider.mode must be precomputed or remote");
        } else if (key == "store") provider.store_path = path_or_none();
        else if (key == "endpoint") {
            if (v.empty()) provider.endpoint.reset();
            else provider.endpoint = v;
        }
        else if (key == "batch_size") provider.batch_size = static_cast<int>(to_int(dotted_key, v));
        else if (key == "timeout_ms") provider.timeout_ms = static_cast<int>(to_int(dotted_key, v));
        else if (key == "max_retries") provider.max_retries = static_cast<int>(to_int(dotted_key, v));
        else if (key == "dim") provider.dim = static_cast<int>(to_int(dotted_key, v));
        else throw UsageError("unknown config key " + dotted_key);
    } else if (section == "train") {
        const auto sub = key.find('.');
        if (sub == std::string::npos) {
            set_train_field(train_defaults, key, v, dotted_key);
        } else {
            const Algorithm a = parse_algorithm(key.substr(0, sub));
            const std::string field = key.substr(sub + 1);
            TrainConfig probe;
            set_train_field(probe, field, v, dotted_key);  // validates name and value
            overrides[a][field] = v;
        }
    } else {
        throw UsageError("unknown config section in key " + dotted_key);
    }
}

RunConfig RunConfig::parse(const std::string& ini_text, const std::string& source) {
    boost::property_tree::ptree tree;
    std::istringstream in(ini_text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    RunConfig c;
    for (const auto& [section, entries] : tree) {
        if (entries.empty()) {
            // Either an empty [section] or a bare key before any section header.
            const bool known = section == "data" || section == "run" || section == "provider" || section == "train" ||
                               section.rfind("train.", 0) == 0;
            if (!entries.data().empty() || !known)
                throw UsageError(source + ": key \"" + section + "\" outside a section");
            if (section.size() > 6) parse_algorithm(section.substr(6));
            continue;
        }
        for (const auto& [key, value] : entries) c.set(section + "." + key, value.data());
    }
    return c;
}

RunConfig RunConfig::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    RunConfig c = parse(ss.str(), path.string());
    const fs::path base = path.parent_path();
    for (auto* p : {&c.dataset, &c.pheme_root, &c.features_csv, &c.embedding_store, &c.lexicon_dir, &c.provider.store_path})
        if (*p && p->value().is_relative()) *p = (base / p->value()).lexically_normal();
    return c;
}

TrainConfig RunConfig::train_config(Algorithm algorithm) const {
    TrainConfig c = train_defaults;
    c.algorithm = algorithm;
    c.seed = seed;
    if (const auto it = overrides.find(algorithm); it != overrides.end())
        for (const auto& [field, value] : it->second)
            set_train_field(c, field, value, "train." + std::string(to_string(algorithm)) + "." + field);
    return c;
}

std::string RunConfig::canonical() const {
    std::ostringstream out;
    auto opt = [](const std::optional<fs::path>& p) { return p ? p->generic_string() : std::string(); };
    out << "data.dataset=" << opt(dataset) << '\n'
        << "data.embeddings=" << opt(embedding_store) << '\n'
        << "data.features=" << opt(features_csv) << '\n'
        << "data.lexicons=" << opt(lexicon_dir) << '\n'
        << "data.pheme_root=" << opt(pheme_root) << '\n'
        << "provider.batch_size=" << provider.batch_size << '\n'
        << "provider.dim=" << provider.dim << '\n'
        << "provider.endpoint=" << provider.endpoint.value_or("") << '\n'
        << "provider.max_retries=" << provider.max_retries << '\n'
        << "provider.mode=" << (provider.mode == ProviderConfig::Mode::remote ? "remote" : "precomputed") << '\n'
        << "provider.store=" << opt(provider.store_path) << '\n'
        << "provider.timeout_ms=" << provider.timeout_ms << '\n'
        << "run.algorithms=" << join(algorithms, [](Algorithm a) { return to_string(a); }) << '\n'
        << "run.cv_algorithms=" << join(cv_algorithms, [](Algorithm a) { return to_string(a); }) << '\n'
        << "run.cv_k=" << cv_k << '\n'
        << "run.cv_representation=" << to_string(cv_representation) << '\n'
        << "run.representations=" << join(representations, [](Representation r) { return to_string(r); }) << '\n'
        << "run.seed=" << seed << '\n'
        << "run.split_fraction=" << real(split_fraction) << '\n';
    out << train_lines("train.", train_defaults);
    for (const auto& [alg, fields] : overrides)
        for (const auto& [field, value] : fields)
            out << "train." << to_string(alg) << '.' << field << '=' << value << '\n';
    return out.str();
}

std::string RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::to_ini() const {
    std::ostringstream out;
    out << "; config_hash=" << hash() << '\n';
    std::string current;
    std::istringstream lines(canonical());
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        const auto dot = line.rfind('.', eq);
        const std::string section = line.substr(0, dot);
        const std::string value = line.substr(eq + 1);
        if (value.empty() && section.rfind("run", 0) != 0) continue;
        if (section != current) {
            out << (current.empty() ? "" : "\n") << '[' << section << "]\n";
            current = section;
        }
        out << line.substr(dot + 1) << '\n';
    }
    return out.str();
}

}  // namespace rumour
