#include "rumour/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rumour/embedding.hpp"
#include "rumour/error.hpp"

using json = nlohmann::json;

namespace rumour {

namespace {

std::string reals(std::span<const double> v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_real(v[i]);
    }
    return s + "]";
}

std::string key(const char* name) { return json(name).dump() + ":"; }

std::vector<double> read_reals(const json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_array()) throw ParseError(std::string("model file: missing array ") + name);
    std::vector<double> out;
    for (const auto& x : j[name]) out.push_back(x.get<double>());
    return out;
}

}  // namespace

std::string config_json(const TrainConfig& c) {
    nlohmann::ordered_json j;
    j["algorithm"] = std::string(to_string(c.algorithm));
    j["seed"] = c.seed;
    j["learning_rate"] = c.learning_rate;
    j["batch_size"] = c.batch_size;
    j["epochs"] = c.epochs;
    j["weight_decay"] = c.weight_decay;
    j["dropout_p"] = c.dropout_p;
    j["k_neighbors"] = c.k_neighbors;
    j["boost_rounds"] = c.boost_rounds;
    j["svm_lambda"] = c.svm_lambda;
    j["hidden_sizes"] = c.hidden_sizes;
    return j.dump();
}

std::string model_to_json(const TrainedModel& m) {
    std::ostringstream out;
    out << '{' << key("schema") << json(std::string(kModelSchema)).dump() << ',' << key("algorithm")
        << json(std::string(to_string(m.algorithm))).dump() << ',' << key("input_dim") << m.input_dim << ','
        << key("config") << config_json(m.config) << ',' << key("standardizer");
    if (m.standardizer)
        out << '{' << key("mean") << reals(m.standardizer->mean) << ',' << key("scale") << reals(m.standardizer->scale)
            << '}';
    else
        out << "null";
    out << ',' << key("params") << '{';

    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KnnParams>) {
                out << key("rows") << p.points.rows() << ',' << key("points") << reals(p.points.data()) << ','
                    << key("labels") << json(p.labels).dump();
            } else if constexpr (std::is_same_v<T, GnbParams>) {
                out << key("var_smoothing") << format_real(p.var_smoothing) << ',' << key("log_prior")
                    << reals(p.log_prior) << ',' << key("mean_rumour") << reals(p.mean[0]) << ','
                    << key("mean_non_rumour") << reals(p.mean[1]) << ',' << key("var_rumour") << reals(p.var[0]) << ','
                    << key("var_non_rumour") << reals(p.var[1]);
            } else if constexpr (std::is_same_v<T, LinearParams>) {
                out << key("bias") << format_real(p.bias) << ',' << key("weights") << reals(p.weights);
            } else if constexpr (std::is_same_v<T, AdaBoostParams>) {
                out << key("stumps") << '[';
                for (std::size_t i = 0; i < p.stumps.size(); ++i) {
                    const auto& s = p.stumps[i];
                    if (i) out << ',';
                    out << '{' << key("feature") << s.feature << ',' << key("threshold") << format_real(s.threshold)
                        << ',' << key("polarity") << s.polarity << ',' << key("alpha") << format_real(s.alpha) << ','
                        << key("weighted_error") << format_real(s.weighted_error) << '}';
                }
                out << ']';
            } else {
                out << key("hidden_sizes") << '[' << p.shape().hidden1 << ',' << p.shape().hidden2 << ']';
                for (std::size_t t = 0; t < MlpParams::kTensors; ++t)
                    out << ',' << json(std::string(MlpParams::tensor_name(t))).dump() << ':' << reals(p.tensor(t));
            }
        },
        m.params);
    out << "}}";
    return out.str();
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    if (j.value("schema", "") != kModelSchema) throw ParseError("model file: unknown schema");

    try {
        TrainedModel m;
        m.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        m.input_dim = j.at("input_dim").get<std::size_t>();
        const auto& c = j.at("config");
        m.config.algorithm = m.algorithm;
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.learning_rate = c.at("learning_rate").get<double>();
        m.config.batch_size = c.at("batch_size").get<int>();
        m.config.epochs = c.at("epochs").get<int>();
        m.config.weight_decay = c.at("weight_decay").get<double>();
        m.config.dropout_p = c.at("dropout_p").get<double>();
        m.config.k_neighbors = c.at("k_neighbors").get<int>();
        m.config.boost_rounds = c.at("boost_rounds").get<int>();
        m.config.svm_lambda = c.at("svm_lambda").get<double>();
        m.config.hidden_sizes = c.at("hidden_sizes").get<std::array<int, 2>>();
        if (!j.at("standardizer").is_null())
            m.standardizer = Standardizer{read_reals(j["standardizer"], "mean"), read_reals(j["standardizer"], "scale")};

        const auto& p = j.at("params");
        switch (m.algorithm) {
            case Algorithm::knn: {
                KnnParams k;
                const auto rows = p.at("rows").get<std::size_t>();
                const auto flat = read_reals(p, "points");
                k.points = Matrix(rows, m.input_dim);
                if (flat.size() != rows * m.input_dim) throw DimensionError("model file: knn points shape mismatch");
                std::copy(flat.begin(), flat.end(), k.points.data().begin());
                k.labels = p.at("labels").get<std::vector<int>>();
                m.params = std::move(k);
                break;
            }
            case Algorithm::gnb: {
                GnbParams g;
                g.var_smoothing = p.at("var_smoothing").get<double>();
                g.log_prior = p.at("log_prior").get<std::array<double, 2>>();
                g.mean = {read_reals(p, "mean_rumour"), read_reals(p, "mean_non_rumour")};
                g.var = {read_reals(p, "var_rumour"), read_reals(p, "var_non_rumour")};
                m.params = std::move(g);
                break;
            }
            case Algorithm::logreg:
            case Algorithm::svm: m.params = LinearParams{read_reals(p, "weights"), p.at("bias").get<double>()}; break;
            case Algorithm::adaboost: {
                AdaBoostParams a;
                for (const auto& s : p.at("stumps"))
                    a.stumps.push_back(Stump{s.at("feature").get<std::size_t>(), s.at("threshold").get<double>(),
                                             s.at("polarity").get<int>(), s.at("alpha").get<double>(),
                                             s.at("weighted_error").get<double>()});
                m.params = std::move(a);
                break;
            }
            case Algorithm::mlp: {
                const auto hs = p.at("hidden_sizes").get<std::array<std::size_t, 2>>();
                MlpParams mp(MlpShape{m.input_dim, hs[0], hs[1]});
                for (std::size_t t = 0; t < MlpParams::kTensors; ++t) {
                    const auto v = read_reals(p, std::string(MlpParams::tensor_name(t)).c_str());
                    auto dst = mp.tensor(t);
                    if (v.size() != dst.size()) throw DimensionError("model file: mlp tensor size mismatch");
                    std::copy(v.begin(), v.end(), dst.begin());
                }
                m.params = std::move(mp);
                break;
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PathError("cannot write " + path.string());
    out << model_to_json(model) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace rumour
