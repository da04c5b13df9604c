#include "volcast/serialize.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "volcast/errors.hpp"

namespace volcast {

using json = nlohmann::ordered_json;

namespace {

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON document");
    return j;
}

std::string dist_kind_name(DistKind k) {
    switch (k) {
        case DistKind::Normal: return "normal";
        case DistKind::StudentT: return "student_t";
        case DistKind::SkewStudentT: return "skew_student_t";
    }
    throw NumericError("unknown distribution kind");
}

DistKind dist_kind_from_name(const std::string& s) {
    if (s == "normal") return DistKind::Normal;
    if (s == "student_t") return DistKind::StudentT;
    if (s == "skew_student_t") return DistKind::SkewStudentT;
    throw DataError("unknown distribution kind '" + s + "'");
}

json mat_to_json(const Mat& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

Mat mat_from_json(const json& j) {
    Mat m(j.at("rows").get<int>(), j.at("cols").get<int>());
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.a.size()) throw DataError("matrix data does not match its shape");
    m.a = std::move(data);
    return m;
}

}  // namespace

std::string garch_fit_to_json(const GarchFit& fit) {
    json j;
    j["model"] = family_name(fit.spec.family);
    j["p"] = fit.spec.p;
    j["q"] = fit.spec.q;
    j["mean_model"] = fit.spec.mean_model == MeanModel::Ar1 ? "ar1" : "constant";
    j["distribution"] = dist_kind_name(fit.spec.distribution.kind);
    json p;
    p["mu"] = fit.params.mu;
    p["phi"] = fit.params.phi;
    p["alpha0"] = fit.params.alpha0;
    p["alpha"] = fit.params.alpha;
    p["beta"] = fit.params.beta;
    p["omega"] = fit.params.omega;
    p["theta"] = fit.params.theta;
    p["gamma"] = fit.params.gamma;
    p["gamma_i"] = fit.params.gamma_i;
    p["delta"] = fit.params.delta;
    p["nu"] = fit.params.nu;
    p["xi"] = fit.params.xi;
    j["params"] = std::move(p);
    j["log_likelihood"] = fit.log_likelihood;
    j["converged"] = fit.converged;
    j["h_init"] = fit.h_init;
    return j.dump(2) + "\n";
}

GarchFit garch_fit_from_json(const std::string& text) {
    const json j = parse(text);
    GarchFit fit;
    try {
        fit.spec.family = family_from_name(j.at("model").get<std::string>());
        fit.spec.p = j.at("p").get<int>();
        fit.spec.q = j.at("q").get<int>();
        const auto mean = j.at("mean_model").get<std::string>();
        if (mean == "ar1") fit.spec.mean_model = MeanModel::Ar1;
        else if (mean == "constant") fit.spec.mean_model = MeanModel::Constant;
        else throw DataError("unknown mean model '" + mean + "'");
        const json& p = j.at("params");
        fit.params.mu = p.at("mu").get<double>();
        fit.params.phi = p.at("phi").get<double>();
        fit.params.alpha0 = p.at("alpha0").get<double>();
        fit.params.alpha = p.at("alpha").get<std::vector<double>>();
        fit.params.beta = p.at("beta").get<std::vector<double>>();
        fit.params.omega = p.at("omega").get<std::vector<double>>();
        fit.params.theta = p.at("theta").get<double>();
        fit.params.gamma = p.at("gamma").get<double>();
        fit.params.gamma_i = p.at("gamma_i").get<std::vector<double>>();
        fit.params.delta = p.at("delta").get<double>();
        fit.params.nu = p.at("nu").get<double>();
        fit.params.xi = p.at("xi").get<double>();
        fit.spec.distribution =
            DistributionSpec{dist_kind_from_name(j.at("distribution").get<std::string>()),
                             fit.params.nu, fit.params.xi};
        fit.log_likelihood = j.at("log_likelihood").get<double>();
        fit.converged = j.at("converged").get<bool>();
        fit.h_init = j.at("h_init").get<double>();
    } catch (const json::exception& e) {
        throw DataError(std::string("bad model document: ") + e.what());
    }
    fit.params.validate(fit.spec);
    return fit;
}

std::string gru_weights_to_json(const GruWeights& weights, const GruConfig& config) {
    json j;
    j["layer_sizes"] = config.layer_sizes;
    j["input_dim"] = config.input_dim;
    j["sequence_length"] = config.sequence_length;
    j["activation"] = config.activation == GruActivation::Relu ? "relu" : "tanh";
    j["layers"] = json::array();
    for (const auto& l : weights.layers) {
        j["layers"].push_back(json{{"Wz", mat_to_json(l.Wz)}, {"Wr", mat_to_json(l.Wr)},
                                   {"Wo", mat_to_json(l.Wo)}, {"Uz", mat_to_json(l.Uz)},
                                   {"Ur", mat_to_json(l.Ur)}, {"Uo", mat_to_json(l.Uo)},
                                   {"bz", l.bz}, {"br", l.br}, {"bo", l.bo}});
    }
    j["dense_w"] = weights.dense_w;
    j["dense_b"] = weights.dense_b;
    return j.dump() + "\n";
}

GruWeights gru_weights_from_json(const std::string& text, const GruConfig& expected) {
    const json j = parse(text);
    GruWeights w;
    try {
        const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
        if (sizes != expected.layer_sizes || j.at("input_dim").get<int>() != expected.input_dim)
            throw DataError("saved network shape does not match the configuration");
        for (const json& lj : j.at("layers")) {
            GruLayerWeights l;
            l.Wz = mat_from_json(lj.at("Wz"));
            l.Wr = mat_from_json(lj.at("Wr"));
            l.Wo = mat_from_json(lj.at("Wo"));
            l.Uz = mat_from_json(lj.at("Uz"));
            l.Ur = mat_from_json(lj.at("Ur"));
            l.Uo = mat_from_json(lj.at("Uo"));
            l.bz = lj.at("bz").get<Vec>();
            l.br = lj.at("br").get<Vec>();
            l.bo = lj.at("bo").get<Vec>();
            w.layers.push_back(std::move(l));
        }
        w.dense_w = j.at("dense_w").get<Vec>();
        w.dense_b = j.at("dense_b").get<double>();
    } catch (const json::exception& e) {
        throw DataError(std::string("bad network document: ") + e.what());
    }
    if (w.layers.size() != expected.layer_sizes.size())
        throw DataError("saved network layer count does not match the configuration");
    for (std::size_t i = 0; i < w.layers.size(); ++i) {
        const int hidden = expected.layer_sizes[i];
        const int in = i == 0 ? expected.input_dim : expected.layer_sizes[i - 1];
        const auto& l = w.layers[i];
        if (l.Wz.rows != hidden || l.Wz.cols != in || l.Uz.rows != hidden ||
            l.Uz.cols != hidden || static_cast<int>(l.bz.size()) != hidden)
            throw DataError("saved network tensor shapes are inconsistent");
    }
    if (w.dense_w.size() != static_cast<std::size_t>(expected.layer_sizes.back()))
        throw DataError("saved dense layer does not match the configuration");
    return w;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace volcast
