#include "rrl/model_io.hpp"

#include <fstream>

namespace rrl {

using nlohmann::json;

json model_to_json(const FiniteRMDP& model) {
    const std::size_t S = model.num_states(), A = model.num_actions(), H = model.horizon();
    json kernel = json::array(), reward = json::array(), legal = json::array();
    for (std::size_t h = 0; h < H; ++h) {
        json kh = json::array(), rh = json::array(), lh = json::array();
        for (std::size_t s = 0; s < S; ++s) {
            json ks = json::array(), rs = json::array(), ls = json::array();
            for (std::size_t a = 0; a < A; ++a) {
                auto row = model.row(h, s, a);
                ks.push_back(json(std::vector<double>(row.begin(), row.end())));
                rs.push_back(model.reward(h, s, a));
                ls.push_back(model.legal(h, s, a));
            }
            kh.push_back(std::move(ks));
            rh.push_back(std::move(rs));
            lh.push_back(std::move(ls));
        }
        kernel.push_back(std::move(kh));
        reward.push_back(std::move(rh));
        legal.push_back(std::move(lh));
    }
    return json{{"S", S},
                {"A", A},
                {"H", H},
                {"kernel", std::move(kernel)},
                {"reward", std::move(reward)},
                {"legal", std::move(legal)},
                {"divergence",
                 {{"kind", std::string(to_string(model.uncertainty().kind))},
                  {"sigma", model.uncertainty().radius}}},
                {"initial_state", model.initial_state()}};
}

namespace {

const json& require_array(const json& node, std::size_t size, const char* what) {
    if (!node.is_array() || node.size() != size)
        throw ModelError(std::string("model file: '") + what + "' has the wrong shape");
    return node;
}

}  // namespace

FiniteRMDP model_from_json(const json& doc) {
    try {
        const auto S = doc.at("S").get<std::size_t>();
        const auto A = doc.at("A").get<std::size_t>();
        const auto H = doc.at("H").get<std::size_t>();
        const auto& div = doc.at("divergence");
        DivergenceSpec spec(parse_divergence(div.at("kind").get<std::string>()),
                            div.at("sigma").get<double>());
        FiniteRMDP model(S, A, H, spec, doc.at("initial_state").get<std::size_t>());

        const auto& kernel = require_array(doc.at("kernel"), H, "kernel");
        const auto& reward = require_array(doc.at("reward"), H, "reward");
        const auto& legal = require_array(doc.at("legal"), H, "legal");
        for (std::size_t h = 0; h < H; ++h) {
            const auto& kh = require_array(kernel[h], S, "kernel");
            const auto& rh = require_array(reward[h], S, "reward");
            const auto& lh = require_array(legal[h], S, "legal");
            for (std::size_t s = 0; s < S; ++s) {
                const auto& ks = require_array(kh[s], A, "kernel");
                const auto& rs = require_array(rh[s], A, "reward");
                const auto& ls = require_array(lh[s], A, "legal");
                for (std::size_t a = 0; a < A; ++a) {
                    const auto& row = require_array(ks[a], S, "kernel");
                    for (std::size_t n = 0; n < S; ++n) model.kernel(h, s, a, n) = row[n].get<double>();
                    model.reward(h, s, a) = rs[a].get<double>();
                    model.set_legal(h, s, a, ls[a].get<bool>());
                }
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw ModelError(std::string("model file: ") + e.what());
    }
}

void save_model(const FiniteRMDP& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << model_to_json(model).dump() << '\n';
}

FiniteRMDP load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("model file: ") + e.what());
    }
    return model_from_json(doc);
}

}  // namespace rrl
