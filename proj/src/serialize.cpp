#include "vlab/serialize.hpp"

#include <cstdint>
#include <stdexcept>

namespace vlab {

nlohmann::json nonlin_to_json(const NonlinearitySpec& spec) {
    nlohmann::json j;
    j["m"] = spec.components();
    if (spec.kind() == NonlinearitySpec::Kind::paper_example) {
        j["kind"] = "paper-example";
        j["p0"] = spec.p0();
        j["q_inf"] = spec.q_inf();
        j["q1"] = spec.q1();
        j["decay"] = spec.decay() == ProfileDecay::exponential ? "exp" : "power";
        if (spec.decay() == ProfileDecay::power) j["decay_t"] = spec.decay_t();
        j["couplings"] = spec.couplings();
    } else {
        j["kind"] = "coupled-power";
        j["p"] = spec.power_p();
        j["beta"] = spec.power_beta();
    }
    return j;
}

NonlinearitySpec nonlin_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("nonlinearity: expected an object");
    const std::string kind = j.at("kind").get<std::string>();
    const int m = j.at("m").get<int>();
    if (kind == "paper-example") {
        reject_unknown_keys(j, "nonlinearity",
                            {"kind", "m", "p0", "q_inf", "q1", "decay", "decay_t",
                             "couplings"});
        ProfileDecay decay = ProfileDecay::exponential;
        double decay_t = 1.0;
        if (j.contains("decay")) {
            const std::string d = j.at("decay").get<std::string>();
            if (d == "exp")
                decay = ProfileDecay::exponential;
            else if (d == "power")
                decay = ProfileDecay::power;
            else
                throw std::invalid_argument("nonlinearity: decay must be exp or power");
        }
        if (j.contains("decay_t")) decay_t = j.at("decay_t").get<double>();
        auto couplings = j.value("couplings", std::vector<std::vector<double>>{});
        return NonlinearitySpec::paper_example(m, j.value("p0", 0.0), j.value("q_inf", 0.0),
                                               j.value("q1", 0.0), std::move(couplings),
                                               decay, decay_t);
    }
    if (kind == "coupled-power") {
        reject_unknown_keys(j, "nonlinearity", {"kind", "m", "p", "beta"});
        return NonlinearitySpec::coupled_power(m, j.at("p").get<double>(),
                                               j.value("beta", 0.0));
    }
    throw std::invalid_argument("nonlinearity: unknown kind '" + kind + "'");
}

nlohmann::json constants_to_json(const AssumptionConstants& c) {
    return {{"A", c.A},
            {"B", c.B},
            {"Delta", c.Delta},
            {"S", c.S},
            {"R", c.R},
            {"t", c.t},
            {"alpha", c.alpha},
            {"A_prime", c.A_prime},
            {"B_prime", c.B_prime},
            {"beta", c.beta},
            {"ell", c.ell},
            {"sigma", c.sigma},
            {"alpha_quot", c.alpha_quot}};
}

AssumptionConstants constants_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("constants: expected an object");
    reject_unknown_keys(j, "constants",
                        {"A", "B", "Delta", "S", "R", "t", "alpha", "A_prime", "B_prime",
                         "beta", "ell", "sigma", "alpha_quot"});
    AssumptionConstants c;
    c.A = j.at("A").get<double>();
    c.B = j.at("B").get<double>();
    c.Delta = j.at("Delta").get<double>();
    c.S = j.at("S").get<double>();
    c.R = j.at("R").get<double>();
    c.t = j.at("t").get<double>();
    c.alpha = j.at("alpha").get<std::vector<double>>();
    c.A_prime = j.at("A_prime").get<double>();
    c.B_prime = j.at("B_prime").get<double>();
    c.beta = j.at("beta").get<double>();
    c.ell = j.at("ell").get<double>();
    c.sigma = j.at("sigma").get<double>();
    c.alpha_quot = j.at("alpha_quot").get<double>();
    return c;
}

nlohmann::json grid_to_json(const Grid& g) {
    return {{"N", g.dim()}, {"M", g.points_per_dim()}, {"L", g.half_length()}};
}

std::string json_digest(const nlohmann::json& j) {
    const std::string dump = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void reject_unknown_keys(const nlohmann::json& j, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
}

} // namespace vlab
