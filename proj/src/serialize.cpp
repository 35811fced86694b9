// Copyright 2026 The qaoalab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qaoalab/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "qaoalab/error.hpp"

namespace qaoalab {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw NumericalError("SHA-256 digest failed");
    std::ostringstream hex;
    for (unsigned int k = 0; k < length; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
    return hex.str();
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

std::string json_hash(const Json& j) { return sha256_hex(j.dump()); }

std::string graph_text(const Graph& g) {
    std::ostringstream os;
    write_edge_list(os, g);
    return os.str();
}

namespace {

// JSON has no infinity; censored values travel as null.
Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
double number_or_inf(const Json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

template <class T>
void read_if(const Json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

}  // namespace

void to_json(Json& j, const QaoaParams& x) { j = Json{{"gammas", x.gammas}, {"betas", x.betas}}; }
void from_json(const Json& j, QaoaParams& x) {
    j.at("gammas").get_to(x.gammas);
    j.at("betas").get_to(x.betas);
}

void to_json(Json& j, const FourierParams& x) { j = Json{{"u", x.u}, {"v", x.v}, {"p", x.p}}; }
void from_json(const Json& j, FourierParams& x) {
    j.at("u").get_to(x.u);
    j.at("v").get_to(x.v);
    j.at("p").get_to(x.p);
}

void to_json(Json& j, const LocalOptions& x) {
    j = Json{{"method", to_string(x.method)}, {"f_tol", x.f_tol},     {"x_tol", x.x_tol},
             {"g_tol", x.g_tol},              {"max_iterations", x.max_iterations},
             {"max_evaluations", x.max_evaluations}};
}
void from_json(const Json& j, LocalOptions& x) {
    if (auto it = j.find("method"); it != j.end()) x.method = local_method_from_string(it->get<std::string>());
    read_if(j, "f_tol", x.f_tol);
    read_if(j, "x_tol", x.x_tol);
    read_if(j, "g_tol", x.g_tol);
    read_if(j, "max_iterations", x.max_iterations);
    read_if(j, "max_evaluations", x.max_evaluations);
}

void to_json(Json& j, const StrategyConfig& x) {
    j = Json{{"strategy", to_string(x.strategy)},
             {"q", x.q},
             {"R", x.R},
             {"alpha", x.alpha},
             {"p_max", x.p_max},
             {"seed", x.seed},
             {"ri_seeds", x.ri_seeds},
             {"local", x.local}};
}
void from_json(const Json& j, StrategyConfig& x) {
    if (auto it = j.find("strategy"); it != j.end()) x.strategy = strategy_from_string(it->get<std::string>());
    read_if(j, "q", x.q);
    read_if(j, "R", x.R);
    read_if(j, "alpha", x.alpha);
    read_if(j, "p_max", x.p_max);
    read_if(j, "seed", x.seed);
    read_if(j, "ri_seeds", x.ri_seeds);
    read_if(j, "local", x.local);
}

void to_json(Json& j, const LevelResult& x) {
    j = Json{{"p", x.p},
             {"chain", to_string(x.chain)},
             {"params", x.best_params},
             {"f", x.f_value},
             {"r", x.r},
             {"p_gs", x.p_gs},
             {"n_evals", x.n_evals},
             {"converged", x.converged},
             {"grad_norm", number_or_null(x.grad_norm)}};
    if (x.best_fourier) j["fourier"] = *x.best_fourier;
}
void from_json(const Json& j, LevelResult& x) {
    j.at("p").get_to(x.p);
    x.chain = j.at("chain").get<std::string>() == "B" ? ChainTag::B : ChainTag::L;
    j.at("params").get_to(x.best_params);
    j.at("f").get_to(x.f_value);
    j.at("r").get_to(x.r);
    j.at("p_gs").get_to(x.p_gs);
    j.at("n_evals").get_to(x.n_evals);
    j.at("converged").get_to(x.converged);
    x.grad_norm = j.contains("grad_norm") ? number_or_inf(j.at("grad_norm")) : 0.0;
    if (j.contains("fourier")) x.best_fourier = j.at("fourier").get<FourierParams>();
}

void to_json(Json& j, const NoiseConfig& x) {
    j = Json{{"epsilon", x.epsilon},
             {"xi", x.xi},
             {"delta", x.delta},
             {"seed", x.seed},
             {"min_samples", x.min_samples},
             {"max_iterations", x.max_iterations}};
}
void from_json(const Json& j, NoiseConfig& x) {
    read_if(j, "epsilon", x.epsilon);
    read_if(j, "xi", x.xi);
    read_if(j, "delta", x.delta);
    read_if(j, "seed", x.seed);
    read_if(j, "min_samples", x.min_samples);
    read_if(j, "max_iterations", x.max_iterations);
}

void to_json(Json& j, const TtsRecord& x) {
    j = Json{{"kind", to_string(x.kind)}, {"control", x.control}, {"run_time", x.run_time},
             {"p_gs", x.p_gs},            {"tts", number_or_null(x.tts)}};
}
void from_json(const Json& j, TtsRecord& x) {
    x.kind = tts_kind_from_string(j.at("kind").get<std::string>());
    j.at("control").get_to(x.control);
    j.at("run_time").get_to(x.run_time);
    j.at("p_gs").get_to(x.p_gs);
    x.tts = number_or_inf(j.at("tts"));
}

}  // namespace qaoalab
