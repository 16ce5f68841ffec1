// Versioned model snapshots. One JSON document per model; field names are
// pinned by schemas/snapshot.schema.json. Doubles are emitted with
// shortest-round-trip formatting, so save/load is lossless (well beyond the
// 17-significant-digit contract). Derived quantities (moment cache, prior
// log-normalizer) are recomputed on load, deterministically.
#include <json.hpp>

#include "ttm/errors.hpp"
#include "ttm/io_util.hpp"
#include "ttm/model.hpp"

namespace ttm {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "ttm-model-snapshot";
constexpr int kVersion = 1;

json time_scale_to_json(const TimeScale& scale) {
  return json{{"raw_min", scale.raw_min},
              {"raw_max", scale.raw_max},
              {"margin", scale.margin},
              {"degenerate", scale.degenerate}};
}

TimeScale time_scale_from_json(const json& j) {
  TimeScale scale;
  scale.raw_min = j.at("raw_min").get<double>();
  scale.raw_max = j.at("raw_max").get<double>();
  scale.margin = j.at("margin").get<double>();
  scale.degenerate = j.at("degenerate").get<bool>();
  return scale;
}

std::string ny_kind_name(NySchemeKind kind) {
  switch (kind) {
    case NySchemeKind::constant: return "const";
    case NySchemeKind::fraction: return "frac";
    case NySchemeKind::sqrt_len: return "sqrt";
  }
  throw ConfigError("unknown ny scheme kind");
}

NySchemeKind ny_kind_from_name(const std::string& name) {
  if (name == "const") return NySchemeKind::constant;
  if (name == "frac") return NySchemeKind::fraction;
  if (name == "sqrt") return NySchemeKind::sqrt_len;
  throw ParseError("snapshot: unknown ny scheme kind '" + name + "'");
}

}  // namespace

void save_snapshot(const std::string& path, const ModelState& state) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["model"] = to_string(state.kind);
  j["k"] = state.k;
  j["v"] = state.v;
  j["alpha"] = state.hyper.alpha;
  j["eta"] = state.hyper.eta;
  j["nu"] = state.prior.nu;
  j["chi"] = json::array({state.prior.chi1, state.prior.chi2});
  j["ny_scheme"] =
      json{{"kind", ny_kind_name(state.ny.kind)}, {"value", state.ny.value}};
  j["delta"] = state.delta;
  j["moment_method"] = to_string(state.moment_method);
  j["include_rho_block"] = state.include_rho_block;
  j["lambda"] = state.lambda;
  if (state.kind == ModelKind::tot) {
    json rho = json::array();
    for (const auto& r : state.rho) rho.push_back(json::array({r.rho1, r.rho2}));
    j["rho"] = std::move(rho);
  }
  if (state.is_bayes()) {
    json posts = json::array();
    for (const auto& p : state.rho_post)
      posts.push_back(
          json{{"mu", p.mu}, {"psi", json::array({p.psi1, p.psi2})}});
    j["rho_posterior"] = std::move(posts);
  }
  j["time_scale"] = time_scale_to_json(state.scale);
  write_file_atomic(path, j.dump());
}

ModelState load_snapshot(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("snapshot " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      throw ParseError("snapshot " + path + ": unrecognized format field");
    if (j.at("version").get<int>() != kVersion)
      throw ParseError("snapshot " + path + ": unsupported version");

    ModelState state;
    state.kind = model_kind_from_string(j.at("model").get<std::string>());
    state.k = j.at("k").get<int>();
    state.v = j.at("v").get<int>();
    state.hyper.alpha = j.at("alpha").get<std::vector<double>>();
    state.hyper.eta = j.at("eta").get<double>();
    state.prior.nu = j.at("nu").get<double>();
    const auto& chi = j.at("chi");
    state.prior.chi1 = chi.at(0).get<double>();
    state.prior.chi2 = chi.at(1).get<double>();
    const auto& ny = j.at("ny_scheme");
    state.ny.kind = ny_kind_from_name(ny.at("kind").get<std::string>());
    state.ny.value = ny.at("value").get<double>();
    state.delta = j.at("delta").get<double>();
    state.moment_method =
        moment_method_from_string(j.at("moment_method").get<std::string>());
    state.include_rho_block = j.at("include_rho_block").get<bool>();
    state.lambda = j.at("lambda").get<std::vector<double>>();
    if (static_cast<long long>(state.lambda.size()) !=
        static_cast<long long>(state.k) * state.v)
      throw ParseError("snapshot " + path + ": lambda size != k*v");
    if (static_cast<int>(state.hyper.alpha.size()) != state.k)
      throw ParseError("snapshot " + path + ": alpha length != k");

    if (state.kind == ModelKind::tot) {
      for (const auto& r : j.at("rho"))
        state.rho.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
      if (static_cast<int>(state.rho.size()) != state.k)
        throw ParseError("snapshot " + path + ": rho length != k");
    }
    if (state.is_bayes()) {
      for (const auto& p : j.at("rho_posterior")) {
        const auto& psi = p.at("psi");
        state.rho_post.push_back({p.at("mu").get<double>(),
                                  psi.at(0).get<double>(),
                                  psi.at(1).get<double>()});
      }
      if (static_cast<int>(state.rho_post.size()) != state.k)
        throw ParseError("snapshot " + path + ": rho_posterior length != k");
      state.prior_log_norm =
          laplace_expansion(
              {state.prior.nu, state.prior.chi1, state.prior.chi2})
              .log_norm;
      state.refresh_moments();
    }
    state.scale = time_scale_from_json(j.at("time_scale"));
    return state;
  } catch (const json::exception& e) {
    throw ParseError("snapshot " + path + ": " + e.what());
  }
}

}  // namespace ttm
