#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "impwave/integrate.hpp"
#include "impwave/jump.hpp"
#include "impwave/mollifier.hpp"
#include "impwave/profile.hpp"
#include "impwave/seed.hpp"

namespace impwave {

using json = nlohmann::json;

struct CatalogEntry {
  std::string name;
  std::vector<double> params;
};

struct OutputSpec {
  std::string dir = ".";
  int samples = 2001;
};

/// One reproducible run: everything a command needs, as a committed fixture.
struct RunConfig {
  double lambda = 3.0;
  CatalogEntry profile{"zero", {}};
  CatalogEntry mollifier{"bump", {}};
  SeedData seed;
  IntegrationConfig integration;
  double eps = 1e-2;
  Interval t_span{-1.0, 1.0};
  LadderSpec ladder;
  double C1 = 1.0;
  OutputSpec outputs;

  BackgroundParams background() const { return make_background(lambda); }
  WaveProfile make_profile() const { return profile_catalog(profile.name, profile.params); }
  Mollifier make_mollifier() const { return mollifier_catalog(mollifier.name, mollifier.params); }
};

inline json to_json(const RunConfig& c) {
  json j;
  j["background"] = {{"lambda", c.lambda}};
  j["profile"] = {{"name", c.profile.name}, {"params", c.profile.params}};
  j["mollifier"] = {{"name", c.mollifier.name}, {"params", c.mollifier.params}};
  j["seed"] = {{"V0", c.seed.V0},
               {"Z0", c.seed.Z0},
               {"U0dot", c.seed.U0dot},
               {"V0dot", c.seed.V0dot},
               {"Z0dot", c.seed.Z0dot},
               {"e", c.seed.e}};
  j["integration"] = {{"rel_tol", c.integration.rel_tol},
                      {"abs_tol", c.integration.abs_tol},
                      {"max_step_in_zone", c.integration.max_step_in_zone},
                      {"zone_margin", c.integration.zone_margin},
                      {"project_onto_hyperboloid", c.integration.project_onto_hyperboloid},
                      {"max_crossings", c.integration.max_crossings}};
  j["eps"] = c.eps;
  j["t_span"] = {c.t_span.lo, c.t_span.hi};
  j["ladder"] = {{"eps0", c.ladder.eps0}, {"ratio", c.ladder.ratio}, {"count", c.ladder.count}};
  j["certificate"] = {{"C1", c.C1}};
  j["outputs"] = {{"dir", c.outputs.dir}, {"samples", c.outputs.samples}};
  return j;
}

namespace detail {

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_vec3(const json& j, const char* key, Vec3& out) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw ConfigError(std::string("config: '") + key + "' must be a 3-element array");
  for (int i = 0; i < 3; ++i) out[i] = a[i].get<double>();
}

inline void read_catalog(const json& j, const char* key, CatalogEntry& out) {
  if (!j.contains(key)) return;
  const auto& e = j.at(key);
  read_if(e, "name", out.name);
  if (e.contains("params")) out.params = e.at("params").get<std::vector<double>>();
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  RunConfig c;
  try {
    if (j.contains("background")) detail::read_if(j.at("background"), "lambda", c.lambda);
    detail::read_catalog(j, "profile", c.profile);
    detail::read_catalog(j, "mollifier", c.mollifier);
    if (j.contains("seed")) {
      const auto& s = j.at("seed");
      detail::read_if(s, "V0", c.seed.V0);
      detail::read_vec3(s, "Z0", c.seed.Z0);
      detail::read_if(s, "U0dot", c.seed.U0dot);
      detail::read_if(s, "V0dot", c.seed.V0dot);
      detail::read_vec3(s, "Z0dot", c.seed.Z0dot);
      detail::read_if(s, "e", c.seed.e);
    }
    if (j.contains("integration")) {
      const auto& i = j.at("integration");
      detail::read_if(i, "rel_tol", c.integration.rel_tol);
      detail::read_if(i, "abs_tol", c.integration.abs_tol);
      detail::read_if(i, "max_step_in_zone", c.integration.max_step_in_zone);
      detail::read_if(i, "zone_margin", c.integration.zone_margin);
      detail::read_if(i, "project_onto_hyperboloid", c.integration.project_onto_hyperboloid);
      detail::read_if(i, "max_crossings", c.integration.max_crossings);
    }
    detail::read_if(j, "eps", c.eps);
    if (j.contains("t_span")) {
      const auto& s = j.at("t_span");
      if (!s.is_array() || s.size() != 2)
        throw ConfigError("config: 't_span' must be a 2-element array");
      c.t_span = {s[0].get<double>(), s[1].get<double>()};
    }
    if (j.contains("ladder")) {
      const auto& l = j.at("ladder");
      detail::read_if(l, "eps0", c.ladder.eps0);
      detail::read_if(l, "ratio", c.ladder.ratio);
      detail::read_if(l, "count", c.ladder.count);
    }
    if (j.contains("certificate")) detail::read_if(j.at("certificate"), "C1", c.C1);
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      detail::read_if(o, "dir", c.outputs.dir);
      detail::read_if(o, "samples", c.outputs.samples);
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace impwave
