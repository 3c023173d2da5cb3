/*
 * Copyright 2026 the paratune authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "paratune/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_set>

#include <json.hpp>

namespace paratune {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void check_continuous(const std::string& name, const Continuous& c) {
  if (!std::isfinite(c.loc) || !std::isfinite(c.scale)) {
    throw ValidationError("parameter '" + name +
                          "': loc and scale must be finite");
  }
  if (c.scale <= 0.0) {
    throw ValidationError("parameter '" + name + "': scale must be positive");
  }
}

void check_int_range(const std::string& name, const IntRange& r) {
  if (r.lo >= r.hi) {
    throw ValidationError("parameter '" + name +
                          "': range requires lo < hi, got [" +
                          std::to_string(r.lo) + ", " + std::to_string(r.hi) +
                          ")");
  }
}

void check_categorical(const std::string& name, const Categorical& c) {
  if (c.choices.empty()) {
    throw ValidationError("parameter '" + name +
                          "': choices must be non-empty");
  }
  std::unordered_set<std::string> seen;
  for (const auto& choice : c.choices) {
    if (!seen.insert(choice).second) {
      throw ValidationError("parameter '" + name + "': duplicate choice '" +
                            choice + "'");
    }
  }
}

}  // namespace

double Continuous::lower() const {
  return dist == DistKind::kUniform ? loc : std::pow(10.0, loc);
}

double Continuous::upper() const {
  return dist == DistKind::kUniform ? loc + scale : std::pow(10.0, loc + scale);
}

void SearchSpace::add(std::string name, ParameterDomain domain) {
  if (name.empty()) {
    throw ValidationError("parameter names must be non-empty");
  }
  for (const auto& [existing, _] : params_) {
    if (existing == name) {
      throw ValidationError("duplicate parameter '" + name + "'");
    }
  }
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Continuous>) {
          check_continuous(name, d);
        } else if constexpr (std::is_same_v<T, IntRange>) {
          check_int_range(name, d);
        } else {
          check_categorical(name, d);
        }
      },
      domain);
  params_.emplace_back(std::move(name), std::move(domain));
}

std::size_t SearchSpace::encoded_dimension() const {
  std::size_t dim = 0;
  for (const auto& [_, domain] : params_) {
    if (const auto* cat = std::get_if<Categorical>(&domain)) {
      dim += cat->choices.size();
    } else {
      dim += 1;
    }
  }
  return dim;
}

void SearchSpace::validate(const Configuration& config) const {
  for (const auto& [name, _] : params_) {
    if (config.values.find(name) == config.values.end()) {
      throw ValidationError("configuration is missing parameter '" + name +
                            "'");
    }
  }
  for (const auto& [name, value] : config.values) {
    const ParameterDomain* domain = nullptr;
    for (const auto& [pname, pdomain] : params_) {
      if (pname == name) {
        domain = &pdomain;
        break;
      }
    }
    if (domain == nullptr) {
      throw ValidationError("configuration has unknown parameter '" + name +
                            "'");
    }
    if (const auto* cont = std::get_if<Continuous>(domain)) {
      const double* v = std::get_if<double>(&value);
      if (v == nullptr) {
        throw ValidationError("parameter '" + name +
                              "': expected a real value");
      }
      if (!std::isfinite(*v) || *v < cont->lower() || *v > cont->upper()) {
        throw ValidationError("parameter '" + name + "': value " +
                              format_double(*v) + " outside [" +
                              format_double(cont->lower()) + ", " +
                              format_double(cont->upper()) + "]");
      }
    } else if (const auto* range = std::get_if<IntRange>(domain)) {
      const std::int64_t* v = std::get_if<std::int64_t>(&value);
      if (v == nullptr) {
        throw ValidationError("parameter '" + name +
                              "': expected an integer value");
      }
      if (*v < range->lo || *v >= range->hi) {
        throw ValidationError("parameter '" + name + "': value " +
                              std::to_string(*v) + " outside [" +
                              std::to_string(range->lo) + ", " +
                              std::to_string(range->hi) + ")");
      }
    } else {
      const auto& cat = std::get<Categorical>(*domain);
      const std::string* v = std::get_if<std::string>(&value);
      if (v == nullptr) {
        throw ValidationError("parameter '" + name +
                              "': expected a categorical value");
      }
      if (std::find(cat.choices.begin(), cat.choices.end(), *v) ==
          cat.choices.end()) {
        throw ValidationError("parameter '" + name + "': '" + *v +
                              "' is not one of the declared choices");
      }
    }
  }
}

SearchSpace parse_space(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("invalid space document: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("space document must be a JSON object");
  }

  SearchSpace space;
  for (const auto& [name, body] : doc.items()) {
    if (!body.is_object()) {
      throw ParseError("parameter '" + name + "' must be a JSON object");
    }
    const bool has_dist = body.contains("dist");
    const bool has_range = body.contains("range");
    const bool has_choices = body.contains("choices");
    const int forms = int(has_dist) + int(has_range) + int(has_choices);
    if (forms != 1) {
      throw ParseError("parameter '" + name +
                       "' must declare exactly one of dist, range, choices");
    }

    if (has_dist) {
      if (!body["dist"].is_string()) {
        throw ParseError("parameter '" + name + "': dist must be a string");
      }
      const std::string dist = body["dist"].get<std::string>();
      Continuous c;
      if (dist == "uniform") {
        c.dist = DistKind::kUniform;
      } else if (dist == "loguniform") {
        c.dist = DistKind::kLogUniform;
      } else {
        throw ParseError("parameter '" + name + "': unknown dist '" + dist +
                         "'");
      }
      if (!body.contains("loc") || !body.contains("scale") ||
          !body["loc"].is_number() || !body["scale"].is_number()) {
        throw ParseError("parameter '" + name +
                         "': dist form requires numeric loc and scale");
      }
      c.loc = body["loc"].get<double>();
      c.scale = body["scale"].get<double>();
      space.add(name, c);
    } else if (has_range) {
      const auto& range = body["range"];
      if (!range.is_array() || range.size() != 2 ||
          !range[0].is_number_integer() || !range[1].is_number_integer()) {
        throw ParseError("parameter '" + name +
                         "': range must be a two-element integer array");
      }
      space.add(name, IntRange{range[0].get<std::int64_t>(),
                               range[1].get<std::int64_t>()});
    } else {
      const auto& choices = body["choices"];
      if (!choices.is_array() || choices.empty()) {
        throw ParseError("parameter '" + name +
                         "': choices must be a non-empty array of strings");
      }
      Categorical cat;
      for (const auto& choice : choices) {
        if (!choice.is_string()) {
          throw ParseError("parameter '" + name +
                           "': choices must be a non-empty array of strings");
        }
        cat.choices.push_back(choice.get<std::string>());
      }
      space.add(name, std::move(cat));
    }
  }
  return space;
}

std::string serialize_space(const SearchSpace& space) {
  ordered_json doc = ordered_json::object();
  for (const auto& [name, domain] : space.params()) {
    if (const auto* cont = std::get_if<Continuous>(&domain)) {
      doc[name] = {
          {"dist",
           cont->dist == DistKind::kUniform ? "uniform" : "loguniform"},
          {"loc", cont->loc},
          {"scale", cont->scale}};
    } else if (const auto* range = std::get_if<IntRange>(&domain)) {
      doc[name] = {{"range", {range->lo, range->hi}}};
    } else {
      doc[name] = {{"choices", std::get<Categorical>(domain).choices}};
    }
  }
  return doc.dump(2);
}

std::vector<Configuration> sample_configurations(const SearchSpace& space,
                                                 std::size_t n, Rng& rng) {
  std::vector<Configuration> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Configuration config;
    for (const auto& [name, domain] : space.params()) {
      if (const auto* cont = std::get_if<Continuous>(&domain)) {
        const double u = cont->loc + cont->scale * uniform_unit(rng);
        config.values[name] =
            cont->dist == DistKind::kUniform ? u : std::pow(10.0, u);
      } else if (const auto* range = std::get_if<IntRange>(&domain)) {
        const auto span = static_cast<std::uint64_t>(range->hi - range->lo);
        config.values[name] =
            range->lo + static_cast<std::int64_t>(uniform_below(rng, span));
      } else {
        const auto& choices = std::get<Categorical>(domain).choices;
        config.values[name] = choices[uniform_below(rng, choices.size())];
      }
    }
    out.push_back(std::move(config));
  }
  return out;
}

EncodedPoint encode(const SearchSpace& space, const Configuration& config) {
  space.validate(config);
  EncodedPoint point(space.encoded_dimension());
  Eigen::Index k = 0;
  for (const auto& [name, domain] : space.params()) {
    const ParamValue& value = config.values.at(name);
    if (const auto* cont = std::get_if<Continuous>(&domain)) {
      const double v = std::get<double>(value);
      const double u =
          cont->dist == DistKind::kUniform ? v : std::log10(v);
      point[k++] = std::clamp((u - cont->loc) / cont->scale, 0.0, 1.0);
    } else if (const auto* range = std::get_if<IntRange>(&domain)) {
      const auto v = std::get<std::int64_t>(value);
      const auto width = range->hi - 1 - range->lo;
      point[k++] = width == 0 ? 0.0
                              : static_cast<double>(v - range->lo) /
                                    static_cast<double>(width);
    } else {
      const auto& choices = std::get<Categorical>(domain).choices;
      const auto& v = std::get<std::string>(value);
      for (const auto& choice : choices) {
        point[k++] = choice == v ? 1.0 : 0.0;
      }
    }
  }
  return point;
}

Configuration decode(const SearchSpace& space, const EncodedPoint& point) {
  if (static_cast<std::size_t>(point.size()) != space.encoded_dimension()) {
    throw ValidationError(
        "encoded point has dimension " + std::to_string(point.size()) +
        ", expected " + std::to_string(space.encoded_dimension()));
  }
  Configuration config;
  Eigen::Index k = 0;
  for (const auto& [name, domain] : space.params()) {
    if (const auto* cont = std::get_if<Continuous>(&domain)) {
      const double u = cont->loc + cont->scale * std::clamp(point[k++], 0.0, 1.0);
      config.values[name] =
          cont->dist == DistKind::kUniform ? u : std::pow(10.0, u);
    } else if (const auto* range = std::get_if<IntRange>(&domain)) {
      const auto width = range->hi - 1 - range->lo;
      const double scaled = std::clamp(point[k++], 0.0, 1.0) *
                            static_cast<double>(width);
      auto v = range->lo + static_cast<std::int64_t>(std::llround(scaled));
      v = std::clamp(v, range->lo, range->hi - 1);
      config.values[name] = v;
    } else {
      const auto& choices = std::get<Categorical>(domain).choices;
      Eigen::Index best = -1;
      double best_value = 0.0;
      for (std::size_t j = 0; j < choices.size(); ++j, ++k) {
        if (point[k] > best_value) {
          best_value = point[k];
          best = static_cast<Eigen::Index>(j);
        }
      }
      if (best < 0) {
        throw ValidationError("parameter '" + name +
                              "': categorical block is all zero");
      }
      config.values[name] = choices[static_cast<std::size_t>(best)];
    }
  }
  return config;
}

std::size_t default_mc_budget(const SearchSpace& space) {
  const std::size_t raw = 1000 * space.encoded_dimension();
  return std::clamp<std::size_t>(raw, 2000, 20000);
}

std::string to_string(const ParamValue& value) {
  if (const auto* d = std::get_if<double>(&value)) {
    return format_double(*d);
  }
  if (const auto* i = std::get_if<std::int64_t>(&value)) {
    return std::to_string(*i);
  }
  return std::get<std::string>(value);
}

std::string to_string(const Configuration& config) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, value] : config.values) {
    if (!first) {
      out += ", ";
    }
    out += name + "=" + to_string(value);
    first = false;
  }
  return out + "}";
}

}  // namespace paratune
