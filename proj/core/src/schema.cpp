#include "riseer/schema.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <regex>

#include "riseer/error.hpp"

namespace riseer {
namespace {

using nlohmann::json;

constexpr std::string_view kDefinitions = R"({
  "month": {"type": "string", "pattern": "^[0-9]{4}-[0-9]{2}$"},
  "date": {"type": "string", "pattern": "^[0-9]{4}-[0-9]{2}-[0-9]{2}$"},
  "count": {"type": "integer", "minimum": 0},
  "nullable_number": {"type": ["number", "null"]},
  "tier": {"enum": ["Primary", "Secondary", "Tertiary"]},
  "model": {"enum": ["rf", "gbt", "naive"]},
  "lonlat": {
    "type": "object", "required": ["lon", "lat"], "additionalProperties": false,
    "properties": {
      "lon": {"type": "number", "minimum": -180, "maximum": 180},
      "lat": {"type": "number", "minimum": -90, "maximum": 90}
    }
  },
  "aggregation_index": {
    "type": "object", "required": ["kind", "value"], "additionalProperties": false,
    "properties": {
      "kind": {"enum": ["finite", "unbounded", "undefined"]},
      "value": {"type": ["number", "null"], "minimum": 0}
    }
  },
  "indicators": {
    "type": "object", "additionalProperties": false,
    "required": ["n_primary", "n_secondary", "n_tertiary", "aggregation_index", "avg_capital",
                 "total_capital", "credit_rating", "livability", "mortality"],
    "properties": {
      "n_primary": {"$ref": "#/definitions/count"},
      "n_secondary": {"$ref": "#/definitions/count"},
      "n_tertiary": {"$ref": "#/definitions/count"},
      "aggregation_index": {"$ref": "#/definitions/aggregation_index"},
      "avg_capital": {"type": "number", "minimum": 0},
      "total_capital": {"type": "number", "minimum": 0},
      "credit_rating": {"$ref": "#/definitions/nullable_number"},
      "livability": {"type": "number", "minimum": 0, "maximum": 1},
      "mortality": {"type": "number", "minimum": 0, "maximum": 1}
    }
  },
  "normalized": {
    "type": "object",
    "required": ["n_primary", "n_secondary", "n_tertiary", "aggregation_index", "avg_capital",
                 "total_capital", "credit_rating", "livability", "mortality"],
    "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1}
  },
  "rings": {
    "type": "object", "required": ["bands", "beyond"], "additionalProperties": false,
    "properties": {
      "beyond": {"$ref": "#/definitions/count"},
      "bands": {
        "type": "array", "minItems": 1,
        "items": {
          "type": "object", "required": ["lo_km", "hi_km", "count", "indicators"],
          "additionalProperties": false,
          "properties": {
            "lo_km": {"type": "number", "minimum": 0},
            "hi_km": {"type": "number", "minimum": 0},
            "count": {"$ref": "#/definitions/count"},
            "indicators": {"anyOf": [{"type": "null"}, {"$ref": "#/definitions/indicators"}]}
          }
        }
      }
    }
  },
  "snapshot": {
    "type": "object", "additionalProperties": false,
    "required": ["month", "active_counts", "total", "model_features", "projection_features"],
    "properties": {
      "month": {"$ref": "#/definitions/month"},
      "active_counts": {"type": "array", "minItems": 3, "maxItems": 3,
                        "items": {"$ref": "#/definitions/count"}},
      "total": {"$ref": "#/definitions/count"},
      "model_features": {"type": "array", "minItems": 7, "maxItems": 7, "items": {"type": "number"}},
      "projection_features": {"type": "array", "items": {"type": "number"}}
    }
  },
  "forecast_point": {
    "type": "object", "additionalProperties": false,
    "required": ["month", "actual", "predicted", "base_value", "attributions", "bar"],
    "properties": {
      "month": {"$ref": "#/definitions/month"},
      "actual": {"type": "number", "minimum": 0},
      "predicted": {"type": "number"},
      "base_value": {"type": "number"},
      "attributions": {"type": "array", "minItems": 8, "maxItems": 8, "items": {"type": "number"}},
      "bar": {
        "type": "object", "required": ["magnitude", "sign", "empty"], "additionalProperties": false,
        "properties": {
          "magnitude": {"type": "array", "minItems": 8, "maxItems": 8,
                        "items": {"type": "number", "minimum": 0, "maximum": 1}},
          "sign": {"type": "array", "minItems": 8, "maxItems": 8, "items": {"enum": [-1, 0, 1]}},
          "empty": {"type": "boolean"}
        }
      }
    }
  },
  "edge": {
    "type": "object", "additionalProperties": false,
    "required": ["from_cluster", "to_cluster", "from_period", "to_period", "overlap",
                 "centroid_shift_km", "annotation"],
    "properties": {
      "from_cluster": {"type": "string"},
      "to_cluster": {"type": "string"},
      "from_period": {"$ref": "#/definitions/count"},
      "to_period": {"$ref": "#/definitions/count"},
      "overlap": {"type": "integer", "minimum": 1},
      "centroid_shift_km": {"type": "number", "minimum": 0},
      "annotation": {
        "type": "object", "required": ["transfers", "shift_km", "label"],
        "additionalProperties": false,
        "properties": {
          "transfers": {"type": "integer", "minimum": 1},
          "shift_km": {"type": "number", "minimum": 0},
          "label": {"type": "string"}
        }
      }
    }
  },
  "forecast_run_points": {
    "type": "object", "required": ["tier", "model", "points"],
    "properties": {
      "tier": {"$ref": "#/definitions/tier"},
      "model": {"$ref": "#/definitions/model"},
      "points": {"type": "array", "items": {"$ref": "#/definitions/forecast_point"}}
    }
  }
})";

const std::map<std::string, std::string_view, std::less<>> kSchemas{
    {"riseer.snapshots.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "tiers", "feature_names", "projection_layout", "from", "to", "warnings", "snapshots"],
  "properties": {
    "schema": {"const": "riseer.snapshots.v1"},
    "tiers": {"type": "array", "items": {"$ref": "#/definitions/tier"}},
    "feature_names": {"type": "array", "minItems": 7, "maxItems": 7, "items": {"type": "string"}},
    "projection_layout": {
      "type": "object",
      "required": ["classification_code", "property", "state", "credit_rating", "capital"],
      "additionalProperties": {"type": "array", "items": {"type": "string"}}
    },
    "from": {"anyOf": [{"type": "null"}, {"$ref": "#/definitions/month"}]},
    "to": {"anyOf": [{"type": "null"}, {"$ref": "#/definitions/month"}]},
    "warnings": {"type": "array", "items": {"type": "string"}},
    "snapshots": {"type": "array", "items": {"$ref": "#/definitions/snapshot"}}
  }
})"},
    {"riseer.segments.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "series", "threshold", "total_error", "values", "segments", "periods"],
  "properties": {
    "schema": {"const": "riseer.segments.v1"},
    "series": {"type": "string"},
    "threshold": {
      "type": "object", "required": ["spec", "value"], "additionalProperties": false,
      "properties": {"spec": {"type": "string"}, "value": {"type": "number", "minimum": 0}}
    },
    "total_error": {"type": "number", "minimum": 0},
    "values": {"type": "array", "items": {"type": "number"}},
    "segments": {
      "type": "array", "minItems": 1,
      "items": {
        "type": "object", "additionalProperties": false,
        "required": ["start_idx", "end_idx", "from", "to", "slope", "intercept", "max_residual"],
        "properties": {
          "start_idx": {"$ref": "#/definitions/count"},
          "end_idx": {"$ref": "#/definitions/count"},
          "from": {"$ref": "#/definitions/month"},
          "to": {"$ref": "#/definitions/month"},
          "slope": {"type": "number"},
          "intercept": {"type": "number"},
          "max_residual": {"type": "number", "minimum": 0}
        }
      }
    },
    "periods": {
      "type": "array", "minItems": 1,
      "items": {
        "type": "object", "additionalProperties": false,
        "required": ["index", "start_idx", "end_idx", "from", "to"],
        "properties": {
          "index": {"$ref": "#/definitions/count"},
          "start_idx": {"$ref": "#/definitions/count"},
          "end_idx": {"$ref": "#/definitions/count"},
          "from": {"$ref": "#/definitions/month"},
          "to": {"$ref": "#/definitions/month"}
        }
      }
    }
  }
})"},
    {"riseer.clusters.v1", R"({
  "type": "object", "additionalProperties": false, "required": ["schema", "periods"],
  "properties": {
    "schema": {"const": "riseer.clusters.v1"},
    "periods": {
      "type": "array",
      "items": {
        "type": "object", "additionalProperties": false,
        "required": ["period", "from", "to", "params", "auto_params", "stable", "sweep",
                     "active_records", "noise", "clusters"],
        "properties": {
          "period": {"$ref": "#/definitions/count"},
          "from": {"$ref": "#/definitions/month"},
          "to": {"$ref": "#/definitions/month"},
          "params": {
            "type": "object", "required": ["eps_km", "min_pts"], "additionalProperties": false,
            "properties": {"eps_km": {"type": "number", "minimum": 0},
                           "min_pts": {"type": "integer", "minimum": 0}}
          },
          "auto_params": {"type": "boolean"},
          "stable": {"type": "boolean"},
          "sweep": {
            "type": "array",
            "items": {
              "type": "object", "required": ["eps_km", "min_pts", "clusters"],
              "additionalProperties": false,
              "properties": {"eps_km": {"type": "number", "minimum": 0},
                             "min_pts": {"$ref": "#/definitions/count"},
                             "clusters": {"$ref": "#/definitions/count"}}
            }
          },
          "active_records": {"$ref": "#/definitions/count"},
          "noise": {"$ref": "#/definitions/count"},
          "clusters": {
            "type": "array",
            "items": {
              "type": "object", "additionalProperties": false,
              "required": ["id", "size", "label", "centroid", "member_ids"],
              "properties": {
                "id": {"type": "string"},
                "size": {"type": "integer", "minimum": 1},
                "label": {"const": "core cluster"},
                "centroid": {"$ref": "#/definitions/lonlat"},
                "member_ids": {"type": "array", "minItems": 1, "items": {"type": "string"}}
              }
            }
          }
        }
      }
    }
  }
})"},
    {"riseer.indicators.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "metrics", "clusters", "growth"],
  "properties": {
    "schema": {"const": "riseer.indicators.v1"},
    "metrics": {"type": "array", "minItems": 9, "maxItems": 9, "items": {"type": "string"}},
    "clusters": {
      "type": "array",
      "items": {
        "type": "object", "additionalProperties": false,
        "required": ["id", "period", "as_of", "indicators", "normalized", "rings"],
        "properties": {
          "id": {"type": "string"},
          "period": {"$ref": "#/definitions/count"},
          "as_of": {"$ref": "#/definitions/date"},
          "indicators": {"$ref": "#/definitions/indicators"},
          "normalized": {"$ref": "#/definitions/normalized"},
          "rings": {"$ref": "#/definitions/rings"}
        }
      }
    },
    "growth": {
      "type": "array",
      "items": {
        "type": "object", "required": ["path_id", "boxes"], "additionalProperties": false,
        "properties": {
          "path_id": {"type": "string"},
          "boxes": {
            "type": "array",
            "items": {
              "type": "object", "additionalProperties": false,
              "required": ["period", "cluster_id", "tier", "samples", "skipped", "summary"],
              "properties": {
                "period": {"$ref": "#/definitions/count"},
                "cluster_id": {"type": "string"},
                "tier": {"$ref": "#/definitions/tier"},
                "samples": {"type": "array", "items": {"type": "number"}},
                "skipped": {"$ref": "#/definitions/count"},
                "summary": {
                  "anyOf": [
                    {"type": "null"},
                    {"type": "object", "required": ["min", "q1", "median", "q3", "max"],
                     "additionalProperties": {"type": "number"}}
                  ]
                }
              }
            }
          }
        }
      }
    }
  }
})"},
    {"riseer.paths.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "edges", "paths", "overlap_matrices"],
  "properties": {
    "schema": {"const": "riseer.paths.v1"},
    "edges": {"type": "array", "items": {"$ref": "#/definitions/edge"}},
    "paths": {
      "type": "array",
      "items": {
        "type": "object", "required": ["path_id", "clusters", "periods", "edges"],
        "additionalProperties": false,
        "properties": {
          "path_id": {"type": "string"},
          "clusters": {"type": "array", "minItems": 1, "items": {"type": "string"}},
          "periods": {"type": "array", "minItems": 1, "items": {"$ref": "#/definitions/count"}},
          "edges": {"type": "array", "items": {"$ref": "#/definitions/edge"}}
        }
      }
    },
    "overlap_matrices": {
      "type": "array",
      "items": {
        "type": "object", "required": ["from_period", "to_period", "rows", "cols", "counts"],
        "additionalProperties": false,
        "properties": {
          "from_period": {"$ref": "#/definitions/count"},
          "to_period": {"$ref": "#/definitions/count"},
          "rows": {"type": "array", "items": {"type": "string"}},
          "cols": {"type": "array", "items": {"type": "string"}},
          "counts": {"type": "array",
                     "items": {"type": "array", "items": {"$ref": "#/definitions/count"}}}
        }
      }
    }
  }
})"},
    {"riseer.forecast.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "attribution_names", "window", "initial_years", "models",
               "first_evaluation_month", "runs"],
  "properties": {
    "schema": {"const": "riseer.forecast.v1"},
    "attribution_names": {"type": "array", "minItems": 8, "maxItems": 8, "items": {"type": "string"}},
    "window": {"type": "integer", "minimum": 1},
    "initial_years": {"type": "integer", "minimum": 1},
    "models": {"type": "array", "items": {"$ref": "#/definitions/model"}},
    "first_evaluation_month": {"anyOf": [{"type": "null"}, {"$ref": "#/definitions/month"}]},
    "runs": {
      "type": "array",
      "items": {
        "type": "object", "additionalProperties": false,
        "required": ["tier", "model", "mape", "fits", "points"],
        "properties": {
          "tier": {"$ref": "#/definitions/tier"},
          "model": {"$ref": "#/definitions/model"},
          "mape": {
            "anyOf": [
              {"type": "null"},
              {"type": "object", "required": ["percent", "used", "skipped"],
               "additionalProperties": false,
               "properties": {"percent": {"type": "number", "minimum": 0},
                              "used": {"$ref": "#/definitions/count"},
                              "skipped": {"$ref": "#/definitions/count"}}}
            ]
          },
          "fits": {
            "type": "array",
            "items": {
              "type": "object", "additionalProperties": false,
              "required": ["evaluation_first", "evaluation_last", "train_first_target",
                           "train_last_target", "pairs"],
              "properties": {
                "evaluation_first": {"$ref": "#/definitions/month"},
                "evaluation_last": {"$ref": "#/definitions/month"},
                "train_first_target": {"$ref": "#/definitions/month"},
                "train_last_target": {"$ref": "#/definitions/month"},
                "pairs": {"type": "integer", "minimum": 1}
              }
            }
          },
          "points": {"type": "array", "items": {"$ref": "#/definitions/forecast_point"}}
        }
      }
    }
  }
})"},
    {"riseer.projection.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "settings", "kl", "max_entropy_error", "kl_trace", "points", "chronology"],
  "properties": {
    "schema": {"const": "riseer.projection.v1"},
    "settings": {
      "type": "object", "additionalProperties": false,
      "required": ["perplexity", "iterations", "exaggeration", "exaggeration_iterations",
                   "learning_rate", "seed"],
      "properties": {
        "perplexity": {"type": "number", "minimum": 0},
        "iterations": {"type": "integer", "minimum": 1},
        "exaggeration": {"type": "number"},
        "exaggeration_iterations": {"$ref": "#/definitions/count"},
        "learning_rate": {"type": "number", "minimum": 0},
        "seed": {"$ref": "#/definitions/count"}
      }
    },
    "kl": {"type": "number"},
    "max_entropy_error": {"type": "number", "minimum": 0},
    "kl_trace": {"type": "array", "items": {"type": "number"}},
    "points": {
      "type": "array",
      "items": {
        "type": "object", "required": ["month", "x", "y", "order_index"],
        "additionalProperties": false,
        "properties": {
          "month": {"$ref": "#/definitions/month"},
          "x": {"type": "number"},
          "y": {"type": "number"},
          "order_index": {"$ref": "#/definitions/count"}
        }
      }
    },
    "chronology": {
      "anyOf": [
        {"type": "null"},
        {"type": "object", "required": ["order", "first", "last", "segments"],
         "additionalProperties": false,
         "properties": {
           "order": {"type": "array", "items": {"$ref": "#/definitions/count"}},
           "first": {"$ref": "#/definitions/count"},
           "last": {"$ref": "#/definitions/count"},
           "segments": {"$ref": "#/definitions/count"}
         }}
      ]
    }
  }
})"},
    {"riseer.manifest.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "dataset_id", "created_at", "input", "config_sha256", "config",
               "artifacts", "files"],
  "properties": {
    "schema": {"const": "riseer.manifest.v1"},
    "dataset_id": {"type": "string"},
    "created_at": {"type": "string"},
    "input": {
      "type": "object", "required": ["path", "sha256", "records", "rejections"],
      "additionalProperties": false,
      "properties": {
        "path": {"type": "string"},
        "sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "records": {"$ref": "#/definitions/count"},
        "rejections": {"$ref": "#/definitions/count"}
      }
    },
    "config_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
    "config": {"type": "object"},
    "artifacts": {
      "type": "object",
      "required": ["snapshots", "segments", "clusters", "indicators", "paths", "forecast", "projection"],
      "additionalProperties": {
        "type": "object", "required": ["file", "schema", "sha256", "bytes"],
        "additionalProperties": false,
        "properties": {
          "file": {"type": "string"},
          "schema": {"type": "string"},
          "sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
          "bytes": {"$ref": "#/definitions/count"}
        }
      }
    },
    "files": {
      "type": "object",
      "additionalProperties": {
        "type": "object", "required": ["sha256", "bytes"], "additionalProperties": false,
        "properties": {
          "sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
          "bytes": {"$ref": "#/definitions/count"}
        }
      }
    }
  }
})"},
    {"riseer.range.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "from", "to", "snapshots", "forecast"],
  "properties": {
    "schema": {"const": "riseer.range.v1"},
    "from": {"$ref": "#/definitions/month"},
    "to": {"$ref": "#/definitions/month"},
    "snapshots": {"type": "array", "items": {"$ref": "#/definitions/snapshot"}},
    "forecast": {"type": "array", "items": {"$ref": "#/definitions/forecast_run_points"}}
  }
})"},
    {"riseer.cluster_details.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "id", "period", "from", "to", "size", "centroid", "indicators", "rings",
               "months", "registration", "livability", "categories", "heat_grid"],
  "properties": {
    "schema": {"const": "riseer.cluster_details.v1"},
    "id": {"type": "string"},
    "period": {"$ref": "#/definitions/count"},
    "from": {"$ref": "#/definitions/month"},
    "to": {"$ref": "#/definitions/month"},
    "size": {"type": "integer", "minimum": 1},
    "centroid": {"$ref": "#/definitions/lonlat"},
    "indicators": {"$ref": "#/definitions/indicators"},
    "rings": {"$ref": "#/definitions/rings"},
    "months": {"type": "array", "items": {"$ref": "#/definitions/month"}},
    "registration": {
      "type": "array",
      "items": {"type": "array", "minItems": 3, "maxItems": 3, "items": {"$ref": "#/definitions/count"}}
    },
    "livability": {
      "type": "array",
      "items": {"type": ["number", "null"], "minimum": 0, "maximum": 1}
    },
    "categories": {
      "type": "object", "required": ["tier", "classification_code"], "additionalProperties": false,
      "properties": {
        "tier": {"type": "object", "additionalProperties": {"$ref": "#/definitions/count"}},
        "classification_code": {"type": "object",
                                "additionalProperties": {"$ref": "#/definitions/count"}}
      }
    },
    "heat_grid": {
      "type": "object", "required": ["rows", "cols", "bbox", "counts"], "additionalProperties": false,
      "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "bbox": {
          "type": "object", "required": ["lon", "lat"], "additionalProperties": false,
          "properties": {
            "lon": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
            "lat": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}
          }
        },
        "counts": {"type": "array",
                   "items": {"type": "array", "items": {"$ref": "#/definitions/count"}}}
      }
    }
  }
})"},
    {"riseer.compare.v1", R"({
  "type": "object", "additionalProperties": false,
  "required": ["schema", "ids", "metrics", "bounds", "clusters"],
  "properties": {
    "schema": {"const": "riseer.compare.v1"},
    "ids": {"type": "array", "minItems": 2, "maxItems": 3, "items": {"type": "string"}},
    "metrics": {"type": "array", "minItems": 9, "maxItems": 9, "items": {"type": "string"}},
    "bounds": {
      "type": "object",
      "additionalProperties": {
        "type": "object", "required": ["min", "max"], "additionalProperties": false,
        "properties": {"min": {"$ref": "#/definitions/nullable_number"},
                       "max": {"$ref": "#/definitions/nullable_number"}}
      }
    },
    "clusters": {
      "type": "array", "minItems": 2, "maxItems": 3,
      "items": {
        "type": "object", "required": ["id", "period", "indicators", "normalized", "rings"],
        "additionalProperties": false,
        "properties": {
          "id": {"type": "string"},
          "period": {"$ref": "#/definitions/count"},
          "indicators": {"$ref": "#/definitions/indicators"},
          "normalized": {"$ref": "#/definitions/normalized"},
          "rings": {"$ref": "#/definitions/rings"}
        }
      }
    }
  }
})"},
    {"riseer.error.v1", R"({
  "type": "object", "required": ["code", "message"], "additionalProperties": false,
  "properties": {"code": {"type": "string"}, "message": {"type": "string"}}
})"},
};

std::string type_of(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return "boolean";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return "integer";
    case json::value_t::number_float: return "number";
    case json::value_t::string: return "string";
    case json::value_t::array: return "array";
    case json::value_t::object: return "object";
    default: return "unknown";
  }
}

bool has_type(const json& v, const std::string& type) {
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      return std::isfinite(d) && std::floor(d) == d;
    }
    return false;
  }
  return type_of(v) == type;
}

std::string escape_pointer(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out.push_back(c);
  }
  return out;
}

const std::regex& cached_regex(const std::string& pattern) {
  static std::mutex mu;
  static std::map<std::string, std::regex> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(pattern);
  if (it == cache.end()) it = cache.emplace(pattern, std::regex(pattern)).first;
  return it->second;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& schema, const json& doc, const std::string& path) {
    if (issues_.size() >= 50) return;
    if (schema.contains("$ref")) {
      check(resolve(schema.at("$ref").get<std::string>()), doc, path);
      return;
    }
    if (schema.contains("type")) {
      const auto& t = schema.at("type");
      bool ok = false;
      if (t.is_string()) ok = has_type(doc, t.get<std::string>());
      else for (const auto& alt : t) ok = ok || has_type(doc, alt.get<std::string>());
      if (!ok) {
        fail(path, "expected type " + t.dump() + ", got " + type_of(doc));
        return;
      }
    }
    if (schema.contains("const") && doc != schema.at("const")) {
      fail(path, "expected constant " + schema.at("const").dump());
    }
    if (schema.contains("enum")) {
      const auto& values = schema.at("enum");
      if (std::find(values.begin(), values.end(), doc) == values.end()) {
        fail(path, "value " + doc.dump() + " not in enum");
      }
    }
    if (schema.contains("anyOf")) {
      bool any = false;
      for (const auto& alt : schema.at("anyOf")) {
        Validator sub(root_);
        sub.check(alt, doc, path);
        if (sub.issues_.empty()) {
          any = true;
          break;
        }
      }
      if (!any) fail(path, "no anyOf alternative matched");
    }
    if (doc.is_number()) {
      const double v = doc.get<double>();
      if (schema.contains("minimum") && v < schema.at("minimum").get<double>()) {
        fail(path, "below minimum " + schema.at("minimum").dump());
      }
      if (schema.contains("maximum") && v > schema.at("maximum").get<double>()) {
        fail(path, "above maximum " + schema.at("maximum").dump());
      }
    }
    if (doc.is_string() && schema.contains("pattern")) {
      if (!std::regex_search(doc.get<std::string>(),
                             cached_regex(schema.at("pattern").get<std::string>()))) {
        fail(path, "does not match pattern " + schema.at("pattern").get<std::string>());
      }
    }
    if (doc.is_array()) {
      if (schema.contains("minItems") && doc.size() < schema.at("minItems").get<std::size_t>()) {
        fail(path, "fewer than minItems");
      }
      if (schema.contains("maxItems") && doc.size() > schema.at("maxItems").get<std::size_t>()) {
        fail(path, "more than maxItems");
      }
      if (schema.contains("items")) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
          check(schema.at("items"), doc[i], path + "/" + std::to_string(i));
        }
      }
    }
    if (doc.is_object()) {
      if (schema.contains("required")) {
        for (const auto& key : schema.at("required")) {
          if (!doc.contains(key.get<std::string>())) {
            fail(path, "missing required property " + key.get<std::string>());
          }
        }
      }
      const json* props = schema.contains("properties") ? &schema.at("properties") : nullptr;
      for (const auto& [key, value] : doc.items()) {
        const std::string sub = path + "/" + escape_pointer(key);
        if (props && props->contains(key)) {
          check(props->at(key), value, sub);
        } else if (schema.contains("additionalProperties")) {
          const auto& extra = schema.at("additionalProperties");
          if (extra.is_boolean()) {
            if (!extra.get<bool>()) fail(sub, "unexpected property");
          } else {
            check(extra, value, sub);
          }
        }
      }
    }
  }

  std::vector<SchemaIssue> take() { return std::move(issues_); }

 private:
  const json& resolve(const std::string& ref) {
    if (!ref.starts_with("#/")) throw Error(Errc::invalid_argument, "unsupported $ref " + ref);
    return root_.at(json::json_pointer(ref.substr(1)));
  }
  void fail(const std::string& path, std::string message) {
    issues_.push_back({path.empty() ? "/" : path, std::move(message)});
  }

  const json& root_;
  std::vector<SchemaIssue> issues_;
};

const std::map<std::string, json, std::less<>>& compiled() {
  static const auto schemas = [] {
    std::map<std::string, json, std::less<>> out;
    const json defs = json::parse(kDefinitions);
    for (const auto& [id, text] : kSchemas) {
      json s = json::parse(text);
      s["$schema"] = "http://json-schema.org/draft-07/schema#";
      s["$id"] = id;
      s["definitions"] = defs;
      out.emplace(id, std::move(s));
    }
    return out;
  }();
  return schemas;
}

}  // namespace

std::vector<SchemaIssue> validate_schema(const json& schema, const json& doc) {
  Validator v(schema);
  v.check(schema, doc, "");
  return v.take();
}

const json& published_schema(std::string_view id) {
  const auto& all = compiled();
  auto it = all.find(id);
  if (it == all.end()) throw Error(Errc::not_found, "unknown schema " + std::string(id));
  return it->second;
}

std::vector<std::string> published_schema_ids() {
  std::vector<std::string> out;
  for (const auto& [id, _] : compiled()) out.push_back(id);
  return out;
}

void require_valid(std::string_view id, const json& doc) {
  auto issues = validate_schema(published_schema(id), doc);
  if (issues.empty()) return;
  std::string msg = std::string(id) + ":";
  for (std::size_t i = 0; i < std::min<std::size_t>(issues.size(), 5); ++i) {
    msg += " " + issues[i].path + " " + issues[i].message + ";";
  }
  throw Error(Errc::schema_violation, msg);
}

}  // namespace riseer
