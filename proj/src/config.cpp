#include "hte/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hte/errors.hpp"

namespace hte {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream in(value);
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    if (comma == std::string::npos) {
      const std::string piece = trim(std::string_view(value).substr(start));
      if (!piece.empty()) out.push_back(piece);
      break;
    }
    const std::string piece =
        trim(std::string_view(value).substr(start, comma - start));
    if (!piece.empty()) out.push_back(piece);
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& origin, std::size_t line,
                       const std::string& message) {
  throw SchemaError(origin + ":" + std::to_string(line) + ": " + message);
}

double to_double(const std::string& value, const std::string& origin,
                 std::size_t line) {
  double out = 0.0;
  const auto result =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (result.ec != std::errc{} || result.ptr != value.data() + value.size()) {
    fail(origin, line, "expected a number, got '" + value + "'");
  }
  return out;
}

bool to_bool(const std::string& value, const std::string& origin,
             std::size_t line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(origin, line, "expected true/false, got '" + value + "'");
}

// Numeric hyperparameters forwarded verbatim into LearnerSpec::params.
constexpr const char* kModelNumericKeys[] = {
    "lambda", "k",     "depth",       "min_leaf", "trees",
    "mtry",   "rounds", "rate",        "lengthscale", "variance",
    "noise",  "restarts"};

struct Parser {
  std::string origin;
  RunConfig config;
  std::string section;
  MetaLearnerConfig* model = nullptr;
  bool saw_dgp_name = false;

  void begin_section(const std::string& name, std::size_t line) {
    model = nullptr;
    if (name == "run" || name == "propensity" || name == "dgp" ||
        name == "data") {
      section = name;
      return;
    }
    if (name.rfind("model ", 0) == 0) {
      const std::string display = trim(std::string_view(name).substr(6));
      if (display.empty()) fail(origin, line, "model section needs a name");
      section = "model";
      config.models.emplace_back();
      model = &config.models.back();
      model->name = display;
      return;
    }
    fail(origin, line, "unknown section '" + name + "'");
  }

  void key_value(const std::string& key, const std::string& value,
                 std::size_t line) {
    if (section == "run") return run_key(key, value, line);
    if (section == "propensity") return propensity_key(key, value, line);
    if (section == "dgp") return dgp_key(key, value, line);
    if (section == "data") return data_key(key, value, line);
    if (section == "model") return model_key(key, value, line);
    fail(origin, line, "key '" + key + "' appears before any section");
  }

  void run_key(const std::string& key, const std::string& value,
               std::size_t line) {
    if (key == "b") {
      config.b = static_cast<int>(to_double(value, origin, line));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(to_double(value, origin, line));
    } else if (key == "jobs") {
      config.jobs = static_cast<int>(to_double(value, origin, line));
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else {
      fail(origin, line, "unknown key '" + key + "' in [run]");
    }
  }

  void propensity_key(const std::string& key, const std::string& value,
                      std::size_t line) {
    if (key == "folds") {
      config.propensity.folds = static_cast<int>(to_double(value, origin, line));
    } else if (key == "l2") {
      config.propensity.l2 = to_double(value, origin, line);
    } else if (key == "clip_low") {
      config.propensity.clip_low = to_double(value, origin, line);
    } else if (key == "clip_high") {
      config.propensity.clip_high = to_double(value, origin, line);
    } else {
      fail(origin, line, "unknown key '" + key + "' in [propensity]");
    }
  }

  void dgp_key(const std::string& key, const std::string& value,
               std::size_t line) {
    auto& dgp = config.dgp;
    if (key == "name") {
      dgp.name = dgp_name_from_string(value);
      saw_dgp_name = true;
    } else if (key == "covariates") {
      const auto tokens = split_ws(value);
      if (tokens.size() == 1 && tokens[0] == "synthetic") {
        dgp.csv_path.clear();
      } else if (tokens.size() == 2 && tokens[0] == "csv") {
        dgp.csv_path = tokens[1];
      } else {
        fail(origin, line, "covariates must be 'synthetic' or 'csv <path>'");
      }
    } else if (key == "n") {
      dgp.n = static_cast<Index>(to_double(value, origin, line));
    } else if (key == "binary_p") {
      dgp.binary_p = to_double(value, origin, line);
    } else if (key == "treatment") {
      const auto tokens = split_ws(value);
      if (tokens.size() == 2 && tokens[0] == "randomized") {
        dgp.treatment_source = TreatmentSource::kRandomized;
        dgp.randomized_p = to_double(tokens[1], origin, line);
      } else if (tokens.size() == 2 && tokens[0] == "from_data") {
        dgp.treatment_source = TreatmentSource::kFromData;
        dgp.treatment_column = tokens[1];
      } else if (tokens.size() == 3 && tokens[0] == "targeted") {
        dgp.treatment_source = TreatmentSource::kTargeted;
        dgp.targeted_a = to_double(tokens[1], origin, line);
        dgp.targeted_b = to_double(tokens[2], origin, line);
      } else {
        fail(origin, line,
             "treatment must be 'randomized <p>', 'from_data <column>', or "
             "'targeted <a> <b>'");
      }
    } else if (key == "drop_treated_where") {
      const auto tokens = split_ws(value);
      if (tokens.size() != 3 || tokens[1] != "==") {
        fail(origin, line, "drop_treated_where must read '<column> == <value>'");
      }
      dgp.drop_rule = DropRule{tokens[0], to_double(tokens[2], origin, line)};
    } else if (key == "drop_columns") {
      dgp.drop_columns = split_commas(value);
    } else {
      fail(origin, line, "unknown key '" + key + "' in [dgp]");
    }
  }

  void data_key(const std::string& key, const std::string& value,
                std::size_t line) {
    if (key == "treatment") {
      config.data_treatment_column = value;
    } else if (key == "outcome") {
      config.data_outcome_column = value;
    } else {
      fail(origin, line, "unknown key '" + key + "' in [data]");
    }
  }

  void model_key(const std::string& key, const std::string& value,
                 std::size_t line) {
    auto& m = *model;
    if (key == "family") {
      m.family = cate_family_from_string(value);
      return;
    }
    if (key == "base") {
      m.base.family = learner_family_from_string(value);
      return;
    }
    if (key == "penalty") {
      m.base.penalty = value;
      return;
    }
    if (key == "use_ps") {
      m.use_ps = to_bool(value, origin, line);
      return;
    }
    if (key == "weight_mode") {
      if (value == "propensity") m.weight_mode = XWeightMode::kPropensity;
      else if (value == "one") m.weight_mode = XWeightMode::kOne;
      else if (value == "zero") m.weight_mode = XWeightMode::kZero;
      else fail(origin, line, "weight_mode must be propensity, one, or zero");
      return;
    }
    if (key == "folds") {
      m.folds = static_cast<int>(to_double(value, origin, line));
      return;
    }
    if (key == "sweeps") {
      m.sweeps = static_cast<int>(to_double(value, origin, line));
      return;
    }
    if (key == "tol") {
      m.tol = to_double(value, origin, line);
      return;
    }
    if (key == "optimize" || key == "bootstrap") {
      m.base.params[key] = to_bool(value, origin, line) ? 1.0 : 0.0;
      return;
    }
    if (key == "m_base") {
      LearnerSpec spec = m.m_spec.value_or(LearnerSpec{});
      spec.family = learner_family_from_string(value);
      m.m_spec = spec;
      return;
    }
    if (key == "m_penalty") {
      LearnerSpec spec = m.m_spec.value_or(LearnerSpec{});
      spec.penalty = value;
      m.m_spec = spec;
      return;
    }
    if (key == "tau_penalty") {
      LearnerSpec spec = m.tau_spec.value_or(m.base);
      spec.penalty = value;
      m.tau_spec = spec;
      return;
    }
    if (key == "tau_lambda") {
      LearnerSpec spec = m.tau_spec.value_or(m.base);
      spec.params["lambda"] = to_double(value, origin, line);
      m.tau_spec = spec;
      return;
    }
    if (key == "tau_depth") {
      LearnerSpec spec = m.tau_spec.value_or(m.base);
      spec.params["depth"] = to_double(value, origin, line);
      m.tau_spec = spec;
      return;
    }
    for (const char* numeric : kModelNumericKeys) {
      if (key == numeric) {
        m.base.params[key] = to_double(value, origin, line);
        return;
      }
    }
    fail(origin, line, "unknown key '" + key + "' in [model " + m.name + "]");
  }
};

}  // namespace

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  Parser parser;
  parser.origin = origin;
  parser.config.digest = fnv1a_digest(text);

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = trim(std::string_view(line).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "unterminated section header");
      parser.begin_section(trim(std::string_view(line).substr(1, line.size() - 2)),
                           line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) fail(origin, line_no, "expected 'key = value'");
    parser.key_value(key, value, line_no);
  }

  for (auto& model : parser.config.models) {
    validate(model.base);
    if (model.m_spec) validate(*model.m_spec);
    if (model.tau_spec) validate(*model.tau_spec);
    model.propensity = parser.config.propensity;
  }
  return parser.config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path);
}

}  // namespace hte
