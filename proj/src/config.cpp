#include "trichain/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace trichain {

namespace {

struct RawValue {
  enum class Kind { Number, Boolean, Text, NumberArray };
  Kind kind = Kind::Number;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<double> numbers;
  int line = 0;
};

using Section = std::map<std::string, RawValue>;
using Document = std::map<std::string, Section>;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& text, double* out) {
  if (text.empty()) return false;
  size_t consumed = 0;
  try {
    *out = std::stod(text, &consumed);
  } catch (const std::exception&) {
    return false;
  }
  return consumed == text.size() && std::isfinite(*out);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

Document parse_document(const std::string& text, const std::string& filename,
                        std::vector<std::string>& problems) {
  Document doc;
  std::istringstream in(text);
  std::string raw_line;
  std::string section;
  int line_no = 0;
  auto problem = [&](const std::string& what) {
    std::ostringstream msg;
    msg << filename << ":" << line_no << ": " << what;
    problems.push_back(msg.str());
  };

  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        problem("malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        problem("empty section name");
        continue;
      }
      doc[section];  // sections may be empty
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      problem("expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value_text = trim(line.substr(eq + 1));
    if (key.empty()) {
      problem("missing key before '='");
      continue;
    }
    if (section.empty()) {
      problem("key '" + key + "' appears before any [section]");
      continue;
    }
    if (doc[section].count(key)) {
      problem("duplicate key '" + key + "' in [" + section + "]");
      continue;
    }

    RawValue value;
    value.line = line_no;
    if (value_text.empty()) {
      problem("missing value for key '" + key + "'");
      continue;
    }
    if (value_text.front() == '"') {
      if (value_text.size() < 2 || value_text.back() != '"') {
        problem("unterminated string for key '" + key + "'");
        continue;
      }
      value.kind = RawValue::Kind::Text;
      value.text = value_text.substr(1, value_text.size() - 2);
    } else if (value_text == "true" || value_text == "false") {
      value.kind = RawValue::Kind::Boolean;
      value.boolean = value_text == "true";
    } else if (value_text.front() == '[') {
      if (value_text.back() != ']') {
        problem("unterminated array for key '" + key + "'");
        continue;
      }
      value.kind = RawValue::Kind::NumberArray;
      const std::string body = trim(value_text.substr(1, value_text.size() - 2));
      bool ok = true;
      if (!body.empty()) {
        std::istringstream items(body);
        std::string item;
        while (std::getline(items, item, ',')) {
          double number = 0.0;
          if (!parse_number(trim(item), &number)) {
            problem("array element '" + trim(item) + "' is not a number");
            ok = false;
            break;
          }
          value.numbers.push_back(number);
        }
      }
      if (!ok) continue;
    } else {
      double number = 0.0;
      if (!parse_number(value_text, &number)) {
        problem("value '" + value_text + "' for key '" + key +
                "' is not a number, boolean, string, or array");
        continue;
      }
      value.kind = RawValue::Kind::Number;
      value.number = number;
    }
    doc[section][key] = value;
  }
  return doc;
}

// Typed access to one section with consumed-key bookkeeping, so anything
// left over can be reported as unknown.
class SectionReader {
 public:
  SectionReader(const Document& doc, const std::string& name, std::vector<std::string>& problems)
      : name_(name), problems_(problems) {
    auto it = doc.find(name);
    section_ = it == doc.end() ? nullptr : &it->second;
  }

  bool present() const { return section_ != nullptr; }

  double number(const std::string& key, double fallback) {
    const RawValue* v = take(key);
    if (!v) return fallback;
    if (v->kind != RawValue::Kind::Number) {
      report(key, "must be a number");
      return fallback;
    }
    return v->number;
  }

  std::optional<double> optional_number(const std::string& key) {
    const RawValue* v = take(key);
    if (!v) return std::nullopt;
    if (v->kind != RawValue::Kind::Number) {
      report(key, "must be a number");
      return std::nullopt;
    }
    return v->number;
  }

  double required_number(const std::string& key) {
    const RawValue* v = take(key);
    if (!v) {
      report(key, "is required");
      return 0.0;
    }
    if (v->kind != RawValue::Kind::Number) {
      report(key, "must be a number");
      return 0.0;
    }
    return v->number;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const RawValue* v = take(key);
    if (!v) return fallback;
    if (v->kind != RawValue::Kind::Text) {
      report(key, "must be a quoted string");
      return fallback;
    }
    return v->text;
  }

  std::vector<double> number_array(const std::string& key) {
    const RawValue* v = take(key);
    if (!v) return {};
    if (v->kind != RawValue::Kind::NumberArray) {
      report(key, "must be an array of numbers");
      return {};
    }
    return v->numbers;
  }

  long integer(const std::string& key, long fallback) {
    const RawValue* v = take(key);
    if (!v) return fallback;
    if (v->kind != RawValue::Kind::Number || v->number != std::floor(v->number)) {
      report(key, "must be an integer");
      return fallback;
    }
    return static_cast<long>(v->number);
  }

  void finish() {
    if (!section_) return;
    for (const auto& [key, value] : *section_) {
      if (!consumed_.count(key)) {
        std::ostringstream msg;
        msg << "unknown key '" << key << "' in [" << name_ << "] (line " << value.line << ")";
        problems_.push_back(msg.str());
      }
    }
  }

 private:
  const RawValue* take(const std::string& key) {
    if (!section_) return nullptr;
    consumed_.insert(key);
    auto it = section_->find(key);
    return it == section_->end() ? nullptr : &it->second;
  }

  void report(const std::string& key, const std::string& what) {
    problems_.push_back("[" + name_ + "] " + key + " " + what);
  }

  const Section* section_ = nullptr;
  std::string name_;
  std::set<std::string> consumed_;
  std::vector<std::string>& problems_;
};

bool is_pde(RunMode m) { return m == RunMode::Pde1d || m == RunMode::Pde2d; }
bool needs_initial(RunMode m) {
  return m == RunMode::Ode || m == RunMode::PsiTrace || is_pde(m);
}

}  // namespace

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Ode: return "ode";
    case RunMode::Pde1d: return "pde1d";
    case RunMode::Pde2d: return "pde2d";
    case RunMode::CheckCondition: return "check_condition";
    case RunMode::OracleCompare: return "oracle_compare";
    case RunMode::PsiTrace: return "psi_trace";
  }
  return "unknown";
}

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::runtime_error([&problems] {
        std::ostringstream msg;
        msg << "config invalid (" << problems.size() << " problem"
            << (problems.size() == 1 ? "" : "s") << "):";
        for (const std::string& p : problems) msg << "\n  - " << p;
        return msg.str();
      }()),
      problems_(problems) {}

RunConfig load_config_text(const std::string& text, RunMode mode, const std::string& filename) {
  std::vector<std::string> problems;
  Document doc = parse_document(text, filename, problems);
  if (!problems.empty()) throw ConfigError(problems);

  RunConfig cfg;
  cfg.mode = mode;
  cfg.config_path = filename;

  std::set<std::string> allowed = {"model"};
  if (mode != RunMode::CheckCondition) allowed.insert("integrator");
  if (needs_initial(mode)) allowed.insert("initial");
  if (is_pde(mode)) {
    allowed.insert("grid");
    allowed.insert("output");
  }
  if (mode == RunMode::OracleCompare) allowed.insert("oracle");
  if (mode == RunMode::PsiTrace) allowed.insert("psi");
  for (const auto& [name, _] : doc) {
    if (!allowed.count(name)) {
      problems.push_back("section [" + name + "] is not used by mode '" +
                         std::string(to_string(mode)) + "'");
    }
  }

  {
    SectionReader model(doc, "model", problems);
    if (!model.present()) {
      problems.push_back("section [model] is required");
    }
    cfg.model.a1 = model.required_number("a1");
    cfg.model.b1 = model.required_number("b1");
    cfg.model.w0 = model.required_number("w0");
    cfg.model.D0 = model.required_number("D0");
    cfg.model.a2 = model.required_number("a2");
    cfg.model.w1 = model.required_number("w1");
    cfg.model.D1 = model.required_number("D1");
    cfg.model.w2 = model.required_number("w2");
    cfg.model.D2 = model.required_number("D2");
    cfg.model.c = model.required_number("c");
    cfg.model.w3 = model.required_number("w3");
    cfg.model.D3 = model.required_number("D3");
    model.finish();
  }

  if (mode != RunMode::CheckCondition) {
    SectionReader integ(doc, "integrator", problems);
    cfg.integrator.t_end = integ.number("t_end", cfg.integrator.t_end);
    cfg.integrator.sample_stride = integ.number("sample_stride", cfg.integrator.sample_stride);
    cfg.integrator.blowup_threshold = integ.number("threshold", cfg.integrator.blowup_threshold);
    if (!is_pde(mode)) {
      cfg.integrator.rel_tol = integ.number("rel_tol", cfg.integrator.rel_tol);
      cfg.integrator.abs_tol = integ.number("abs_tol", cfg.integrator.abs_tol);
      cfg.integrator.h_init = integ.number("h_init", cfg.integrator.h_init);
      cfg.integrator.h_min = integ.number("h_min", cfg.integrator.h_min);
      cfg.integrator.h_max = integ.number("h_max", cfg.integrator.h_max);
      cfg.integrator.max_steps = integ.integer("max_steps", cfg.integrator.max_steps);
    }
    integ.finish();
  }

  if (is_pde(mode)) {
    SectionReader grid(doc, "grid", problems);
    cfg.grid.dim = mode == RunMode::Pde2d ? 2 : 1;
    cfg.grid.Lx = grid.number("Lx", cfg.grid.Lx);
    cfg.grid.nx = static_cast<int>(grid.integer("nx", cfg.grid.nx));
    if (mode == RunMode::Pde2d) {
      cfg.grid.Ly = grid.number("Ly", cfg.grid.Ly);
      cfg.grid.ny = static_cast<int>(grid.integer("ny", cfg.grid.nx));
    } else {
      cfg.grid.ny = 1;
    }
    cfg.grid.dt = grid.number("dt", cfg.grid.dt);
    cfg.grid.d1 = grid.number("d1", cfg.grid.d1);
    cfg.grid.d2 = grid.number("d2", cfg.grid.d2);
    cfg.grid.d3 = grid.number("d3", cfg.grid.d3);
    const std::string bc = grid.text("bc", "neumann");
    if (bc == "neumann") {
      cfg.grid.bc = BoundaryKind::Neumann;
    } else if (bc == "dirichlet") {
      cfg.grid.bc = BoundaryKind::Dirichlet;
    } else {
      problems.push_back("[grid] bc must be \"neumann\" or \"dirichlet\", got \"" + bc + "\"");
    }
    grid.finish();

    SectionReader output(doc, "output", problems);
    cfg.snapshot_times = output.number_array("snapshot_times");
    output.finish();
  }

  if (needs_initial(mode)) {
    SectionReader initial(doc, "initial", problems);
    if (!initial.present()) {
      problems.push_back("section [initial] is required for mode '" +
                         std::string(to_string(mode)) + "'");
    }
    const std::string kind = initial.text("kind", "uniform");
    if (kind == "uniform") {
      cfg.initial.kind = InitialDataSpec::Kind::Uniform;
    } else if (kind == "gaussian") {
      cfg.initial.kind = InitialDataSpec::Kind::Gaussian;
    } else if (kind == "cosine") {
      cfg.initial.kind = InitialDataSpec::Kind::Cosine;
    } else {
      problems.push_back("[initial] kind must be \"uniform\", \"gaussian\" or \"cosine\"");
    }
    if (!is_pde(mode) && cfg.initial.kind != InitialDataSpec::Kind::Uniform) {
      problems.push_back("[initial] kind must be \"uniform\" in ODE modes");
    }
    cfg.initial.u = initial.required_number("u");
    cfg.initial.v = initial.required_number("v");
    cfg.initial.r = initial.required_number("r");
    if (cfg.initial.kind != InitialDataSpec::Kind::Uniform) {
      cfg.initial.amp_u = initial.number("amp_u", 0.0);
      cfg.initial.amp_v = initial.number("amp_v", 0.0);
      cfg.initial.amp_r = initial.number("amp_r", 0.0);
    }
    if (cfg.initial.kind == InitialDataSpec::Kind::Gaussian) {
      cfg.initial.center_x = initial.number("center_x", cfg.grid.Lx / 2.0);
      if (mode == RunMode::Pde2d) {
        cfg.initial.center_y = initial.number("center_y", cfg.grid.Ly / 2.0);
      }
      cfg.initial.width = initial.number("width", 1.0);
      if (!(cfg.initial.width > 0.0)) problems.push_back("[initial] width must be > 0");
    }
    initial.finish();
    if (cfg.initial.u < 0.0 || cfg.initial.v < 0.0 || cfg.initial.r < 0.0) {
      problems.push_back("[initial] base values must be nonnegative");
    }
  }

  if (mode == RunMode::OracleCompare) {
    SectionReader oracle(doc, "oracle", problems);
    cfg.oracle.safety = oracle.number("safety", cfg.oracle.safety);
    cfg.oracle.u0 = oracle.number("u0", cfg.oracle.u0);
    cfg.oracle.domination_tol = oracle.number("domination_tol", cfg.oracle.domination_tol);
    oracle.finish();
    if (!(cfg.oracle.safety >= 1.0)) problems.push_back("[oracle] safety must be >= 1");
    if (!(cfg.oracle.u0 > 0.0)) problems.push_back("[oracle] u0 must be > 0");
    if (cfg.oracle.domination_tol < 0.0) {
      problems.push_back("[oracle] domination_tol must be >= 0");
    }
  }

  if (mode == RunMode::PsiTrace) {
    SectionReader psi(doc, "psi", problems);
    cfg.psi.r0 = psi.optional_number("r0");
    psi.finish();
    if (cfg.psi.r0 && !(*cfg.psi.r0 > 0.0)) problems.push_back("[psi] r0 must be > 0");
  }

  // Model positivity, reported with field names alongside everything else.
  try {
    cfg.model.validate();
  } catch (const std::invalid_argument& e) {
    problems.push_back(e.what());
  }
  if (mode != RunMode::CheckCondition) {
    try {
      cfg.integrator.validate();
    } catch (const std::invalid_argument& e) {
      problems.push_back(e.what());
    }
  }
  if (is_pde(mode)) {
    try {
      cfg.grid.validate();
    } catch (const std::invalid_argument& e) {
      problems.push_back(e.what());
    }
  }

  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

RunConfig load_config(const std::string& path, RunMode mode) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw ConfigError({"cannot open config file: " + path});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  RunConfig cfg = load_config_text(buffer.str(), mode, path);
  return cfg;
}

State build_initial_state(const RunConfig& cfg) {
  return State{cfg.initial.u, cfg.initial.v, cfg.initial.r};
}

PdeState build_initial_fields(const RunConfig& cfg) {
  const GridSpec& g = cfg.grid;
  const InitialDataSpec& init = cfg.initial;
  PdeState state;
  state.u = Field::constant(g, init.u);
  state.v = Field::constant(g, init.v);
  state.r = Field::constant(g, init.r);
  if (init.kind == InitialDataSpec::Kind::Uniform) return state;

  const double pi = 3.14159265358979323846;
  const int ny = g.dim == 2 ? g.ny : 1;
  for (int j = 0; j < ny; ++j) {
    const double y = g.dim == 2 ? j * g.dy() : 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double x = i * g.dx();
      double shape = 0.0;
      if (init.kind == InitialDataSpec::Kind::Gaussian) {
        double dist2 = (x - init.center_x) * (x - init.center_x);
        if (g.dim == 2) dist2 += (y - init.center_y) * (y - init.center_y);
        shape = std::exp(-dist2 / (2.0 * init.width * init.width));
      } else {
        shape = std::cos(pi * x / g.Lx);
        if (g.dim == 2) shape *= std::cos(pi * y / g.Ly);
      }
      state.u.at(i, j) += init.amp_u * shape;
      state.v.at(i, j) += init.amp_v * shape;
      state.r.at(i, j) += init.amp_r * shape;
    }
  }
  for (const Field* f : {&state.u, &state.v, &state.r}) {
    for (double x : f->values) {
      if (x < 0.0) {
        throw ConfigError({"initial data goes negative; reduce the perturbation amplitude"});
      }
    }
  }
  return state;
}

}  // namespace trichain
