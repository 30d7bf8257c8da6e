#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "renyi/classifier.hpp"
#include "renyi/error.hpp"
#include "renyi/format.hpp"

namespace renyi {

namespace {

using nlohmann::json;

// Reals are written by hand so that every one carries 17 significant digits;
// nlohmann would emit the shortest round-trip form instead.
class Writer {
 public:
  void key(const std::string& k) {
    separate();
    out_ << json(k).dump() << ": ";
    after_key_ = true;
  }
  void real(double v) { raw(format_real(v)); }
  void integer(std::size_t v) { raw(std::to_string(v)); }
  void boolean(bool v) { raw(v ? "true" : "false"); }
  void string(const std::string& s) { raw(json(s).dump()); }
  void open(char bracket) {
    separate();
    out_ << bracket;
    first_.push_back(true);
  }
  void close(char bracket) {
    out_ << bracket;
    first_.pop_back();
  }
  std::string str() const { return out_.str(); }

 private:
  void raw(const std::string& text) {
    separate();
    out_ << text;
  }
  void separate() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (!first_.back()) out_ << ", ";
    first_.back() = false;
  }

  std::ostringstream out_;
  std::vector<bool> first_{true};
  bool after_key_ = false;
};

void write_schema(Writer& w, const CategoricalSchema& schema) {
  w.open('{');
  w.key("features");
  w.open('[');
  for (const auto& f : schema.features()) {
    w.open('{');
    w.key("name");
    w.string(f.name);
    w.key("categories");
    w.open('[');
    for (const auto& c : f.categories) w.string(c);
    w.close(']');
    w.close('}');
  }
  w.close(']');
  w.close('}');
}

CategoricalSchema read_schema(const json& j) {
  std::vector<Feature> features;
  for (const auto& f : j.at("features")) {
    features.push_back({f.at("name").get<std::string>(), f.at("categories").get<std::vector<std::string>>()});
  }
  return CategoricalSchema(std::move(features));
}

}  // namespace

std::string current_utc_timestamp() {
  std::time_t now = std::time(nullptr);
  // SOURCE_DATE_EPOCH pins the timestamp for reproducible builds of model files.
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string model_to_json(const RenyiModel& model) {
  Writer w;
  w.open('{');
  w.key("version");
  w.string(kModelFormatVersion);
  w.key("schema");
  write_schema(w, model.schema);
  w.key("z");
  w.open('[');
  for (Eigen::Index i = 0; i < model.z.size(); ++i) w.real(model.z[i]);
  w.close(']');
  w.key("ridge_lambda");
  w.real(model.ridge_lambda);
  w.key("gamma");
  w.real(model.gamma);
  w.key("h_plus");
  w.real(model.h_plus);
  w.key("h_minus");
  w.real(model.h_minus);
  w.key("separable");
  w.boolean(model.separable);
  w.key("q0");
  w.real(model.q0);
  w.key("clip_epsilon");
  w.real(model.clip_epsilon);
  w.key("train_n");
  w.integer(model.train_n);
  w.key("smoothing_alpha");
  w.real(model.smoothing_alpha);
  w.key("label_column");
  w.string(model.label_column);
  w.key("label_names");
  w.open('[');
  w.string(model.label_names.first);
  w.string(model.label_names.second);
  w.close(']');
  if (model.input_schema) {
    w.key("input_schema");
    write_schema(w, *model.input_schema);
    w.key("pairs");
    w.open('[');
    for (auto [i, j] : model.pairs) {
      w.open('[');
      w.integer(i);
      w.integer(j);
      w.close(']');
    }
    w.close(']');
  }
  w.key("created_utc");
  w.string(model.created_utc.empty() ? current_utc_timestamp() : model.created_utc);
  w.close('}');
  return w.str() + "\n";
}

RenyiModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptModel, std::string("unparsable model file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version")) throw Error(ErrorKind::CorruptModel, "model file has no version");
  const auto& version = j.at("version");
  const std::string v = version.is_string() ? version.get<std::string>() : version.dump();
  if (v != kModelFormatVersion) {
    throw Error(ErrorKind::FormatVersionMismatch, "model format version '" + v + "', expected '" + kModelFormatVersion + "'");
  }
  try {
    RenyiModel m;
    m.schema = read_schema(j.at("schema"));
    const auto z = j.at("z").get<std::vector<double>>();
    if (z.size() != m.schema.total_width()) throw Error(ErrorKind::CorruptModel, "z length does not match the schema");
    m.z = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
    m.ridge_lambda = j.at("ridge_lambda").get<double>();
    m.gamma = j.at("gamma").get<double>();
    m.h_plus = j.at("h_plus").get<double>();
    m.h_minus = j.at("h_minus").get<double>();
    m.separable = j.at("separable").get<bool>();
    m.q0 = j.at("q0").get<double>();
    m.clip_epsilon = j.value("clip_epsilon", 0.0);
    m.train_n = j.at("train_n").get<std::size_t>();
    m.smoothing_alpha = j.at("smoothing_alpha").get<double>();
    m.label_column = j.value("label_column", std::string());
    if (j.contains("label_names")) {
      const auto names = j.at("label_names").get<std::vector<std::string>>();
      if (names.size() != 2) throw Error(ErrorKind::CorruptModel, "label_names must have two entries");
      m.label_names = {names[0], names[1]};
    }
    if (j.contains("input_schema")) {
      m.input_schema = read_schema(j.at("input_schema"));
      m.pairs = j.at("pairs").get<std::vector<std::pair<std::size_t, std::size_t>>>();
    }
    m.created_utc = j.at("created_utc").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptModel, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptModel) throw;
    throw Error(ErrorKind::CorruptModel, e.what());
  }
}

void save_model(const RenyiModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << model_to_json(model);
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

RenyiModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace renyi
