#include "matsf/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "matsf/error.hpp"

namespace matsf {

namespace {

using nlohmann::json;

json tensor_json(const Tensor& t) {
  return {{"name", t.name()},
          {"shape", t.shape()},
          {"values", std::vector<double>(t.values().begin(), t.values().end())}};
}

Tensor tensor_from(const json& j, const Shape& expected) {
  const auto shape = j.at("shape").get<Shape>();
  if (shape != expected)
    throw InputError("checkpoint tensor '" + j.value("name", "") + "' has shape " +
                     to_string(shape) + ", architecture expects " + to_string(expected));
  auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != element_count(shape))
    throw InputError("checkpoint tensor '" + j.value("name", "") + "' holds " +
                     std::to_string(values.size()) + " values for shape " + to_string(shape));
  Tensor t = Tensor::from(shape, std::move(values), true);
  t.set_name(j.value("name", ""));
  return t;
}

json forecaster_json(const ForecasterModel& m) {
  json layers = json::array();
  for (const auto& l : m.layers)
    layers.push_back({{"w_gates", tensor_json(l.w_gates)},
                      {"u_gates", tensor_json(l.u_gates)},
                      {"b_gates", tensor_json(l.b_gates)}});
  json spec = {{"input_size", m.spec.input_size},
               {"hidden_sizes", m.spec.hidden_sizes},
               {"out", m.spec.out}};
  spec["target_index"] = m.spec.target_index ? json(*m.spec.target_index) : json(nullptr);
  return {{"spec", spec}, {"layers", layers}, {"head_w", tensor_json(m.head_w)},
          {"head_b", tensor_json(m.head_b)}};
}

ForecasterModel forecaster_from(const json& j) {
  ForecasterModel m;
  const auto& s = j.at("spec");
  m.spec.input_size = s.at("input_size").get<std::size_t>();
  m.spec.hidden_sizes = s.at("hidden_sizes").get<std::vector<std::size_t>>();
  m.spec.out = s.at("out").get<std::size_t>();
  if (!s.at("target_index").is_null()) m.spec.target_index = s.at("target_index").get<std::size_t>();
  m.spec.validate();
  const auto& layers = j.at("layers");
  if (layers.size() != m.spec.hidden_sizes.size())
    throw InputError("checkpoint layer count disagrees with its architecture");
  std::size_t in = m.spec.input_size;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::size_t h = m.spec.hidden_sizes[i];
    LstmLayerParams l;
    l.input_size = in;
    l.hidden_size = h;
    l.w_gates = tensor_from(layers[i].at("w_gates"), {4 * h, in});
    l.u_gates = tensor_from(layers[i].at("u_gates"), {4 * h, h});
    l.b_gates = tensor_from(layers[i].at("b_gates"), {4 * h});
    m.layers.push_back(std::move(l));
    in = h;
  }
  m.head_w = tensor_from(j.at("head_w"), {m.spec.out, in});
  m.head_b = tensor_from(j.at("head_b"), {m.spec.out});
  return m;
}

json discriminator_json(const DiscriminatorModel& m) {
  json layers = json::array();
  for (const auto& l : m.layers)
    layers.push_back({{"w", tensor_json(l.w)},
                      {"b", tensor_json(l.b)},
                      {"activation", l.activation == Activation::Relu ? "relu" : "sigmoid"}});
  return {{"spec", {{"input_size", m.spec.input_size}, {"hidden_sizes", m.spec.hidden_sizes}}},
          {"layers", layers}};
}

DiscriminatorModel discriminator_from(const json& j) {
  DiscriminatorModel m;
  m.spec.input_size = j.at("spec").at("input_size").get<std::size_t>();
  m.spec.hidden_sizes = j.at("spec").at("hidden_sizes").get<std::vector<std::size_t>>();
  m.spec.validate();
  std::vector<std::size_t> widths = m.spec.hidden_sizes;
  widths.push_back(1);
  const auto& layers = j.at("layers");
  if (layers.size() != widths.size())
    throw InputError("checkpoint discriminator depth disagrees with its architecture");
  std::size_t in = m.spec.input_size;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    DenseLayer l;
    l.w = tensor_from(layers[i].at("w"), {widths[i], in});
    l.b = tensor_from(layers[i].at("b"), {widths[i]});
    l.activation = layers[i].at("activation") == "relu" ? Activation::Relu : Activation::Sigmoid;
    m.layers.push_back(std::move(l));
    in = widths[i];
  }
  return m;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  json forecasters = json::array();
  for (const auto& f : ckpt.forecasters) forecasters.push_back(forecaster_json(f));
  json doc = {{"system", ckpt.system},
              {"forecasters", forecasters},
              {"pipeline", to_json(ckpt.pipeline)}};
  doc["discriminator"] = ckpt.discriminator ? discriminator_json(*ckpt.discriminator) : json(nullptr);
  std::ostringstream os;
  os << kCheckpointMagic << ' ' << kCheckpointVersion << '\n' << doc.dump() << '\n';
  return os.str();
}

Checkpoint parse_checkpoint(std::string_view text) {
  const auto nl = text.find('\n');
  const std::string header(text.substr(0, nl));
  const std::string expected = std::string(kCheckpointMagic) + ' ' + std::to_string(kCheckpointVersion);
  if (header != expected)
    throw InputError("not a checkpoint (header '" + header + "', expected '" + expected + "')");
  json doc;
  try {
    doc = json::parse(text.substr(nl == std::string_view::npos ? text.size() : nl + 1));
  } catch (const json::exception& e) {
    throw InputError(std::string("corrupt checkpoint: ") + e.what());
  }
  try {
    Checkpoint c;
    c.system = doc.at("system").get<std::string>();
    for (const auto& f : doc.at("forecasters")) c.forecasters.push_back(forecaster_from(f));
    if (!doc.at("discriminator").is_null()) c.discriminator = discriminator_from(doc.at("discriminator"));
    c.pipeline = pipeline_meta_from_json(doc.at("pipeline"));
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("incomplete checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << serialize_checkpoint(ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace matsf
