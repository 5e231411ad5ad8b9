#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skyde/channel.hpp"
#include "skyde/classifier.hpp"
#include "skyde/errors.hpp"
#include "skyde/metrics.hpp"
#include "skyde/scenario.hpp"
#include "skyde/steg.hpp"
#include "skyde/trace_io.hpp"
#include "skyde/traffic.hpp"

namespace py = pybind11;
using namespace skyde;

namespace {

std::vector<std::uint8_t> to_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

py::bytes from_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SkyDe covert-channel laboratory core";

  py::register_exception<MalformedMessageError>(m, "MalformedMessageError");
  py::register_exception<MonotonicityError>(m, "MonotonicityError");
  py::register_exception<UndefinedStatisticError>(m, "UndefinedStatisticError");
  py::register_exception<IntegrityConflictError>(m, "IntegrityConflictError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<SomMessage>(m, "SomMessage")
      .def(py::init([](std::uint16_t id, std::uint8_t fun, py::bytes payload) {
             return SomMessage{id, fun, to_bytes(payload)};
           }),
           py::arg("id"), py::arg("fun"), py::arg("payload"))
      .def_readwrite("id", &SomMessage::id)
      .def_readwrite("fun", &SomMessage::fun)
      .def_property(
          "payload",
          [](const SomMessage& s) { return from_bytes(s.payload); },
          [](SomMessage& s, py::bytes b) { s.payload = to_bytes(b); })
      .def("datagram_size", &SomMessage::datagram_size)
      .def("__eq__", [](const SomMessage& a, const SomMessage& b) { return a == b; });

  m.def("encode_som",
        [](const SomMessage& msg) { return from_bytes(encode_som(msg)); });
  m.def("decode_som",
        [](py::bytes wire) { return decode_som(to_bytes(wire)); });
  m.def("crc16", [](py::bytes data) { return crc16(to_bytes(data)); });
  m.def("is_data_fun", &is_data_fun);

  py::class_<SizeSpec>(m, "SizeSpec")
      .def(py::init<double, double, int, int>(), py::arg("mean"),
           py::arg("stddev"), py::arg("min"), py::arg("max"))
      .def_readwrite("mean", &SizeSpec::mean)
      .def_readwrite("stddev", &SizeSpec::stddev)
      .def_readwrite("min", &SizeSpec::min)
      .def_readwrite("max", &SizeSpec::max);

  py::enum_<Truth>(m, "Truth")
      .value("Voice", Truth::Voice)
      .value("Silence", Truth::Silence)
      .value("Signaling", Truth::Signaling);

  py::class_<TrafficProfile>(m, "TrafficProfile")
      .def(py::init<>())
      .def_readwrite("mean_talkspurt_s", &TrafficProfile::mean_talkspurt_s)
      .def_readwrite("mean_silence_s", &TrafficProfile::mean_silence_s)
      .def_readwrite("packet_rate", &TrafficProfile::packet_rate)
      .def_readwrite("silence_size", &TrafficProfile::silence_size)
      .def_readwrite("voice_size", &TrafficProfile::voice_size)
      .def_readwrite("signaling_fraction", &TrafficProfile::signaling_fraction)
      .def_readwrite("seed", &TrafficProfile::seed)
      .def("speech_ratio", &TrafficProfile::speech_ratio)
      .def("set_speech_ratio", &TrafficProfile::set_speech_ratio);

  py::class_<PacketRecord>(m, "PacketRecord")
      .def_readonly("index", &PacketRecord::index)
      .def_readonly("ts_us", &PacketRecord::ts_us)
      .def_readonly("message", &PacketRecord::message)
      .def_readonly("truth", &PacketRecord::truth)
      .def("datagram_size", &PacketRecord::datagram_size);

  m.def("generate_call", &generate_call, py::arg("profile"),
        py::arg("duration_s"));
  m.def("empirical_silence_fraction", [](const std::vector<PacketRecord>& t) {
    return empirical_silence_fraction(t);
  });

  py::class_<ClassifierConfig>(m, "ClassifierConfig")
      .def(py::init<>())
      .def_readwrite("window_s", &ClassifierConfig::window_s)
      .def_readwrite("delta_bytes", &ClassifierConfig::delta_bytes);

  py::enum_<Classification>(m, "Classification")
      .value("Silence", Classification::Silence)
      .value("Voice", Classification::Voice)
      .value("Unknown", Classification::Unknown);

  py::class_<SilenceReference>(m, "SilenceReference")
      .def(py::init<ClassifierConfig>(), py::arg("config") = ClassifierConfig{})
      .def("observe", &SilenceReference::observe, py::arg("datagram_size"),
           py::arg("ts_us"))
      .def("reference",
           [](const SilenceReference& r) { return r.reference(); })
      .def("classify", &SilenceReference::classify);

  py::enum_<GovernorDecision>(m, "GovernorDecision")
      .value("Allow", GovernorDecision::Allow)
      .value("Suspend", GovernorDecision::Suspend);

  py::class_<LossGovernor>(m, "LossGovernor")
      .def(py::init<double>(), py::arg("threshold") = 0.70)
      .def("update", &LossGovernor::update, py::arg("sent"), py::arg("unusable"))
      .def("active", &LossGovernor::active);

  py::class_<KeyMaterial>(m, "KeyMaterial")
      .def_static("from_hex", &KeyMaterial::from_hex, py::arg("key_hex"),
                  py::arg("nonce_hex"));

  m.def("keystream", [](const KeyMaterial& km, std::uint64_t counter,
                        std::size_t len) {
    return from_bytes(keystream(km, counter, len));
  });

  py::class_<Chunk>(m, "Chunk")
      .def(py::init([](std::uint16_t seq, py::bytes data) {
             return Chunk{seq, to_bytes(data)};
           }),
           py::arg("seq"), py::arg("data"))
      .def_readonly("seq", &Chunk::seq)
      .def_property_readonly(
          "data", [](const Chunk& c) { return from_bytes(c.data); });

  m.def("seal_chunk", [](const KeyMaterial& km, std::uint16_t seq,
                         py::bytes data, std::size_t payload_len) {
    return from_bytes(seal_chunk(km, seq, to_bytes(data), payload_len));
  });
  m.def("open_chunk", [](const KeyMaterial& km, py::bytes ciphertext) {
    return open_chunk(km, to_bytes(ciphertext));
  });
  m.def("embed", [](const SomMessage& packet, py::bytes ciphertext) {
    return embed(packet, to_bytes(ciphertext));
  });
  m.def("try_extract", &try_extract, py::arg("packet"), py::arg("keys"));
  m.def("reassemble", [](const std::vector<Chunk>& chunks, std::size_t total) {
    auto [bytes, bitmap] = reassemble(chunks, total);
    return py::make_tuple(from_bytes(bytes), bitmap);
  });

  m.def("transmit", [](const std::vector<PacketRecord>& packets,
                       const ChannelConfig& cfg) { return transmit(packets, cfg); });

  py::class_<BernoulliLoss>(m, "BernoulliLoss")
      .def(py::init<double>(), py::arg("p"))
      .def_readwrite("p", &BernoulliLoss::p);

  py::class_<GilbertElliottLoss>(m, "GilbertElliottLoss")
      .def(py::init<double, double, double, double>(), py::arg("p_good_to_bad"),
           py::arg("p_bad_to_good"), py::arg("loss_good"), py::arg("loss_bad"));

  py::class_<ChannelConfig>(m, "ChannelConfig")
      .def(py::init<>())
      .def_readwrite("seed", &ChannelConfig::seed)
      .def("set_bernoulli",
           [](ChannelConfig& c, double p) { c.loss = BernoulliLoss{p}; })
      .def("set_gilbert_elliott", [](ChannelConfig& c, const GilbertElliottLoss& ge) {
        c.loss = ge;
      });

  m.def("adapt", [](double observed_loss) { return adapt(observed_loss); });

  py::class_<ByteHistogram>(m, "ByteHistogram")
      .def(py::init<>())
      .def("add", [](ByteHistogram& h, py::bytes b) { h.add(to_bytes(b)); })
      .def("total", &ByteHistogram::total)
      .def_property_readonly("counts", [](const ByteHistogram& h) {
        return std::vector<std::uint64_t>(h.counts.begin(), h.counts.end());
      });

  m.def("byte_histogram", [](const std::vector<PacketRecord>& trace) {
    return byte_histogram(trace);
  });
  m.def("pearson", &pearson);
  m.def("predicted_bandwidth_bps", &predicted_bandwidth_bps,
        py::arg("utilization"), py::arg("silence_fraction"),
        py::arg("packet_rate"), py::arg("size_bytes"));
  m.def("measured_bandwidth_bps", &measured_bandwidth_bps);

  py::class_<EmbedStats>(m, "EmbedStats")
      .def_readonly("packets_seen", &EmbedStats::packets_seen)
      .def_readonly("silence_identified", &EmbedStats::silence_identified)
      .def_readonly("embedded", &EmbedStats::embedded)
      .def_readonly("suspended_by_governor", &EmbedStats::suspended_by_governor)
      .def_readonly("secret_bits_sent", &EmbedStats::secret_bits_sent)
      .def("utilization", &EmbedStats::utilization);

  py::class_<WindowSample>(m, "WindowSample")
      .def_readonly("t_end_s", &WindowSample::t_end_s)
      .def_readonly("loss", &WindowSample::loss)
      .def_readonly("packet_rate", &WindowSample::packet_rate)
      .def_readonly("size_factor", &WindowSample::size_factor)
      .def_readonly("reference", &WindowSample::reference)
      .def_readonly("reference_valid", &WindowSample::reference_valid)
      .def_readonly("governor_active", &WindowSample::governor_active);

  py::class_<ScenarioResult>(m, "ScenarioResult")
      .def_readonly("cover_trace", &ScenarioResult::cover_trace)
      .def_readonly("stego_trace", &ScenarioResult::stego_trace)
      .def_readonly("delivered_trace", &ScenarioResult::delivered_trace)
      .def_property_readonly(
          "secret_sent",
          [](const ScenarioResult& r) { return from_bytes(r.secret_sent); })
      .def_property_readonly(
          "secret_recv",
          [](const ScenarioResult& r) { return from_bytes(r.secret_recv); })
      .def_readonly("recv_bitmap", &ScenarioResult::recv_bitmap)
      .def_readonly("stats", &ScenarioResult::stats)
      .def_readonly("series", &ScenarioResult::series)
      .def_readonly("packets_sent", &ScenarioResult::packets_sent)
      .def_readonly("packets_delivered", &ScenarioResult::packets_delivered)
      .def_readonly("packets_unusable", &ScenarioResult::packets_unusable)
      .def_readonly("duration_s", &ScenarioResult::duration_s)
      .def("total_unusable_fraction", &ScenarioResult::total_unusable_fraction)
      .def("embedded_fraction", &ScenarioResult::embedded_fraction);

  m.def("run_scenario_json", [](const std::string& config_json) {
    return run_scenario(ScenarioConfig::from_json_text(config_json));
  });
  m.def("run_scenario_file", [](const std::string& path) {
    return run_scenario(ScenarioConfig::from_json_file(path));
  });

  m.def("metrics_json", [](const ScenarioResult& result) {
    const ByteHistogram cover = byte_histogram(result.cover_trace);
    return build_report(result, &cover).to_json_text();
  });
}
