#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "sttcache/config.hpp"
#include "sttcache/error.hpp"
#include "sttcache/metrics.hpp"
#include "sttcache/permutation.hpp"
#include "sttcache/reliability.hpp"
#include "sttcache/simulator.hpp"
#include "sttcache/thermal.hpp"
#include "sttcache/trace.hpp"

namespace py = pybind11;
using namespace sttcache;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict event_dict(const TraceEvent& e) {
  py::dict d;
  d["timestamp_ns"] = e.timestamp_ns;
  d["kind"] = std::string(1, kind_code(e.kind));
  d["address"] = e.address;
  return d;
}

std::vector<TraceEvent> events_from(const py::list& events) {
  std::vector<TraceEvent> out;
  out.reserve(events.size());
  std::uint64_t i = 0;
  for (const auto& item : events) {
    const auto d = item.cast<py::dict>();
    const auto kind = d["kind"].cast<std::string>();
    if (kind != "R" && kind != "W") throw ConfigError("event kind must be 'R' or 'W'");
    out.push_back({d["timestamp_ns"].cast<std::uint64_t>(), kind == "R" ? AccessKind::Read : AccessKind::Writeback,
                   d["address"].cast<std::uint64_t>(), ++i});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "STT-MRAM last-level cache simulator";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<TraceError>(m, "TraceError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());

  py::enum_<WriteFailGrouping>(m, "WriteFailGrouping")
      .value("PRODUCT", WriteFailGrouping::Product)
      .value("LN_ONLY", WriteFailGrouping::LnOnly);

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("delta_nominal", &DeviceParams::delta_nominal)
      .def_readwrite("reference_temp_k", &DeviceParams::reference_temp_k)
      .def_readwrite("tau_attempt_ns", &DeviceParams::tau_attempt_ns)
      .def_readwrite("i_read_a", &DeviceParams::i_read_a)
      .def_readwrite("i_write_a", &DeviceParams::i_write_nominal_a)
      .def_readwrite("i_c0_a", &DeviceParams::i_c0_a)
      .def_readwrite("t_read_ns", &DeviceParams::t_read_ns)
      .def_readwrite("t_write_ns", &DeviceParams::t_write_ns)
      .def_readwrite("polarization", &DeviceParams::polarization)
      .def_readwrite("moment", &DeviceParams::moment)
      .def_readwrite("write_current_derating_a_per_k", &DeviceParams::write_current_derating_a_per_k)
      .def_readwrite("grouping", &DeviceParams::grouping)
      .def("validate", &DeviceParams::validate);

  py::class_<WritePermutation>(m, "WritePermutation")
      .def_readonly("order", &WritePermutation::order)
      .def_readonly("distance_multiset", &WritePermutation::distance_multiset)
      .def_readonly("heat_score", &WritePermutation::heat_score)
      .def_property_readonly("min_distance", &WritePermutation::min_distance)
      .def("__repr__", [](const WritePermutation& p) {
        std::string s = "WritePermutation([";
        for (std::size_t i = 0; i < p.order.size(); ++i) s += (i ? ", " : "") + std::to_string(p.order[i]);
        return s + "])";
      });

  m.def(
      "enumerate_valid",
      [](std::uint32_t ways, std::uint32_t min_dist) {
        auto perms = enumerate_valid(ways, min_dist);
        const auto kernel = HeatKernel::inverse_square();
        for (auto& p : perms) p.heat_score = heat_score(p, kernel);
        return perms;
      },
      py::arg("ways") = 8, py::arg("min_dist") = 3);
  m.def("max_feasible_min_distance", &max_feasible_min_distance, py::arg("ways"));
  m.def(
      "select_default", [](std::uint32_t ways) { return select_default(ways, HeatKernel::inverse_square()); },
      py::arg("ways") = 8);
  m.def(
      "heat_score",
      [](const std::vector<std::uint32_t>& order) {
        return heat_score(WritePermutation::from_order(order), HeatKernel::inverse_square());
      },
      py::arg("order"));

  m.def(
      "generate_trace",
      [](std::uint64_t events, std::uint64_t seed, double read_fraction, std::uint64_t working_set_blocks,
         double reuse_locality, std::uint32_t window_size, double writeback_affinity, double stream_fraction) {
        SyntheticTraceSpec spec;
        spec.event_count = events;
        spec.seed = seed;
        spec.read_fraction = read_fraction;
        spec.working_set_blocks = working_set_blocks;
        spec.reuse_locality = reuse_locality;
        spec.window_size = window_size;
        spec.writeback_affinity = writeback_affinity;
        spec.stream_fraction = stream_fraction;
        py::list out;
        for (const auto& e : generate_trace(spec)) out.append(event_dict(e));
        return out;
      },
      py::arg("events") = 100000, py::arg("seed") = 1, py::arg("read_fraction") = 0.7,
      py::arg("working_set_blocks") = 65536, py::arg("reuse_locality") = 0.8, py::arg("window_size") = 16,
      py::arg("writeback_affinity") = 0.0, py::arg("stream_fraction") = 0.0);
  m.def(
      "parse_trace",
      [](const std::string& text) {
        py::list out;
        for (const auto& e : parse_trace(std::string_view(text))) out.append(event_dict(e));
        return out;
      },
      py::arg("text"));
  m.def(
      "format_trace", [](const py::list& events) { return format_trace(events_from(events)); }, py::arg("events"));

  m.def(
      "simulate",
      [](const py::object& events, const std::string& config_text, const std::vector<std::string>& policies) {
        RunConfig config;
        apply_config_text(config, config_text);
        if (!policies.empty()) {
          config.policies.clear();
          for (const auto& name : policies) config.policies.push_back(parse_policy(name));
        }
        config.validate();
        const auto trace = events.is_none() ? generate_trace(config.synthetic) : events_from(events.cast<py::list>());
        std::vector<RunReport> reports;
        {
          py::gil_scoped_release release;
          reports = simulate_all(trace, config.policies, config.sim);
        }
        py::list out;
        for (const auto& r : reports) out.append(to_python(to_json(r)));
        return out;
      },
      py::arg("events") = py::none(), py::arg("config") = "", py::arg("policies") = std::vector<std::string>{});

  m.def("delta_at", &delta_at, py::arg("temp_k"), py::arg("params") = DeviceParams{});
  m.def("bit_flip_pmf", &bit_flip_pmf, py::arg("n"), py::arg("t_ns"), py::arg("delta"),
        py::arg("params") = DeviceParams{});
  m.def("retention_failure_prob", &retention_failure_prob, py::arg("t_ns"), py::arg("delta"),
        py::arg("params") = DeviceParams{});
  m.def("read_disturbance_prob", &read_disturbance_prob, py::arg("temp_k"), py::arg("params") = DeviceParams{});
  m.def("write_failure_prob", &write_failure_prob, py::arg("temp_k"), py::arg("params") = DeviceParams{});
  m.def(
      "mttf_ns", [](double delta, const DeviceParams& p) { return mttf(delta, p).ns; }, py::arg("delta"),
      py::arg("params") = DeviceParams{});
}
