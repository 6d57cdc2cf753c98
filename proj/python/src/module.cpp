#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blurreg/alignment.hpp"
#include "blurreg/baseline.hpp"
#include "blurreg/error.hpp"
#include "blurreg/matrices.hpp"
#include "blurreg/normal.hpp"
#include "blurreg/scenario.hpp"
#include "blurreg/signal.hpp"

namespace py = pybind11;
using namespace blurreg;

namespace {

// Sequences cross the boundary as integer numerators over 256.
std::vector<Q256> to_q(const std::vector<std::int64_t>& nums) {
  std::vector<Q256> out;
  out.reserve(nums.size());
  for (auto n : nums) out.emplace_back(n);
  return out;
}

std::vector<std::int64_t> to_nums(const std::vector<Q256>& q) {
  std::vector<std::int64_t> out;
  out.reserve(q.size());
  for (auto x : q) out.push_back(x.num);
  return out;
}

std::vector<std::int64_t> sample(const std::vector<std::int64_t>& amplitudes,
                                 const std::vector<double>& discontinuities, double sigma,
                                 double t0, int count) {
  const PiecewiseConstantSignal s(to_q(amplitudes), discontinuities);
  return to_nums(sample_sequence(s, BlurModel::gaussian(sigma), {t0, count}));
}

py::tuple baseline(const std::vector<std::int64_t>& y1, const std::vector<std::int64_t>& y2) {
  const auto best = ccorr_argmax(cross_correlation(to_q(y1), to_q(y2)));
  return py::make_tuple(best.lag, best.tied);
}

std::string align(const std::vector<std::int64_t>& d1, const std::vector<std::int64_t>& d2,
                  const std::string& v) {
  const auto threshold = parse_rational(v);
  return path_result_json(threshold, longest_path(build_graph(to_q(d1), to_q(d2), threshold)));
}

std::string run(const std::string& config_json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return run_scenario(parse_scenario(doc)).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Blurred, quantized piecewise-constant samples: simulation, alignment, bounds.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<RegimeError>(m, "RegimeError", PyExc_ValueError);

  m.def("normal_cdf", &normal_cdf, py::arg("z"));
  m.def(
      "nu_threshold", [](std::int64_t step) { return nu_threshold(Q256(step)); }, py::arg("step"),
      "Saturation threshold for a step of `step`/256.");
  m.def("sample_sequence", &sample, py::arg("amplitudes"), py::arg("discontinuities"),
        py::arg("sigma"), py::arg("t0"), py::arg("count"),
        "Quantized samples (numerators over 256) of a Gaussian-blurred signal.");
  m.def(
      "difference_sequence",
      [](const std::vector<std::int64_t>& y) { return to_nums(difference_sequence(to_q(y))); },
      py::arg("y"));
  m.def("baseline", &baseline, py::arg("y1"), py::arg("y2"),
        "Cross-correlation argmax lag and every lag tied with it.");
  m.def("align_json", &align, py::arg("d1"), py::arg("d2"), py::arg("v"));
  m.def("run_json", &run, py::arg("config"));
  m.def("reproduce_json", [] { return reproduce_reference_example().to_json().dump(); });
}
