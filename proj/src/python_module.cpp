#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "invldm/audit.hpp"
#include "invldm/bench.hpp"
#include "invldm/divfree.hpp"
#include "invldm/errors.hpp"
#include "invldm/inv_ldm.hpp"
#include "invldm/matrix.hpp"
#include "invldm/version.hpp"
#include "invldm/vblast.hpp"

namespace py = pybind11;
using namespace invldm;

namespace {

using CArray = py::array_t<complex_t, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const CArray& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-D array");
  const auto v = a.unchecked<2>();
  ComplexMatrix m(static_cast<std::size_t>(v.shape(0)), static_cast<std::size_t>(v.shape(1)));
  for (py::ssize_t i = 0; i < v.shape(0); ++i)
    for (py::ssize_t j = 0; j < v.shape(1); ++j) m(i, j) = Complex(v(i, j));
  return m;
}

ComplexVector to_vector(const CArray& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-D array");
  const auto v = a.unchecked<1>();
  ComplexVector out;
  for (py::ssize_t i = 0; i < v.shape(0); ++i) out.emplace_back(v(i));
  return out;
}

CArray from_matrix(const ComplexMatrix& m) {
  CArray a({m.rows(), m.cols()});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) v(i, j) = m(i, j).value();
  return a;
}

CArray from_vector(std::span<const Complex> x) {
  CArray a(static_cast<py::ssize_t>(x.size()));
  auto v = a.mutable_unchecked<1>();
  for (std::size_t i = 0; i < x.size(); ++i) v(i) = x[i].value();
  return a;
}

py::dict counts_dict(const OpCounts& c) {
  py::dict d;
  d["cmul"] = c.cmul;
  d["cadd"] = c.cadd;
  d["cdiv"] = c.cdiv;
  d["csqrt"] = c.csqrt;
  d["rmul"] = c.rmul;
  d["radd"] = c.radd;
  return d;
}

std::vector<DetectorKind> detector_kinds(const std::vector<std::string>& names) {
  std::vector<DetectorKind> out;
  for (const std::string& n : names) out.push_back(detector_from_name(n));
  return out;
}

BenchConfig bench_config(std::vector<std::size_t> k_list, std::size_t extra, std::size_t trials,
                         std::uint64_t seed, std::vector<real_t> snr,
                         const std::vector<std::string>& detectors, std::string constellation,
                         unsigned threads) {
  BenchConfig cfg;
  cfg.K_list = std::move(k_list);
  cfg.extra_receive = extra;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.snr_db_list = std::move(snr);
  cfg.detectors = detector_kinds(detectors);
  cfg.constellation = std::move(constellation);
  cfg.threads = threads;
  return cfg;
}

const std::vector<std::string> kAllDetectors{"recursive", "sqrtfree", "oracle"};

}  // namespace

PYBIND11_MODULE(_invldm, m) {
  m.doc() = "Division-free inverse LDM factorization and V-BLAST detection";
  m.attr("__version__") = kVersion;

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SingularError>(m, "SingularError", PyExc_ArithmeticError);

  py::class_<DivFreeFactors>(m, "DivFreeFactors")
      .def_property_readonly("lt", [](const DivFreeFactors& f) { return from_matrix(f.lt); })
      .def_property_readonly("mt", [](const DivFreeFactors& f) { return from_matrix(f.mt()); })
      .def_property_readonly("dt", [](const DivFreeFactors& f) { return from_vector(f.dt); })
      .def_property_readonly("delta", [](const DivFreeFactors& f) { return f.delta.value(); })
      .def_readonly("accumulated_shift", &DivFreeFactors::accumulated_shift)
      .def_property_readonly("hermitian", &DivFreeFactors::hermitian)
      .def_property_readonly("order", &DivFreeFactors::order)
      .def("assemble_q", [](const DivFreeFactors& f) { return from_matrix(assemble_q(f)); });

  m.def(
      "inv_ldm",
      [](const CArray& r, std::vector<std::size_t> schedule) {
        const InvLdmFactors f = inv_ldm_factorize(to_matrix(r), schedule);
        return py::make_tuple(from_matrix(f.L), from_vector(f.D), from_matrix(f.M));
      },
      py::arg("r"), py::arg("schedule") = std::vector<std::size_t>{},
      "(L, D, M) with L diag(D) M^H = R^-1.");
  m.def(
      "inv_lu",
      [](const CArray& r, std::vector<std::size_t> schedule) {
        const InvLuFactors f = inv_lu_factorize(to_matrix(r), schedule);
        return py::make_tuple(from_matrix(f.L), from_matrix(f.U));
      },
      py::arg("r"), py::arg("schedule") = std::vector<std::size_t>{}, "(L, U) with L U = R^-1.");
  m.def(
      "divfree_factorize",
      [](const CArray& r, std::vector<std::size_t> schedule, bool rescale) {
        return divfree_factorize(to_matrix(r), schedule, RescalePolicy{rescale, 0});
      },
      py::arg("r"), py::arg("schedule") = std::vector<std::size_t>{}, py::arg("rescale") = true);
  m.def(
      "divfree_ldl_hermitian",
      [](const CArray& r, bool rescale) {
        return divfree_ldl_hermitian(ComplexMatrix::hermitian(to_matrix(r)), RescalePolicy{rescale, 0});
      },
      py::arg("r"), py::arg("rescale") = true);

  m.def(
      "detect",
      [](const CArray& h, const CArray& x, real_t alpha, const std::string& detector,
         const std::string& constellation, bool rescale) {
        MimoInstance inst{to_matrix(h), to_vector(x), alpha};
        DetectorOptions opt;
        opt.rescale.enabled = rescale;
        opt.normalize_soft = true;
        AuditContext ctx;
        const auto run = audited_region(ctx, [&] {
          return detect(detector_from_name(detector), inst, Constellation::by_name(constellation), opt);
        });
        const DetectionResult& r = run.result;
        py::dict out;
        out["order"] = r.order;
        out["symbol_indices"] = r.symbol_indices;
        out["symbols"] = py::array_t<complex_t>(static_cast<py::ssize_t>(r.symbols.size()), r.symbols.data());
        out["soft_estimates"] =
            py::array_t<complex_t>(static_cast<py::ssize_t>(r.soft_estimates.size()), r.soft_estimates.data());
        out["min_diagonal_gap"] = r.min_diagonal_gap;
        out["counts"] = counts_dict(run.counts);
        out["init_counts"] = counts_dict(r.init_counts);
        out["osic_counts"] = counts_dict(r.osic_counts);
        return out;
      },
      py::arg("h"), py::arg("x"), py::arg("alpha"), py::arg("detector") = "sqrtfree",
      py::arg("constellation") = "qpsk", py::arg("rescale") = true,
      "OSIC detection. Soft estimates are normalized; counts cover the whole call, Gram matrix included.");

  m.def(
      "count_ops",
      [](const py::function& fn) {
        AuditContext ctx;
        py::object result;
        const OpCounts c = audited_region(ctx, [&] { result = fn(); }).counts;
        return py::make_tuple(result, counts_dict(c));
      },
      py::arg("fn"), "Calls fn() inside an audited region; returns (result, counts).");

  m.def(
      "flop_sweep",
      [](std::vector<std::size_t> k_list, std::size_t extra_receive, std::size_t trials,
         std::uint64_t seed, real_t snr_db, const std::vector<std::string>& detectors,
         std::string constellation, unsigned threads) {
        const BenchConfig cfg = bench_config(std::move(k_list), extra_receive, trials, seed, {snr_db},
                                             detectors, std::move(constellation), threads);
        py::list rows;
        for (const BenchRow& r : flop_sweep(cfg)) {
          py::dict d = counts_dict(r.counts);
          d["K"] = r.K;
          d["N"] = r.N;
          d["detector"] = detector_name(r.detector);
          d["phase"] = phase_name(r.phase);
          d["trials"] = r.trials;
          rows.append(d);
        }
        return rows;
      },
      py::arg("k_list"), py::arg("extra_receive") = 0, py::arg("trials") = 100, py::arg("seed") = 1,
      py::arg("snr_db") = 20.0, py::arg("detectors") = kAllDetectors, py::arg("constellation") = "qpsk",
      py::arg("threads") = 1u, "Operation counts summed over trials.");

  m.def(
      "ber_sweep",
      [](std::size_t k, std::size_t extra_receive, std::size_t trials, std::uint64_t seed,
         std::vector<real_t> snr_db, const std::vector<std::string>& detectors,
         std::string constellation, unsigned threads) {
        const BenchConfig cfg = bench_config({k}, extra_receive, trials, seed, std::move(snr_db), detectors,
                                             std::move(constellation), threads);
        const BerReport rep = ber_sweep(cfg);
        py::list rows;
        for (const BerRow& r : rep.rows) {
          py::dict d;
          d["snr_db"] = r.snr_db;
          d["detector"] = detector_name(r.detector);
          d["errors"] = r.errors;
          d["total"] = r.total;
          d["ber"] = r.ber();
          rows.append(d);
        }
        return py::make_tuple(rows, rep.warnings);
      },
      py::arg("k"), py::arg("extra_receive") = 0, py::arg("trials") = 1000, py::arg("seed") = 1,
      py::arg("snr_db") = std::vector<real_t>{10, 20, 30}, py::arg("detectors") = kAllDetectors,
      py::arg("constellation") = "qpsk", py::arg("threads") = 1u, "(rows, warnings).");
}
