#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ainsim/experiments.hpp"
#include "ainsim/metrics.hpp"
#include "ainsim/rational.hpp"

namespace py = pybind11;
using namespace ainsim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Aligned interference neutralization simulator for the 2x2x2 two-hop "
              "interference network";

    py::register_exception<parameter_error>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

    py::enum_<ChannelModel>(m, "ChannelModel")
        .value("time_varying", ChannelModel::time_varying)
        .value("constant_complex", ChannelModel::constant_complex)
        .value("constant_real", ChannelModel::constant_real);

    py::class_<MagnitudeBounds>(m, "MagnitudeBounds")
        .def(py::init<double, double>(), py::arg("min_mag") = 0.1, py::arg("max_mag") = 10.0)
        .def_readwrite("min_mag", &MagnitudeBounds::min_mag)
        .def_readwrite("max_mag", &MagnitudeBounds::max_mag);

    py::class_<ChannelRealization>(m, "ChannelRealization")
        .def_property_readonly("hops", &ChannelRealization::hops)
        .def_property_readonly("slots", &ChannelRealization::slots)
        .def_property_readonly("model", &ChannelRealization::model)
        .def_property_readonly("seed", &ChannelRealization::seed)
        .def("at", &ChannelRealization::at, py::arg("hop"), py::arg("rx"), py::arg("tx"),
             py::arg("slot"))
        .def("hop_matrix", &ChannelRealization::hop_matrix, py::arg("hop"), py::arg("slot") = 0);

    m.def("sample_channel", &sample_channel, py::arg("seed"), py::arg("hops"), py::arg("slots"),
          py::arg("model"), py::arg("bounds") = MagnitudeBounds{});
    m.def("channel_to_json", &channel_to_json);
    m.def("channel_from_json", &channel_from_json);

    py::class_<DiagonalExtension>(m, "DiagonalExtension")
        .def_readonly("entries", &DiagonalExtension::entries);
    m.def("extend", &extend, py::arg("channel"), py::arg("hop"), py::arg("rx"), py::arg("tx"));

    py::class_<RealRotation>(m, "RealRotation")
        .def_readonly("magnitude", &RealRotation::magnitude)
        .def_readonly("phase", &RealRotation::phase)
        .def("expand", &RealRotation::expand);
    m.def("to_real_rotation", &to_real_rotation, py::arg("coefficient"));

    m.def(
        "first_hop_beamformers",
        [](const DiagonalExtension& f11, const DiagonalExtension& f12,
           const DiagonalExtension& f21, const DiagonalExtension& f22, int extension) {
            return first_hop_beamformers(f11, f12, f21, f22, extension);
        },
        py::arg("f11"), py::arg("f12"), py::arg("f21"), py::arg("f22"), py::arg("extension"));
    m.def(
        "second_hop_beamformers",
        [](const DiagonalExtension& g11, const DiagonalExtension& g12,
           const DiagonalExtension& g21, const DiagonalExtension& g22, int extension) {
            return second_hop_beamformers(g11, g12, g21, g22, extension);
        },
        py::arg("g11"), py::arg("g12"), py::arg("g21"), py::arg("g22"), py::arg("extension"));
    m.def("alignment_nodes", &alignment_nodes, py::arg("f11"), py::arg("f12"), py::arg("f21"),
          py::arg("f22"));

    py::class_<IndependenceReport>(m, "IndependenceReport")
        .def_readonly("determinant_magnitude", &IndependenceReport::determinant_magnitude)
        .def_readonly("condition_number", &IndependenceReport::condition_number)
        .def_readonly("independent", &IndependenceReport::independent)
        .def_readonly("vandermonde_product", &IndependenceReport::vandermonde_product)
        .def_readonly("vandermonde_rel_gap", &IndependenceReport::vandermonde_rel_gap);
    m.def("independence_report",
          py::overload_cast<const std::vector<Eigen::VectorXcd>&>(&independence_report));
    m.def("independence_report",
          py::overload_cast<const std::vector<Eigen::VectorXcd>&, const Eigen::VectorXcd&>(
              &independence_report));

    py::class_<PhaseConditionReport>(m, "PhaseConditionReport")
        .def_readonly("first_hop_ok", &PhaseConditionReport::first_hop_ok)
        .def_readonly("second_hop_ok", &PhaseConditionReport::second_hop_ok)
        .def_readonly("first_hop_margin", &PhaseConditionReport::first_hop_margin)
        .def_readonly("second_hop_margin", &PhaseConditionReport::second_hop_margin);
    m.def("phase_condition", &phase_condition, py::arg("first_hop"), py::arg("second_hop"));

    py::class_<EigenDistinctReport>(m, "EigenDistinctReport")
        .def_readonly("distinct", &EigenDistinctReport::distinct)
        .def_readonly("min_gap", &EigenDistinctReport::min_gap)
        .def_readonly("eigenvalues", &EigenDistinctReport::eigenvalues);
    m.def("mimo_eigen_distinct", &mimo_eigen_distinct, py::arg("f11"), py::arg("f12"),
          py::arg("f21"), py::arg("f22"));

    m.def("isolate", &isolate, py::arg("received"), py::arg("effective_columns"));
    m.def(
        "forward_linear",
        [](const Eigen::VectorXcd& isolated, const std::vector<Eigen::VectorXcd>& vectors,
           double power, const Eigen::VectorXd& moments) {
            const auto result = forward_linear(isolated, vectors, power, moments);
            return py::make_tuple(result.forwarded, result.power_scale);
        },
        py::arg("isolated"), py::arg("relay_vectors"), py::arg("power"),
        py::arg("stream_second_moments"));
    m.def("hard_decide", &hard_decide, py::arg("received"), py::arg("directions"),
          py::arg("symbol_bound"));
    m.def("min_nonzero_combination", &min_nonzero_combination, py::arg("directions"),
          py::arg("bound"));

    py::class_<MeasuredLink>(m, "MeasuredLink")
        .def_readonly("sinr1", &MeasuredLink::sinr1)
        .def_readonly("sinr2", &MeasuredLink::sinr2)
        .def_readonly("power", &MeasuredLink::power)
        .def_readonly("frames", &MeasuredLink::frames);

    py::class_<EndToEndReport>(m, "EndToEndReport")
        .def_readonly("d1_desired", &EndToEndReport::d1_desired)
        .def_readonly("d2_desired", &EndToEndReport::d2_desired)
        .def_readonly("leakage", &EndToEndReport::leakage)
        .def_readonly("matches_chain_template", &EndToEndReport::matches_chain_template);

    py::class_<AlignedPipeline>(m, "AlignedPipeline")
        .def(py::init([](const ChannelRealization& channel, double power, double noise_var) {
                 return AlignedPipeline::from_channel(channel, power, noise_var);
             }),
             py::arg("channel"), py::arg("power"), py::arg("noise_var") = 1.0)
        .def_property_readonly("extension", &AlignedPipeline::extension)
        .def_property_readonly("relay_scale", &AlignedPipeline::relay_scale)
        .def("measure", &AlignedPipeline::measure, py::arg("target_symbols"), py::arg("seed"),
             py::arg("mute_source2") = false)
        .def("end_to_end", [](const AlignedPipeline& p) { return end_to_end_matrix(p); })
        .def("residual_interference_ratio",
             [](const AlignedPipeline& p) { return residual_interference_ratio(p); });

    py::class_<TdmaRates>(m, "TdmaRates")
        .def_readonly("sinr1", &TdmaRates::sinr1)
        .def_readonly("sinr2", &TdmaRates::sinr2)
        .def_readonly("sum_rate", &TdmaRates::sum_rate);
    m.def("tdma_baseline", &tdma_baseline, py::arg("channel"), py::arg("power"),
          py::arg("noise_var") = 1.0);

    py::enum_<Field>(m, "Field")
        .value("complex_field", Field::complex_field)
        .value("real_field", Field::real_field);
    m.def("sum_rate", &sum_rate, py::arg("sinrs"), py::arg("extension"), py::arg("field"));
    m.def("dof_slope", &dof_slope, py::arg("rates"), py::arg("powers_db"), py::arg("field"));

    py::class_<MonomialDirections>(m, "MonomialDirections")
        .def_readonly("v1", &MonomialDirections::v1)
        .def_readonly("v2", &MonomialDirections::v2)
        .def_readonly("vr1", &MonomialDirections::vr1)
        .def_readonly("vr2", &MonomialDirections::vr2);
    m.def("monomial_directions", &monomial_directions, py::arg("first_hop"),
          py::arg("second_hop"), py::arg("extension"));

    py::class_<RationalConfig>(m, "RationalConfig")
        .def_readonly("m", &RationalConfig::m)
        .def_readonly("gamma", &RationalConfig::gamma)
        .def_readonly("epsilon", &RationalConfig::epsilon)
        .def_readonly("p", &RationalConfig::p)
        .def_readonly("q_max", &RationalConfig::q_max)
        .def_readonly("a_norm", &RationalConfig::a_norm)
        .def_readonly("b_norm", &RationalConfig::b_norm);
    m.def("build_config", &build_config, py::arg("extension"), py::arg("gamma"),
          py::arg("epsilon"), py::arg("power"), py::arg("directions"));
    m.def("rate_lower_bound", &rate_lower_bound, py::arg("symbol_error_rate"), py::arg("q_max"));

    py::class_<TrialOutcome>(m, "TrialOutcome")
        .def_readonly("relay_errors", &TrialOutcome::relay_errors)
        .def_readonly("dest_symbol_errors", &TrialOutcome::dest_symbol_errors)
        .def_readonly("per_hop_min_distance", &TrialOutcome::per_hop_min_distance)
        .def_readonly("peak_power", &TrialOutcome::peak_power);
    m.def("run_rational_trial", &run_rational_trial, py::arg("channel"), py::arg("config"),
          py::arg("seed"), py::arg("noise_std") = 1.0);

    py::class_<RationalBatchResult>(m, "RationalBatchResult")
        .def_readonly("trials", &RationalBatchResult::trials)
        .def_readonly("relay_ser", &RationalBatchResult::relay_ser)
        .def_readonly("dest_ser", &RationalBatchResult::dest_ser)
        .def_readonly("min_distance", &RationalBatchResult::min_distance)
        .def_readonly("peak_power", &RationalBatchResult::peak_power)
        .def_readonly("rate_lower", &RationalBatchResult::rate_lower);
    m.def("run_rational_batch", &run_rational_batch, py::arg("channel"), py::arg("config"),
          py::arg("trials"), py::arg("seed"), py::arg("noise_std") = 1.0);

    py::class_<GainAssignment>(m, "GainAssignment")
        .def(py::init(&GainAssignment::unit), py::arg("layer_count"))
        .def_readwrite("layers", &GainAssignment::layers);
    m.def("effective_matrix", &effective_matrix, py::arg("channel"), py::arg("gains"),
          py::arg("slot") = 0);
    m.def("two_hop_infeasibility", &two_hop_infeasibility, py::arg("channel"),
          py::arg("slot") = 0);

    py::class_<GainSolveReport>(m, "GainSolveReport")
        .def_readonly("gains", &GainSolveReport::gains)
        .def_readonly("converged", &GainSolveReport::converged)
        .def_readonly("residual", &GainSolveReport::residual)
        .def_readonly("diag_min", &GainSolveReport::diag_min)
        .def_readonly("iterations", &GainSolveReport::iterations)
        .def_readonly("residual_history", &GainSolveReport::residual_history);
    m.def("solve_gains", &solve_gains, py::arg("channel"), py::arg("init"),
          py::arg("max_iters") = 50, py::arg("tol") = kNewtonTol, py::arg("jitter_seed") = 1);

    py::class_<ReducedChannel>(m, "ReducedChannel")
        .def_readonly("two_hop", &ReducedChannel::two_hop)
        .def_readonly("extra_noise_d1", &ReducedChannel::extra_noise_d1)
        .def_readonly("extra_noise_d2", &ReducedChannel::extra_noise_d2);
    m.def("reduce_to_two_hops", &reduce_to_two_hops, py::arg("channel"),
          py::arg("folded_gains"));

    py::class_<DofExperimentConfig>(m, "DofExperimentConfig")
        .def(py::init<>())
        .def_readwrite("scheme", &DofExperimentConfig::scheme)
        .def_readwrite("extension", &DofExperimentConfig::extension)
        .def_readwrite("seed_count", &DofExperimentConfig::seed_count)
        .def_readwrite("base_seed", &DofExperimentConfig::base_seed)
        .def_readwrite("p_grid_db", &DofExperimentConfig::p_grid_db)
        .def_readwrite("symbols", &DofExperimentConfig::symbols)
        .def_readwrite("noise_var", &DofExperimentConfig::noise_var)
        .def_readwrite("bounds", &DofExperimentConfig::bounds)
        .def_readwrite("jobs", &DofExperimentConfig::jobs);
    py::class_<DofExperimentResult>(m, "DofExperimentResult")
        .def_readonly("p_grid_db", &DofExperimentResult::p_grid_db)
        .def_readonly("avg_rates", &DofExperimentResult::avg_rates)
        .def_readonly("dof_slope", &DofExperimentResult::dof_slope)
        .def_readonly("max_leakage", &DofExperimentResult::max_leakage)
        .def_readonly("max_residual_ratio", &DofExperimentResult::max_residual_ratio);
    m.def("run_dof_experiment", &run_dof_experiment, py::arg("config"));

    py::class_<RotationExperimentResult>(m, "RotationExperimentResult")
        .def_readonly("phases", &RotationExperimentResult::phases)
        .def_readonly("pipeline_ran", &RotationExperimentResult::pipeline_ran)
        .def_readonly("rates", &RotationExperimentResult::rates)
        .def_readonly("dof_slope", &RotationExperimentResult::dof_slope);
    m.def("run_rotation_experiment", &run_rotation_experiment, py::arg("first_hop"),
          py::arg("second_hop"), py::arg("p_grid_db"), py::arg("symbols"), py::arg("seed"));
}
