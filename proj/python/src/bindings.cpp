#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "c2m/config_json.hpp"
#include "c2m/eval.hpp"

namespace py = pybind11;
using namespace c2m;

namespace {

using Array2 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<Label, py::array::c_style | py::array::forcecast>;

PointSet to_points(const Array2& a) {
    if (a.ndim() != 2) throw ShapeError("points must be a 2-D array, got " + std::to_string(a.ndim()) + "-D");
    const auto n = static_cast<std::size_t>(a.shape(0)), d = static_cast<std::size_t>(a.shape(1));
    return PointSet(Matrix(n, d, std::vector<double>(a.data(), a.data() + n * d)));
}

Labeling to_labels(const LabelArray& a) {
    if (a.ndim() != 1) throw ShapeError("labels must be a 1-D array");
    return Labeling(a.data(), a.data() + a.shape(0));
}

py::array_t<double> from_points(const PointSet& p) {
    py::array_t<double> out({p.n(), p.d()});
    std::copy(p.matrix().data().begin(), p.matrix().data().end(), out.mutable_data());
    return out;
}

py::array_t<Label> from_labels(const Labeling& y) {
    py::array_t<Label> out(static_cast<py::ssize_t>(y.size()));
    std::copy(y.begin(), y.end(), out.mutable_data());
    return out;
}

py::object maybe_labels(const std::optional<Labeling>& y) {
    return y ? py::object(from_labels(*y)) : py::object(py::none());
}

CemConfig cem_config(std::size_t population, std::size_t iterations, double elite_fraction, unsigned threads) {
    CemConfig c = inference_cem();
    c.population = population;
    c.iterations = iterations;
    c.elite_fraction = elite_fraction;
    c.threads = threads;
    c.validate();
    return c;
}

}  // namespace

PYBIND11_MODULE(_c2m, m) {
    m.doc() = "Learned transferable clustering metric: training, clustering and evaluation";

    static py::exception<Error> base(m, "C2mError", PyExc_RuntimeError);
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<CheckpointError>(m, "CheckpointError", base.ptr());

    m.def("acc", [](const LabelArray& p, const LabelArray& t) { return acc(to_labels(p), to_labels(t)); },
          py::arg("pred"), py::arg("truth"), "Accuracy under the best one-to-one label matching.");
    m.def("nmi", [](const LabelArray& p, const LabelArray& t) { return nmi(to_labels(p), to_labels(t)); },
          py::arg("pred"), py::arg("truth"), "Normalized mutual information (geometric-mean normalization).");
    m.def(
        "gen_family",
        [](const std::string& family, std::size_t n, std::uint64_t seed) {
            const SampleDataset ds = gen_family(parse_family(family), n, seed);
            return py::make_tuple(from_points(ds.points), from_labels(*ds.truth));
        },
        py::arg("family"), py::arg("n"), py::arg("seed"),
        "One synthetic dataset: blobs, anisotropic, moons or circles. Returns (points, labels).");
    m.def("standardize", [](const Array2& x) { return from_points(standardize(to_points(x))); }, py::arg("points"));
    m.def(
        "load_dataset",
        [](const std::filesystem::path& path, bool read_labels) {
            const SampleDataset ds = load_dataset(path, read_labels);
            return py::make_tuple(from_points(ds.points), maybe_labels(ds.truth));
        },
        py::arg("path"), py::arg("read_labels") = true, "Reads a feature CSV. Returns (points, labels or None).");

    py::class_<C2mModel>(m, "Model")
        .def_static("load", &load_model, py::arg("path"))
        .def_static("from_json", &model_from_json, py::arg("text"))
        .def("save", [](const C2mModel& model, const std::filesystem::path& p) { save_model(p, model); },
             py::arg("path"))
        .def("to_json", &model_to_json)
        .def_property_readonly("d", [](const C2mModel& model) { return model.meta.d; })
        .def_property_readonly("m", [](const C2mModel& model) { return model.meta.m; })
        .def_property_readonly("k", [](const C2mModel& model) { return model.meta.k; })
        .def_property_readonly("corpus_tag", [](const C2mModel& model) { return model.meta.corpus_tag; })
        .def(
            "metric",
            [](const C2mModel& model, const Array2& x, const LabelArray& y) {
                return metric(model, to_points(x), to_labels(y));
            },
            py::arg("points"), py::arg("labels"), "Score of one labeling; higher is better.")
        .def(
            "metric_batch",
            [](const C2mModel& model, const Array2& x, const std::vector<LabelArray>& ys, unsigned threads) {
                std::vector<Labeling> labelings;
                for (const auto& y : ys) labelings.push_back(to_labels(y));
                py::gil_scoped_release release;
                return metric_batch(model, to_points(x), labelings, threads);
            },
            py::arg("points"), py::arg("labelings"), py::arg("threads") = 1)
        .def(
            "cluster",
            [](const C2mModel& model, const Array2& x, std::uint64_t seed, std::size_t population,
               std::size_t iterations, double elite_fraction, unsigned threads) {
                const PointSet pts = to_points(x);
                const CemConfig cfg = cem_config(population, iterations, elite_fraction, threads);
                ClusterResult r;
                {
                    py::gil_scoped_release release;
                    r = cluster(model, pts, cfg, seed);
                }
                return py::make_tuple(from_labels(r.labels), r.score, r.inferred_k);
            },
            py::arg("points"), py::arg("seed") = 0, py::arg("population") = 50, py::arg("iterations") = 30,
            py::arg("elite_fraction") = 0.1, py::arg("threads") = 1,
            "Clusters unlabelled points. Returns (labels, score, inferred_k).");

    m.def(
        "_train",
        [](const std::vector<std::pair<Array2, LabelArray>>& datasets, const std::string& preset,
           const std::string& config_json, std::uint64_t seed) {
            Corpus corpus;
            for (const auto& [x, y] : datasets)
                corpus.datasets.push_back({to_points(x), to_labels(y), {"python", 0, 0}});
            TrainConfig cfg;
            if (preset == "standard") cfg = TrainConfig::standard();
            else if (preset == "few-shots") cfg = TrainConfig::few_shots();
            else throw ValidationError("preset must be 'standard' or 'few-shots'");
            if (!config_json.empty()) {
                try {
                    from_json(nlohmann::json::parse(config_json), cfg);
                } catch (const nlohmann::json::exception& e) {
                    throw ValidationError(std::string("train config: ") + e.what());
                }
            }
            cfg.seed = seed;
            TrainReport rep;
            C2mModel model;
            {
                py::gil_scoped_release release;
                model = train(corpus, cfg, &rep);
            }
            py::list rows;
            for (const auto& r : rep.records)
                rows.append(py::dict(py::arg("epoch") = r.epoch, py::arg("dataset_index") = r.dataset_index,
                                     py::arg("critic_loss") = r.critic_objective, py::arg("train_acc") = r.train_acc,
                                     py::arg("inferred_k") = r.inferred_k));
            return py::make_tuple(model, rows);
        },
        py::arg("datasets"), py::arg("preset"), py::arg("config_json"), py::arg("seed"));
}
