#include "web4/errors.hpp"
#include "web4/report.hpp"
#include "web4/specfile.hpp"
#include "web4/verify.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace web4;

namespace {

SpecFile load(const std::string& text, const std::optional<std::string>& backend) {
    SpecFile f = parse_spec_file(text);
    if (backend) {
        f.spec.backend = backend_from_string(*backend);
        f.spec.validate();
    }
    return f;
}

std::string invariants(const std::string& text, const std::string& x, const std::string& y,
                       const std::optional<std::string>& backend) {
    const SpecFile f = load(text, backend);
    const Rational px = rational_from_decimal(x), py_ = rational_from_decimal(y);
    if (f.spec.backend == Backend::rational) return serialize(invariants_document(f, Point<Rational>{px, py_}));
    return serialize(invariants_document(f, Point<double>{px.get_d(), py_.get_d()}));
}

std::string classify(const std::string& text, const std::optional<std::pair<int, int>>& grid,
                     const std::optional<std::string>& backend) {
    SpecFile f = load(text, backend);
    if (grid) f.grid = Grid{grid->first, grid->second};
    if (f.spec.backend == Backend::rational) return serialize(classify_document(f, classify_region<Rational>(f.spec, f.grid)));
    return serialize(classify_document(f, classify_region<double>(f.spec, f.grid)));
}

std::string jet(const std::string& expr, const std::string& x, const std::string& y, int order,
                const std::string& backend) {
    const Expr e = parse(expr);
    const Rational px = rational_from_decimal(x), py_ = rational_from_decimal(y);
    Json coeffs = Json::object();
    auto fill = [&](const auto& j) {
        for (int d = 0; d <= order; ++d) {
            for (int k = 0; k <= d; ++k) {
                const auto& c = j.coeff(d - k, k);
                const std::string key = std::to_string(d - k) + "," + std::to_string(k);
                if constexpr (is_exact_v<std::decay_t<decltype(c)>>) {
                    coeffs[key] = exact_string(c);
                } else {
                    coeffs[key] = c;
                }
            }
        }
    };
    if (backend_from_string(backend) == Backend::rational) {
        fill(eval_jet(e, Point<Rational>{px, py_}, order));
    } else {
        fill(eval_jet(e, Point<double>{px.get_d(), py_.get_d()}, order));
    }
    return serialize(Json{{"expr", render(e)}, {"order", order}, {"backend", backend}, {"coeffs", coeffs}});
}

std::string verify(const std::string& suite) { return serialize(suite_json(run_suite(suite, default_verify_options()))); }

}  // namespace

PYBIND11_MODULE(_web4, m) {
    m.doc() = "Invariants and classification of planar 4-webs";

    static py::exception<WebError> web_error(m, "WebError", PyExc_RuntimeError);
    static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const WebError& e) {
            py::set_error(web_error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        } catch (const ParseError& e) {
            py::set_error(parse_error, e.what());
        }
    });

    m.def("render", [](const std::string& text) { return render(parse(text)); }, py::arg("expr"),
          "Canonical text of a parsed expression.");
    m.def("jet", &jet, py::arg("expr"), py::arg("x"), py::arg("y"), py::arg("order"),
          py::arg("backend") = "float", "Taylor coefficients as a JSON document.");
    m.def("invariants", &invariants, py::arg("spec"), py::arg("x"), py::arg("y"), py::arg("backend") = py::none(),
          "Invariant report for one point as a JSON document.");
    m.def("classify", &classify, py::arg("spec"), py::arg("grid") = py::none(), py::arg("backend") = py::none(),
          "Region classification as a JSON document.");
    m.def("verify", &verify, py::arg("suite"), "Result of one verification suite as a JSON document.");
    m.def("suite_names", &suite_names);
    m.def("corpus_dir", [] { return default_corpus_dir().string(); });
}
