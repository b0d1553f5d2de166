#include "web4/errors.hpp"
#include "web4/report.hpp"
#include "web4/specfile.hpp"
#include "web4/verify.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace web4;

enum Exit { ok = 0, verify_failed = 1, input_error = 2, degenerate_point = 3, empty_region = 4 };

struct Common {
    std::string file;
    std::optional<int> order;
    std::optional<std::string> backend;
    std::optional<std::string> epsilon;
    bool json = false;
    bool pretty = false;
};

void add_common(CLI::App& cmd, Common& c) {
    cmd.add_option("file", c.file, "web spec file")->required();
    cmd.add_option("--order", c.order, "jet order N (at least 5)");
    cmd.add_option("--backend", c.backend, "rational | float");
    cmd.add_option("--epsilon", c.epsilon, "vanishing tolerance for the float backend");
    auto* json = cmd.add_flag("--json", c.json, "JSON report (default)");
    cmd.add_flag("--pretty", c.pretty, "indented text rendering of the same report")->excludes(json);
}

SpecFile load(const Common& c) {
    SpecFile f = load_spec_file(c.file);
    if (c.order) f.spec.order = *c.order;
    if (c.backend) {
        try {
            f.spec.backend = backend_from_string(*c.backend);
        } catch (const std::invalid_argument& e) {
            throw WebError(ErrorKind::invalid_spec, std::string("--backend: ") + e.what());
        }
        f.backend_given = true;
    }
    if (c.epsilon) {
        try {
            f.spec.epsilon = rational_from_decimal(*c.epsilon).get_d();
        } catch (const std::invalid_argument& e) {
            throw WebError(ErrorKind::invalid_spec, std::string("--epsilon: ") + e.what());
        }
        if (!(f.spec.epsilon > 0.0)) throw WebError(ErrorKind::invalid_spec, "--epsilon must be positive");
    }
    f.spec.validate();
    return f;
}

std::vector<std::string> split_pair(const std::string& text, const char* flag) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
        throw WebError(ErrorKind::invalid_spec, std::string(flag) + " expects two comma-separated values, got '" +
                                                    text + "'");
    }
    return {text.substr(0, comma), text.substr(comma + 1)};
}

void emit(const Json& doc, const Common& c) {
    std::cout << (c.pretty ? render_pretty(doc) : serialize(doc));
}

int run_invariants(const Common& c, const std::string& at) {
    const SpecFile f = load(c);
    const auto parts = split_pair(at, "--at");
    Rational x, y;
    try {
        x = rational_from_decimal(parts[0]);
        y = rational_from_decimal(parts[1]);
    } catch (const std::invalid_argument& e) {
        throw WebError(ErrorKind::invalid_spec, std::string("--at: ") + e.what());
    }
    const auto b = f.spec.domain.bounds<Rational>();
    if (x < b[0] || x > b[1] || y < b[2] || y > b[3]) {
        throw WebError(ErrorKind::invalid_spec, "--at " + at + " lies outside the domain");
    }
    if (f.spec.backend == Backend::rational) {
        emit(invariants_document(f, Point<Rational>{x, y}), c);
    } else {
        emit(invariants_document(f, Point<double>{x.get_d(), y.get_d()}), c);
    }
    return ok;
}

int run_classify(const Common& c, const std::optional<std::string>& grid) {
    SpecFile f = load(c);
    if (grid) {
        const auto parts = split_pair(*grid, "--grid");
        try {
            f.grid.nx = std::stoi(parts[0]);
            f.grid.ny = std::stoi(parts[1]);
        } catch (const std::exception&) {
            throw WebError(ErrorKind::invalid_spec, "--grid expects two integers, got '" + *grid + "'");
        }
        if (f.grid.nx < 1 || f.grid.ny < 1) throw WebError(ErrorKind::invalid_spec, "--grid entries must be positive");
    }
    if (f.spec.backend == Backend::rational) {
        emit(classify_document(f, classify_region<Rational>(f.spec, f.grid)), c);
    } else {
        emit(classify_document(f, classify_region<double>(f.spec, f.grid)), c);
    }
    return ok;
}

int run_verify(const std::string& suite, const std::optional<std::string>& corpus, std::optional<unsigned> seed,
               bool json) {
    VerifyOptions options = default_verify_options();
    if (corpus) options.corpus_dir = *corpus;
    if (seed) options.seed = *seed;
    std::vector<std::string> names;
    if (suite == "all") {
        names = suite_names();
    } else {
        names = {suite};
    }
    bool passed = true;
    Json suites = Json::array();
    for (const auto& n : names) {
        const SuiteResult r = run_suite(n, options);
        passed = passed && r.passed();
        if (json) {
            suites.push_back(suite_json(r));
        } else {
            std::cout << suite_text(r);
        }
    }
    if (json) std::cout << serialize(Json{{"command", "verify"}, {"passed", passed}, {"suites", suites}});
    return passed ? ok : verify_failed;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::degenerate_web_point:
        case ErrorKind::inadmissible_invariant:
        case ErrorKind::division_by_degenerate_jet:
        case ErrorKind::consistency_failure: return degenerate_point;
        case ErrorKind::empty_admissible_set: return empty_region;
        default: return input_error;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariants and classification of planar 4-webs"};
    app.require_subcommand(1);

    Common inv_opts;
    std::string at;
    auto* inv = app.add_subcommand("invariants", "invariant ladder, subweb curvatures and labels at one point");
    add_common(*inv, inv_opts);
    inv->add_option("--at", at, "point x,y")->required();

    Common cls_opts;
    std::optional<std::string> grid;
    auto* cls = app.add_subcommand("classify", "classify the web over a sampling grid of its domain");
    add_common(*cls, cls_opts);
    cls->add_option("--grid", grid, "grid size nx,ny");

    std::string suite = "all";
    std::optional<std::string> corpus;
    std::optional<unsigned> seed;
    bool verify_json = false, verify_pretty = false;
    auto* ver = app.add_subcommand("verify", "run built-in identity and oracle suites");
    std::string known = "all";
    for (const auto& n : suite_names()) known += ", " + n;
    ver->add_option("--suite", suite, "suite name: " + known);
    ver->add_option("--corpus", corpus, "directory holding the example spec files");
    ver->add_option("--seed", seed, "seed for the randomized suites");
    auto* vj = ver->add_flag("--json", verify_json, "JSON summary");
    ver->add_flag("--pretty", verify_pretty, "text summary (default)")->excludes(vj);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : input_error;
    }

    try {
        if (*inv) return run_invariants(inv_opts, at);
        if (*cls) return run_classify(cls_opts, grid);
        if (*ver) return run_verify(suite, corpus, seed, verify_json);
    } catch (const WebError& e) {
        std::cerr << "web4: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const ParseError& e) {
        std::cerr << "web4: parse error: " << e.what() << "\n";
        return input_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "web4: " << e.what() << "\n";
        return input_error;
    }
    return input_error;
}
