#include "tnf/system_spec.hpp"

#include <nlohmann/json.hpp>

namespace tnf {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw validation_error(path + ": " + what);
}

NumberSpec read_number(const json& v, const std::string& path, bool exact_backend) {
    if (v.is_string()) {
        const std::string text = v.get<std::string>();
        parse_rational(text); // syntax check, throws on garbage
        return NumberSpec::of_text(text);
    }
    if (v.is_number_integer()) return NumberSpec::of_text(std::to_string(v.get<long long>()));
    if (v.is_number_float()) {
        if (exact_backend)
            fail(path, "exact backend needs \"p/q\" or decimal strings, not floating JSON numbers");
        return NumberSpec::of_double(v.get<double>());
    }
    fail(path, "expected a number or a rational string");
}

std::pair<NumberSpec, NumberSpec> read_complex(const json& v, const std::string& path,
                                               bool exact_backend) {
    if (!v.is_array() || v.size() != 2) fail(path, "expected a [re, im] pair");
    return {read_number(v[0], path + "[0]", exact_backend),
            read_number(v[1], path + "[1]", exact_backend)};
}

std::vector<int> read_int_array(const json& v, const std::string& path, int expect_len) {
    if (!v.is_array()) fail(path, "expected an integer array");
    if (static_cast<int>(v.size()) != expect_len)
        fail(path, "expected length " + std::to_string(expect_len));
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_integer()) fail(path + "[" + std::to_string(i) + "]", "expected an integer");
        out.push_back(v[i].get<int>());
    }
    return out;
}

} // namespace

SystemSpec parse_system(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw validation_error(std::string("input is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) fail("$", "expected a JSON object");

    SystemSpec spec;
    auto require = [&](const char* key) -> const json& {
        if (!root.contains(key)) fail(key, "missing required field");
        return root.at(key);
    };

    if (!require("d").is_number_integer() || (spec.d = root["d"].get<int>()) < 1)
        fail("d", "expected an integer >= 1");
    if (!require("n").is_number_integer() || (spec.n = root["n"].get<int>()) < 1)
        fail("n", "expected an integer >= 1");
    if (!require("cap").is_number_integer() || (spec.cap = root["cap"].get<int>()) < 0)
        fail("cap", "expected an integer >= 0");

    if (root.contains("backend")) {
        spec.backend = root["backend"].get<std::string>();
        if (spec.backend != "exact" && spec.backend != "float")
            fail("backend", "expected \"exact\" or \"float\"");
    }
    const bool exact = spec.backend == "exact";

    if (root.contains("norm")) {
        const json& nm = root["norm"];
        if (!nm.is_object()) fail("norm", "expected an object {r0, delta0}");
        if (nm.contains("r0")) spec.r0 = nm["r0"].get<double>();
        if (nm.contains("delta0")) spec.delta0 = nm["delta0"].get<double>();
        if (!(spec.r0 > 0.0)) fail("norm.r0", "must be positive");
        if (!(spec.delta0 > 0.0)) fail("norm.delta0", "must be positive");
    }

    const json& omega = require("omega");
    if (!omega.is_array() || static_cast<int>(omega.size()) != spec.d)
        fail("omega", "expected an array of length d = " + std::to_string(spec.d));
    for (std::size_t j = 0; j < omega.size(); ++j)
        spec.omega.push_back(read_number(omega[j], "omega[" + std::to_string(j) + "]", exact));

    const json& lambda = require("lambda");
    if (!lambda.is_array() || static_cast<int>(lambda.size()) != spec.n)
        fail("lambda", "expected an array of length n = " + std::to_string(spec.n));
    for (std::size_t j = 0; j < lambda.size(); ++j)
        spec.lambda.push_back(read_complex(lambda[j], "lambda[" + std::to_string(j) + "]", exact));

    if (root.contains("terms")) {
        const json& terms = root["terms"];
        if (!terms.is_array()) fail("terms", "expected an array");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string path = "terms[" + std::to_string(i) + "]";
            const json& t = terms[i];
            if (!t.is_object()) fail(path, "expected an object");
            TermSpec term;
            if (!t.contains("component") || !t["component"].is_number_integer())
                fail(path + ".component", "expected an integer");
            term.component = t["component"].get<int>();
            if (term.component < 1 || term.component > spec.d + spec.n)
                fail(path + ".component", "must lie in 1.." + std::to_string(spec.d + spec.n));
            if (!t.contains("P")) fail(path + ".P", "missing");
            term.P = read_int_array(t["P"], path + ".P", spec.d);
            if (!t.contains("Q")) fail(path + ".Q", "missing");
            term.Q = read_int_array(t["Q"], path + ".Q", spec.n);
            int qsum = 0;
            for (std::size_t j = 0; j < term.Q.size(); ++j) {
                if (term.Q[j] < 0) fail(path + ".Q[" + std::to_string(j) + "]", "must be >= 0");
                qsum += term.Q[j];
            }
            if (term.component <= spec.d && qsum < 1)
                fail(path + ".Q", "torus components of the perturbation must have order >= 1");
            if (term.component > spec.d && qsum < 2)
                fail(path + ".Q", "disk components of the perturbation must have order >= 2");
            if (qsum > spec.cap)
                fail(path + ".Q", "|Q| exceeds the declared cap");
            if (!t.contains("coeff")) fail(path + ".coeff", "missing");
            std::tie(term.re, term.im) = read_complex(t["coeff"], path + ".coeff", exact);
            spec.terms.push_back(std::move(term));
        }
    }
    return spec;
}

} // namespace tnf
