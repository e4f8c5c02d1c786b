#include "rsplan/instance_io.hpp"

#include <cmath>
#include <fstream>

namespace rsplan {

using nlohmann::json;

namespace {

const json& field(const json& obj, const std::string& base, const char* key) {
    if (!obj.contains(key)) throw SchemaError(base + "/" + key, "missing required field");
    return obj.at(key);
}

double number(const json& obj, const std::string& base, const char* key) {
    const json& v = field(obj, base, key);
    if (!v.is_number()) throw SchemaError(base + "/" + key, "expected a number");
    return v.get<double>();
}

std::vector<double> number_array(const json& obj, const std::string& base, const char* key) {
    const json& v = field(obj, base, key);
    if (!v.is_array()) throw SchemaError(base + "/" + key, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw SchemaError(base + "/" + key + "/" + std::to_string(i), "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

CostFunction cost_from_json(const json& doc, const std::string& base) {
    if (!doc.is_object()) throw SchemaError(base, "expected an object");
    const json& kind_v = field(doc, base, "kind");
    if (!kind_v.is_string()) throw SchemaError(base + "/kind", "expected a string");
    const std::string kind = kind_v.get<std::string>();

    CostFunction f;
    if (kind == "radial_quadratic") {
        f = CostFunction::radial(number(doc, base, "m"));
    } else if (kind == "quadratic_diagonal") {
        f = CostFunction::diagonal(number_array(doc, base, "c"));
    } else if (kind == "tabulated_radial") {
        f = CostFunction::tabulated(number_array(doc, base, "radii"), number_array(doc, base, "values"),
                                    number(doc, base, "bound"));
        return f;
    } else {
        throw SchemaError(base + "/kind", "unknown cost kind '" + kind + "'");
    }
    if (doc.contains("bound")) f = f.with_bound(number(doc, base, "bound"));
    return f;
}

}  // namespace

ProblemInstance instance_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("", "instance document must be a JSON object");
    const json& schema = field(doc, "", "schema");
    if (!schema.is_number_integer() || schema.get<int>() != kInstanceSchemaVersion)
        throw SchemaError("/schema", "unsupported schema version (expected 1)");

    ProblemInstance inst;
    const json& n = field(doc, "", "n");
    if (!n.is_number_integer()) throw SchemaError("/n", "expected an integer");
    inst.dim = n.get<int>();
    inst.radius = number(doc, "", "radius");
    inst.regimes.a1 = number(doc, "", "a1");
    inst.regimes.a2 = number(doc, "", "a2");
    inst.regimes.alpha1 = number(doc, "", "alpha1");
    inst.regimes.alpha2 = number(doc, "", "alpha2");
    inst.regimes.sigma1 = std::abs(number(doc, "", "sigma1"));
    inst.regimes.sigma2 = std::abs(number(doc, "", "sigma2"));
    inst.f1 = cost_from_json(field(doc, "", "f1"), "/f1");
    inst.f2 = cost_from_json(field(doc, "", "f2"), "/f2");
    inst.y0 = number_array(doc, "", "y0");
    const json& eps0 = field(doc, "", "eps0");
    if (!eps0.is_number_integer() || (eps0.get<int>() != 1 && eps0.get<int>() != 2))
        throw SchemaError("/eps0", "expected 1 or 2");
    inst.eps0 = regime_from_int(eps0.get<int>());
    return inst;
}

json cost_to_json(const CostFunction& f) {
    json out;
    std::visit(
        [&](const auto& form) {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, RadialQuadratic>) {
                out = {{"kind", "radial_quadratic"}, {"m", form.m}};
            } else if constexpr (std::is_same_v<T, QuadraticDiagonal>) {
                out = {{"kind", "quadratic_diagonal"}, {"c", form.c}};
            } else {
                out = {{"kind", "tabulated_radial"}, {"radii", form.radii}, {"values", form.values}};
            }
        },
        f.form());
    out["bound"] = f.bound();
    return out;
}

json instance_to_json(const ProblemInstance& inst) {
    return json{{"schema", kInstanceSchemaVersion},
                {"n", inst.dim},
                {"radius", inst.radius},
                {"a1", inst.regimes.a1},
                {"a2", inst.regimes.a2},
                {"alpha1", inst.regimes.alpha1},
                {"alpha2", inst.regimes.alpha2},
                {"sigma1", inst.regimes.sigma1},
                {"sigma2", inst.regimes.sigma2},
                {"f1", cost_to_json(inst.f1)},
                {"f2", cost_to_json(inst.f2)},
                {"y0", inst.y0},
                {"eps0", to_int(inst.eps0)}};
}

ProblemInstance load_instance(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw SchemaError("/", "cannot open instance file " + file.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw SchemaError("/", std::string("invalid JSON: ") + e.what());
    }
    return instance_from_json(doc);
}

}  // namespace rsplan
