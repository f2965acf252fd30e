#include "rsgarch/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace rsgarch {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::string suffix_of(const std::string& name) {
    if (name.ends_with("_s1") || name.ends_with("_s2")) return name.substr(name.size() - 3);
    return {};
}

std::string strip_suffix(const std::string& name) {
    return suffix_of(name).empty() ? name : name.substr(0, name.size() - 3);
}

/// Groups named values into the document layout; `free` lists names to keep.
json layout(const std::vector<NamedValue>& values, const std::vector<std::string>& free, bool two_regimes) {
    json out = json::object();
    for (const auto& [name, value] : values) {
        if (std::find(free.begin(), free.end(), name) == free.end()) continue;
        const auto sfx = suffix_of(name);
        if (two_regimes && !sfx.empty()) {
            out[sfx == "_s1" ? "state1" : "state2"][strip_suffix(name)] = number_or_null(value);
        } else {
            out[name] = number_or_null(value);
        }
    }
    return out;
}

std::vector<NamedValue> unlayout(const json& j, const std::vector<std::string>& names, bool two_regimes) {
    std::vector<NamedValue> out;
    for (const auto& name : names) {
        const auto sfx = suffix_of(name);
        const json* block = &j;
        if (two_regimes && !sfx.empty()) {
            const char* key = sfx == "_s1" ? "state1" : "state2";
            if (!j.contains(key)) continue;
            block = &j.at(key);
        }
        const auto key = two_regimes ? strip_suffix(name) : name;
        if (block->contains(key)) out.push_back({name, number_from(block->at(key))});
    }
    return out;
}

const char* model_name(const ModelParams& p) {
    if (std::holds_alternative<BekkParams>(p)) return "single";
    if (std::holds_alternative<RsModelParams>(p)) return "regime_switching";
    return "dummy";
}

BekkParams bekk_from_flat(const json& j) {
    BekkParams b;
    b.mean.l10 = j.at("lambda10").get<double>();
    b.mean.l11 = j.at("lambda11").get<double>();
    b.mean.l12 = j.at("lambda12").get<double>();
    b.mean.l20 = j.at("lambda20").get<double>();
    b.mean.l21 = j.value("lambda21", 0.0);
    b.mean.l22 = j.value("lambda22", 0.0);
    b.c11 = j.at("c11").get<double>();
    b.c12 = j.at("c12").get<double>();
    b.c22 = j.at("c22").get<double>();
    b.a11 = j.at("a11").get<double>();
    b.a22 = j.at("a22").get<double>();
    b.b11 = j.at("b11").get<double>();
    b.b22 = j.at("b22").get<double>();
    return b;
}

json bekk_to_flat(const BekkParams& b, bool restricted) {
    json j;
    j["lambda10"] = b.mean.l10;
    j["lambda11"] = b.mean.l11;
    j["lambda12"] = b.mean.l12;
    j["lambda20"] = b.mean.l20;
    if (!restricted) {
        j["lambda21"] = b.mean.l21;
        j["lambda22"] = b.mean.l22;
    }
    j["c11"] = b.c11;
    j["c12"] = b.c12;
    j["c22"] = b.c22;
    j["a11"] = b.a11;
    j["a22"] = b.a22;
    j["b11"] = b.b11;
    j["b22"] = b.b22;
    return j;
}

Prob2 prob_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void to_json(json& j, const YearMonth& v) { j = v.str(); }
void from_json(const json& j, YearMonth& v) { v = YearMonth::parse(j.get<std::string>()); }

void to_json(json& j, const Cov2& v) { j = json{{"smm", v.smm()}, {"sbb", v.sbb()}, {"smb", v.smb()}}; }
Cov2 cov2_from_json(const json& j) {
    return {j.at("smm").get<double>(), j.at("sbb").get<double>(), j.at("smb").get<double>()};
}

void to_json(json& j, const MeanParams& v) {
    j = json{{"lambda10", v.l10}, {"lambda11", v.l11}, {"lambda12", v.l12},
             {"lambda20", v.l20}, {"lambda21", v.l21}, {"lambda22", v.l22}};
}
void from_json(const json& j, MeanParams& v) {
    v.l10 = j.at("lambda10").get<double>();
    v.l11 = j.at("lambda11").get<double>();
    v.l12 = j.at("lambda12").get<double>();
    v.l20 = j.at("lambda20").get<double>();
    v.l21 = j.value("lambda21", 0.0);
    v.l22 = j.value("lambda22", 0.0);
}

void to_json(json& j, const BekkParams& v) { j = bekk_to_flat(v, false); }
void from_json(const json& j, BekkParams& v) { v = bekk_from_flat(j); }

void to_json(json& j, const RsModelParams& v) {
    j = json{{"state1", v.regime1}, {"state2", v.regime2}, {"p", v.p}, {"q", v.q}};
}
void from_json(const json& j, RsModelParams& v) {
    v.regime1 = j.at("state1").get<BekkParams>();
    v.regime2 = j.at("state2").get<BekkParams>();
    v.p = j.at("p").get<double>();
    v.q = j.at("q").get<double>();
}

void to_json(json& j, const ExcessReturnSeries& v) {
    j = json{{"dates", v.dates()}, {"rm", v.rm()}, {"rb", v.rb()}};
}
ExcessReturnSeries series_from_json(const json& j) {
    return {j.at("dates").get<std::vector<YearMonth>>(), j.at("rm").get<std::vector<double>>(),
            j.at("rb").get<std::vector<double>>()};
}

void to_json(json& j, const FilterOutput& v) {
    json state_cov = json::array();
    for (const auto& h : v.state_cov) state_cov.push_back(json::array({h[0], h[1]}));
    json agg_cov = json::array();
    for (const auto& h : v.agg_cov) agg_cov.push_back(h);
    j = json{{"ex_ante", v.ex_ante},           {"filtered", v.filtered},   {"smoothed", v.smoothed},
             {"state_cov", state_cov},         {"state_mean", v.state_mean}, {"agg_cov", agg_cov},
             {"agg_innov", v.agg_innov},       {"contributions", v.contributions},
             {"floored_steps", v.floored_steps}};
}
void from_json(const json& j, FilterOutput& v) {
    v = FilterOutput{};
    for (const auto& x : j.at("ex_ante")) v.ex_ante.push_back(prob_from(x));
    for (const auto& x : j.at("filtered")) v.filtered.push_back(prob_from(x));
    for (const auto& x : j.at("smoothed")) v.smoothed.push_back(prob_from(x));
    for (const auto& x : j.at("state_cov")) v.state_cov.push_back({cov2_from_json(x.at(0)), cov2_from_json(x.at(1))});
    v.state_mean = j.at("state_mean").get<std::vector<std::array<Vec2, 2>>>();
    for (const auto& x : j.at("agg_cov")) v.agg_cov.push_back(cov2_from_json(x));
    v.agg_innov = j.at("agg_innov").get<std::vector<Vec2>>();
    v.contributions = j.at("contributions").get<std::vector<double>>();
    v.floored_steps = j.at("floored_steps").get<std::vector<std::size_t>>();
}

json result_to_json(const EstimationResult& r) {
    const bool two = std::holds_alternative<RsModelParams>(r.params);
    const auto free = free_parameter_names(r.params, r.spec.restricted);
    json j;
    j["schema_version"] = kResultSchemaVersion;
    j["model"] = model_name(r.params);
    j["n_regimes"] = r.spec.n_regimes;
    j["restricted"] = r.spec.restricted;
    j["loglik"] = r.loglik;
    j["n_obs"] = r.n_obs;
    j["converged"] = r.converged;
    j["n_iterations"] = r.n_iterations;
    j["n_restarts"] = r.n_restarts;
    j["h0"] = r.h0;
    j["eps0"] = r.eps0;
    j["parameters"] = layout(parameter_values(r.params), free, two);
    j["std_errors"] = layout(r.std_errors, free, two);
    j["std_error_note"] = r.std_error_note;
    if (const auto* d = std::get_if<DummyModelParams>(&r.params)) {
        j["dummy_variant"] = d->variant == DummyVariant::interaction ? "interaction" : "level";
        j["dummy"] = r.dummy;
    }
    return j;
}

ModelParams params_from_json(const json& doc) {
    const json& p = doc.contains("parameters") ? doc.at("parameters") : doc;
    const std::string model = doc.value("model", p.contains("state1") ? "regime_switching" : "single");
    if (model == "single") return bekk_from_flat(p);
    if (model == "regime_switching") return p.get<RsModelParams>();
    if (model == "dummy") {
        DummyModelParams d;
        d.base = bekk_from_flat(p);
        d.variant = doc.value("dummy_variant", "interaction") == "level" ? DummyVariant::level : DummyVariant::interaction;
        d.l10d = p.value("lambda10d", 0.0);
        d.l11d = p.value("lambda11d", 0.0);
        d.l12d = p.value("lambda12d", 0.0);
        return d;
    }
    throw InputError(fmt::format("unknown model '{}'", model));
}

EstimationResult result_from_json(const json& j) {
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kResultSchemaVersion) {
            throw InputError(fmt::format("unsupported result schema_version {}", version));
        }
        EstimationResult r;
        r.spec.restricted = j.at("restricted").get<bool>();
        r.params = params_from_json(j);
        r.spec.n_regimes = std::holds_alternative<RsModelParams>(r.params) ? 2 : 1;
        r.loglik = j.at("loglik").get<double>();
        r.n_obs = j.value("n_obs", std::size_t{0});
        r.converged = j.at("converged").get<bool>();
        r.n_iterations = j.at("n_iterations").get<int>();
        r.n_restarts = j.at("n_restarts").get<int>();
        r.h0 = cov2_from_json(j.at("h0"));
        r.eps0 = j.at("eps0").get<Vec2>();
        r.std_error_note = j.value("std_error_note", "");
        const bool two = r.spec.n_regimes == 2;
        std::vector<std::string> names;
        for (const auto& nv : parameter_values(r.params)) names.push_back(nv.name);
        const auto& se = j.at("std_errors");
        if (!se.empty()) {
            // pinned coefficients are absent from the document and come back as NaN
            auto present = unlayout(se, names, two);
            for (const auto& n : names) {
                const auto it = std::find_if(present.begin(), present.end(), [&](const auto& x) { return x.name == n; });
                r.std_errors.push_back({n, it == present.end() ? kNaN : it->value});
            }
        }
        if (j.contains("dummy")) r.dummy = j.at("dummy").get<std::vector<int>>();
        return r;
    } catch (const json::exception& e) {
        throw InputError(fmt::format("malformed result document: {}", e.what()));
    }
}

EstimationResult load_result(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
    }
    return result_from_json(j);
}

void save_result(const std::filesystem::path& path, const EstimationResult& r) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out << result_to_json(r).dump(2) << '\n';
}

}  // namespace rsgarch

namespace rsgarch::diagnostics {

using nlohmann::json;

void to_json(json& j, const SummaryStats& s) {
    auto test = [](const TestResult& t) {
        return json{{"statistic", t.statistic}, {"p_value", t.p_value}, {"dof", t.dof}};
    };
    j = json{{"n", s.n},
             {"mean", s.mean},
             {"std", s.std_dev},
             {"skewness", s.skewness},
             {"kurtosis", s.kurtosis},
             {"jarque_bera", test(s.jarque_bera)},
             {"ljung_box", test(s.ljung_box)},
             {"ljung_box_squares", test(s.ljung_box_squares)}};
}

}  // namespace rsgarch::diagnostics
