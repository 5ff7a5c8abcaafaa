#include "greenlab/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "greenlab/errors.hpp"
#include "greenlab/space_io.hpp"
#include "greenlab/util.hpp"

namespace greenlab {

using nlohmann::json;

void write_capacity_profile_csv(const std::string& path,
                                const RingCapacityProfile& prof) {
    std::vector<const RingRow*> rows;
    for (const RingRow& row : prof.rows)
        if (row.converged) rows.push_back(&row);
    std::sort(rows.begin(), rows.end(),
              [](const RingRow* a, const RingRow* b) { return a->r < b->r; });
    std::ostringstream out;
    out << "r,cap,ballMass\n";
    for (const RingRow* row : rows)
        out << fmt_g12(row->r) << ',' << fmt_g12(row->capValue) << ','
            << fmt_g12(row->ballMass) << '\n';
    write_text_atomic(path, out.str());
}

void write_radial_profile_csv(const std::string& path, const RadialProfile& prof) {
    std::vector<const RadialRow*> rows;
    for (const RadialRow& row : prof.rows) rows.push_back(&row);
    std::sort(rows.begin(), rows.end(),
              [](const RadialRow* a, const RadialRow* b) { return a->r < b->r; });
    std::ostringstream out;
    out << "r,m,M,ballMass,ringCap\n";
    for (const RadialRow* row : rows)
        out << fmt_g12(row->r) << ',' << fmt_g12(row->m) << ','
            << fmt_g12(row->M) << ',' << fmt_g12(row->ballMass) << ','
            << fmt_g12(row->ringCap) << '\n';
    write_text_atomic(path, out.str());
}

std::string green_to_json(const GreenFunction& G) {
    json j;
    j["x0"] = G.x0;
    j["p"] = G.p;
    if (std::isfinite(G.kValue))
        j["k"] = G.kValue;
    else
        j["k"] = nullptr;
    j["normalized"] = G.normalized;
    j["values"] = G.values;
    return j.dump();
}

void load_green_values(const std::string& path, GreenFunction& G) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("green file is not valid JSON: ") + e.what());
    }
    try {
        const auto& vals = j.at("values");
        if (vals.size() != G.values.size())
            throw InvalidInput("green file value count disagrees with the mesh");
        for (std::size_t i = 0; i < G.values.size(); ++i)
            G.values[i] = vals.at(i).get<double>();
        G.field.values = G.values;
        if (j.contains("normalized")) G.normalized = j["normalized"].get<bool>();
        if (j.contains("k") && !j["k"].is_null())
            G.kValue = j["k"].get<double>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("green file schema mismatch: ") + e.what());
    }
}

namespace {

// floats are pinned to their 12-digit printed form before hashing or
// serializing so identity never depends on formatting internals
double pin12(double x) { return std::strtod(fmt_g12(x).c_str(), nullptr); }

}  // namespace

void RunManifest::set_config_text(const std::string& canonical) {
    configHash_ = fnv1a64_hex(canonical);
}

void RunManifest::add_input(const std::string& name, const std::string& hash) {
    inputs_[name] = hash;
}

void RunManifest::add_check(const std::string& name, bool pass) {
    checks_[name] = pass;
}

void RunManifest::add_metric(const std::string& name, double value) {
    metrics_[name] = pin12(value);
}

void RunManifest::add_output(const std::string& name, const std::string& hash) {
    outputs_[name] = hash;
}

void RunManifest::add_timing(const std::string& name, double seconds) {
    timings_[name] = seconds;
}

bool RunManifest::all_pass() const {
    for (const auto& [name, ok] : checks_)
        if (!ok) return false;
    return true;
}

std::string RunManifest::to_json() const {
    json core;
    core["toolVersion"] = toolVersion_;
    core["configHash"] = configHash_;
    core["inputs"] = inputs_;
    core["checks"] = checks_;
    core["metrics"] = metrics_;
    core["outputs"] = outputs_;
    const std::string identity = fnv1a64_hex(core.dump());

    json j = core;
    j["identity"] = identity;
    json t = json::object();
    for (const auto& [name, sec] : timings_) t[name] = pin12(sec);
    j["timings"] = std::move(t);
    return j.dump(2) + "\n";
}

}  // namespace greenlab
