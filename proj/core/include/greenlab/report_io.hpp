#pragma once

#include <map>
#include <string>
#include <vector>

#include "greenlab/capacity.hpp"
#include "greenlab/green.hpp"

namespace greenlab {

// Profile CSVs: fixed header, rows sorted ascending in radius, floats at
// 12 significant digits. Rows that failed to converge are left out.
void write_capacity_profile_csv(const std::string& path,
                                const RingCapacityProfile& prof);
void write_radial_profile_csv(const std::string& path, const RadialProfile& prof);

std::string green_to_json(const GreenFunction& G);

// Replace the values of a solved field with ones taken from a file, keeping
// the rest of the record. Used to audit externally supplied solutions.
void load_green_values(const std::string& path, GreenFunction& G);

// Machine-readable record of one run. Checks, metrics, inputs, and outputs
// feed the identity hash; timings are recorded next to it but never enter
// the hash, so reruns of the same config match identity for identity.
class RunManifest {
public:
    void set_tool_version(std::string v) { toolVersion_ = std::move(v); }
    void set_config_text(const std::string& canonical);
    void add_input(const std::string& name, const std::string& contentHash);
    void add_check(const std::string& name, bool pass);
    void add_metric(const std::string& name, double value);
    void add_output(const std::string& name, const std::string& contentHash);
    void add_timing(const std::string& name, double seconds);
    bool all_pass() const;
    std::string to_json() const;

private:
    std::string toolVersion_;
    std::string configHash_;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, bool> checks_;
    std::map<std::string, double> metrics_;
    std::map<std::string, std::string> outputs_;
    std::map<std::string, double> timings_;
};

}  // namespace greenlab
