#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mkdv::harness {

inline constexpr int kReportSchemaVersion = 1;

struct CheckRecord {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation;     // "<=", ">=", "within", "info"
    bool pass = false;
    std::string provenance;   // where the threshold comes from: theory, oracle, baseline, trivial
    std::string note;
};

struct RunReport {
    std::string kind;
    std::string config_hash;
    nlohmann::json environment;
    std::vector<CheckRecord> checks;

    void add(CheckRecord c) { checks.push_back(std::move(c)); }
    /// Record a failed check from an exception raised while computing it.
    void add_error(const std::string& name, const std::exception& e, const std::string& provenance);
    bool all_pass() const;
    nlohmann::json to_json() const;
    static RunReport from_json(const nlohmann::json& j);
    void write(const std::string& path) const;
};

nlohmann::json environment_fingerprint();

/// CSV with one leading "# ..." line (the only non-deterministic line).
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns, const std::string& header_note = {});
    void row(const std::vector<double>& values);
    void row(const std::string& label, const std::vector<double>& values);

private:
    std::ofstream out_;
    std::size_t ncols_;
};

}  // namespace mkdv::harness
