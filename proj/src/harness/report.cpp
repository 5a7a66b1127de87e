#include "mkdv/harness/report.hpp"

#include <fftw3.h>
#include <gsl/gsl_version.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "mkdv/error.hpp"

namespace mkdv::harness {

void RunReport::add_error(const std::string& name, const std::exception& e, const std::string& provenance) {
    CheckRecord c;
    c.name = name;
    c.measured = NAN;
    c.relation = "error";
    c.pass = false;
    c.provenance = provenance;
    c.note = e.what();
    if (auto* me = dynamic_cast<const Error*>(&e)) c.note = std::string(mkdv::to_string(me->kind())) + ": " + c.note;
    add(std::move(c));
}

bool RunReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
double from_num(const nlohmann::json& j) { return j.is_null() ? NAN : j.get<double>(); }
}  // namespace

nlohmann::json RunReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"measured", num(c.measured)},
                       {"threshold", num(c.threshold)},
                       {"relation", c.relation},
                       {"pass", c.pass},
                       {"provenance", c.provenance},
                       {"note", c.note}});
    return {{"schema_version", kReportSchemaVersion},
            {"kind", kind},
            {"config_hash", config_hash},
            {"environment", environment},
            {"all_pass", all_pass()},
            {"checks", arr}};
}

RunReport RunReport::from_json(const nlohmann::json& j) {
    const int v = j.value("schema_version", 0);
    require(v == kReportSchemaVersion, ErrorKind::io, "report schema version " + std::to_string(v) + " not supported");
    RunReport r;
    r.kind = j.at("kind").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.environment = j.value("environment", nlohmann::json::object());
    for (const auto& c : j.at("checks"))
        r.checks.push_back(CheckRecord{c.at("name").get<std::string>(), from_num(c.at("measured")),
                                       from_num(c.at("threshold")), c.at("relation").get<std::string>(),
                                       c.at("pass").get<bool>(), c.at("provenance").get<std::string>(),
                                       c.value("note", std::string{})});
    return r;
}

void RunReport::write(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write report " + path);
    out << std::setw(2) << to_json() << '\n';
}

nlohmann::json environment_fingerprint() {
    nlohmann::json j;
#if defined(__clang__)
    j["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    j["compiler"] = std::string("gcc ") + __VERSION__;
#endif
    j["cxx_standard"] = long(__cplusplus);
    j["fftw"] = std::string(fftw_version);
    j["gsl"] = GSL_VERSION;
#ifdef NDEBUG
    j["build"] = "release";
#else
    j["build"] = "debug";
#endif
    return j;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns, const std::string& header_note)
    : ncols_(columns.size()) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    out_.open(path);
    if (!out_) fail(ErrorKind::io, "cannot write " + path);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    out_ << "# mkdv " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    if (!header_note.empty()) out_ << ' ' << header_note;
    out_ << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    require(values.size() == ncols_, ErrorKind::invalid_argument, "csv: column count mismatch");
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12e", values[i]);
        out_ << (i ? "," : "") << buf;
    }
    out_ << '\n';
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
    require(values.size() + 1 == ncols_, ErrorKind::invalid_argument, "csv: column count mismatch");
    out_ << label;
    char buf[40];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.12e", v);
        out_ << ',' << buf;
    }
    out_ << '\n';
}

}  // namespace mkdv::harness
