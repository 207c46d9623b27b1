#include "oss/epep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "oss/constants.hpp"
#include "oss/errors.hpp"
#include "oss/hash.hpp"
#include "oss/parallel.hpp"

namespace oss {
namespace {

using namespace oss::constants;
using json = nlohmann::ordered_json;

constexpr char kMagic[8] = {'O', 'S', 'S', 'E', 'P', 'E', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

json settings_json(const SolverSettings& s) {
    json j;
    j["max_reflections"] = s.max_reflections;
    j["enable_ground"] = s.enable_ground;
    j["enable_transmission"] = s.enable_transmission;
    j["min_path_gain_db"] = s.min_path_gain_db;
    return j;
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("epep database file truncated");
}

}  // namespace

std::uint64_t scene_fingerprint(const Scene& scene) { return fnv1a64(serialize_scene(scene)); }

std::uint64_t config_fingerprint(const ArrayConfig& cfg, const SolverSettings& settings) {
    json j;
    j["rows"] = cfg.rows;
    j["cols"] = cfg.cols;
    j["spacing_x"] = cfg.dx();
    j["spacing_z"] = cfg.dz();
    j["position"] = {cfg.position.x, cfg.position.y, cfg.position.z};
    j["azimuth_deg"] = cfg.azimuth_deg;
    j["downtilt_deg"] = cfg.downtilt_deg;
    j["frequency_hz"] = cfg.frequency_hz;
    j["pattern_kind"] = cfg.element_pattern.kind == PatternKind::isotropic ? "isotropic"
                                                                           : "cosine_power";
    j["pattern_exponent"] = cfg.element_pattern.exponent;
    j["max_radiated_power_w"] = cfg.max_radiated_power_w;
    j["solver"] = settings_json(settings);
    return fnv1a64(j.dump());
}

EpepDatabase build_database(const Scene& scene, const ArrayConfig& cfg,
                            const std::vector<Vec3>& probes, const SolverSettings& settings,
                            unsigned workers, BuildTiming* timing) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_array(cfg);
    validate_solver(settings);
    EpepDatabase db;
    db.scene_hash = scene_fingerprint(scene);
    db.config_hash = config_fingerprint(cfg, settings);
    db.frequency_hz = cfg.frequency_hz;
    db.xi = normalize_magnitude(cfg);
    db.settings = settings;
    db.probes = probes;
    const int n = cfg.count();
    db.fields.resize(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t e) {
        db.fields[e] = compute_epep(scene, cfg, static_cast<int>(e), probes, settings, 1);
    });
    if (timing) {
        timing->seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return db;
}

std::vector<CVec3> total_field(const EpepDatabase& db, const Excitations& exc) {
    const std::size_t n = db.element_count();
    const std::size_t m = db.probe_count();
    if (exc.magnitudes.size() != n || exc.phases.size() != n) {
        throw ValidationError("excitation length does not match database element count");
    }
    std::vector<CVec3> out(m);
    for (std::size_t e = 0; e < n; ++e) {
        const cdouble w = std::polar(exc.magnitudes[e], exc.phases[e]);
        const auto& layer = db.fields[e];
        for (std::size_t i = 0; i < m; ++i) {
            out[i] = out[i] + w * layer[i];
        }
    }
    return out;
}

double power_watts(const CVec3& field, double frequency_hz, double rx_gain_linear) {
    const double lambda = wavelength(frequency_hz);
    return norm_sq(field) * lambda * lambda * rx_gain_linear / (8.0 * pi * eta0());
}

double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) return power_floor_dbm;
    const double dbm = 10.0 * std::log10(watts * 1e3);
    return std::max(dbm, power_floor_dbm);
}

CoverageGrid received_power(const std::vector<CVec3>& fields, const std::vector<Vec3>& probes,
                            double frequency_hz, double rx_gain_dbi) {
    if (fields.size() != probes.size()) {
        throw ValidationError("field/probe count mismatch");
    }
    const double g_rx = std::pow(10.0, rx_gain_dbi / 10.0);
    CoverageGrid grid;
    grid.probes = probes;
    grid.power_dbm.reserve(fields.size());
    for (const auto& f : fields) {
        grid.power_dbm.push_back(watts_to_dbm(power_watts(f, frequency_hz, g_rx)));
    }
    return grid;
}

PowerStats power_stats(const CoverageGrid& grid) {
    if (grid.power_dbm.empty()) throw ValidationError("power_stats: empty grid");
    PowerStats st;
    st.min_dbm = std::numeric_limits<double>::infinity();
    st.max_dbm = -std::numeric_limits<double>::infinity();
    double sum_mw = 0.0;
    for (double v : grid.power_dbm) {
        st.min_dbm = std::min(st.min_dbm, v);
        st.max_dbm = std::max(st.max_dbm, v);
        sum_mw += std::pow(10.0, v / 10.0);
    }
    st.avg_dbm = 10.0 * std::log10(sum_mw / static_cast<double>(grid.power_dbm.size()));
    return st;
}

void save_database(const EpepDatabase& db, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write epep database: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_raw(out, kVersion);
    const auto n = static_cast<std::uint32_t>(db.element_count());
    const auto m = static_cast<std::uint64_t>(db.probe_count());
    write_raw(out, n);
    write_raw(out, m);
    write_raw(out, db.frequency_hz);
    write_raw(out, db.scene_hash);
    write_raw(out, db.config_hash);
    write_raw(out, db.xi);
    write_raw(out, static_cast<std::int32_t>(db.settings.max_reflections));
    write_raw(out, static_cast<std::int32_t>(db.settings.enable_ground ? 1 : 0));
    write_raw(out, static_cast<std::int32_t>(db.settings.enable_transmission ? 1 : 0));
    write_raw(out, db.settings.min_path_gain_db);
    for (const auto& p : db.probes) {
        write_raw(out, p.x);
        write_raw(out, p.y);
        write_raw(out, p.z);
    }
    for (const auto& layer : db.fields) {
        for (const auto& f : layer) {
            for (const cdouble c : {f.x, f.y, f.z}) {
                write_raw(out, c.real());
                write_raw(out, c.imag());
            }
        }
    }
    if (!out) throw FormatError("write failure on epep database: " + path);
    out.close();

    json meta;
    meta["format"] = "oss-epepdb/1";
    meta["elements"] = n;
    meta["probes"] = m;
    meta["frequency_hz"] = db.frequency_hz;
    meta["xi"] = db.xi;
    char hex[2][17];
    std::snprintf(hex[0], sizeof(hex[0]), "%016llx", static_cast<unsigned long long>(db.scene_hash));
    std::snprintf(hex[1], sizeof(hex[1]), "%016llx", static_cast<unsigned long long>(db.config_hash));
    meta["scene_hash"] = hex[0];
    meta["config_hash"] = hex[1];
    meta["solver"] = settings_json(db.settings);
    std::ofstream side(path + ".json", std::ios::binary);
    side << meta.dump(2) << "\n";
}

EpepDatabase load_database(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open epep database: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("not an epep database file: " + path);
    }
    std::uint32_t version;
    read_raw(in, version);
    if (version != kVersion) throw FormatError("unsupported epep database version");
    EpepDatabase db;
    std::uint32_t n;
    std::uint64_t m;
    read_raw(in, n);
    read_raw(in, m);
    read_raw(in, db.frequency_hz);
    read_raw(in, db.scene_hash);
    read_raw(in, db.config_hash);
    read_raw(in, db.xi);
    std::int32_t refl, ground, trans;
    read_raw(in, refl);
    read_raw(in, ground);
    read_raw(in, trans);
    read_raw(in, db.settings.min_path_gain_db);
    db.settings.max_reflections = refl;
    db.settings.enable_ground = ground != 0;
    db.settings.enable_transmission = trans != 0;
    db.probes.resize(m);
    for (auto& p : db.probes) {
        read_raw(in, p.x);
        read_raw(in, p.y);
        read_raw(in, p.z);
    }
    db.fields.assign(n, std::vector<CVec3>(m));
    for (auto& layer : db.fields) {
        for (auto& f : layer) {
            double re, im;
            read_raw(in, re);
            read_raw(in, im);
            f.x = {re, im};
            read_raw(in, re);
            read_raw(in, im);
            f.y = {re, im};
            read_raw(in, re);
            read_raw(in, im);
            f.z = {re, im};
        }
    }
    for (const auto& layer : db.fields) {
        for (const auto& f : layer) {
            if (!std::isfinite(f.x.real()) || !std::isfinite(f.x.imag()) ||
                !std::isfinite(f.y.real()) || !std::isfinite(f.y.imag()) ||
                !std::isfinite(f.z.real()) || !std::isfinite(f.z.imag())) {
                throw FormatError("epep database contains non-finite field samples");
            }
        }
    }
    return db;
}

void check_database(const EpepDatabase& db, const Scene& scene, const ArrayConfig& cfg,
                    const SolverSettings& settings) {
    if (db.scene_hash != scene_fingerprint(scene)) {
        throw StaleDatabaseError("epep database is stale: scene has changed since build");
    }
    if (db.config_hash != config_fingerprint(cfg, settings)) {
        throw StaleDatabaseError("epep database is stale: array/solver config has changed");
    }
    if (db.element_count() != static_cast<std::size_t>(cfg.count())) {
        throw StaleDatabaseError("epep database element count mismatch");
    }
}

void write_coverage_csv(const CoverageGrid& grid, const std::string& path,
                        std::uint64_t config_hash, const std::string& value_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write coverage csv: " + path);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(config_hash));
    out << "# config " << hex << "\n";
    out << "x,y,z," << value_name << "\n";
    char line[160];
    for (std::size_t i = 0; i < grid.probes.size(); ++i) {
        const auto& p = grid.probes[i];
        std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f\n", p.x, p.y, p.z,
                      grid.power_dbm[i]);
        out << line;
    }
}

}  // namespace oss
