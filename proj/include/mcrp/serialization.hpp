#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "angles.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "instance.hpp"
#include "model.hpp"
#include "rewards.hpp"
#include "time_grid.hpp"

namespace mcrp {

inline constexpr int kInstanceSchemaVersion = 1;
inline constexpr int kPlanSchemaVersion = 1;

using json_doc = nlohmann::ordered_json;

namespace detail {

inline std::string join_path(const std::string& owner, const std::string& key) {
    return owner.empty() ? key : owner + "." + key;
}

inline const json_doc& member(const json_doc& obj, const char* key, const std::string& owner) {
    if (!obj.is_object()) throw SchemaError(owner, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(join_path(owner, key), "missing field");
    return *it;
}

inline double number_at(const json_doc& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
    return x;
}

inline int int_at(const json_doc& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    auto wide = v.get<std::int64_t>();
    if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max())
        throw SchemaError(path, "integer out of range");
    return static_cast<int>(wide);
}

inline bool bool_at(const json_doc& v, const std::string& path) {
    if (!v.is_boolean()) throw SchemaError(path, "expected a boolean");
    return v.get<bool>();
}

inline std::string string_at(const json_doc& v, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path, "expected a string");
    return v.get<std::string>();
}

inline const json_doc& array_at(const json_doc& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array");
    return v;
}

inline double get_number(const json_doc& obj, const char* key, const std::string& owner) {
    return number_at(member(obj, key, owner), join_path(owner, key));
}
inline int get_int(const json_doc& obj, const char* key, const std::string& owner) {
    return int_at(member(obj, key, owner), join_path(owner, key));
}
inline bool get_bool(const json_doc& obj, const char* key, const std::string& owner) {
    return bool_at(member(obj, key, owner), join_path(owner, key));
}
inline std::string get_string(const json_doc& obj, const char* key, const std::string& owner) {
    return string_at(member(obj, key, owner), join_path(owner, key));
}

// Files carry degrees; the model carries radians. A correctly rounded unit
// conversion composed with its inverse is not the identity on every double,
// so when writing we scan the rounded value's immediate neighbors for one
// that parses back to the stored radians bit for bit. Values created from
// degree inputs always have such a preimage, which makes re-serialization
// byte-identical.
template <typename FromFile>
inline double exact_file_value(double internal, double rounded, FromFile&& from_file) {
    if (from_file(rounded) == internal) return rounded;
    double lo = rounded, hi = rounded;
    for (int i = 0; i < 2; ++i) {
        lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
        if (from_file(lo) == internal) return lo;
        hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
        if (from_file(hi) == internal) return hi;
    }
    return rounded; // no exact preimage exists; keep the nearest value
}

inline double file_angle(double rad) {
    return exact_file_value(rad, rad2deg(rad), [](double d) { return deg2rad(d); });
}
inline double file_wrapped_angle(double rad) {
    return exact_file_value(rad, rad2deg(rad), [](double d) { return wrap_two_pi(deg2rad(d)); });
}
inline double file_altitude(double semi_major_axis) {
    return exact_file_value(semi_major_axis, semi_major_axis - kEarthRadius,
                            [](double h) { return kEarthRadius + h; });
}

} // namespace detail

inline json_doc instance_to_json(const McrpInstance& inst) {
    if (!inst.geometric())
        throw InvalidInputError(
            "serialize: instances with explicit cores are in-memory fixtures only");
    validate_instance(inst);

    json_doc doc;
    doc["schema_version"] = kInstanceSchemaVersion;
    doc["time_grid"] = {{"T", inst.grid.total_steps()},
                        {"step_seconds", inst.grid.step_seconds()},
                        {"stages", inst.grid.stages()}};

    json_doc sats = json_doc::array();
    for (const SatelliteSpec& sat : inst.satellites) {
        json_doc e;
        e["altitude_km"] = detail::file_altitude(sat.initial.semi_major_axis);
        e["inclination_deg"] = detail::file_angle(sat.initial.inclination);
        e["raan_deg"] = detail::file_wrapped_angle(sat.initial.raan);
        e["arg_lat_deg"] = detail::file_wrapped_angle(sat.initial.arg_lat_epoch);
        e["c_max_kms"] = sat.c_max;
        e["in_budget_subset"] = sat.budget_constrained;
        sats.push_back(std::move(e));
    }
    doc["satellites"] = std::move(sats);

    json_doc tgts = json_doc::array();
    for (const GroundTarget& t : inst.targets) {
        json_doc e;
        e["lat_deg"] = detail::file_angle(t.lat);
        e["lon_deg"] = detail::file_angle(t.lon);
        e["min_elevation_deg"] = detail::file_angle(t.min_elevation);
        tgts.push_back(std::move(e));
    }
    doc["targets"] = std::move(tgts);

    json_doc rw;
    if (inst.rewards.encoding() == RewardModel::Encoding::Dense) {
        rw["encoding"] = "dense";
        rw["values"] = inst.rewards.dense_table();
    } else {
        rw["encoding"] = "windows";
        json_doc spans = json_doc::array();
        for (const RewardWindow& w : inst.rewards.window_list())
            spans.push_back({{"target", w.target},
                             {"t_begin", w.t_begin},
                             {"t_end", w.t_end},
                             {"reward", w.reward}});
        rw["windows"] = std::move(spans);
    }
    doc["rewards"] = std::move(rw);

    json_doc th;
    th["default"] = inst.rewards.default_threshold();
    json_doc ov = json_doc::array();
    for (const auto& [cell, r] : inst.rewards.threshold_overrides())
        ov.push_back({{"t", cell.first}, {"target", cell.second}, {"r", r}});
    th["overrides"] = std::move(ov);
    doc["thresholds"] = std::move(th);

    json_doc sg;
    if (inst.slot_grid.mode == GridMode::PhaseOnly) {
        sg["mode"] = "phase_only";
        sg["J"] = inst.slot_grid.phase_count;
    } else {
        sg["mode"] = "plane_and_phase";
        sg["plane_steps"] = inst.slot_grid.plane_steps_per_side;
        sg["phase_count"] = inst.slot_grid.phase_count;
    }
    sg["eta"] = inst.slot_grid.eta;
    doc["slot_grid"] = std::move(sg);

    doc["gmst0_deg"] = detail::file_angle(inst.gmst0);
    return doc;
}

inline McrpInstance instance_from_json(const json_doc& doc) {
    using namespace detail;
    if (!doc.is_object()) throw SchemaError("", "instance document must be an object");
    int version = get_int(doc, "schema_version", "");
    if (version != kInstanceSchemaVersion)
        throw SchemaError("schema_version",
                          "unsupported version " + std::to_string(version) + ", expected " +
                              std::to_string(kInstanceSchemaVersion));

    McrpInstance inst;
    {
        const json_doc& tg = member(doc, "time_grid", "");
        int T = get_int(tg, "T", "time_grid");
        double step = get_number(tg, "step_seconds", "time_grid");
        int stages = get_int(tg, "stages", "time_grid");
        try {
            inst.grid = TimeGrid(T, step, stages);
        } catch (const Error& e) {
            throw SchemaError("time_grid", e.what());
        }
    }

    const json_doc& sats = array_at(member(doc, "satellites", ""), "satellites");
    for (std::size_t i = 0; i < sats.size(); ++i) {
        std::string path = "satellites[" + std::to_string(i) + "]";
        const json_doc& e = sats[i];
        SatelliteSpec sat;
        sat.initial.semi_major_axis = kEarthRadius + get_number(e, "altitude_km", path);
        sat.initial.inclination = deg2rad(get_number(e, "inclination_deg", path));
        sat.initial.raan = wrap_two_pi(deg2rad(get_number(e, "raan_deg", path)));
        sat.initial.arg_lat_epoch = wrap_two_pi(deg2rad(get_number(e, "arg_lat_deg", path)));
        sat.initial.ref_time = 1;
        sat.c_max = get_number(e, "c_max_kms", path);
        sat.budget_constrained = get_bool(e, "in_budget_subset", path);
        inst.satellites.push_back(sat);
    }

    const json_doc& tgts = array_at(member(doc, "targets", ""), "targets");
    for (std::size_t i = 0; i < tgts.size(); ++i) {
        std::string path = "targets[" + std::to_string(i) + "]";
        const json_doc& e = tgts[i];
        GroundTarget t;
        t.lat = deg2rad(get_number(e, "lat_deg", path));
        t.lon = deg2rad(get_number(e, "lon_deg", path));
        t.min_elevation = deg2rad(get_number(e, "min_elevation_deg", path));
        inst.targets.push_back(t);
    }

    {
        const json_doc& rw = member(doc, "rewards", "");
        std::string enc = get_string(rw, "encoding", "rewards");
        int P = static_cast<int>(inst.targets.size());
        if (enc == "dense") {
            const json_doc& vals = array_at(member(rw, "values", "rewards"), "rewards.values");
            std::vector<double> values;
            values.reserve(vals.size());
            for (std::size_t i = 0; i < vals.size(); ++i)
                values.push_back(number_at(vals[i], "rewards.values[" + std::to_string(i) + "]"));
            try {
                inst.rewards = RewardModel::dense(inst.grid, P, std::move(values));
            } catch (const Error& e) {
                throw SchemaError("rewards.values", e.what());
            }
        } else if (enc == "windows") {
            const json_doc& spans = array_at(member(rw, "windows", "rewards"), "rewards.windows");
            std::vector<RewardWindow> windows;
            for (std::size_t i = 0; i < spans.size(); ++i) {
                std::string path = "rewards.windows[" + std::to_string(i) + "]";
                const json_doc& e = spans[i];
                windows.push_back({get_int(e, "target", path), get_int(e, "t_begin", path),
                                   get_int(e, "t_end", path), get_number(e, "reward", path)});
            }
            try {
                inst.rewards = RewardModel::windows(inst.grid, P, std::move(windows));
            } catch (const Error& e) {
                throw SchemaError("rewards.windows", e.what());
            }
        } else {
            throw SchemaError("rewards.encoding", "expected \"dense\" or \"windows\"");
        }
    }

    {
        const json_doc& th = member(doc, "thresholds", "");
        try {
            inst.rewards.set_default_threshold(get_int(th, "default", "thresholds"));
        } catch (const Error& e) {
            throw SchemaError("thresholds.default", e.what());
        }
        const json_doc& ov =
            array_at(member(th, "overrides", "thresholds"), "thresholds.overrides");
        for (std::size_t i = 0; i < ov.size(); ++i) {
            std::string path = "thresholds.overrides[" + std::to_string(i) + "]";
            const json_doc& e = ov[i];
            try {
                inst.rewards.add_threshold_override(get_int(e, "t", path),
                                                    get_int(e, "target", path),
                                                    get_int(e, "r", path));
            } catch (const SchemaError&) {
                throw;
            } catch (const Error& ex) {
                throw SchemaError(path, ex.what());
            }
        }
    }

    {
        const json_doc& sg = member(doc, "slot_grid", "");
        std::string mode = get_string(sg, "mode", "slot_grid");
        if (mode == "phase_only") {
            inst.slot_grid.mode = GridMode::PhaseOnly;
            inst.slot_grid.phase_count = get_int(sg, "J", "slot_grid");
            inst.slot_grid.plane_steps_per_side = SlotGridSpec{}.plane_steps_per_side;
        } else if (mode == "plane_and_phase") {
            inst.slot_grid.mode = GridMode::PlaneAndPhase;
            inst.slot_grid.plane_steps_per_side = get_int(sg, "plane_steps", "slot_grid");
            inst.slot_grid.phase_count = get_int(sg, "phase_count", "slot_grid");
        } else {
            throw SchemaError("slot_grid.mode", "expected \"phase_only\" or \"plane_and_phase\"");
        }
        inst.slot_grid.eta = get_number(sg, "eta", "slot_grid");
    }

    inst.gmst0 = deg2rad(get_number(doc, "gmst0_deg", ""));

    validate_instance(inst);
    return inst;
}

inline std::string serialize_instance(const McrpInstance& inst) {
    return instance_to_json(inst).dump(2) + "\n";
}

inline McrpInstance deserialize_instance(const std::string& text) {
    json_doc doc;
    try {
        doc = json_doc::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance: ") + e.what());
    }
    return instance_from_json(doc);
}

// A plan plus the derived numbers the plan file carries.
struct PlanRecord {
    ReconfigurationPlan plan;
    double objective = 0.0;
    std::vector<double> per_satellite_delta_v;

    bool operator==(const PlanRecord&) const = default;
};

inline PlanRecord make_plan_record(const ReconfigurationPlan& plan, const PreparedInstance& pi) {
    return {plan, mcrp::objective(plan, pi), per_satellite_delta_v(plan, pi.graph)};
}

inline json_doc plan_to_json(const PlanRecord& rec) {
    json_doc doc;
    doc["schema_version"] = kPlanSchemaVersion;
    doc["assignment"] = rec.plan.assignment;
    doc["objective"] = rec.objective;
    doc["per_satellite_delta_v"] = rec.per_satellite_delta_v;
    return doc;
}

inline PlanRecord plan_from_json(const json_doc& doc) {
    using namespace detail;
    if (!doc.is_object()) throw SchemaError("", "plan document must be an object");
    int version = get_int(doc, "schema_version", "");
    if (version != kPlanSchemaVersion)
        throw SchemaError("schema_version", "unsupported version " + std::to_string(version) +
                                                ", expected " +
                                                std::to_string(kPlanSchemaVersion));
    PlanRecord rec;
    const json_doc& rows = array_at(member(doc, "assignment", ""), "assignment");
    std::size_t satellites = 0;
    for (std::size_t s = 0; s < rows.size(); ++s) {
        std::string path = "assignment[" + std::to_string(s) + "]";
        const json_doc& row = array_at(rows[s], path);
        if (s == 0) satellites = row.size();
        if (row.size() != satellites)
            throw SchemaError(path, "stages assign different satellite counts");
        std::vector<int> indices;
        indices.reserve(row.size());
        for (std::size_t k = 0; k < row.size(); ++k) {
            int j = int_at(row[k], path + "[" + std::to_string(k) + "]");
            if (j < 0)
                throw SchemaError(path + "[" + std::to_string(k) + "]",
                                  "slot indices must be non-negative");
            indices.push_back(j);
        }
        rec.plan.assignment.push_back(std::move(indices));
    }

    rec.objective = get_number(doc, "objective", "");
    const json_doc& dv =
        array_at(member(doc, "per_satellite_delta_v", ""), "per_satellite_delta_v");
    if (dv.size() != satellites)
        throw SchemaError("per_satellite_delta_v", "expected one entry per satellite");
    for (std::size_t k = 0; k < dv.size(); ++k)
        rec.per_satellite_delta_v.push_back(
            number_at(dv[k], "per_satellite_delta_v[" + std::to_string(k) + "]"));
    return rec;
}

inline std::string serialize_plan(const PlanRecord& rec) { return plan_to_json(rec).dump(2) + "\n"; }

inline PlanRecord deserialize_plan(const std::string& text) {
    json_doc doc;
    try {
        doc = json_doc::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("plan: ") + e.what());
    }
    return plan_from_json(doc);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw InvalidInputError("failed writing " + path);
}

inline McrpInstance load_instance(const std::string& path) {
    return deserialize_instance(read_text_file(path));
}
inline void save_instance(const McrpInstance& inst, const std::string& path) {
    write_text_file(path, serialize_instance(inst));
}
inline PlanRecord load_plan(const std::string& path) {
    return deserialize_plan(read_text_file(path));
}
inline void save_plan(const PlanRecord& rec, const std::string& path) {
    write_text_file(path, serialize_plan(rec));
}

} // namespace mcrp
