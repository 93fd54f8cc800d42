#include "tempo/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace tempo::io {

using nlohmann::json;

namespace {

json point(bench::Vec2 v) { return json::array({v.x, v.y}); }

bench::Vec2 read_point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError(std::string(what) + " must be [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
T field(const json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string(what) + " is missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string(what) + " has a bad \"" + key + "\"");
    }
}

const json& array_field(const json& j, const char* key) {
    static const json empty = json::array();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
    return j.at(key);
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

json encode(const Constant& c) {
    switch (c.kind()) {
        case ConstantKind::None: return nullptr;
        case ConstantKind::Boolean: return c.as_bool();
        case ConstantKind::Number: return c.as_number();
        case ConstantKind::Symbol: return c.name();
        case ConstantKind::Vector:
            return {{"kind", "vector"}, {"tag", c.tag()}, {"name", c.name()}, {"values", c.values()}};
        case ConstantKind::Path:
            return {{"kind", "path"}, {"tag", c.tag()}, {"name", c.name()}, {"waypoints", c.waypoints()}};
        case ConstantKind::Lazy: return {{"kind", "lazy"}, {"name", c.name()}};
    }
    return nullptr;
}

const char* event_name(EventKind k) {
    switch (k) {
        case EventKind::Start: return "start";
        case EventKind::End: return "end";
        case EventKind::Instant: return "instant";
    }
    return "instant";
}

class Decoder {
public:
    explicit Decoder(const bench::Domain& domain) {
        for (const auto& c : domain.scene_vectors()) scene_.emplace(std::make_pair(c.tag(), c.values()), c);
    }

    Constant decode(const json& j) {
        if (j.is_null()) return Constant::none();
        if (j.is_boolean()) return Constant::boolean(j.get<bool>());
        if (j.is_number()) return Constant::number(j.get<double>());
        if (j.is_string()) return Constant::symbol(j.get<std::string>());
        if (!j.is_object()) throw ParseError("bad constant " + j.dump());
        const auto kind = field<std::string>(j, "kind", "constant");
        const auto tag = j.value("tag", std::string{});
        const auto name = j.value("name", std::string{});
        if (kind == "vector") {
            const auto values = field<std::vector<double>>(j, "values", "vector");
            auto it = scene_.find({tag, values});
            if (it != scene_.end()) return it->second;
            auto [pos, fresh] = vectors_.try_emplace({tag, name, values});
            if (fresh) pos->second = Constant::vector(values, tag, name);
            return pos->second;
        }
        if (kind == "path") {
            const auto waypoints = field<std::vector<std::vector<double>>>(j, "waypoints", "path");
            auto [pos, fresh] = paths_.try_emplace({tag, name, waypoints});
            if (fresh) pos->second = Constant::path(waypoints, tag, name);
            return pos->second;
        }
        if (kind == "lazy") throw ParseError("schedule contains placeholder " + name);
        throw ParseError("unknown constant kind " + kind);
    }

private:
    std::map<std::pair<std::string, std::vector<double>>, Constant> scene_;
    std::map<std::tuple<std::string, std::string, std::vector<double>>, Constant> vectors_;
    std::map<std::tuple<std::string, std::string, std::vector<std::vector<double>>>, Constant> paths_;
};

}  // namespace

std::string scene_to_json(const bench::Scene& scene) {
    json j;
    j["name"] = scene.name;
    j["arms"] = json::array();
    for (const auto& a : scene.arms) {
        json arm = {{"name", a.name}, {"base", point(a.base)}, {"reach", a.reach}, {"speed", a.speed}};
        if (a.home) arm["home"] = point(*a.home);
        j["arms"].push_back(arm);
    }
    j["objects"] = json::array();
    for (const auto& o : scene.objects) j["objects"].push_back({{"name", o.name}, {"pose", point(o.pose)}});
    if (!scene.placements.empty()) {
        j["placements"] = json::array();
        for (const auto& p : scene.placements) {
            json pl = {{"name", p.name}, {"object", p.object}, {"pose", point(p.pose)}};
            if (!p.support.empty()) pl["support"] = p.support;
            j["placements"].push_back(pl);
        }
    }
    j["obstacles"] = json::array();
    for (const auto& o : scene.obstacles) j["obstacles"].push_back({{"center", point(o.center)}, {"radius", o.radius}});
    j["goal"] = json::array();
    for (const auto& g : scene.goal) j["goal"].push_back({{"fn", g.fn}, {"args", g.args}, {"value", g.value}});
    j["seed"] = scene.seed;
    return j.dump(2);
}

bench::Scene scene_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw ParseError("scene must be an object");
    bench::Scene s;
    s.name = j.value("name", std::string{"scene"});
    for (const auto& a : array_field(j, "arms")) {
        bench::ArmSpec arm;
        arm.name = field<std::string>(a, "name", "arm");
        arm.base = read_point(a.value("base", json()), "arm base");
        arm.reach = a.value("reach", arm.reach);
        arm.speed = a.value("speed", arm.speed);
        if (a.contains("home")) arm.home = read_point(a["home"], "arm home");
        s.arms.push_back(arm);
    }
    for (const auto& o : array_field(j, "objects")) {
        s.objects.push_back({field<std::string>(o, "name", "object"), read_point(o.value("pose", json()), "object pose")});
    }
    for (const auto& p : array_field(j, "placements")) {
        s.placements.push_back({field<std::string>(p, "name", "placement"), field<std::string>(p, "object", "placement"),
                                read_point(p.value("pose", json()), "placement pose"),
                                p.value("support", std::string{})});
    }
    for (const auto& o : array_field(j, "obstacles")) {
        s.obstacles.push_back({read_point(o.value("center", json()), "obstacle center"), o.value("radius", 0.1)});
    }
    for (const auto& g : array_field(j, "goal")) {
        s.goal.push_back({field<std::string>(g, "fn", "goal"), g.value("args", std::vector<std::string>{}),
                          field<std::string>(g, "value", "goal")});
    }
    if (j.contains("seed")) s.seed = field<std::uint64_t>(j, "seed", "scene");
    return s;
}

bench::Scene load_scene(const std::string& path) { return scene_from_json(read_file(path)); }

std::string schedule_to_json(const Schedule& schedule) {
    json j;
    j["makespan"] = schedule.makespan();
    j["entries"] = json::array();
    for (const auto& e : schedule.entries) {
        json args = json::array();
        for (const auto& a : e.args) args.push_back(encode(a));
        j["entries"].push_back({{"action", e.action->name()}, {"args", args}, {"start", e.start}, {"end", e.end}});
    }
    j["event_order"] = json::array();
    for (const auto& ev : schedule.event_order) {
        j["event_order"].push_back({{"entry", ev.entry}, {"kind", event_name(ev.kind)}});
    }
    return j.dump(2);
}

Schedule schedule_from_json(const std::string& text, const bench::Domain& domain) {
    const json j = parse(text);
    if (!j.is_object()) throw ParseError("schedule must be an object");
    std::map<std::string, ActionPtr> actions;
    for (const auto& a : domain.problem().actions) actions.emplace(a->name(), a);
    Decoder decoder(domain);
    Schedule s;
    for (const auto& e : array_field(j, "entries")) {
        ScheduleEntry entry;
        const auto name = field<std::string>(e, "action", "entry");
        auto it = actions.find(name);
        if (it == actions.end()) throw ParseError("unknown action " + name);
        entry.action = it->second;
        const json& args = array_field(e, "args");
        if (args.size() != entry.action->params().size()) throw ParseError("wrong arity for " + name);
        for (const auto& a : args) entry.args.push_back(decoder.decode(a));
        entry.start = field<double>(e, "start", "entry");
        entry.end = field<double>(e, "end", "entry");
        s.entries.push_back(std::move(entry));
    }
    if (j.contains("event_order")) {
        for (const auto& ev : array_field(j, "event_order")) {
            ScheduleEvent event;
            event.entry = field<std::size_t>(ev, "entry", "event");
            if (event.entry >= s.entries.size()) throw ParseError("event refers to missing entry");
            const auto kind = field<std::string>(ev, "kind", "event");
            if (kind == "start") event.kind = EventKind::Start;
            else if (kind == "end") event.kind = EventKind::End;
            else if (kind == "instant") event.kind = EventKind::Instant;
            else throw ParseError("unknown event kind " + kind);
            s.event_order.push_back(event);
        }
    }
    return s;
}

Schedule load_schedule(const std::string& path, const bench::Domain& domain) {
    return schedule_from_json(read_file(path), domain);
}

std::string gantt(const Schedule& schedule, const bench::Domain& domain, double resolution) {
    const double makespan = schedule.makespan();
    const auto columns = static_cast<std::size_t>(std::ceil(makespan / resolution - 1e-9)) + 1;
    std::size_t width = 4;
    for (const auto& a : domain.scene().arms) width = std::max(width, a.name.size());

    std::map<std::string, char> letters;
    std::string used;
    auto letter = [&](const std::string& action) {
        auto it = letters.find(action);
        if (it != letters.end()) return it->second;
        char c = '#';
        for (char x : action) {
            const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(x)));
            if (std::isalpha(static_cast<unsigned char>(u)) && used.find(u) == std::string::npos) {
                c = u;
                break;
            }
        }
        used.push_back(c);
        letters.emplace(action, c);
        return c;
    };

    std::ostringstream os;
    std::string ruler(columns, ' ');
    const auto tick = static_cast<std::size_t>(std::lround(1.0 / resolution));
    for (std::size_t c = 0; c < columns; c += tick) ruler[c] = '|';
    os << std::string(width, ' ') << "  " << ruler << "\n";
    for (const auto& arm : domain.scene().arms) {
        std::string row(columns, '.');
        for (const auto& e : schedule.entries) {
            if (e.args.empty() || e.args[0].kind() != ConstantKind::Symbol || e.args[0].name() != arm.name) continue;
            const char c = letter(e.action->name());
            auto first = static_cast<std::size_t>(std::floor(e.start / resolution + 1e-9));
            auto last = static_cast<std::size_t>(std::ceil(e.end / resolution - 1e-9));
            last = std::max(last, first + 1);
            for (std::size_t k = first; k < last && k < columns; ++k) row[k] = c;
        }
        os << arm.name << std::string(width - arm.name.size(), ' ') << "  " << row << "\n";
    }
    os << "scale: " << resolution << " s per column, | every 1 s; makespan " << makespan << " s\n";
    for (const auto& [action, c] : letters) os << "  " << c << " " << action << "\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (text.empty() || text.back() != '\n') out << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace tempo::io
