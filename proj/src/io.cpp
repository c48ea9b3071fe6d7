#include "frm/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace frm {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// A JSON value plus its location, for diagnostics.
class Cursor {
public:
    Cursor(const json& value, std::string pointer, const std::string& source)
        : value_(value), pointer_(std::move(pointer)), source_(source) {}

    [[noreturn]] void fail(const std::string& message) const {
        throw LoadError(source_ + ": at " + (pointer_.empty() ? "/" : pointer_) + ": " + message);
    }

    [[nodiscard]] bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

    [[nodiscard]] Cursor operator[](const std::string& key) const {
        if (!value_.is_object()) fail("expected an object");
        if (!value_.contains(key)) fail("missing key '" + key + "'");
        return {value_.at(key), pointer_ + "/" + key, source_};
    }

    [[nodiscard]] Cursor operator[](std::size_t index) const {
        return {value_.at(index), pointer_ + "/" + std::to_string(index), source_};
    }

    [[nodiscard]] std::size_t size() const {
        if (!value_.is_array()) fail("expected an array");
        return value_.size();
    }

    [[nodiscard]] double number() const {
        if (!value_.is_number()) fail("expected a number");
        const double v = value_.get<double>();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }

    [[nodiscard]] long long integer() const {
        if (!value_.is_number_integer()) fail("expected an integer");
        return value_.get<long long>();
    }

    [[nodiscard]] int index() const {
        const long long v = integer();
        if (v < 0 || v > std::numeric_limits<int>::max()) fail("expected a non-negative index");
        return static_cast<int>(v);
    }

    [[nodiscard]] std::string string() const {
        if (!value_.is_string()) fail("expected a string");
        return value_.get<std::string>();
    }

    [[nodiscard]] Eigen::VectorXd vector(long expected = -1) const {
        const std::size_t n = size();
        if (expected >= 0 && n != static_cast<std::size_t>(expected))
            fail("expected " + std::to_string(expected) + " entries, found " + std::to_string(n));
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) v[static_cast<Eigen::Index>(k)] = (*this)[k].number();
        return v;
    }

    [[nodiscard]] Eigen::MatrixXd matrix(long rows, long cols) const {
        if (size() != static_cast<std::size_t>(rows)) fail("expected " + std::to_string(rows) + " rows");
        Eigen::MatrixXd m(rows, cols);
        for (long r = 0; r < rows; ++r) m.row(r) = (*this)[static_cast<std::size_t>(r)].vector(cols).transpose();
        return m;
    }

    [[nodiscard]] LeafId leaf() const {
        if (size() != 2) fail("a leaf is written as [foliation, co_parameter]");
        return {(*this)[0].index(), (*this)[1].index()};
    }

    void expect_schema(std::string_view schema) const {
        const std::string found = (*this)["schema"].string();
        if (found != schema) (*this)["schema"].fail("unsupported schema '" + found + "', expected '" + std::string(schema) + "'");
    }

    /// Rethrows construction errors with this location attached.
    template <class F>
    auto guard(F&& f) const {
        try {
            return f();
        } catch (const LoadError&) {
            throw;
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }

private:
    const json& value_;
    std::string pointer_;
    const std::string& source_;
};

json vec_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json leaf_json(const LeafId& leaf) { return json::array({leaf.foliation, leaf.co_parameter}); }

json shape_json(const Shape& s) {
    return std::visit(Overloaded{
                          [](const Box2& b) { return json{{"box", {{"min", vec_json(b.min)}, {"max", vec_json(b.max)}}}}; },
                          [](const Disc2& d) { return json{{"disc", {{"center", vec_json(d.center)}, {"radius", d.radius}}}}; },
                      },
                      s);
}

Shape shape_from(const Cursor& c) {
    if (c.has("box")) {
        const Cursor b = c["box"];
        Box2 box{b["min"].vector(2), b["max"].vector(2)};
        if ((box.min.array() > box.max.array()).any()) b.fail("box min exceeds max");
        return box;
    }
    if (c.has("disc")) {
        const Cursor d = c["disc"];
        Disc2 disc{d["center"].vector(2), d["radius"].number()};
        if (disc.radius <= 0.0) d["radius"].fail("radius must be positive");
        return disc;
    }
    c.fail("expected a 'box' or 'disc' shape");
}

json constraint_json(const ConstraintKind& k) {
    return std::visit(Overloaded{
                          [](const CoordinateConstraint& c) { return json{{"kind", "coordinate"}, {"axis", c.axis}}; },
                          [](const RadialConstraint& c) {
                              return json{{"kind", "radial"}, {"axes", c.axes}, {"center", vec_json(c.center)}};
                          },
                          [](const AttachedPointConstraint& c) {
                              return json{{"kind", "attached_point"}, {"x_axis", c.x_axis}, {"y_axis", c.y_axis},
                                          {"angle_axis", c.angle_axis}, {"length", c.length},
                                          {"angle_scale", c.angle_scale}};
                          },
                      },
                      k);
}

ConstraintKind constraint_from(const Cursor& c) {
    const std::string kind = c["kind"].string();
    if (kind == "coordinate") return CoordinateConstraint{c["axis"].index()};
    if (kind == "radial") {
        RadialConstraint r;
        for (std::size_t k = 0; k < c["axes"].size(); ++k) r.axes.push_back(c["axes"][k].index());
        r.center = c["center"].vector(static_cast<long>(r.axes.size()));
        return r;
    }
    if (kind == "attached_point")
        return AttachedPointConstraint{c["x_axis"].index(), c["y_axis"].index(), c["angle_axis"].index(),
                                       c["length"].number(),
                                       c.has("angle_scale") ? c["angle_scale"].number() : 1.0};
    c["kind"].fail("unknown constraint kind '" + kind + "'");
}

}  // namespace

json parse_json(std::string_view text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string message = e.what();
        if (const auto pos = message.find(": "); pos != std::string::npos) message = message.substr(pos + 2);
        throw LoadError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message);
    }
}

json problem_to_json(const Problem& p) {
    const auto& env = *p.env;
    json doc;
    doc["schema"] = kProblemSchema;
    doc["name"] = p.name;
    doc["category"] = std::string(to_string(p.category));
    doc["dimension"] = p.space->dimension();
    doc["bounds"] = {{"lower", vec_json(env.lower())}, {"upper", vec_json(env.upper())}};
    doc["robot"] = {{"x_axis", env.robot().x_axis}, {"y_axis", env.robot().y_axis}, {"radius", env.robot().radius}};
    if (env.object())
        doc["object"] = {{"angle_axis", env.object()->angle_axis}, {"length", env.object()->length},
                         {"radius", env.object()->radius}, {"angle_scale", env.object()->angle_scale}};
    for (const char* key : {"robot_obstacles", "object_obstacles"}) {
        json list = json::array();
        for (const auto& s : std::string(key) == "robot_obstacles" ? env.robot_obstacles() : env.object_obstacles())
            list.push_back(shape_json(s));
        doc[key] = std::move(list);
    }
    json fols = json::array();
    for (const auto& f : p.space->foliations()) {
        json cps = json::array();
        for (const auto& cp : f.co_parameters()) cps.push_back({{"label", cp.label}, {"value", vec_json(cp.value)}});
        fols.push_back({{"name", f.name()},
                        {"constraint", constraint_json(f.constraint().kind())},
                        {"tolerance", f.constraint().tolerance()},
                        {"bandwidth", f.bandwidth()},
                        {"co_parameters", std::move(cps)}});
    }
    doc["foliations"] = std::move(fols);
    json wits = json::array();
    for (const auto& w : p.witnesses)
        wits.push_back({{"leaf_a", leaf_json(w.leaf_a)}, {"leaf_b", leaf_json(w.leaf_b)}, {"config", vec_json(w.config)}});
    doc["witnesses"] = std::move(wits);
    doc["start"] = {{"leaf", leaf_json(p.start.leaf)}, {"config", vec_json(p.start.config)}};
    doc["goal"] = {{"leaf", leaf_json(p.goal.leaf)}, {"config", vec_json(p.goal.config)}};
    return doc;
}

Problem problem_from_json(const json& doc, const std::string& source) {
    const Cursor root(doc, "", source);
    root.expect_schema(kProblemSchema);
    Problem p;
    p.name = root.has("name") ? root["name"].string() : "unnamed";
    p.category = root.has("category") ? root["category"].guard([&] { return category_from_string(root["category"].string()); })
                                      : Category::Custom;
    const int dim = root["dimension"].index();
    if (dim < 2) root["dimension"].fail("ambient dimension must be at least 2");

    const Cursor bounds = root["bounds"];
    const Eigen::VectorXd lower = bounds["lower"].vector(dim), upper = bounds["upper"].vector(dim);
    RobotBody robot;
    if (root.has("robot")) {
        const Cursor r = root["robot"];
        robot = {r["x_axis"].index(), r["y_axis"].index(), r["radius"].number()};
    }
    std::optional<ObjectModel> object;
    if (root.has("object")) {
        const Cursor o = root["object"];
        object = ObjectModel{o["angle_axis"].index(), o["length"].number(), o["radius"].number(),
                             o.has("angle_scale") ? o["angle_scale"].number() : 1.0};
    }
    std::vector<Shape> robot_obs, object_obs;
    for (auto [key, out] : {std::pair{"robot_obstacles", &robot_obs}, std::pair{"object_obstacles", &object_obs}}) {
        if (!root.has(key)) continue;
        const Cursor list = root[key];
        for (std::size_t k = 0; k < list.size(); ++k) out->push_back(shape_from(list[k]));
    }
    p.env = root.guard([&] {
        return std::make_shared<const Environment>(lower, upper, robot, object, std::move(robot_obs), std::move(object_obs));
    });

    const Cursor fols = root["foliations"];
    std::vector<Foliation> foliations;
    for (std::size_t i = 0; i < fols.size(); ++i) {
        const Cursor f = fols[i];
        const Cursor cps = f["co_parameters"];
        std::vector<CoParameter> co_params;
        for (std::size_t k = 0; k < cps.size(); ++k)
            co_params.push_back({cps[k].has("label") ? cps[k]["label"].string() : std::to_string(k), cps[k]["value"].vector()});
        const ConstraintKind kind = constraint_from(f["constraint"]);
        const double tol = f.has("tolerance") ? f["tolerance"].number() : 1e-6;
        const double bandwidth = f.has("bandwidth") ? f["bandwidth"].number() : 0.0;
        const std::string name = f.has("name") ? f["name"].string() : "foliation_" + std::to_string(i);
        f.guard([&] {
            foliations.emplace_back(name, ConstraintFamily(kind, tol), std::move(co_params), bandwidth);
            return 0;
        });
    }
    p.space = root.guard([&] { return std::make_shared<const FoliatedSpace>(dim, std::move(foliations)); });

    if (root.has("witnesses")) {
        const Cursor wits = root["witnesses"];
        for (std::size_t k = 0; k < wits.size(); ++k) {
            const Cursor w = wits[k];
            IntersectionWitness wit{w["leaf_a"].leaf(), w["leaf_b"].leaf(), w["config"].vector(dim)};
            w.guard([&] {
                p.space->validate_witness(wit);
                if (!p.env->in_bounds(wit.config)) throw LoadError("witness configuration lies outside the bounds");
                return 0;
            });
            p.witnesses.push_back(std::move(wit));
        }
    }
    for (auto [key, out] : {std::pair{"start", &p.start}, std::pair{"goal", &p.goal}}) {
        const Cursor q = root[key];
        out->leaf = q["leaf"].leaf();
        if (!p.space->contains(out->leaf)) q["leaf"].fail("undeclared leaf " + to_string(out->leaf));
        out->config = q["config"].vector(dim);
    }
    return p;
}

json roadmap_to_json(const BaseRoadmap& r) {
    json doc;
    doc["schema"] = kRoadmapSchema;
    doc["dimension"] = r.dimension();
    json comps = json::array();
    for (const auto& c : r.components) {
        json cov = json::array();
        for (Eigen::Index row = 0; row < c.covariance.rows(); ++row) cov.push_back(vec_json(c.covariance.row(row).transpose()));
        comps.push_back({{"id", c.id}, {"mean", vec_json(c.mean)}, {"covariance", std::move(cov)}, {"weight", c.weight}});
    }
    doc["components"] = std::move(comps);
    json edges = json::array();
    for (const auto& [a, b] : r.edges) edges.push_back(json::array({a, b}));
    doc["edges"] = std::move(edges);
    doc["source_ids"] = r.source_ids;
    return doc;
}

BaseRoadmap roadmap_from_json(const json& doc, const std::string& source) {
    const Cursor root(doc, "", source);
    root.expect_schema(kRoadmapSchema);
    const int dim = root["dimension"].index();
    BaseRoadmap r;
    const Cursor comps = root["components"];
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const Cursor c = comps[k];
        GaussianComponent g{c["id"].index(), c["mean"].vector(dim), c["covariance"].matrix(dim, dim), c["weight"].number()};
        if (g.id != static_cast<int>(k)) c["id"].fail("component ids must be dense and in order");
        if (!(g.weight > 0.0 && g.weight <= 1.0)) c["weight"].fail("weight must lie in (0, 1]");
        if (!g.covariance.isApprox(g.covariance.transpose()) || g.covariance.llt().info() != Eigen::Success)
            c["covariance"].fail("covariance must be symmetric positive definite");
        r.components.push_back(std::move(g));
    }
    const Cursor edges = root["edges"];
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Cursor e = edges[k];
        if (e.size() != 2) e.fail("an edge is written as [a, b]");
        const int a = e[0].index(), b = e[1].index();
        if (a >= b || b >= r.size()) e.fail("edges must satisfy a < b < component count");
        r.edges.emplace_back(a, b);
    }
    if (root.has("source_ids"))
        for (std::size_t k = 0; k < root["source_ids"].size(); ++k) r.source_ids.push_back(root["source_ids"][k].index());
    return r;
}

json map_state_to_json(const FoliatedRepMap& map) {
    const auto& s = map.state();
    json doc;
    doc["schema"] = kMapStateSchema;
    doc["nodes"] = map.node_count();
    doc["distributions"] = map.distributions();
    doc["samples_ingested"] = s.samples_ingested;
    doc["robot_invalid"] = s.robot_invalid;
    doc["robot_invalid_prior"] = s.robot_invalid_prior;
    json counts = json::array();
    for (std::size_t n = 0; n < s.nodes.size(); ++n) {
        const auto& c = s.nodes[n];
        if (c == NodeCounts{}) continue;
        counts.push_back(json::array({n, c.valid, c.object_invalid, c.const_invalid}));
    }
    doc["node_counts"] = std::move(counts);
    return doc;
}

void map_state_from_json(const json& doc, FoliatedRepMap& map, const std::string& source) {
    const Cursor root(doc, "", source);
    root.expect_schema(kMapStateSchema);
    if (root["nodes"].index() != map.node_count()) root["nodes"].fail("node count does not match the map");
    if (root["distributions"].index() != map.distributions()) root["distributions"].fail("distribution count does not match the map");
    auto count = [](const Cursor& c) {
        const long long v = c.integer();
        if (v < 0) c.fail("counts must be non-negative");
        return static_cast<std::uint64_t>(v);
    };
    MapState s;
    s.samples_ingested = count(root["samples_ingested"]);
    s.nodes.assign(static_cast<std::size_t>(map.node_count()), NodeCounts{});
    const Cursor ri = root["robot_invalid"], prior = root["robot_invalid_prior"];
    if (ri.size() != static_cast<std::size_t>(map.distributions())) ri.fail("one count per distribution is required");
    for (std::size_t j = 0; j < ri.size(); ++j) s.robot_invalid.push_back(count(ri[j]));
    const Eigen::VectorXd p = prior.vector(map.distributions());
    s.robot_invalid_prior.assign(p.data(), p.data() + p.size());
    const Cursor counts = root["node_counts"];
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const Cursor row = counts[k];
        if (row.size() != 4) row.fail("node counts are written as [node, valid, object_invalid, const_invalid]");
        const int n = row[0].index();
        if (n >= map.node_count()) row[0].fail("node id out of range");
        s.nodes[static_cast<std::size_t>(n)] = {count(row[1]), count(row[2]), count(row[3])};
    }
    root.guard([&] {
        map.restore(std::move(s));
        return 0;
    });
}

json feedback_to_json(const PlannerFeedback& fb) {
    json doc;
    doc["success"] = fb.success;
    doc["path_length"] = fb.path_length;
    json samples = json::array();
    for (const auto& s : fb.samples) samples.push_back({{"config", vec_json(s.config)}, {"tag", std::string(to_string(s.tag))}});
    doc["samples"] = std::move(samples);
    if (fb.path) {
        json path = json::array();
        for (const auto& q : *fb.path) path.push_back(vec_json(q));
        doc["path"] = std::move(path);
    }
    return doc;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
    out << content;
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Problem load_problem(const std::filesystem::path& path) {
    return problem_from_json(parse_json(read_file(path), path.string()), path.string());
}

void save_problem(const std::filesystem::path& path, const Problem& problem) {
    write_file(path, problem_to_json(problem).dump(1) + "\n");
}

BaseRoadmap load_roadmap(const std::filesystem::path& path) {
    return roadmap_from_json(parse_json(read_file(path), path.string()), path.string());
}

void save_roadmap(const std::filesystem::path& path, const BaseRoadmap& roadmap) {
    write_file(path, roadmap_to_json(roadmap).dump(1) + "\n");
}

}  // namespace frm
