#include "noslip/cli/config.hpp"

#include "noslip/cli/output.hpp"
#include "noslip/random.hpp"
#include "noslip/tables.hpp"
#include "noslip/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace noslip::cli {

namespace {

std::pair<int, int> position(const YAML::Node& n) {
    if (!n.IsDefined()) return {0, 0};
    const YAML::Mark m = n.Mark();
    if (m.is_null() || m.line < 0) return {0, 0};
    return {m.line + 1, m.column + 1};
}

std::string format_where(const std::string& field, const std::string& message, int line,
                         int column) {
    std::string out = field.empty() ? message : field + ": " + message;
    if (line > 0) out += " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t k = s.find(sep, start);
        out.push_back(s.substr(start, k - start));
        if (k == std::string::npos) break;
        start = k + 1;
    }
    return out;
}

Tolerances parse_tolerances(const Section& sec) {
    Tolerances t;
    t.t_min = sec.number("t_min", t.t_min);
    t.corner = sec.number("corner", t.corner);
    t.graze = sec.number("graze", t.graze);
    t.tie = sec.number("tie", t.tie);
    t.max_flight_time = sec.number("max_flight_time", t.max_flight_time);
    sec.finish();
    return t;
}

Vec2 point_from(const YAML::Node& n, const std::string& path) {
    double x = 0.0, y = 0.0;
    if (!n.IsSequence() || n.size() != 2 || !YAML::convert<double>::decode(n[0], x) ||
        !YAML::convert<double>::decode(n[1], y) || !std::isfinite(x) || !std::isfinite(y)) {
        const auto [l, c] = position(n);
        throw ConfigError(path, "expected [x, y]", l, c);
    }
    return {x, y};
}

Vec2 parse_point(const Section& sec, const std::string& key) {
    return point_from(sec.node(key), sec.path_of(key));
}

Piece parse_piece(const Section& sec) {
    const std::string kind = sec.text("kind");
    if (kind == "segment") {
        const Piece p(Segment{parse_point(sec, "a"), parse_point(sec, "b")});
        sec.finish();
        return p;
    }
    if (kind == "arc") {
        Arc a;
        a.center = parse_point(sec, "center");
        a.radius = sec.number("radius");
        a.angle_start = sec.number("start");
        a.angle_end = sec.number("end");
        const std::string side = sec.text("side", "outside");
        if (side == "outside") a.side = ArcSide::Outside;
        else if (side == "inside") a.side = ArcSide::Inside;
        else sec.fail("side", "expected outside or inside");
        sec.finish();
        return Piece(a);
    }
    sec.fail("kind", "expected segment or arc, got '" + kind + "'");
}

void parse_table(RunConfig& cfg, const Section& sec) {
    const std::string type = sec.text("type");
    cfg.table_type = type;
    const Tolerances tol =
        sec.has("tolerances") ? parse_tolerances(sec.child("tolerances")) : Tolerances{};
    try {
        if (type == "strip") {
            const double w = sec.number("width");
            cfg.table = tables::strip(w, sec.number("half_length", 1e3));
            cfg.length_scale = w;
        } else if (type == "wedge") {
            cfg.table = tables::wedge(sec.number("phi"), sec.number("arm", 10.0));
        } else if (type == "polygon") {
            std::vector<Vec2> vs;
            const YAML::Node list = sec.node("vertices");
            if (!list.IsSequence()) sec.fail("vertices", "expected a list of [x, y]");
            for (std::size_t i = 0; i < list.size(); ++i)
                vs.push_back(point_from(list[i], sec.path_of("vertices") + "[" + std::to_string(i) + "]"));
            cfg.table = tables::polygon(vs);
        } else if (type == "regular_polygon") {
            const long n = sec.integer("n");
            cfg.table = tables::regular_polygon(static_cast<int>(n), sec.number("circumradius", 1.0));
            cfg.length_scale = sec.number("circumradius", 1.0);
        } else if (type == "sinai") {
            std::vector<double> per{1.0, 1.0};
            if (sec.has("periods")) per = sec.numbers("periods");
            if (per.size() != 2) sec.fail("periods", "expected [Lx, Ly]");
            cfg.table = tables::sinai(sec.number("radius"), per[0], per[1]);
            cfg.length_scale = std::max(per[0], per[1]);
        } else if (type == "two_arc_lens") {
            const double chord = sec.number("chord", 1.0);
            cfg.table = tables::two_arc_lens(sec.number("cap_angle"), chord);
            cfg.length_scale = chord;
        } else if (type == "custom") {
            const YAML::Node list = sec.node("pieces");
            if (!list.IsSequence() || list.size() == 0) sec.fail("pieces", "expected a list of pieces");
            std::vector<Piece> pieces;
            for (std::size_t i = 0; i < list.size(); ++i)
                pieces.push_back(parse_piece(Section(list[i], sec.path_of("pieces") + "[" + std::to_string(i) + "]")));
            Topology topo = Planar{};
            if (sec.has("torus")) {
                const std::vector<double> per = sec.numbers("torus");
                if (per.size() != 2) sec.fail("torus", "expected [Lx, Ly]");
                topo = Torus{per[0], per[1]};
                cfg.length_scale = std::max(per[0], per[1]);
            }
            cfg.table = Table(std::move(pieces), topo);
        } else {
            sec.fail("type", "unknown table type '" + type + "'");
        }
    } catch (const std::invalid_argument& e) {
        sec.fail("", e.what());
    } catch (const std::domain_error& e) {
        sec.fail("", e.what());
    }
    cfg.table = cfg.table->with_tolerances(tol);
    sec.finish({"tolerances"});
}

MassParams parse_mass(const Section& sec) {
    const int forms = int(sec.has("gamma")) + int(sec.has("beta")) + int(sec.has("lambda"));
    if (forms != 1) sec.fail("", "give exactly one of gamma, beta, or lambda with radius");
    MassParams m;
    try {
        if (sec.has("gamma")) m = MassParams::from_gamma(sec.number("gamma"));
        else if (sec.has("beta")) m = MassParams::from_beta(sec.number("beta"));
        else m = MassParams::from_lambda(sec.number("lambda"), sec.number("radius"));
    } catch (const std::invalid_argument& e) {
        sec.fail("", e.what());
    }
    sec.finish();
    return m;
}

void parse_initial(RunConfig& cfg, const Section& sec) {
    if (sec.has("states")) {
        const YAML::Node list = sec.node("states");
        if (!list.IsSequence()) sec.fail("states", "expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Section st(list[i], sec.path_of("states") + "[" + std::to_string(i) + "]");
            InitialState is;
            const long piece = st.integer("piece");
            if (piece < 0) st.fail("piece", "must be non-negative");
            is.piece = static_cast<std::size_t>(piece);
            is.s = st.number("s");
            is.u1 = st.number("u1");
            is.u2 = st.number("u2");
            st.finish();
            try {
                state_from_coords(frame_at(*cfg.table, is.piece, is.s), is.u1, is.u2);
            } catch (const std::exception& e) {
                st.fail("", e.what());
            }
            cfg.states.push_back(is);
        }
    }
    if (sec.has("random")) {
        const long n = sec.integer("random");
        if (n < 0) sec.fail("random", "must be non-negative");
        cfg.random_count = static_cast<std::size_t>(n);
    }
    if (sec.has("from_csv")) cfg.from_csv = cfg.base_dir / sec.text("from_csv");
    sec.finish();
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message, int line, int column)
    : std::runtime_error(format_where(field, message, line, column)),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

Section::Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) {
        const auto [l, c] = position(node_);
        throw ConfigError(path_, node_.IsDefined() ? "expected a mapping" : "missing section", l, c);
    }
}

std::string Section::path_of(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
}

void Section::fail(const std::string& key, const std::string& message) const {
    const YAML::Node n = key.empty() ? node_ : node_[key];
    auto [l, c] = position(n);
    if (l == 0) std::tie(l, c) = position(node_);
    throw ConfigError(path_of(key), message, l, c);
}

bool Section::has(const std::string& key) const {
    if (node_[key]) {
        seen_.push_back(key);
        return true;
    }
    return false;
}

YAML::Node Section::require(const std::string& key) const {
    const YAML::Node n = node_[key];
    if (!n) fail(key, "missing required field");
    seen_.push_back(key);
    return n;
}

YAML::Node Section::node(const std::string& key) const { return require(key); }

double Section::number(const std::string& key) const {
    const YAML::Node n = require(key);
    double v = 0.0;
    if (!n.IsScalar() || !YAML::convert<double>::decode(n, v)) fail(key, "expected a number");
    if (!std::isfinite(v)) fail(key, "expected a finite number");
    return v;
}

double Section::number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long Section::integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 9e15) fail(key, "expected an integer");
    return static_cast<long>(v);
}

long Section::integer(const std::string& key, long fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::string Section::text(const std::string& key) const {
    const YAML::Node n = require(key);
    if (!n.IsScalar()) fail(key, "expected a string");
    return n.Scalar();
}

std::string Section::text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
}

bool Section::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    bool v = false;
    if (!YAML::convert<bool>::decode(node_[key], v)) fail(key, "expected true or false");
    return v;
}

std::vector<double> Section::numbers(const std::string& key) const {
    const YAML::Node n = require(key);
    if (!n.IsSequence()) fail(key, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        double v = 0.0;
        if (!n[i].IsScalar() || !YAML::convert<double>::decode(n[i], v) || !std::isfinite(v)) {
            const auto [l, c] = position(n[i]);
            throw ConfigError(path_of(key) + "[" + std::to_string(i) + "]", "expected a number", l, c);
        }
        out.push_back(v);
    }
    return out;
}

Section Section::child(const std::string& key) const { return Section(require(key), path_of(key)); }

void Section::finish(std::initializer_list<const char*> extra) const {
    for (const auto& kv : node_) {
        const std::string k = kv.first.as<std::string>();
        const bool known = std::find(seen_.begin(), seen_.end(), k) != seen_.end() ||
                           std::any_of(extra.begin(), extra.end(), [&](const char* e) { return k == e; });
        if (!known) {
            const auto [l, c] = position(kv.first);
            throw ConfigError(path_of(k), "unknown field", l, c);
        }
    }
}

CollisionModel RunConfig::model() const {
    return specular ? CollisionModel::specular() : CollisionModel::no_slip(mass);
}

std::vector<State> RunConfig::initial_states() const {
    std::vector<State> out;
    for (const InitialState& is : states)
        out.push_back(state_from_coords(frame_at(*table, is.piece, is.s), is.u1, is.u2));
    if (from_csv) {
        const std::vector<TrajectoryRow> rows = read_trajectory_csv(*from_csv);
        if (rows.empty()) throw ConfigError("initial.from_csv", "trajectory file has no rows");
        out.push_back(state_from_row(*table, rows.back()));
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < random_count; ++i) out.push_back(random_state(*table, rng));
    return out;
}

void apply_override(YAML::Node& root, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("", "override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq);
    const std::vector<std::string> parts = split(key, '.');
    if (std::any_of(parts.begin(), parts.end(), [](const std::string& p) { return p.empty(); }))
        throw ConfigError(key, "malformed override key");
    YAML::Node value;
    try {
        value = YAML::Load(assignment.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw ConfigError(key, std::string("override value does not parse: ") + e.msg);
    }
    if (!value.IsScalar() && !value.IsNull()) throw ConfigError(key, "overrides must be scalars");

    YAML::Node cur = root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = cur[parts[i]];
        if (!next) cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
        else if (!next.IsMap()) throw ConfigError(key, "'" + parts[i] + "' is not a section");
        cur.reset(cur[parts[i]]);
    }
    const YAML::Node target = cur[parts.back()];
    if (target && (target.IsMap() || target.IsSequence()))
        throw ConfigError(key, "only scalar fields can be overridden");
    cur[parts.back()] = value;
}

RunConfig parse_config(const YAML::Node& root, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    cfg.root = root;
    cfg.base_dir = base_dir;
    const Section top(root, "");
    const long seed = top.integer("seed");
    if (seed < 0) top.fail("seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    const long n = top.integer("collisions", 1000);
    if (n < 1) top.fail("collisions", "must be positive");
    cfg.collisions = static_cast<std::size_t>(n);

    parse_table(cfg, top.child("table"));
    cfg.mass = parse_mass(top.child("mass"));
    const std::string law = top.text("collision", "no_slip");
    if (law == "specular") cfg.specular = true;
    else if (law != "no_slip") top.fail("collision", "expected no_slip or specular");

    if (top.has("initial")) parse_initial(cfg, top.child("initial"));

    cfg.output_dir = base_dir;
    if (top.has("output")) {
        const Section out = top.child("output");
        cfg.output_dir = base_dir / out.text("dir", ".");
        out.finish();
    }
    top.finish({"simulate", "portrait", "stability", "wedge", "sweep", "verify"});
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    YAML::Node root;
    try {
        root = YAML::Load(in);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("", e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    if (!root.IsMap()) throw ConfigError("", "config must be a mapping");
    for (const std::string& o : overrides) apply_override(root, o);
    return parse_config(root, path.has_parent_path() ? path.parent_path() : ".");
}

std::size_t workers_from_env() {
    const char* env = std::getenv("NOSLIP_WORKERS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("NOSLIP_WORKERS", "expected a positive integer");
    return static_cast<std::size_t>(v);
}

}  // namespace noslip::cli
