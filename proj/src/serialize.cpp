#include "serialize.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace fgt {

using json = nlohmann::ordered_json;

namespace {

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    require(!j.is_discarded(), "malformed JSON");
    return j;
}

const json& field(const json& j, const char* name) {
    auto it = j.find(name);
    require(it != j.end(), std::string("missing field: ") + name);
    return *it;
}

double num(const json& j, const char* what) {
    require(j.is_number(), std::string(what) + " must be a number");
    return j.get<double>();
}

}  // namespace

std::string tree_to_json(const Tree& t) {
    json boxes = json::array();
    for (int l = 0; l <= t.max_level(); ++l) {
        std::vector<int> ids = t.level_nodes(l);
        std::sort(ids.begin(), ids.end(), [&](int a, int b) {
            const Node &na = t.node(a), &nb = t.node(b);
            return na.iy != nb.iy ? na.iy < nb.iy : na.ix < nb.ix;
        });
        for (int id : ids) {
            const Node& nd = t.node(id);
            Vec2 c = t.box_center(nd);
            boxes.push_back({{"level", nd.level},
                             {"index", {nd.ix, nd.iy}},
                             {"center", {c.x, c.y}},
                             {"is_leaf", nd.is_leaf()}});
        }
    }
    json values = json::array();
    for (int id : t.leaves()) values.push_back(t.node(id).samples);
    json j{{"domain",
            {{"center", {t.domain().center.x, t.domain().center.y}},
             {"side", t.domain().side}}},
           {"k", t.order()},
           {"boxes", std::move(boxes)},
           {"leaf_values", std::move(values)}};
    return j.dump();
}

Tree tree_from_json(const std::string& text) {
    json j = parse(text);
    const json& dom = field(j, "domain");
    const json& ctr = field(dom, "center");
    require(ctr.is_array() && ctr.size() == 2, "domain center must be [x, y]");
    BoxGeom domain{{num(ctr[0], "center"), num(ctr[1], "center")},
                   num(field(dom, "side"), "side")};
    int k = field(j, "k").get<int>();
    Tree t = Tree::uniform(domain, k, 0);

    const json& boxes = field(j, "boxes");
    require(boxes.is_array() && !boxes.empty(), "boxes must be a nonempty array");
    struct Entry {
        int level;
        int64_t ix, iy;
        bool leaf;
    };
    std::vector<Entry> ents;
    size_t n_leaf_entries = 0;
    for (const json& b : boxes) {
        const json& idx = field(b, "index");
        require(idx.is_array() && idx.size() == 2, "box index must be [ix, iy]");
        Entry e{field(b, "level").get<int>(), idx[0].get<int64_t>(),
                idx[1].get<int64_t>(), field(b, "is_leaf").get<bool>()};
        require(e.level >= 0 && e.level <= 28, "box level out of range");
        require(e.ix >= 0 && e.ix < ((int64_t)1 << e.level) && e.iy >= 0 &&
                    e.iy < ((int64_t)1 << e.level),
                "box index out of range for its level");
        n_leaf_entries += e.leaf;
        ents.push_back(e);
    }
    std::stable_sort(ents.begin(), ents.end(),
                     [](const Entry& a, const Entry& b) { return a.level < b.level; });
    for (const Entry& e : ents) {
        if (e.leaf) continue;
        int id = t.find_box(e.level, e.ix, e.iy);
        require(id >= 0, "interior box listed without its ancestors");
        require(t.node(id).is_leaf(), "box listed twice");
        t.subdivide(id);
    }
    std::vector<int> leaves = t.leaves();
    require(leaves.size() == n_leaf_entries, "leaf entries do not cover the tree");
    for (const Entry& e : ents) {
        if (!e.leaf) continue;
        int id = t.find_box(e.level, e.ix, e.iy);
        require(id >= 0 && t.node(id).is_leaf(), "leaf entry does not match tree");
    }

    auto vit = j.find("leaf_values");
    if (vit != j.end() && !vit->is_null()) {
        require(vit->is_array() && vit->size() == leaves.size(),
                "leaf_values must have one row per leaf");
        std::vector<double> flat;
        flat.reserve(leaves.size() * k * k);
        for (const json& row : *vit) {
            require(row.is_array() && (int)row.size() == k * k,
                    "each leaf_values row must hold k*k samples");
            for (const json& v : row) flat.push_back(num(v, "sample"));
        }
        t.set_all_samples(flat.data());
    }
    t.balance();
    return t;
}

std::string boundary_to_json(const BoundaryLayer& bl) {
    require(bl.segments.size() == bl.density.size(),
            "one density row per segment required");
    json segs = json::array();
    for (const SegmentGeom& s : bl.segments)
        segs.push_back({{"x1", s.x1}, {"x2", s.x2}});
    json coeffs = json::array();
    for (const auto& row : bl.density) coeffs.push_back(row);
    json j{{"order", bl.segments.empty() ? 0 : bl.segments[0].order},
           {"segments", std::move(segs)},
           {"density",
            {{"kind", bl.dipole ? "double" : "single"},
             {"coeffs", std::move(coeffs)}}}};
    return j.dump();
}

BoundaryLayer boundary_from_json(const std::string& text) {
    json j = parse(text);
    BoundaryLayer bl;
    const json& segs = field(j, "segments");
    require(segs.is_array() && !segs.empty(), "segments must be a nonempty array");
    for (const json& s : segs) {
        SegmentGeom g;
        for (const json& v : field(s, "x1")) g.x1.push_back(num(v, "x1"));
        for (const json& v : field(s, "x2")) g.x2.push_back(num(v, "x2"));
        require(!g.x1.empty() && g.x1.size() == g.x2.size(),
                "segment coordinate series must be nonempty and equal length");
        g.order = (int)g.x1.size();
        bl.segments.push_back(std::move(g));
    }
    const json& den = field(j, "density");
    std::string kind = field(den, "kind").get<std::string>();
    require(kind == "single" || kind == "double",
            "density kind must be 'single' or 'double'");
    bl.dipole = kind == "double";
    const json& coeffs = field(den, "coeffs");
    require(coeffs.is_array() && coeffs.size() == bl.segments.size(),
            "one density row per segment required");
    for (const json& row : coeffs) {
        std::vector<double> r;
        for (const json& v : row) r.push_back(num(v, "density coefficient"));
        require(!r.empty(), "density rows must be nonempty");
        bl.density.push_back(std::move(r));
    }
    return bl;
}

void write_fgto(const std::string& path, const double* vals, size_t n) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    uint32_t version = 1;
    uint64_t count = n;
    f.write("FGTO", 4);
    f.write(reinterpret_cast<const char*>(&version), sizeof version);
    f.write(reinterpret_cast<const char*>(&count), sizeof count);
    f.write(reinterpret_cast<const char*>(vals), n * sizeof(double));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_fgto(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    char magic[4];
    uint32_t version = 0;
    uint64_t count = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&version), sizeof version);
    f.read(reinterpret_cast<char*>(&count), sizeof count);
    require(f.good() && std::string(magic, 4) == "FGTO", "not an FGTO file");
    require(version == 1, "unsupported FGTO version");
    require(count < (uint64_t)1 << 32, "FGTO count out of range");
    std::vector<double> vals(count);
    f.read(reinterpret_cast<char*>(vals.data()), count * sizeof(double));
    if (!f) throw std::runtime_error("FGTO file truncated: " + path);
    return vals;
}

void write_csv(const std::string& path, const std::vector<Vec2>& xy,
               const std::vector<double>& vals) {
    require(xy.size() == vals.size(), "coordinate/value count mismatch");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "x,y,value\n";
    char line[96];
    for (size_t i = 0; i < xy.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", xy[i].x,
                      xy[i].y, vals[i]);
        f << line;
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    return text;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace fgt
