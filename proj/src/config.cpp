#include "recur2d/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace recur2d {

namespace {

const Json& empty_object() {
    static const Json e = Json::object();
    return e;
}

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ConfigInvalid, path + ": " + what);
}

std::vector<std::string> split_pair(const std::string& key) {
    const auto comma = key.find(',');
    if (comma == std::string::npos) return {key};
    return {key.substr(0, comma), key.substr(comma + 1)};
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds{"spectral", "llt",        "hirata",      "tau-tail",
                                                "clt",      "qmatrix",    "toy",         "toy-verify",
                                                "planar-prob", "planar-tau", "sampler-build", "accept"};
    return kinds;
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["schema_version"] = schema_version;
    j["kind"] = kind;
    j["seed"] = seed;
    j["workers"] = workers;
    if (!system.is_null()) j["system"] = system;
    j["params"] = params;
    j["tolerances"] = tolerances;
    return j;
}

ExperimentConfig parse_config(const Json& doc) {
    if (!doc.is_object()) invalid("$", "config must be a JSON object");
    ParamReader r(doc, "$");
    ExperimentConfig c;
    c.schema_version = static_cast<int>(r.integer("schema_version"));
    if (c.schema_version != kSchemaVersion)
        invalid("$.schema_version", "unsupported version " + std::to_string(c.schema_version));
    c.kind = r.string("kind");
    bool known = false;
    for (const auto& k : experiment_kinds()) known = known || k == c.kind;
    if (!known) invalid("$.kind", "unknown experiment kind '" + c.kind + "'");
    const auto seed = r.integer("seed", 1);
    if (seed < 0) invalid("$.seed", "seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
    const auto workers = r.integer("workers", 1);
    if (workers < 1 || workers > 1024) invalid("$.workers", "workers must be in 1..1024");
    c.workers = static_cast<unsigned>(workers);
    if (r.has("system")) c.system = r.raw("system");
    if (r.has("params")) {
        c.params = r.raw("params");
        if (!c.params.is_object()) invalid("$.params", "must be an object");
    }
    if (r.has("tolerances")) {
        c.tolerances = r.raw("tolerances");
        if (!c.tolerances.is_object()) invalid("$.tolerances", "must be an object");
    }
    r.finish();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::ConfigInvalid, "cannot open config file " + path);
    Json doc;
    try {
        doc = Json::parse(is);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ConfigInvalid, path + ": " + e.what());
    }
    return parse_config(doc);
}

Window parse_window(const SftSpec& sft, const Json& node, bool two_sided, const std::string& path) {
    if (!node.is_array() || node.empty()) invalid(path, "window must be a nonempty array of symbol names");
    std::vector<Symbol> letters;
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_string()) invalid(path + "[" + std::to_string(i) + "]", "expected a symbol name");
        try {
            letters.push_back(sft.index_of(node[i].get<std::string>()));
        } catch (const Error& e) {
            invalid(path + "[" + std::to_string(i) + "]", e.what());
        }
    }
    if (two_sided && letters.size() % 2 == 0) invalid(path, "two-sided window needs odd length");
    Window w = two_sided ? Window::two_sided(std::move(letters)) : Window::one_sided(std::move(letters));
    if (!w.admissible_in(sft)) invalid(path, "window is not admissible");
    return w;
}

System resolve_system(const Json& node, const std::string& path) {
    try {
        if (node.is_null()) invalid(path, "system is required for this experiment");
        if (node.is_string()) return systems::by_name(node.get<std::string>());
        if (!node.is_object()) invalid(path, "expected a builtin name or an object");
        ParamReader r(node, path);
        if (r.has("builtin")) {
            const std::string name = r.string("builtin");
            r.finish();
            return systems::by_name(name);
        }
        const Json& sym = r.raw("symbols");
        if (!sym.is_array() || sym.empty()) invalid(path + ".symbols", "expected a nonempty array of names");
        std::vector<std::string> names;
        for (const auto& s : sym) {
            if (!s.is_string()) invalid(path + ".symbols", "symbol names must be strings");
            names.push_back(s.get<std::string>());
        }
        const std::size_t n = names.size();
        BoolMatrix m(n);
        if (r.has("transition")) {
            const Json& rows = r.raw("transition");
            if (!rows.is_array() || rows.size() != n) invalid(path + ".transition", "expected " + std::to_string(n) + " rows");
            for (std::size_t a = 0; a < n; ++a) {
                const std::string rp = path + ".transition[" + std::to_string(a) + "]";
                if (!rows[a].is_array() || rows[a].size() != n) invalid(rp, "expected " + std::to_string(n) + " entries");
                for (std::size_t b = 0; b < n; ++b) {
                    const Json& v = rows[a][b];
                    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
                        invalid(rp + "[" + std::to_string(b) + "]", "entries must be 0 or 1");
                    m.set(a, b, v.get<int>() == 1);
                }
            }
        } else {
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) m.set(a, b, true);
        }
        SftSpec sft(names, m);

        PairPotential h = PairPotential::zero(sft);
        if (r.has("potential")) {
            const Json& pot = r.raw("potential");
            if (!pot.is_object()) invalid(path + ".potential", "expected an object keyed by \"a,b\"");
            for (const auto& [key, value] : pot.items()) {
                const std::string kp = path + ".potential[\"" + key + "\"]";
                const auto parts = split_pair(key);
                if (parts.size() != 2) invalid(kp, "keys must be symbol pairs \"a,b\"");
                if (!value.is_number()) invalid(kp, "expected a number");
                Symbol a, b;
                try {
                    a = sft.index_of(parts[0]);
                    b = sft.index_of(parts[1]);
                } catch (const Error& e) {
                    invalid(kp, e.what());
                }
                if (!sft.admissible(a, b)) invalid(kp, "pair is not admissible");
                h.values(a, b) = value.get<double>();
            }
        }

        std::optional<LatticeObservable> phi;
        if (r.has("observable")) {
            const Json& obs = r.raw("observable");
            if (!obs.is_object() || obs.empty()) invalid(path + ".observable", "expected an object");
            bool pairs = false, singles = false;
            std::vector<Vec2i> per_symbol(n), per_pair(n * n);
            std::vector<bool> seen(n, false);
            for (const auto& [key, value] : obs.items()) {
                const std::string kp = path + ".observable[\"" + key + "\"]";
                if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
                    !value[1].is_number_integer())
                    invalid(kp, "expected an integer pair [x, y]");
                const Vec2i v{value[0].get<int>(), value[1].get<int>()};
                const auto parts = split_pair(key);
                try {
                    if (parts.size() == 1) {
                        singles = true;
                        const Symbol a = sft.index_of(parts[0]);
                        per_symbol[a] = v;
                        seen[a] = true;
                    } else {
                        pairs = true;
                        const Symbol a = sft.index_of(parts[0]), b = sft.index_of(parts[1]);
                        if (!sft.admissible(a, b)) invalid(kp, "pair is not admissible");
                        per_pair[a * n + b] = v;
                    }
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::ConfigInvalid) throw;
                    invalid(kp, e.what());
                }
            }
            if (pairs && singles) invalid(path + ".observable", "mixes symbol keys and pair keys");
            if (singles) {
                for (std::size_t a = 0; a < n; ++a)
                    if (!seen[a]) invalid(path + ".observable", "missing value for symbol " + names[a]);
                phi = LatticeObservable::from_symbol_values(sft, per_symbol);
            } else {
                phi = LatticeObservable::from_pairs(sft, per_pair);
            }
        }
        const std::string name = r.has("name") ? r.string("name") : std::string("custom");
        r.finish();
        MarkovMeasure measure = gibbs_from_potential(sft, h);
        return System{name, std::move(h), std::move(measure), std::move(phi)};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigInvalid) throw;
        invalid(path, e.what());
    }
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ParamReader::ParamReader(const Json& node, std::string path) : node_(&node), path_(std::move(path)) {
    if (node.is_null()) node_ = &empty_object();
    else if (!node.is_object()) invalid(path_, "expected an object");
}

const Json* ParamReader::find(const std::string& key) {
    auto it = node_->find(key);
    if (it == node_->end()) return nullptr;
    used_.insert(key);
    return &*it;
}

bool ParamReader::has(const std::string& key) const { return node_->contains(key); }

void ParamReader::fail(const std::string& key, const std::string& what) const { invalid(child_path(key), what); }

const Json& ParamReader::raw(const std::string& key) {
    const Json* v = find(key);
    if (!v) fail(key, "required key is missing");
    return *v;
}

ParamReader ParamReader::child(const std::string& key) {
    const Json* v = find(key);
    return ParamReader(v ? *v : empty_object(), child_path(key));
}

double ParamReader::number(const std::string& key, std::optional<double> fallback) {
    const Json* v = find(key);
    if (!v) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    if (!v->is_number()) fail(key, "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
}

std::int64_t ParamReader::integer(const std::string& key, std::optional<std::int64_t> fallback) {
    const Json* v = find(key);
    if (!v) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    if (v->is_number_integer()) return v->get<std::int64_t>();
    // Accept integral floats such as 1e5.
    if (v->is_number_float()) {
        const double d = v->get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e18) return static_cast<std::int64_t>(d);
    }
    fail(key, "expected an integer");
}

std::string ParamReader::string(const std::string& key, std::optional<std::string> fallback) {
    const Json* v = find(key);
    if (!v) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    if (!v->is_string()) fail(key, "expected a string");
    return v->get<std::string>();
}

bool ParamReader::boolean(const std::string& key, std::optional<bool> fallback) {
    const Json* v = find(key);
    if (!v) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    if (!v->is_boolean()) fail(key, "expected true or false");
    return v->get<bool>();
}

std::vector<double> ParamReader::numbers(const std::string& key, std::optional<std::vector<double>> fallback) {
    const Json* v = find(key);
    if (!v) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    if (!v->is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) invalid(child_path(key) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back((*v)[i].get<double>());
    }
    return out;
}

std::vector<int> ParamReader::integers(const std::string& key, std::optional<std::vector<int>> fallback) {
    const Json* v = find(key);
    if (!v) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    if (!v->is_array()) fail(key, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        const Json& e = (*v)[i];
        if (e.is_number_integer()) out.push_back(e.get<int>());
        else if (e.is_number_float() && e.get<double>() == std::floor(e.get<double>()) && std::abs(e.get<double>()) < 2e9)
            out.push_back(static_cast<int>(e.get<double>()));
        else invalid(child_path(key) + "[" + std::to_string(i) + "]", "expected an integer");
    }
    return out;
}

void ParamReader::finish() const {
    for (const auto& [key, value] : node_->items())
        if (!used_.count(key)) invalid(child_path(key), "unknown key");
}

}  // namespace recur2d
