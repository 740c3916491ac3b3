#include "semiflow/scenario.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semiflow/error.hpp"

namespace semiflow {

namespace {

struct Call {
    std::string head;
    std::vector<std::string> args;
};

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// "name" or "name(a, b, ...)"
Call parse_call(const std::string& text) {
    const std::string s = trim(text);
    Call c;
    const auto open = s.find('(');
    if (open == std::string::npos) {
        c.head = s;
    } else {
        if (s.back() != ')') throw InvalidInput("expected ')' at the end of '" + s + "'");
        c.head = trim(s.substr(0, open));
        const std::string inner = s.substr(open + 1, s.size() - open - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) c.args.push_back(trim(item));
        if (!inner.empty() && inner.back() == ',') throw InvalidInput("trailing ',' in '" + s + "'");
    }
    if (c.head.empty()) throw InvalidInput("missing name in '" + s + "'");
    return c;
}

double number(const std::string& text, const std::string& context) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InvalidInput(context + ": '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(v)) throw InvalidInput(context + ": '" + text + "' is not a number");
    return v;
}

void arity(const Call& c, std::size_t lo, std::size_t hi, const std::string& what) {
    if (c.args.size() < lo || c.args.size() > hi) {
        std::ostringstream msg;
        msg << what << " '" << c.head << "' takes ";
        if (lo == hi) {
            msg << lo;
        } else {
            msg << lo << " to " << hi;
        }
        msg << " argument(s), got " << c.args.size();
        throw InvalidInput(msg.str());
    }
}

Cocycle closed_gallery(const std::string& name, const std::vector<std::string>& args) {
    if (args.size() != 1) throw InvalidInput("cocycle '" + name + "' takes 1 argument");
    const double c = number(args[0], name);
    if (name == "exp_time") return gallery::exp_time(c);
    if (name == "exp_cayley") return gallery::exp_cayley(c);
    throw InvalidInput("unknown closed-form cocycle '" + name + "'");
}

}  // namespace

Semiflow parse_flow(const std::string& text) {
    const Call c = parse_call(text);
    if (c.head == "dilation") {
        arity(c, 0, 0, "flow");
        return gallery::dilation();
    }
    if (c.head == "rotation") {
        arity(c, 1, 1, "flow");
        return gallery::rotation(number(c.args[0], "rotation"));
    }
    if (c.head == "attraction") {
        arity(c, 0, 0, "flow");
        return gallery::attraction();
    }
    if (c.head == "identity") {
        arity(c, 0, 0, "flow");
        return gallery::identity();
    }
    if (c.head == "translation") {
        arity(c, 0, 0, "flow");
        return gallery::translation();
    }
    if (c.head == "generator") {
        if (c.args.empty()) throw InvalidInput("flow 'generator' needs a generator name");
        const std::string& g = c.args[0];
        if (g == "linear") {
            arity(c, 3, 3, "flow");
            const cplx k(number(c.args[1], "generator"), number(c.args[2], "generator"));
            if (k.real() > 0.0) throw InvalidInput("generator(linear): Re c must be <= 0 for a flow of the disk");
            return Semiflow::generator_driven(trim(text), gallery::linear_generator(k), {}, {cplx(0.0)});
        }
        if (g == "attraction") {
            arity(c, 1, 1, "flow");
            return Semiflow::generator_driven(trim(text), gallery::attraction_generator());
        }
        throw InvalidInput("unknown generator '" + g + "'");
    }
    throw InvalidInput("unknown flow '" + c.head + "'");
}

Cocycle parse_cocycle(const std::string& text, const Semiflow& flow) {
    const Call c = parse_call(text);
    if (c.head == "derivative") {
        arity(c, 0, 1, "cocycle");
        return c.args.empty() ? Cocycle::derivative(flow) : Cocycle::derivative(flow, number(c.args[0], "derivative"));
    }
    if (c.head == "exp_time" || c.head == "exp_cayley") return closed_gallery(c.head, c.args);
    if (c.head == "closed") {
        if (c.args.empty()) throw InvalidInput("cocycle 'closed' needs a name");
        return closed_gallery(c.args[0], {c.args.begin() + 1, c.args.end()});
    }
    if (c.head == "coboundary") {
        arity(c, 2, 2, "cocycle");
        const std::string& w = c.args[0];
        const double v = number(c.args[1], "coboundary");
        if (w == "monomial") {
            if (v < 0.0 || v != std::floor(v)) throw InvalidInput("coboundary(monomial, n): n must be a nonnegative integer");
            const int n = static_cast<int>(v);
            std::vector<cplx> zeros;
            if (n > 0) zeros.push_back(0.0);
            return make_coboundary(trim(text), gallery::monomial_weight(n), flow, zeros);
        }
        if (w == "one_minus_power") return make_coboundary(trim(text), gallery::one_minus_power(v), flow, {});
        if (w == "exponential") return make_coboundary(trim(text), exponential(v), flow, {});
        throw InvalidInput("unknown coboundary function '" + w + "'");
    }
    throw InvalidInput("unknown cocycle '" + c.head + "'");
}

void check_format(const std::string& format) {
    if (format != "json" && format != "csv" && format != "both") {
        throw InvalidInput("format must be json, csv or both, not '" + format + "'");
    }
}

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("scenario: ") + e.what());
    }
    if (!j.is_object()) throw InvalidInput("scenario: expected a JSON object");
    static const std::set<std::string> known = {"name", "flow", "cocycle", "space", "t_grid", "tolerance", "seed",
                                                "scan", "decay", "bundle", "output"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw InvalidInput("scenario: unknown key '" + key + "'");
    }
    auto section = [&](const char* key, const std::set<std::string>& fields) -> const json* {
        if (!j.contains(key)) return nullptr;
        const json& s = j.at(key);
        if (!s.is_object()) throw InvalidInput(std::string("scenario: '") + key + "' must be an object");
        for (const auto& [k, v] : s.items()) {
            if (!fields.count(k)) throw InvalidInput(std::string("scenario: unknown key '") + key + "." + k + "'");
        }
        return &s;
    };
    Scenario sc;
    try {
        if (j.contains("name")) sc.name = j.at("name").get<std::string>();
        if (j.contains("flow")) sc.flow = j.at("flow").get<std::string>();
        if (j.contains("cocycle")) sc.cocycle = j.at("cocycle").get<std::string>();
        if (j.contains("space")) sc.space = j.at("space").get<std::string>();
        if (j.contains("t_grid")) sc.t_grid = j.at("t_grid").get<std::vector<double>>();
        if (j.contains("tolerance")) sc.tolerance = j.at("tolerance").get<double>();
        if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
        if (const json* s = section("scan", {"angles", "refine_rounds"})) {
            if (s->contains("angles")) sc.scan_angles = s->at("angles").get<int>();
            if (s->contains("refine_rounds")) sc.scan_refine_rounds = s->at("refine_rounds").get<int>();
        }
        if (const json* s = section("decay", {"family_size"})) {
            if (s->contains("family_size")) sc.family_size = s->at("family_size").get<int>();
        }
        if (const json* s = section("bundle", {"path", "N"})) {
            if (s->contains("path")) {
                const std::filesystem::path p = s->at("path").get<std::string>();
                sc.bundle_path = (p.is_absolute() ? p : std::filesystem::path(base_dir) / p).string();
            }
            if (s->contains("N")) sc.bundle_n = s->at("N").get<std::size_t>();
        }
        if (const json* s = section("output", {"dir", "format"})) {
            if (s->contains("dir")) sc.out_dir = s->at("dir").get<std::string>();
            if (s->contains("format")) sc.format = s->at("format").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("scenario: ") + e.what());
    }
    if (!(sc.tolerance > 0.0)) throw InvalidInput("scenario: tolerance must be positive");
    if (sc.scan_angles < 1 || sc.scan_refine_rounds < 0) throw InvalidInput("scenario: bad scan settings");
    if (sc.family_size < 1) throw InvalidInput("scenario: decay.family_size must be >= 1");
    if (sc.bundle_n < 2) throw InvalidInput("scenario: bundle.N must be >= 2");
    if (sc.t_grid) {
        for (double t : *sc.t_grid) {
            if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("scenario: t_grid must lie in [0, inf)");
        }
    }
    check_format(sc.format);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace semiflow
