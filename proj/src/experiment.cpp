#include "anlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace anlab {

std::vector<double> Sweep::values() const {
    const std::size_t n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i) * step;
    return v;
}

namespace {

constexpr std::pair<DesignKind, std::string_view> kDesignNames[] = {
    {DesignKind::TwoPoint, "two_point"},
    {DesignKind::Deterministic, "deterministic"},
    {DesignKind::Gaussian, "gaussian"},
    {DesignKind::UniformPower, "uniform_power"},
    {DesignKind::ExponentialPower, "exponential_power"},
    {DesignKind::None, "none"},
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        auto item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

double parse_real(const std::string& key, const std::string& text) {
    const auto s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw ConfigError("'" + key + "': expected a finite number, got '" + text + "'");
    return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
    const auto s = trim(text);
    // Accept 1e6-style literals for readability, but insist on an exact integer.
    const double v = parse_real(key, s);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
        throw ConfigError("'" + key + "': expected a non-negative integer, got '" + text + "'");
    std::uint64_t n = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return n;
    return static_cast<std::uint64_t>(v);
}

int parse_order(const std::string& key, const std::string& text) {
    const auto n = parse_count(key, text);
    if (n > 1u << 20 || !is_square_qam_order(static_cast<int>(n)))
        throw ConfigError("'" + key + "': M must be 4^k, got '" + text + "'");
    return static_cast<int>(n);
}

using Section = std::map<std::string, std::string>;

struct Reader {
    std::map<std::string, Section> sections;
    std::set<std::string> used;

    const std::string* get(const std::string& section, const std::string& key) {
        const auto s = sections.find(section);
        if (s == sections.end()) return nullptr;
        const auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        used.insert(section + "." + key);
        return &k->second;
    }

    void real(const std::string& section, const std::string& key, double& out) {
        if (const auto* v = get(section, key)) out = parse_real(section + "." + key, *v);
    }

    void count(const std::string& section, const std::string& key, std::uint64_t& out) {
        if (const auto* v = get(section, key)) out = parse_count(section + "." + key, *v);
    }

    void sweep(const std::string& section, const std::string& prefix, Sweep& out) {
        real(section, prefix + "_start", out.start);
        real(section, prefix + "_stop", out.stop);
        real(section, prefix + "_step", out.step);
        const auto name = section + "." + prefix;
        if (!(out.step > 0.0)) throw ConfigError("'" + name + "_step' must be positive");
        if (out.stop < out.start) throw ConfigError("'" + name + "': stop is below start");
        if ((out.stop - out.start) / out.step > 1e6) throw ConfigError("'" + name + "': more than 10^6 points");
    }

    void reject_unused() const {
        for (const auto& [sname, sec] : sections)
            for (const auto& [key, value] : sec)
                if (!used.count(sname + "." + key)) throw ConfigError("unknown key '" + sname + "." + key + "'");
    }
};

const std::set<std::string> kSections{"experiment", "sweep", "channel", "run", "threshold", "ser_curve"};

}  // namespace

std::string_view to_string(DesignKind k) noexcept {
    for (const auto& [kind, name] : kDesignNames)
        if (kind == k) return name;
    return "?";
}

DesignKind parse_design_kind(std::string_view name) {
    for (const auto& [kind, n] : kDesignNames)
        if (n == name) return kind;
    throw ConfigError("unknown design '" + std::string(name) + "'");
}

bool ExperimentSpec::has_design(DesignKind k) const noexcept {
    return std::find(designs.begin(), designs.end(), k) != designs.end();
}

ExperimentSpec parse_experiment(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    Reader r;
    for (const auto& [sname, sec] : tree) {
        if (sec.empty()) throw ConfigError("key '" + sname + "' outside any section");
        if (!kSections.count(sname)) throw ConfigError("unknown section [" + sname + "]");
        for (const auto& [key, value] : sec) r.sections[sname][key] = value.data();
    }

    ExperimentSpec spec;
    if (const auto* v = r.get("experiment", "name")) spec.name = trim(*v);
    if (const auto* v = r.get("experiment", "modulation")) spec.modulation = parse_order("experiment.modulation", *v);
    r.real("experiment", "em_over_n0_db", spec.em_over_n0_db);

    r.sweep("sweep", "ez_over_n0_db", spec.ez_over_n0_db);

    std::string type = "fixed";
    if (const auto* v = r.get("channel", "type")) type = trim(*v);
    if (type == "fixed") {
        FixedChannel ch;
        double hr = 1.0, hi = 0.0, gr = 1.0, gi = 0.0;
        r.real("channel", "h_re", hr);
        r.real("channel", "h_im", hi);
        r.real("channel", "g_re", gr);
        r.real("channel", "g_im", gi);
        ch.h = {hr, hi};
        ch.g = {gr, gi};
        if (std::abs(ch.h) == 0.0) throw ConfigError("channel.h must be non-zero");
        spec.channel = ch;
    } else if (type == "rayleigh") {
        RayleighChannel ch;
        r.real("channel", "sigma_h_sq", ch.sigma_h_sq);
        r.real("channel", "sigma_g_sq", ch.sigma_g_sq);
        if (!(ch.sigma_h_sq > 0.0) || !(ch.sigma_g_sq > 0.0))
            throw ConfigError("channel variances must be positive");
        spec.channel = ch;
    } else {
        throw ConfigError("channel.type must be 'fixed' or 'rayleigh', got '" + type + "'");
    }

    if (const auto* v = r.get("run", "designs")) {
        spec.designs.clear();
        for (const auto& name : split_list(*v)) {
            const auto k = parse_design_kind(name);
            if (!spec.has_design(k)) spec.designs.push_back(k);
        }
        if (spec.designs.empty()) throw ConfigError("run.designs must list at least one design");
    }
    r.count("run", "trials", spec.trials);
    r.count("run", "seed", spec.seed);
    r.count("run", "symbols_per_block", spec.symbols_per_block);
    r.count("run", "instantaneous_draws", spec.instantaneous_draws);
    if (spec.symbols_per_block == 0) throw ConfigError("run.symbols_per_block must be positive");

    if (const auto* v = r.get("threshold", "orders")) {
        spec.threshold_orders.clear();
        for (const auto& item : split_list(*v)) spec.threshold_orders.push_back(parse_order("threshold.orders", item));
        if (spec.threshold_orders.empty()) throw ConfigError("threshold.orders is empty");
    }
    r.sweep("threshold", "a_over_sigma", spec.threshold_a_over_sigma);
    if (!(spec.threshold_a_over_sigma.start > 0.0)) throw ConfigError("threshold.a_over_sigma must be positive");

    if (r.get("ser_curve", "a_over_sigma")) {
        double aos = 0.0;
        r.real("ser_curve", "a_over_sigma", aos);
        if (!(aos > 0.0)) throw ConfigError("ser_curve.a_over_sigma must be positive");
        spec.curve_a_over_sigma = aos;
    }
    r.sweep("ser_curve", "z_over_sigma", spec.curve_z_over_sigma);
    if (spec.curve_z_over_sigma.start < 0.0) throw ConfigError("ser_curve.z_over_sigma must be non-negative");

    r.reject_unused();
    return spec;
}

ExperimentSpec load_experiment(const std::string& path, std::string* raw_text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto text = buf.str();
    auto spec = parse_experiment(text);
    if (raw_text) *raw_text = std::move(text);
    return spec;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string format_number(double v) {
    if (std::isnan(v)) return {};
    if (v == 0.0) return "0";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string{};
}

std::string format_number(std::optional<double> v) { return v ? format_number(*v) : std::string{}; }

std::string_view CsvRow::header() noexcept {
    return "ez_over_n0_db,design,x1,x2,p,phase1,phase2,ser_analytic,ser_sim,ci_half_width,region_label";
}

std::string CsvRow::to_csv() const {
    std::string s = format_number(ez_over_n0_db);
    for (const auto& f : {design, format_number(x1), format_number(x2), format_number(p), phase1, phase2,
                          format_number(ser_analytic), format_number(ser_sim), format_number(ci_half_width),
                          region_label}) {
        s += ',';
        s += f;
    }
    return s;
}

CsvWriter::CsvWriter(std::string_view header) : text_(header) { text_ += '\n'; }

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) text_ += ',';
        text_ += fields[i];
    }
    text_ += '\n';
}

}  // namespace anlab
