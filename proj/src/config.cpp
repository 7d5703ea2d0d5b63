#include "stereopipe/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace stereopipe {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(const std::string& context, const std::string& what) {
    throw ConfigError(context + ": " + what);
}

long long parse_int(std::string_view v, const std::string& ctx) {
    long long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        fail(ctx, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

double parse_double(std::string_view v, const std::string& ctx) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        fail(ctx, "expected a number, got '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view v, const std::string& ctx) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    fail(ctx, "expected a boolean, got '" + std::string(v) + "'");
}

int checked_int(std::string_view v, long long lo, long long hi, const std::string& ctx) {
    long long n = parse_int(v, ctx);
    if (n < lo || n > hi) {
        std::ostringstream msg;
        msg << "value " << n << " outside [" << lo << ", " << hi << "]";
        fail(ctx, msg.str());
    }
    return static_cast<int>(n);
}

FixedDisparity parse_pixels(std::string_view v, const std::string& ctx) {
    double px = parse_double(v, ctx);
    try {
        return pixels_to_disparity(px);
    } catch (const std::invalid_argument& e) {
        fail(ctx, e.what());
    }
}

}  // namespace

void apply_config_key(PipelineConfig& cfg, std::string_view key, std::string_view value,
                      const std::string& context) {
    const std::string ctx = context + " (key '" + std::string(key) + "')";

    if (key == "P1") {
        cfg.match.penalty_small = static_cast<std::uint16_t>(checked_int(value, 1, 0xFFFE, ctx));
    } else if (key == "P2") {
        cfg.match.penalty_large = static_cast<std::uint16_t>(checked_int(value, 1, 0xFFFE, ctx));
    } else if (key == "o_d") {
        cfg.match.disparity_offset = checked_int(value, 0, 4095, ctx);
    } else if (key == "n_i") {
        cfg.match.iterations = checked_int(value, 1, 256, ctx);
    } else if (key == "p") {
        int p = checked_int(value, 16, 32, ctx);
        if (p != 16 && p != 32) fail(ctx, "parallelism must be 16 or 32");
        cfg.set_profile(p == 16 ? Profile::base : Profile::pro);
    } else if (key == "profile") {
        if (value == "base")
            cfg.set_profile(Profile::base);
        else if (value == "pro")
            cfg.set_profile(Profile::pro);
        else
            fail(ctx, "profile must be 'base' or 'pro'");
    } else if (key == "q") {
        double q = parse_double(value, ctx);
        try {
            cfg.post.set_uniqueness(q);
        } catch (const std::invalid_argument& e) {
            fail(ctx, e.what());
        }
    } else if (key == "t_c") {
        if (value == "inf")
            cfg.post.consistency_threshold = kConsistencyDisabled;
        else
            cfg.post.consistency_threshold = checked_int(value, 0, 4096, ctx);
    } else if (key == "t_t") {
        long long t = parse_int(value, ctx);
        if (t < 0 || t > std::numeric_limits<std::uint32_t>::max())
            fail(ctx, "texture threshold out of range");
        cfg.filter.texture_threshold = static_cast<std::uint32_t>(t);
    } else if (key == "w_s") {
        cfg.filter.speckle_window = checked_int(value, 0, 1 << 20, ctx);
    } else if (key == "l_max") {
        cfg.filter.max_gap = checked_int(value, 0, kMaxImageDim, ctx);
    } else if (key == "texture_window") {
        cfg.filter.texture_window = checked_int(value, 3, 99, ctx);
    } else if (key == "speckle_max_diff") {
        cfg.filter.speckle_max_diff = parse_pixels(value, ctx);
    } else if (key == "gap_similarity") {
        cfg.filter.gap_similarity = parse_pixels(value, ctx);
    } else if (key == "median_min_valid") {
        cfg.filter.median_min_valid = checked_int(value, 1, 9, ctx);
    } else if (key == "uniqueness_exclude_neighbors") {
        cfg.post.uniqueness_exclude_neighbors = parse_bool(value, ctx);
    } else if (key == "threads") {
        cfg.threads = checked_int(value, 0, 1 << 16, ctx);
    } else if (key == "rectify") {
        cfg.stages.rectification = parse_bool(value, ctx);
    } else if (key == "map") {
        cfg.map_path = std::string(value);
    } else if (key == "uniqueness") {
        cfg.stages.uniqueness = parse_bool(value, ctx);
    } else if (key == "consistency") {
        cfg.stages.consistency = parse_bool(value, ctx);
    } else if (key == "texture") {
        cfg.stages.texture = parse_bool(value, ctx);
    } else if (key == "speckle") {
        cfg.stages.speckle = parse_bool(value, ctx);
    } else if (key == "gap") {
        cfg.stages.gap = parse_bool(value, ctx);
    } else if (key == "noise") {
        cfg.stages.noise = parse_bool(value, ctx);
    } else {
        fail(ctx, "unknown key");
    }
}

void apply_config_text(PipelineConfig& cfg, std::string_view text, const std::string& source) {
    int line_no = 0;
    while (!text.empty()) {
        std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;

        if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string ctx = source + ":" + std::to_string(line_no);
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(ctx, "expected key = value");
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail(ctx, "empty key");
        apply_config_key(cfg, key, value, ctx);
    }
}

void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str(), path);
}

std::string config_keys_help() {
    return "P1                       small-step smoothness penalty (default 10)\n"
           "P2                       large-step smoothness penalty (default 120)\n"
           "o_d                      disparity offset, first searched disparity (default 0)\n"
           "n_i                      correlation iterations (default 4)\n"
           "p                        disparities per iteration, 16 or 32 (default 32)\n"
           "profile                  'base' (p=16) or 'pro' (p=32)\n"
           "q                        uniqueness factor >= 1 (default 1.5)\n"
           "t_c                      consistency threshold in px, or 'inf' (default 1)\n"
           "t_t                      texture threshold, 0 disables (default 40)\n"
           "w_s                      speckle minimum population, 0 disables (default 50)\n"
           "l_max                    largest interpolated gap, 0 disables (default 5)\n"
           "texture_window           texture filter window, odd (default 5)\n"
           "speckle_max_diff         speckle adjacency tolerance in px (default 1.0)\n"
           "gap_similarity           gap edge agreement in px (default 1.0)\n"
           "median_min_valid         valid pixels a median needs (default 5)\n"
           "uniqueness_exclude_neighbors  bool (default true)\n"
           "threads                  worker threads, 0 = auto (default 1)\n"
           "rectify                  bool, enable rectification (default false)\n"
           "map                      rectification map path\n"
           "uniqueness, consistency, texture, speckle, gap, noise\n"
           "                         per-stage enable switches (default true)\n";
}

}  // namespace stereopipe
