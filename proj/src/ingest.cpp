#include "resdn/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include <fmt/format.h>

namespace resdn {
namespace {

bool valid_id(std::string_view id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n\v\f";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view s) {
    auto hash = s.find('#');
    return hash == std::string_view::npos ? s : s.substr(0, hash);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

Rational parse_number(std::string_view token, int line, std::string_view what) {
    try {
        return Rational::parse(token);
    } catch (const std::exception&) {
        throw InputError(line, fmt::format("invalid {} '{}'", what, token));
    }
}

std::string printable(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (c >= 0x20 && c < 0x7f)
            out += static_cast<char>(c);
        else
            out += fmt::format("\\x{:02x}", c);
    }
    return out;
}

}  // namespace

Rational TrafficMatrix::total_rate() const {
    Rational total;
    for (const auto& e : entries) total += e.rate;
    return total;
}

TopologyDescription parse_topology(std::string_view text) {
    TopologyDescription description;
    std::vector<std::string> seen_nodes;
    std::vector<std::pair<std::string, std::string>> seen_links;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        int line = static_cast<int>(i) + 1;
        auto tokens = split_ws(trim(strip_comment(lines[i])));
        if (tokens.empty()) continue;
        if (tokens[0] == "node") {
            if (tokens.size() != 2) throw InputError(line, "syntax error: expected 'node <id>'");
            if (!valid_id(tokens[1]))
                throw InputError(line, fmt::format("syntax error: invalid id '{}'", printable(tokens[1])));
            std::string name(tokens[1]);
            if (std::find(seen_nodes.begin(), seen_nodes.end(), name) != seen_nodes.end())
                throw InputError(line, fmt::format("duplicate node '{}'", name));
            seen_nodes.push_back(name);
            description.nodes.push_back({name, line});
        } else if (tokens[0] == "link") {
            if (tokens.size() != 4)
                throw InputError(line, "syntax error: expected 'link <id> <id> <bandwidth_mbps>'");
            for (int k = 1; k <= 2; ++k) {
                if (!valid_id(tokens[k]))
                    throw InputError(line, fmt::format("syntax error: invalid id '{}'", printable(tokens[k])));
            }
            std::string a(tokens[1]);
            std::string b(tokens[2]);
            if (a == b) throw InputError(line, fmt::format("self-loop on '{}'", a));
            Rational bandwidth = parse_number(tokens[3], line, "bandwidth");
            if (!bandwidth.is_positive())
                throw InputError(line, fmt::format("non-positive bandwidth '{}'", tokens[3]));
            std::pair<std::string, std::string> key = std::minmax(a, b);
            if (std::find(seen_links.begin(), seen_links.end(), key) != seen_links.end())
                throw InputError(line, fmt::format("duplicate link {}-{}", a, b));
            seen_links.push_back(key);
            description.links.push_back({a, b, bandwidth, line});
        } else {
            throw InputError(line, fmt::format("syntax error: unknown directive '{}'", printable(tokens[0])));
        }
    }
    return description;
}

TrafficMatrix parse_traffic_matrix(std::string_view text) {
    TrafficMatrix matrix;
    auto lines = split_lines(text);
    bool first_content = true;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        int line = static_cast<int>(i) + 1;
        auto content = trim(strip_comment(lines[i]));
        if (content.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            auto comma = content.find(',', start);
            fields.push_back(trim(content.substr(start, comma == std::string_view::npos ? comma : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 3)
            throw InputError(line, fmt::format("syntax error: expected 'src,dst,rate_mbps', got {} fields",
                                               fields.size()));
        // A header is a first content line whose rate column is not numeric.
        if (std::exchange(first_content, false)) {
            try {
                (void)Rational::parse(fields[2]);
            } catch (const std::exception&) {
                continue;
            }
        }
        for (int k = 0; k < 2; ++k) {
            if (!valid_id(fields[k]))
                throw InputError(line, fmt::format("syntax error: invalid id '{}'", printable(fields[k])));
        }
        Rational rate = parse_number(fields[2], line, "rate");
        if (rate.is_negative()) throw InputError(line, fmt::format("negative rate '{}'", fields[2]));
        if (rate.is_zero()) continue;
        matrix.entries.push_back({std::string(fields[0]), std::string(fields[1]), rate, line});
    }
    return matrix;
}

FlowSet bind_flows(const TrafficMatrix& matrix, const Topology& topology) {
    FlowSet flows;
    flows.reserve(matrix.entries.size());
    for (const auto& e : matrix.entries) {
        auto src = topology.find(e.source);
        auto dst = topology.find(e.destination);
        if (!src) throw InputError(e.line, fmt::format("unknown node '{}'", e.source));
        if (!dst) throw InputError(e.line, fmt::format("unknown node '{}'", e.destination));
        if (*src == *dst) throw InputError(e.line, fmt::format("flow source equals destination ('{}')", e.source));
        flows.push_back({*src, *dst, e.rate});
    }
    return flows;
}

Rational traffic_volume(const TrafficMatrix& matrix, const Topology& topology) {
    return matrix.total_rate() / topology.directed_capacity();
}

TrafficMatrix scale_to_volume(const TrafficMatrix& matrix, const Topology& topology, const Rational& target) {
    if (matrix.entries.empty()) throw std::invalid_argument("nothing to scale: empty traffic matrix");
    if (!target.is_positive() || target > Rational(1))
        throw std::invalid_argument(fmt::format("target volume {} outside (0, 1]", target.to_double()));
    if (topology.link_count() == 0) throw std::invalid_argument("nothing to scale: topology has no links");
    Rational factor = target * topology.directed_capacity() / matrix.total_rate();
    TrafficMatrix scaled = matrix;
    for (auto& e : scaled.entries) e.rate *= factor;
    return scaled;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string format_topology(const Topology& topology) {
    std::string out;
    for (std::uint32_t s = 0; s < topology.switch_count(); ++s)
        out += fmt::format("node {}\n", topology.name(SwitchId{s}));
    for (std::uint32_t l = 0; l < topology.link_count(); ++l) {
        const Link& link = topology.link(LinkId{l});
        out += fmt::format("link {} {} {}\n", topology.name(link.a), topology.name(link.b),
                           link.bandwidth.to_string());
    }
    return out;
}

std::string format_traffic_matrix(const TrafficMatrix& matrix) {
    std::string out = "src,dst,rate_mbps\n";
    for (const auto& e : matrix.entries) {
        // Rates are written as exact decimals when the denominator allows it.
        Rational r = e.rate;
        std::string rate;
        std::int64_t scale = 1;
        int digits = 0;
        while (digits <= 12) {
            Rational scaled = r * Rational(scale);
            if (scaled.den() == 1) {
                std::int64_t whole = scaled.num() / scale;
                std::int64_t frac = scaled.num() % scale;
                rate = digits == 0 ? fmt::format("{}", whole) : fmt::format("{}.{:0{}}", whole, frac, digits);
                break;
            }
            scale *= 10;
            ++digits;
        }
        if (rate.empty()) rate = r.to_string();
        out += fmt::format("{},{},{}\n", e.source, e.destination, rate);
    }
    return out;
}

TrafficMatrix generate_traffic_matrix(const Topology& topology, std::uint64_t seed, const TrafficGenerator& options) {
    if (topology.switch_count() < 2) throw std::invalid_argument("need at least two switches for traffic");
    if (options.min_flows > options.max_flows) throw std::invalid_argument("min_flows > max_flows");
    std::mt19937_64 rng(seed);
    std::size_t n = topology.switch_count();
    std::size_t pairs = n * (n - 1);
    std::uniform_int_distribution<std::size_t> count_dist(std::min(options.min_flows, pairs),
                                                          std::min(options.max_flows, pairs));
    std::size_t count = count_dist(rng);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
    all.reserve(pairs);
    for (std::uint32_t s = 0; s < n; ++s)
        for (std::uint32_t d = 0; d < n; ++d)
            if (s != d) all.emplace_back(s, d);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(count);

    // Mean of lognormal(mu, sigma) is exp(mu + sigma^2 / 2).
    double mu = std::log(options.mean_rate_mbps) - options.sigma * options.sigma / 2.0;
    std::lognormal_distribution<double> rate_dist(mu, options.sigma);

    TrafficMatrix matrix;
    int line = 2;
    for (auto [s, d] : all) {
        auto cents = static_cast<std::int64_t>(std::llround(rate_dist(rng) * 100.0));
        cents = std::max<std::int64_t>(cents, 1);
        matrix.entries.push_back({topology.name(SwitchId{s}), topology.name(SwitchId{d}), Rational(cents, 100), line++});
    }
    return matrix;
}

}  // namespace resdn
