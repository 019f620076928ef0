#include "seq2form/configfile.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "seq2form/rng.hpp"

namespace s2f {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: " + key + " must be true/false, got " + value);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value, got \"" + stripped + "\"");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        }
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_config: cannot open " + path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_config_text(buffer.str());
}

void apply_config(TrainConfig& config, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        try {
            if (key == "d") config.d = std::stoi(value);
            else if (key == "emb_dim") config.emb_dim = std::stoi(value);
            else if (key == "epochs") config.epochs = std::stoi(value);
            else if (key == "lr0") config.lr0 = std::stod(value);
            else if (key == "lr_halve_every") config.lr_halve_every = std::stoi(value);
            else if (key == "init_range") config.init_range = std::stod(value);
            else if (key == "seed") config.seed = std::stoull(value);
            else if (key == "cache_fn") config.cache_fn = value;
            else if (key == "use_cache_segment") config.use_cache_segment = parse_bool(key, value);
            else if (key == "double_gate_f6") config.double_gate_f6 = parse_bool(key, value);
            else if (key == "clip") config.clip = std::stod(value);
            else if (key == "max_len") config.max_len = std::stoi(value);
            else if (key == "run_dir") config.run_dir = value;
            else throw std::invalid_argument("config: unknown key " + key);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad value for " + key + ": " + value);
        }
    }
}

std::string dump_config(const TrainConfig& config) {
    std::ostringstream os;
    os << "cache_fn = " << config.cache_fn << "\n"
       << "clip = " << config.clip << "\n"
       << "d = " << config.d << "\n"
       << "double_gate_f6 = " << (config.double_gate_f6 ? "true" : "false") << "\n"
       << "emb_dim = " << config.emb_dim << "\n"
       << "epochs = " << config.epochs << "\n"
       << "init_range = " << config.init_range << "\n"
       << "lr0 = " << config.lr0 << "\n"
       << "lr_halve_every = " << config.lr_halve_every << "\n"
       << "max_len = " << config.max_len << "\n"
       << "seed = " << config.seed << "\n"
       << "use_cache_segment = " << (config.use_cache_segment ? "true" : "false") << "\n";
    return os.str();
}

std::string config_hash(const TrainConfig& config) {
    std::uint64_t h = fnv1a64(dump_config(config));
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace s2f
