#include "chromnet/nn/model_spec.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace chromnet::nn {

const char* to_string(LayerKind k) noexcept {
    switch (k) {
    case LayerKind::input: return "input";
    case LayerKind::dense: return "dense";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool2d: return "maxpool2d";
    case LayerKind::flatten: return "flatten";
    case LayerKind::concat: return "concat";
    case LayerKind::activation: return "activation";
    }
    return "?";
}

const char* to_string(ActivationFn f) noexcept {
    switch (f) {
    case ActivationFn::relu: return "relu";
    case ActivationFn::leaky_relu: return "leaky_relu";
    case ActivationFn::linear: return "linear";
    }
    return "?";
}

namespace {

LayerKind parse_kind(const std::string& s) {
    for (auto k : {LayerKind::input, LayerKind::dense, LayerKind::conv2d, LayerKind::maxpool2d, LayerKind::flatten,
                   LayerKind::concat, LayerKind::activation})
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown layer kind '" + s + "'");
}

ActivationFn parse_fn(const std::string& s) {
    for (auto f : {ActivationFn::relu, ActivationFn::leaky_relu, ActivationFn::linear})
        if (s == to_string(f)) return f;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

int parse_int(const std::string& s) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    return v;
}

double parse_double(const std::string& s) {
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

Extent parse_extent(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos) throw std::invalid_argument("bad extent '" + s + "' (expected HxW)");
    return {parse_int(s.substr(0, x)), parse_int(s.substr(x + 1))};
}

} // namespace

std::vector<Shape> shape_plan(const ModelSpec& spec) {
    if (spec.nodes.empty() || spec.nodes.front().kind != LayerKind::input) {
        throw ShapeError(0, "input", "model must start with an input node");
    }
    if (spec.input.channels < 1 || spec.input.height < 1 || spec.input.width < 1) {
        throw ShapeError(0, "input", "input dimensions must be >= 1");
    }
    std::vector<Shape> out;
    std::vector<int> consumers(spec.nodes.size(), 0);
    out.push_back(spec.input);
    for (int i = 1; i < static_cast<int>(spec.nodes.size()); ++i) {
        const auto& L = spec.nodes[static_cast<std::size_t>(i)];
        auto fail = [&](const std::string& what) { throw ShapeError(i, L.name, what); };
        if (L.kind == LayerKind::input) fail("only node 0 may be an input");
        if (L.inputs.empty()) fail("layer has no inputs");
        for (int in : L.inputs) {
            if (in < 0 || in >= i) fail("input " + std::to_string(in) + " is not an earlier node");
            ++consumers[static_cast<std::size_t>(in)];
        }
        if (L.kind != LayerKind::concat && L.inputs.size() != 1) fail("layer takes exactly one input");
        const Shape in = out[static_cast<std::size_t>(L.inputs.front())];
        Shape s = in;
        switch (L.kind) {
        case LayerKind::input: break;
        case LayerKind::dense:
            if (L.units < 1) fail("units must be >= 1");
            if (!in.flat()) fail("dense input must be flat; add a flatten layer");
            s = {L.units, 1, 1};
            break;
        case LayerKind::conv2d:
            if (L.filters < 1) fail("filters must be >= 1");
            if (L.kernel.h < 1 || L.kernel.w < 1 || L.stride.h < 1 || L.stride.w < 1)
                fail("kernel and stride must be >= 1");
            if (in.height < L.kernel.h || in.width < L.kernel.w) {
                fail("kernel " + std::to_string(L.kernel.h) + "x" + std::to_string(L.kernel.w) +
                     " does not fit input " + std::to_string(in.height) + "x" + std::to_string(in.width));
            }
            s = {L.filters, (in.height - L.kernel.h) / L.stride.h + 1, (in.width - L.kernel.w) / L.stride.w + 1};
            break;
        case LayerKind::maxpool2d:
            if (L.pool < 1) fail("pool must be >= 1");
            s = {in.channels, in.height / L.pool, in.width / L.pool};
            if (s.height < 1 || s.width < 1) {
                fail("pool " + std::to_string(L.pool) + " does not fit input " + std::to_string(in.height) + "x" +
                     std::to_string(in.width));
            }
            break;
        case LayerKind::flatten: s = {static_cast<int>(in.size()), 1, 1}; break;
        case LayerKind::concat: {
            int total = 0;
            for (int src : L.inputs) {
                const Shape& p = out[static_cast<std::size_t>(src)];
                if (!p.flat()) fail("concat inputs must be flat");
                total += p.channels;
            }
            s = {total, 1, 1};
            break;
        }
        case LayerKind::activation:
            if (L.fn == ActivationFn::leaky_relu && !(L.alpha >= 0)) fail("leaky_relu alpha must be >= 0");
            break;
        }
        out.push_back(s);
    }
    const int last = static_cast<int>(spec.nodes.size()) - 1;
    const auto& tail = spec.nodes.back();
    if (last == 0 || tail.kind != LayerKind::dense || tail.units != 1) {
        throw ShapeError(last, tail.name, "output must be a dense layer with a single unit");
    }
    for (int i = 0; i < last; ++i) {
        if (consumers[static_cast<std::size_t>(i)] == 0) {
            throw ShapeError(i, spec.nodes[static_cast<std::size_t>(i)].name, "node output is never used");
        }
    }
    return out;
}

ModelBuilder::ModelBuilder(std::string model_name, Shape input) {
    spec_.name = std::move(model_name);
    spec_.input = input;
    LayerSpec in;
    in.kind = LayerKind::input;
    in.name = "input";
    spec_.nodes.push_back(in);
}

int ModelBuilder::add(LayerSpec layer) {
    const int id = static_cast<int>(spec_.nodes.size());
    if (layer.name.empty()) layer.name = std::string(to_string(layer.kind)) + "_" + std::to_string(id);
    spec_.nodes.push_back(std::move(layer));
    return id;
}

int ModelBuilder::conv2d(int in, int filters, Extent kernel, Extent stride, std::string name) {
    LayerSpec L;
    L.kind = LayerKind::conv2d;
    L.name = std::move(name);
    L.inputs = {in};
    L.filters = filters;
    L.kernel = kernel;
    L.stride = stride;
    return add(std::move(L));
}

int ModelBuilder::maxpool2d(int in, int pool, std::string name) {
    LayerSpec L;
    L.kind = LayerKind::maxpool2d;
    L.name = std::move(name);
    L.inputs = {in};
    L.pool = pool;
    return add(std::move(L));
}

int ModelBuilder::activation(int in, ActivationFn fn, double alpha, std::string name) {
    LayerSpec L;
    L.kind = LayerKind::activation;
    L.name = std::move(name);
    L.inputs = {in};
    L.fn = fn;
    L.alpha = alpha;
    return add(std::move(L));
}

int ModelBuilder::flatten(int in, std::string name) {
    LayerSpec L;
    L.kind = LayerKind::flatten;
    L.name = std::move(name);
    L.inputs = {in};
    return add(std::move(L));
}

int ModelBuilder::concat(std::vector<int> ins, std::string name) {
    LayerSpec L;
    L.kind = LayerKind::concat;
    L.name = std::move(name);
    L.inputs = std::move(ins);
    return add(std::move(L));
}

int ModelBuilder::dense(int in, int units, std::string name) {
    LayerSpec L;
    L.kind = LayerKind::dense;
    L.name = std::move(name);
    L.inputs = {in};
    L.units = units;
    return add(std::move(L));
}

ModelSpec ModelBuilder::build() const {
    shape_plan(spec_);
    return spec_;
}

std::string to_text(const ModelSpec& spec) {
    std::ostringstream os;
    os << "chromnet-architecture 1\n";
    os << "model " << spec.name << '\n';
    os << "input " << spec.input.channels << ' ' << spec.input.height << ' ' << spec.input.width << '\n';
    for (std::size_t i = 1; i < spec.nodes.size(); ++i) {
        const auto& L = spec.nodes[i];
        os << "layer " << i << " name=" << L.name << " kind=" << to_string(L.kind) << " in=";
        for (std::size_t k = 0; k < L.inputs.size(); ++k) os << (k ? "," : "") << L.inputs[k];
        switch (L.kind) {
        case LayerKind::dense: os << " units=" << L.units; break;
        case LayerKind::conv2d:
            os << " filters=" << L.filters << " kernel=" << L.kernel.h << 'x' << L.kernel.w << " stride=" << L.stride.h
               << 'x' << L.stride.w;
            break;
        case LayerKind::maxpool2d: os << " pool=" << L.pool; break;
        case LayerKind::activation:
            os << " fn=" << to_string(L.fn);
            if (L.fn == ActivationFn::leaky_relu) os << " alpha=" << format_double(L.alpha);
            break;
        default: break;
        }
        os << '\n';
    }
    return os.str();
}

ModelSpec parse_model_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    ModelSpec spec;
    bool header = false;
    bool have_input = false;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        auto fail = [&](const std::string& what) {
            throw std::invalid_argument("architecture line " + std::to_string(line_no) + ": " + what);
        };
        if (!header) {
            int version = 0;
            ls >> version;
            if (head != "chromnet-architecture" || version != 1) fail("expected 'chromnet-architecture 1'");
            header = true;
        } else if (head == "model") {
            ls >> spec.name;
        } else if (head == "input") {
            if (!(ls >> spec.input.channels >> spec.input.height >> spec.input.width)) fail("bad input line");
            LayerSpec in;
            in.kind = LayerKind::input;
            in.name = "input";
            spec.nodes.push_back(in);
            have_input = true;
        } else if (head == "layer") {
            if (!have_input) fail("layer before input");
            std::size_t index = 0;
            ls >> index;
            if (index != spec.nodes.size()) fail("layers must be numbered consecutively");
            std::map<std::string, std::string> kv;
            std::string tok;
            while (ls >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) fail("expected key=value, got '" + tok + "'");
                kv[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            auto get = [&](const std::string& key) -> const std::string& {
                const auto it = kv.find(key);
                if (it == kv.end()) fail("missing key '" + key + "'");
                return it->second;
            };
            LayerSpec L;
            L.name = get("name");
            L.kind = parse_kind(get("kind"));
            std::istringstream ins(get("in"));
            std::string part;
            while (std::getline(ins, part, ',')) L.inputs.push_back(parse_int(part));
            switch (L.kind) {
            case LayerKind::dense: L.units = parse_int(get("units")); break;
            case LayerKind::conv2d:
                L.filters = parse_int(get("filters"));
                L.kernel = parse_extent(get("kernel"));
                L.stride = parse_extent(get("stride"));
                break;
            case LayerKind::maxpool2d: L.pool = parse_int(get("pool")); break;
            case LayerKind::activation:
                L.fn = parse_fn(get("fn"));
                if (L.fn == ActivationFn::leaky_relu) L.alpha = parse_double(get("alpha"));
                break;
            default: break;
            }
            spec.nodes.push_back(std::move(L));
        } else {
            fail("unknown directive '" + head + "'");
        }
    }
    if (!have_input) throw std::invalid_argument("architecture has no input line");
    shape_plan(spec);
    return spec;
}

std::uint64_t spec_hash(const ModelSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_text(spec)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::size_t parameter_count(const ModelSpec& spec) {
    const auto shapes = shape_plan(spec);
    std::size_t n = 0;
    for (std::size_t i = 1; i < spec.nodes.size(); ++i) {
        const auto& L = spec.nodes[i];
        const Shape& in = shapes[static_cast<std::size_t>(L.inputs.front())];
        if (L.kind == LayerKind::dense) {
            n += static_cast<std::size_t>(L.units) * (in.size() + 1);
        } else if (L.kind == LayerKind::conv2d) {
            n += static_cast<std::size_t>(L.filters) *
                 (static_cast<std::size_t>(in.channels) * L.kernel.h * L.kernel.w + 1);
        }
    }
    return n;
}

} // namespace chromnet::nn
