#include "fuseplan/workloads.hpp"

#include <json.hpp>

#include "fuseplan/layer.hpp"

namespace fuseplan {

namespace {

using nlohmann::json;

/// Incremental descriptor builder used by the bundled network definitions.
class Builder {
  public:
    explicit Builder(std::string name) { doc_["name"] = std::move(name); }

    void input(const std::string& id, int64_t c, int64_t h, int64_t w) {
        doc_["inputs"][id] = {c, h, w};
    }

    std::string conv(const std::string& id, const std::string& from, int64_t out_ch, int64_t k,
                     int64_t stride, int64_t pad) {
        layer(id, "conv", k, stride, pad, out_ch);
        if (!from.empty()) edge(from, id);
        return id;
    }
    std::string pointwise(const std::string& id, const std::string& from, int64_t out_ch,
                          int64_t stride = 1, int64_t pad = 0) {
        layer(id, "pointwise_conv", 1, stride, pad, out_ch);
        if (!from.empty()) edge(from, id);
        return id;
    }
    std::string depthwise(const std::string& id, const std::string& from, int64_t k,
                          int64_t stride, int64_t pad) {
        layer(id, "depthwise_conv", k, stride, pad, 0);
        if (!from.empty()) edge(from, id);
        return id;
    }
    std::string pool(const std::string& id, const std::string& from, const char* kind, int64_t k,
                     int64_t stride, int64_t pad) {
        layer(id, kind, k, stride, pad, 0);
        if (!from.empty()) edge(from, id);
        return id;
    }
    std::string add(const std::string& id, const std::string& a, const std::string& b) {
        layer(id, "elementwise_add", 1, 1, 0, 0);
        edge(a, id);
        edge(b, id);
        return id;
    }
    std::string concat(const std::string& id, const std::string& a, const std::string& b) {
        layer(id, "concat", 1, 1, 0, 0);
        edge(a, id);
        edge(b, id);
        return id;
    }
    void edge(const std::string& from, const std::string& to) {
        doc_["edges"].push_back({from, to});
    }

    std::string str() const { return doc_.dump(2) + "\n"; }

  private:
    void layer(const std::string& id, const char* kind, int64_t k, int64_t stride, int64_t pad,
               int64_t out_ch) {
        json l;
        l["id"] = id;
        l["kind"] = kind;
        l["kernel"] = {k, k};
        l["stride"] = {stride, stride};
        l["pad"] = {pad, pad};
        if (out_ch > 0) l["out_channels"] = out_ch;
        doc_["layers"].push_back(l);
    }

    json doc_ = {{"layers", json::array()}, {"edges", json::array()}, {"inputs", json::object()}};
};

std::string make_chain(const std::string& name, int n) {
    Builder b(name);
    b.input("l1", 16, 32, 32);
    std::string prev;
    for (int i = 1; i <= n; ++i) {
        std::string id = "l" + std::to_string(i);
        b.conv(id, prev, 16, 3, 1, 1);
        prev = id;
    }
    return b.str();
}

// ResNet-50 v1 convolutional body: stem plus [3,4,6,3] bottleneck stages.
// The global-pool/fc head is omitted: a 7x7x2048 pooling window processed
// with channels in full can never fit the smaller activation buffers, and
// scheduling studies target the conv layers.
std::string make_resnet50() {
    Builder b("resnet50");
    b.input("conv1", 3, 224, 224);
    std::string x = b.conv("conv1", "", 64, 7, 2, 3);
    x = b.pool("pool1", x, "pool_max", 3, 2, 1);

    const int blocks[4] = {3, 4, 6, 3};
    const int64_t mid_ch[4] = {64, 128, 256, 512};
    for (int stage = 0; stage < 4; ++stage) {
        int64_t mid = mid_ch[stage];
        int64_t out = mid * 4;
        for (int block = 0; block < blocks[stage]; ++block) {
            std::string tag = "s" + std::to_string(stage + 2) + "b" + std::to_string(block + 1);
            int64_t stride = (stage > 0 && block == 0) ? 2 : 1;
            std::string r1 = b.pointwise(tag + "_pw1", x, mid);
            std::string r2 = b.conv(tag + "_conv", r1, mid, 3, stride, 1);
            std::string r3 = b.pointwise(tag + "_pw2", r2, out);
            std::string shortcut = x;
            if (block == 0) shortcut = b.pointwise(tag + "_proj", x, out, stride);
            x = b.add(tag + "_add", r3, shortcut);
        }
    }
    return b.str();
}

// MobileNetV3-small. Squeeze-excite and the nonlinearities are treated as
// fused into the producing layer; bneck blocks keep the expand/depthwise/
// project structure with residual adds on the stride-1, equal-width blocks.
std::string make_mobilenetv3_small() {
    Builder b("mobilenetv3_small");
    b.input("stem", 3, 224, 224);
    std::string x = b.conv("stem", "", 16, 3, 2, 1);

    struct Bneck {
        int64_t kernel, expand, out, stride;
    };
    // kernel, expansion width, output width, stride
    const Bneck cfg[] = {
        {3, 16, 16, 2},  {3, 72, 24, 2},  {3, 88, 24, 1},  {5, 96, 40, 2},
        {5, 240, 40, 1}, {5, 240, 40, 1}, {5, 120, 48, 1}, {5, 144, 48, 1},
        {5, 288, 96, 2}, {5, 576, 96, 1}, {5, 576, 96, 1},
    };
    int64_t in_ch = 16;
    int index = 0;
    for (const Bneck& bn : cfg) {
        ++index;
        std::string tag = "bneck" + std::to_string(index);
        std::string block_in = x;
        std::string h = x;
        if (bn.expand != in_ch) h = b.pointwise(tag + "_expand", h, bn.expand);
        h = b.depthwise(tag + "_dw", h, bn.kernel, bn.stride, bn.kernel / 2);
        h = b.pointwise(tag + "_project", h, bn.out);
        if (bn.stride == 1 && bn.out == in_ch) h = b.add(tag + "_add", h, block_in);
        x = h;
        in_ch = bn.out;
    }
    x = b.pointwise("head_pw", x, 576);
    x = b.pool("head_pool", x, "pool_avg", 7, 7, 0);
    x = b.pointwise("head_fc1", x, 1024);
    b.pointwise("head_fc2", x, 1000);
    return b.str();
}

// U-Net on a 64x64 input with a [64, 128, 256, 512] channel ladder. The 2x
// upsampling step is modeled as a pointwise conv whose padding doubles the
// spatial extent.
std::string make_unet_small() {
    Builder b("unet_small");
    b.input("enc1_conv1", 3, 64, 64);

    auto double_conv = [&](const std::string& tag, const std::string& from, int64_t ch) {
        std::string c1 = b.conv(tag + "_conv1", from, ch, 3, 1, 1);
        return b.conv(tag + "_conv2", c1, ch, 3, 1, 1);
    };

    std::string e1 = double_conv("enc1", "", 64);
    std::string p1 = b.pool("enc1_pool", e1, "pool_max", 2, 2, 0);
    std::string e2 = double_conv("enc2", p1, 128);
    std::string p2 = b.pool("enc2_pool", e2, "pool_max", 2, 2, 0);
    std::string e3 = double_conv("enc3", p2, 256);
    std::string p3 = b.pool("enc3_pool", e3, "pool_max", 2, 2, 0);
    std::string bottleneck = double_conv("mid", p3, 512);

    auto up = [&](const std::string& tag, const std::string& from, int64_t ch, int64_t half) {
        return b.pointwise(tag, from, ch, 1, half);  // pad h/2 -> 2x output
    };
    std::string u3 = up("dec3_up", bottleneck, 256, 4);   // 8 -> 16
    std::string d3 = double_conv("dec3", b.concat("dec3_cat", u3, e3), 256);
    std::string u2 = up("dec2_up", d3, 128, 8);           // 16 -> 32
    std::string d2 = double_conv("dec2", b.concat("dec2_cat", u2, e2), 128);
    std::string u1 = up("dec1_up", d2, 64, 16);           // 32 -> 64
    std::string d1 = double_conv("dec1", b.concat("dec1_cat", u1, e1), 64);
    b.pointwise("out", d1, 2);
    return b.str();
}

}  // namespace

std::string bundled_workload(const std::string& name) {
    if (name == "resnet50") return make_resnet50();
    if (name == "mobilenetv3_small") return make_mobilenetv3_small();
    if (name == "unet_small") return make_unet_small();
    if (name == "chain4") return make_chain("chain4", 4);
    if (name == "chain8") return make_chain("chain8", 8);
    if (name == "chain16") return make_chain("chain16", 16);
    throw ParseError("unknown bundled workload: '" + name + "'");
}

std::vector<std::string> bundled_workload_names() {
    return {"resnet50", "mobilenetv3_small", "unet_small", "chain4", "chain8", "chain16"};
}

bool is_bundled_workload(const std::string& name) {
    for (const std::string& n : bundled_workload_names())
        if (n == name) return true;
    return false;
}

}  // namespace fuseplan
