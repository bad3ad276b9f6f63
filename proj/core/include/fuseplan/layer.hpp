#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fuseplan {

/// Dimensions of an activation tensor: channels x height x width.
struct TensorShape {
    int64_t channels = 0;
    int64_t height = 0;
    int64_t width = 0;

    int64_t element_count() const { return channels * height * width; }

    bool valid() const { return channels >= 1 && height >= 1 && width >= 1; }

    friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

enum class LayerKind {
    conv,
    depthwise_conv,
    pointwise_conv,
    pool_max,
    pool_avg,
    elementwise_add,
    concat,
};

const char* to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& text);

/// True for kinds that take exactly two or more predecessors.
inline bool is_join_kind(LayerKind k) {
    return k == LayerKind::elementwise_add || k == LayerKind::concat;
}

inline bool is_pool_kind(LayerKind k) {
    return k == LayerKind::pool_max || k == LayerKind::pool_avg;
}

/// One operator node of the workload.
///
/// Kernel, stride and padding follow the usual convolution grid. Join kinds
/// (elementwise_add, concat) carry no window: they forward their operands
/// unchanged and are stored with a 1x1/1 grid.
struct LayerSpec {
    std::string id;
    LayerKind kind = LayerKind::conv;
    int64_t kernel_h = 1;
    int64_t kernel_w = 1;
    int64_t stride_h = 1;
    int64_t stride_w = 1;
    int64_t pad_h = 0;
    int64_t pad_w = 0;
    int64_t out_channels = 0;  // 0 = derive from inputs where the kind allows
    int64_t bytes_per_element = 1;

    bool has_weights() const {
        return kind == LayerKind::conv || kind == LayerKind::depthwise_conv ||
               kind == LayerKind::pointwise_conv;
    }

    /// Weight element count given the input channel count.
    int64_t weight_count(int64_t in_channels, int64_t inferred_out_channels) const {
        switch (kind) {
            case LayerKind::conv:
                return inferred_out_channels * in_channels * kernel_h * kernel_w;
            case LayerKind::depthwise_conv:
                return in_channels * kernel_h * kernel_w;
            case LayerKind::pointwise_conv:
                return inferred_out_channels * in_channels;
            default:
                return 0;
        }
    }

    /// Kernel/stride as seen by receptive-field math. Joins are transparent.
    int64_t window_kernel_h() const { return is_join_kind(kind) ? 1 : kernel_h; }
    int64_t window_kernel_w() const { return is_join_kind(kind) ? 1 : kernel_w; }
    int64_t window_stride_h() const { return is_join_kind(kind) ? 1 : stride_h; }
    int64_t window_stride_w() const { return is_join_kind(kind) ? 1 : stride_w; }
    int64_t window_pad_h() const { return is_join_kind(kind) ? 0 : pad_h; }
    int64_t window_pad_w() const { return is_join_kind(kind) ? 0 : pad_w; }
};

/// Raised on malformed descriptors: syntax errors, unknown kinds, dangling
/// edges, cycles, disconnected graphs.
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a structurally sound graph fails semantic validation
/// (shape mismatch, non-positive dimension, bad layer parameters).
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fuseplan
