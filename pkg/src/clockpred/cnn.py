"""A small 1D convolutional network with hand-derived backpropagation.

Three convolutional layers (kernel lengths 4, 3, 3), each length-preserving
through symmetric zero padding and followed by a ReLU, feed an affine head
that maps the final feature vector to one scalar.  With the default single
channel the network has exactly 19 parameters.  Channel counts above one
widen the hidden layers (1 -> C -> C -> C) and the head to C * width inputs.

Gradients are exact analytic derivatives; the ReLU subgradient at zero is
taken to be zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

KERNEL_SIZES = (4, 3, 3)
DEFAULT_INPUT_WIDTH = 5


def relu(v):
    """Elementwise max(0, x)."""
    return np.maximum(np.asarray(v, dtype=np.float64), 0.0)


@dataclass(frozen=True)
class ConvLayer:
    """One convolutional layer: kernel of shape (out_ch, in_ch, k), bias per out channel."""

    kernel: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        kernel = np.asarray(self.kernel, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        if kernel.ndim == 1:
            kernel = kernel.reshape(1, 1, -1)
        if bias.ndim == 0:
            bias = bias.reshape(1)
        if kernel.ndim != 3:
            raise ValueError("kernel must have shape (out_channels, in_channels, k)")
        if bias.shape != (kernel.shape[0],):
            raise ValueError(
                f"bias shape {bias.shape} does not match {kernel.shape[0]} output channels"
            )
        if not (np.all(np.isfinite(kernel)) and np.all(np.isfinite(bias))):
            raise ValueError("layer parameters must be finite")
        kernel.flags.writeable = False
        bias.flags.writeable = False
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "bias", bias)

    @property
    def width(self) -> int:
        return self.kernel.shape[2]

    @property
    def padding(self) -> tuple[int, int]:
        """Zero cells added (left, right); even kernels put the extra cell on the left."""
        k = self.kernel.shape[2]
        return (k // 2, (k - 1) // 2)


def conv1d_forward(x, layer: ConvLayer):
    """Length-preserving cross-correlation with symmetric zero padding.

    ``out[o, j] = bias[o] + sum_{c, m} kernel[o, c, m] * padded(x)[c, j + m]``.
    A 1D input is treated as a single channel; the output is squeezed back
    to 1D when the layer has one output channel.
    """
    arr = np.asarray(x, dtype=np.float64)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] != layer.kernel.shape[1]:
        raise ValueError(
            f"input with {arr.shape[0] if arr.ndim == 2 else '?'} channels does not "
            f"match layer expecting {layer.kernel.shape[1]}"
        )
    if arr.shape[1] < 1:
        raise ValueError("input must contain at least one sample")
    out = _correlate(arr, layer)
    if squeeze and out.shape[0] == 1:
        return out[0]
    return out


def _correlate(x: np.ndarray, layer: ConvLayer) -> np.ndarray:
    out_ch, in_ch, _ = layer.kernel.shape
    padded = np.pad(x, ((0, 0), layer.padding))
    out = np.empty((out_ch, x.shape[1]))
    for o in range(out_ch):
        acc = np.full(x.shape[1], layer.bias[o])
        for c in range(in_ch):
            acc = acc + np.correlate(padded[c], layer.kernel[o, c], "valid")
        out[o] = acc
    return out


@dataclass(frozen=True)
class CnnModel:
    """The full network: three conv layers plus the affine output head."""

    layers: tuple[ConvLayer, ...]
    head_weights: np.ndarray
    head_bias: float
    channels: int = 1
    input_width: int = DEFAULT_INPUT_WIDTH

    def __post_init__(self):
        layers = tuple(self.layers)
        if len(layers) != len(KERNEL_SIZES):
            raise ValueError(f"model needs exactly {len(KERNEL_SIZES)} conv layers")
        channels = int(self.channels)
        width = int(self.input_width)
        if channels < 1 or width < 1:
            raise ValueError("channels and input_width must be positive")
        in_ch = 1
        for layer, k in zip(layers, KERNEL_SIZES):
            if layer.width != k:
                raise ValueError(
                    f"kernel length {layer.width} at a position requiring {k}"
                )
            if layer.kernel.shape[:2] != (channels, in_ch):
                raise ValueError(
                    f"layer channel shape {layer.kernel.shape[:2]} does not match "
                    f"({channels}, {in_ch})"
                )
            in_ch = channels
        head = np.asarray(self.head_weights, dtype=np.float64)
        if head.shape != (channels * width,):
            raise ValueError(
                f"head expects {channels * width} weights, got shape {head.shape}"
            )
        bias = float(self.head_bias)
        if not (np.all(np.isfinite(head)) and math.isfinite(bias)):
            raise ValueError("head parameters must be finite")
        head.flags.writeable = False
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "head_weights", head)
        object.__setattr__(self, "head_bias", bias)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "input_width", width)

    @property
    def num_params(self) -> int:
        count = self.head_weights.size + 1
        for layer in self.layers:
            count += layer.kernel.size + layer.bias.size
        return count

    def to_vector(self) -> np.ndarray:
        """Flatten all parameters: per-layer kernel then bias, head weights, head bias."""
        parts = []
        for layer in self.layers:
            parts.append(layer.kernel.ravel())
            parts.append(layer.bias)
        parts.append(self.head_weights)
        parts.append(np.array([self.head_bias]))
        return np.concatenate(parts)

    def from_vector(self, vec: np.ndarray) -> "CnnModel":
        """Rebuild a model of this shape from a flat parameter vector."""
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.num_params,):
            raise ValueError(f"expected {self.num_params} parameters, got {vec.shape}")
        pos = 0
        layers = []
        for layer in self.layers:
            n = layer.kernel.size
            kernel = vec[pos : pos + n].reshape(layer.kernel.shape)
            pos += n
            bias = vec[pos : pos + layer.bias.size]
            pos += layer.bias.size
            layers.append(ConvLayer(kernel, bias))
        head = vec[pos : pos + self.head_weights.size]
        pos += self.head_weights.size
        return CnnModel(
            tuple(layers), head, float(vec[pos]), self.channels, self.input_width
        )

    def weight_mask(self) -> np.ndarray:
        """1.0 for kernel and head weights, 0.0 for biases, in vector order."""
        parts = []
        for layer in self.layers:
            parts.append(np.ones(layer.kernel.size))
            parts.append(np.zeros(layer.bias.size))
        parts.append(np.ones(self.head_weights.size))
        parts.append(np.zeros(1))
        return np.concatenate(parts)


@dataclass(frozen=True)
class GradientSet:
    """Gradients shaped exactly like the model parameters."""

    kernels: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    head_weights: np.ndarray
    head_bias: float

    def to_vector(self) -> np.ndarray:
        parts = []
        for kernel, bias in zip(self.kernels, self.biases):
            parts.append(kernel.ravel())
            parts.append(bias)
        parts.append(self.head_weights)
        parts.append(np.array([self.head_bias]))
        return np.concatenate(parts)


def _forward_pass(model: CnnModel, window) -> tuple[list, np.ndarray, float]:
    """Run the network, keeping per-layer caches for backpropagation."""
    x = np.asarray(window, dtype=np.float64)
    if x.shape != (model.input_width,):
        raise ValueError(
            f"window of shape {x.shape} does not match input width {model.input_width}"
        )
    act = x.reshape(1, -1)
    caches = []
    for layer in model.layers:
        padded = np.pad(act, ((0, 0), layer.padding))
        pre = _correlate(act, layer)
        caches.append((padded, pre))
        act = np.maximum(pre, 0.0)
    features = act.ravel()
    out = float(model.head_weights @ features + model.head_bias)
    return caches, features, out


def forward(model: CnnModel, window) -> float:
    """Scalar network output for one input window."""
    return _forward_pass(model, window)[2]


def backward(model: CnnModel, window, upstream: float = 1.0) -> GradientSet:
    """Exact gradient of ``forward`` w.r.t. every parameter, scaled by ``upstream``.

    The forward pass is recomputed internally, so no prior call is needed.
    """
    caches, features, _ = _forward_pass(model, window)
    upstream = float(upstream)
    g_head_w = upstream * features
    g_head_b = upstream
    d_act = (upstream * model.head_weights).reshape(model.channels, model.input_width)
    g_kernels: list[np.ndarray] = []
    g_biases: list[np.ndarray] = []
    for layer, (padded, pre) in zip(reversed(model.layers), reversed(caches)):
        d_pre = d_act * (pre > 0.0)
        out_ch, in_ch, k = layer.kernel.shape
        g_kernel = np.empty_like(layer.kernel)
        for o in range(out_ch):
            for c in range(in_ch):
                g_kernel[o, c] = np.correlate(padded[c], d_pre[o], "valid")
        g_bias = d_pre.sum(axis=1)
        d_padded = np.zeros_like(padded)
        for o in range(out_ch):
            for c in range(in_ch):
                d_padded[c] += np.convolve(d_pre[o], layer.kernel[o, c])
        left, _ = layer.padding
        d_act = d_padded[:, left : left + pre.shape[1]]
        g_kernels.append(g_kernel)
        g_biases.append(g_bias)
    g_kernels.reverse()
    g_biases.reverse()
    return GradientSet(tuple(g_kernels), tuple(g_biases), g_head_w, g_head_b)


def _batch_forward_pass(model: CnnModel, windows: np.ndarray):
    """Forward over a (n, width) batch, keeping caches; same math as the
    single-window pass with the batch axis carried along."""
    n = windows.shape[0]
    act = windows.reshape(n, 1, model.input_width)
    caches = []
    for layer in model.layers:
        out_ch, in_ch, k = layer.kernel.shape
        width = act.shape[2]
        padded = np.pad(act, ((0, 0), (0, 0), layer.padding))
        pre = np.empty((n, out_ch, width))
        for o in range(out_ch):
            acc = np.full((n, width), layer.bias[o])
            for c in range(in_ch):
                for m in range(k):
                    acc += layer.kernel[o, c, m] * padded[:, c, m : m + width]
            pre[:, o, :] = acc
        caches.append((padded, pre))
        act = np.maximum(pre, 0.0)
    features = act.reshape(n, -1)
    outputs = features @ model.head_weights + model.head_bias
    return caches, features, outputs


def forward_batch(model: CnnModel, windows) -> np.ndarray:
    """Network outputs for a (n, width) batch of windows."""
    windows = np.asarray(windows, dtype=np.float64)
    if windows.ndim != 2 or windows.shape[1] != model.input_width:
        raise ValueError(
            f"batch of shape {windows.shape} does not match input width {model.input_width}"
        )
    return _batch_forward_pass(model, windows)[2]


def backward_batch(model: CnnModel, windows, upstreams) -> np.ndarray:
    """Sum of per-window gradients scaled by per-window upstreams, as a flat vector."""
    windows = np.asarray(windows, dtype=np.float64)
    upstreams = np.asarray(upstreams, dtype=np.float64)
    if windows.ndim != 2 or windows.shape[1] != model.input_width:
        raise ValueError(
            f"batch of shape {windows.shape} does not match input width {model.input_width}"
        )
    if upstreams.shape != (windows.shape[0],):
        raise ValueError("one upstream scalar per window is required")
    caches, features, _ = _batch_forward_pass(model, windows)
    g_head_w = features.T @ upstreams
    g_head_b = float(upstreams.sum())
    d_act = upstreams[:, None] * model.head_weights[None, :]
    d_act = d_act.reshape(windows.shape[0], model.channels, model.input_width)
    g_kernels: list[np.ndarray] = []
    g_biases: list[np.ndarray] = []
    for layer, (padded, pre) in zip(reversed(model.layers), reversed(caches)):
        out_ch, in_ch, k = layer.kernel.shape
        width = pre.shape[2]
        d_pre = d_act * (pre > 0.0)
        g_kernel = np.empty_like(layer.kernel)
        for o in range(out_ch):
            for c in range(in_ch):
                for m in range(k):
                    g_kernel[o, c, m] = np.sum(d_pre[:, o, :] * padded[:, c, m : m + width])
        g_bias = d_pre.sum(axis=(0, 2))
        d_padded = np.zeros_like(padded)
        for o in range(out_ch):
            for c in range(in_ch):
                for m in range(k):
                    d_padded[:, c, m : m + width] += layer.kernel[o, c, m] * d_pre[:, o, :]
        left, _ = layer.padding
        d_act = d_padded[:, :, left : left + width]
        g_kernels.append(g_kernel)
        g_biases.append(g_bias)
    g_kernels.reverse()
    g_biases.reverse()
    return GradientSet(tuple(g_kernels), tuple(g_biases), g_head_w, g_head_b).to_vector()


def init_weights(
    seed: int, channels: int = 1, input_width: int = DEFAULT_INPUT_WIDTH
) -> CnnModel:
    """Deterministic initial model for a seed.

    Kernel and head weights are uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)];
    biases start at zero.
    """
    rng = np.random.default_rng(seed)
    layers = []
    in_ch = 1
    for k in KERNEL_SIZES:
        bound = 1.0 / math.sqrt(in_ch * k)
        kernel = rng.uniform(-bound, bound, size=(channels, in_ch, k))
        layers.append(ConvLayer(kernel, np.zeros(channels)))
        in_ch = channels
    fan_in = channels * input_width
    bound = 1.0 / math.sqrt(fan_in)
    head = rng.uniform(-bound, bound, size=fan_in)
    return CnnModel(tuple(layers), head, 0.0, channels, input_width)


def model_to_json(model: CnnModel) -> str:
    """Serialize at full decimal precision; ``model_from_json`` restores it exactly."""
    payload = {
        "config": {"channels": model.channels, "width": model.input_width},
        "layers": [
            {"kernel": layer.kernel.tolist(), "bias": layer.bias.tolist()}
            for layer in model.layers
        ],
        "head": {"weights": model.head_weights.tolist(), "bias": model.head_bias},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def model_from_json(text: str) -> CnnModel:
    payload = json.loads(text)
    try:
        config = payload["config"]
        layers = tuple(
            ConvLayer(np.array(item["kernel"]), np.array(item["bias"]))
            for item in payload["layers"]
        )
        head = payload["head"]
        return CnnModel(
            layers,
            np.array(head["weights"]),
            float(head["bias"]),
            int(config["channels"]),
            int(config["width"]),
        )
    except (KeyError, TypeError) as err:
        raise ValueError(f"malformed model document: {err}") from None


def save_model(model: CnnModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_to_json(model))


def load_model(path) -> CnnModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())
