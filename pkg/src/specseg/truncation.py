"""Feature truncation by bilinear down-sampling, and a FLOPs/FPI cost model."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, FormatError

__all__ = [
    "CostReport",
    "LayerSpec",
    "NetworkCostSpec",
    "band_for_size",
    "bilinear_resize",
    "flops_total",
    "fpi",
    "layer_flops",
    "parse_cost_spec",
    "load_cost_spec",
    "relative_flops_drop",
    "restore_feature",
    "truncate_feature",
]


def _axis_weights(n_in: int, n_out: int):
    """Align-corners sample positions: indices ``lo``, ``lo+1`` and weight of ``lo+1``."""
    if n_out == 1 or n_in == 1:
        pos = np.zeros(n_out)
    else:
        pos = np.arange(n_out) * ((n_in - 1) / (n_out - 1))
    lo = np.clip(np.floor(pos).astype(int), 0, n_in - 1)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, pos - lo


def bilinear_resize(f, target_h: int, target_w: int | None = None) -> np.ndarray:
    """Per-channel bilinear resize with corner-aligned sampling.

    Accepts ``(C, H, W)``, ``(H, W)`` or a 1-D signal (``target_w`` ignored).
    """
    f = np.asarray(f, dtype=float)
    if target_h < 1 or (target_w is not None and target_w < 1):
        raise ValueError("target sizes must be at least 1")
    if f.ndim == 1:
        lo, hi, w = _axis_weights(f.shape[0], target_h)
        return f[lo] * (1 - w) + f[hi] * w
    if target_w is None:
        target_w = target_h
    lo, hi, w = _axis_weights(f.shape[-2], target_h)
    rows = f[..., lo, :] * (1 - w)[:, None] + f[..., hi, :] * w[:, None]
    lo, hi, w = _axis_weights(f.shape[-1], target_w)
    return rows[..., lo] * (1 - w) + rows[..., hi] * w


def band_for_size(size: int) -> int:
    """Band limit kept by an odd feature side: ``(size - 1) / 2``."""
    return (size - 1) // 2


def truncate_feature(f, size: int) -> np.ndarray:
    """Down-sample a ``(C, H, W)`` feature to ``size x size``."""
    f = np.asarray(f, dtype=float)
    if size < 1:
        raise ValueError("size must be positive")
    if size > min(f.shape[-2:]):
        raise ValueError(f"cannot truncate a {f.shape[-2:]} feature up to {size}")
    return bilinear_resize(f, size, size)


def restore_feature(truncated, shape) -> np.ndarray:
    """Resize a truncated feature back to spatial ``shape``."""
    return bilinear_resize(truncated, shape[-2], shape[-1])


KINDS = ("conv", "pointwise", "upsample", "pool")
PARTITIONS = ("encoder", "decoder")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    in_channels: float
    out_channels: float
    kernel: int
    side: float
    partition: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FormatError(f"unknown layer kind {self.kind!r}")
        if self.partition not in PARTITIONS:
            raise FormatError(f"unknown partition {self.partition!r}")
        if min(self.in_channels, self.out_channels, self.kernel, self.side) <= 0:
            raise FormatError("layer dimensions must be positive")


@dataclass(frozen=True)
class NetworkCostSpec:
    """Ordered layers; ``base_side`` is the nominal decoder feature side."""

    layers: tuple
    base_side: float | None = None

    @property
    def decoder_base_side(self) -> float:
        if self.base_side is not None:
            return float(self.base_side)
        sides = [layer.side for layer in self.layers if layer.partition == "decoder"]
        return float(max(sides)) if sides else 1.0

    def pruned(self, rate: float, partition: str = "encoder") -> "NetworkCostSpec":
        """Scale channel counts of one partition by ``1 - rate``.

        Input channels of the very first layer (the image) are left alone.
        """
        if not 0 <= rate < 1:
            raise ValueError("pruning rate must lie in [0, 1)")
        keep = 1.0 - rate
        out = []
        for i, layer in enumerate(self.layers):
            if layer.partition != partition:
                out.append(layer)
                continue
            cin = layer.in_channels if i == 0 else layer.in_channels * keep
            out.append(replace(layer, in_channels=cin, out_channels=layer.out_channels * keep))
        return NetworkCostSpec(tuple(out), self.base_side)


def layer_flops(layer: LayerSpec, side: float | None = None) -> float:
    """FLOPs of one layer at spatial ``side``; a multiply-add counts as 2.

    conv / pointwise: ``2 k^2 Cin Cout side^2``; bilinear upsample: four
    multiply-adds per output value; pool: one op per window element.
    """
    side = layer.side if side is None else side
    area = side * side
    if layer.kind == "conv":
        return 2.0 * layer.kernel ** 2 * layer.in_channels * layer.out_channels * area
    if layer.kind == "pointwise":
        return 2.0 * layer.in_channels * layer.out_channels * area
    if layer.kind == "upsample":
        return 8.0 * layer.out_channels * area
    return float(layer.kernel ** 2 * layer.out_channels * area)


@dataclass(frozen=True)
class CostReport:
    flops_total: float
    flops_by_partition: dict = field(default_factory=dict)
    relative_flops_drop: float | None = None
    fpi: float | None = None


def flops_total(spec: NetworkCostSpec, decoder_feature_side: float | None = None,
                baseline: CostReport | None = None, miou: float | None = None) -> CostReport:
    """Cost of ``spec`` with decoder sides rescaled to ``decoder_feature_side``."""
    base = spec.decoder_base_side
    ratio = 1.0 if decoder_feature_side is None else decoder_feature_side / base
    by_part = {p: 0.0 for p in PARTITIONS}
    for layer in spec.layers:
        side = layer.side * ratio if layer.partition == "decoder" else layer.side
        by_part[layer.partition] += layer_flops(layer, side)
    total = sum(by_part.values())
    report = CostReport(total, by_part)
    if baseline is not None:
        report = replace(report, relative_flops_drop=relative_flops_drop(report, baseline))
    if miou is not None:
        report = replace(report, fpi=fpi(total, miou))
    return report


def _flops(value) -> float:
    return value.flops_total if isinstance(value, CostReport) else float(value)


def relative_flops_drop(truncated, base) -> float:
    """``1 - truncated / base``; accepts reports or raw FLOPs counts."""
    b = _flops(base)
    if b <= 0:
        raise DegenerateInputError("baseline FLOPs must be positive")
    return 1.0 - _flops(truncated) / b


def fpi(flops, miou: float) -> float:
    """FLOPs per IoU score."""
    if not miou > 0:
        raise DegenerateInputError("mIoU must be positive")
    return _flops(flops) / miou


def parse_cost_spec(text: str) -> NetworkCostSpec:
    """Parse one layer per line: ``kind Cin Cout k side partition``.

    Fields may be separated by whitespace or commas; ``#`` starts a comment.
    A line ``base_side N`` sets the nominal decoder side.
    """
    layers = []
    base_side = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "base_side":
                base_side = float(parts[1])
                continue
            if len(parts) != 6:
                raise FormatError(f"expected 6 fields, got {len(parts)}")
            kind, cin, cout, k, side, part = parts
            layers.append(LayerSpec(kind, float(cin), float(cout), int(k), float(side), part))
        except (ValueError, IndexError) as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    if not layers:
        raise FormatError("cost spec has no layers")
    return NetworkCostSpec(tuple(layers), base_side)


def load_cost_spec(path) -> NetworkCostSpec:
    return parse_cost_spec(Path(path).read_text(encoding="utf-8"))
