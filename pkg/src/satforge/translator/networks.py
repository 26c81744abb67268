"""Generator and discriminator architectures.

Two generator families:
  unet_skip      encoder-decoder with skip connections between layer i and
                 layer n-i (pix2pix style)
  coarse_to_fine global network operating through strided downsampling and
                 residual blocks, optionally wrapped by a full-resolution
                 local enhancer (pix2pixHD style); with the enhancer
                 present the global network consumes a 2x downsample

Discriminators are patch classifiers applied to an image pyramid:
scale k consumes the input downsampled by 2^(k-1).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, asdict

import torch
import torch.nn as nn
import torch.nn.functional as F

from satforge.errors import InvalidSpec

GENERATOR_FAMILIES = ("unet_skip", "coarse_to_fine")

# PatchGAN receptive field -> number of strided conv layers
_RECEPTIVE_FIELDS = {16: 1, 34: 2, 70: 3, 142: 4}


@dataclass
class GeneratorSpec:
    family: str = "coarse_to_fine"
    base_channels: int = 64
    depth: int = 3  # unet: encoder levels; coarse_to_fine: downsample stages
    has_local_enhancer: bool = False
    in_channels: int = 1
    out_channels: int = 3
    n_resblocks: int = 4  # coarse_to_fine only

    def validate(self) -> None:
        if self.family not in GENERATOR_FAMILIES:
            raise InvalidSpec(f"unknown generator family {self.family!r}")
        if self.base_channels < 1 or self.depth < 1:
            raise InvalidSpec("base_channels and depth must be positive")
        if self.family == "unet_skip" and self.has_local_enhancer:
            raise InvalidSpec("local enhancer only applies to coarse_to_fine")
        if self.family == "unet_skip" and self.depth < 2:
            raise InvalidSpec("unet_skip needs depth >= 2")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "GeneratorSpec":
        return cls(**d)


@dataclass
class DiscriminatorSpec:
    num_scales: int = 3
    patch_receptive_field: int = 70
    base_channels: int = 64
    in_channels: int = 4  # feature (1) + image (3), concatenated

    def validate(self) -> None:
        if self.num_scales < 1:
            raise InvalidSpec(f"num_scales must be >= 1, got {self.num_scales}")
        if self.patch_receptive_field not in _RECEPTIVE_FIELDS:
            raise InvalidSpec(
                f"patch_receptive_field must be one of {sorted(_RECEPTIVE_FIELDS)}"
            )
        if self.base_channels < 1:
            raise InvalidSpec("base_channels must be positive")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "DiscriminatorSpec":
        return cls(**d)


def _norm(ch: int) -> nn.Module:
    return nn.InstanceNorm2d(ch, affine=True, track_running_stats=False)


class UnetBlock(nn.Module):
    """One U-Net level; recursively wraps the next-deeper level and
    concatenates its own input with the submodule output (the skip)."""

    def __init__(self, outer_ch, inner_ch, in_ch=None, submodule=None, outermost=False, innermost=False):
        super().__init__()
        self.outermost = outermost
        in_ch = in_ch if in_ch is not None else outer_ch
        down = [nn.Conv2d(in_ch, inner_ch, 4, stride=2, padding=1)]
        if not innermost and not outermost:
            down += [_norm(inner_ch)]
        down = [nn.LeakyReLU(0.2)] + down if not outermost else down

        if outermost:
            up = [nn.ReLU(), nn.ConvTranspose2d(inner_ch * 2, outer_ch, 4, stride=2, padding=1), nn.Tanh()]
        elif innermost:
            up = [nn.ReLU(), nn.ConvTranspose2d(inner_ch, outer_ch, 4, stride=2, padding=1), _norm(outer_ch)]
        else:
            up = [nn.ReLU(), nn.ConvTranspose2d(inner_ch * 2, outer_ch, 4, stride=2, padding=1), _norm(outer_ch)]

        mid = [submodule] if submodule is not None else []
        self.model = nn.Sequential(*down, *mid, *up)

    def forward(self, x):
        if self.outermost:
            return self.model(x)
        return torch.cat([x, self.model(x)], dim=1)


class UnetGenerator(nn.Module):
    def __init__(self, spec: GeneratorSpec):
        super().__init__()
        nf = spec.base_channels
        max_nf = nf * 8
        block = UnetBlock(min(max_nf, nf * 2 ** (spec.depth - 2)),
                          min(max_nf, nf * 2 ** (spec.depth - 1)),
                          innermost=True)
        for level in range(spec.depth - 2, 0, -1):
            block = UnetBlock(min(max_nf, nf * 2 ** (level - 1)), min(max_nf, nf * 2 ** level), submodule=block)
        self.model = UnetBlock(spec.out_channels, nf, in_ch=spec.in_channels, submodule=block, outermost=True)
        self.downsample_factor = 2 ** spec.depth

    def forward(self, x):
        return self.model(x)


class ResnetBlock(nn.Module):
    def __init__(self, ch: int):
        super().__init__()
        self.block = nn.Sequential(
            nn.ReflectionPad2d(1), nn.Conv2d(ch, ch, 3), _norm(ch), nn.ReLU(),
            nn.ReflectionPad2d(1), nn.Conv2d(ch, ch, 3), _norm(ch),
        )

    def forward(self, x):
        return x + self.block(x)


class GlobalGenerator(nn.Module):
    """Coarse-to-fine G1: strided downsampling, residual core, upsampling."""

    def __init__(self, spec: GeneratorSpec, emit_features: bool = False):
        super().__init__()
        nf = spec.base_channels
        layers = [nn.ReflectionPad2d(3), nn.Conv2d(spec.in_channels, nf, 7), _norm(nf), nn.ReLU()]
        ch = nf
        for _ in range(spec.depth):
            layers += [nn.Conv2d(ch, ch * 2, 3, stride=2, padding=1), _norm(ch * 2), nn.ReLU()]
            ch *= 2
        for _ in range(spec.n_resblocks):
            layers += [ResnetBlock(ch)]
        for _ in range(spec.depth):
            layers += [nn.ConvTranspose2d(ch, ch // 2, 3, stride=2, padding=1, output_padding=1), _norm(ch // 2), nn.ReLU()]
            ch //= 2
        self.features = nn.Sequential(*layers)
        self.head = nn.Sequential(nn.ReflectionPad2d(3), nn.Conv2d(ch, spec.out_channels, 7), nn.Tanh())
        self.emit_features = emit_features
        self.downsample_factor = 2 ** spec.depth

    def forward(self, x):
        feats = self.features(x)
        if self.emit_features:
            return feats
        return self.head(feats)


class LocalEnhancer(nn.Module):
    """Coarse-to-fine G1 + G2: the global network runs on a half-resolution
    input; the enhancer fuses its features back at full resolution."""

    def __init__(self, spec: GeneratorSpec):
        super().__init__()
        nf = spec.base_channels
        g1_spec = GeneratorSpec(**{**spec.to_json(), "base_channels": nf * 2, "has_local_enhancer": False})
        self.global_net = GlobalGenerator(g1_spec, emit_features=True)
        self.downsample = nn.AvgPool2d(3, stride=2, padding=1, count_include_pad=False)
        self.front = nn.Sequential(
            nn.ReflectionPad2d(3), nn.Conv2d(spec.in_channels, nf, 7), _norm(nf), nn.ReLU(),
            nn.Conv2d(nf, nf * 2, 3, stride=2, padding=1), _norm(nf * 2), nn.ReLU(),
        )
        self.back = nn.Sequential(
            ResnetBlock(nf * 2), ResnetBlock(nf * 2),
            nn.ConvTranspose2d(nf * 2, nf, 3, stride=2, padding=1, output_padding=1), _norm(nf), nn.ReLU(),
            nn.ReflectionPad2d(3), nn.Conv2d(nf, spec.out_channels, 7), nn.Tanh(),
        )
        self.downsample_factor = 2 ** (spec.depth + 1)

    def forward(self, x):
        coarse = self.global_net(self.downsample(x))
        return self.back(self.front(x) + coarse)


def build_generator(spec: GeneratorSpec, seed: int | None = None) -> nn.Module:
    """Instantiate a generator; with a seed the initial parameters are
    reproducible (same spec + seed -> identical checksum)."""
    spec.validate()
    if seed is not None:
        torch.manual_seed(seed)
    if spec.family == "unet_skip":
        return UnetGenerator(spec)
    if spec.has_local_enhancer:
        return LocalEnhancer(spec)
    return GlobalGenerator(spec)


class PatchDiscriminator(nn.Module):
    """PatchGAN: emits a patch-level score map plus intermediate feature
    maps for the feature-matching loss. Raw (pre-sigmoid) scores."""

    def __init__(self, spec: DiscriminatorSpec):
        super().__init__()
        n_layers = _RECEPTIVE_FIELDS[spec.patch_receptive_field]
        nf = spec.base_channels
        blocks = [nn.Sequential(nn.Conv2d(spec.in_channels, nf, 4, stride=2, padding=2), nn.LeakyReLU(0.2))]
        ch = nf
        for i in range(1, n_layers):
            nxt = min(ch * 2, nf * 8)
            blocks.append(nn.Sequential(nn.Conv2d(ch, nxt, 4, stride=2, padding=2), _norm(nxt), nn.LeakyReLU(0.2)))
            ch = nxt
        nxt = min(ch * 2, nf * 8)
        blocks.append(nn.Sequential(nn.Conv2d(ch, nxt, 4, stride=1, padding=2), _norm(nxt), nn.LeakyReLU(0.2)))
        blocks.append(nn.Sequential(nn.Conv2d(nxt, 1, 4, stride=1, padding=2)))
        self.blocks = nn.ModuleList(blocks)

    def forward(self, x):
        feats = []
        for block in self.blocks:
            x = block(x)
            feats.append(x)
        return feats  # [..., score_map]


class MultiScaleDiscriminator(nn.Module):
    """num_scales identical patch discriminators over an image pyramid;
    scale k (0-based) consumes the input downsampled by 2^k."""

    def __init__(self, spec: DiscriminatorSpec):
        super().__init__()
        self.scales = nn.ModuleList(PatchDiscriminator(spec) for _ in range(spec.num_scales))
        self.pool = nn.AvgPool2d(3, stride=2, padding=1, count_include_pad=False)

    def __len__(self):
        return len(self.scales)

    def __getitem__(self, k):
        return self.scales[k]

    def forward(self, x):
        outs = []
        for k, net in enumerate(self.scales):
            outs.append(net(x))
            if k < len(self.scales) - 1:
                x = self.pool(x)
        return outs  # per scale: list of feature maps, last = score map


def build_discriminators(spec: DiscriminatorSpec, seed: int | None = None) -> MultiScaleDiscriminator:
    spec.validate()
    if seed is not None:
        torch.manual_seed(seed)
    return MultiScaleDiscriminator(spec)


def param_checksum(model: nn.Module) -> str:
    """SHA-256 over the concatenated float32 parameter bytes."""
    h = hashlib.sha256()
    for _, p in sorted(model.state_dict().items()):
        h.update(p.detach().cpu().numpy().astype("float32").tobytes())
    return h.hexdigest()
