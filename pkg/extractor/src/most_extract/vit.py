"""Minimal vision transformer with per-head key extraction.

Matches the state-dict layout of the publicly released self-distilled ViT
checkpoints (fused qkv projection, pre-norm blocks, learned position
embeddings), which torchvision's ViT does not load and whose attention
module does not expose key projections. Position embeddings are
interpolated bicubically so any patch-multiple input size works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

CHECKPOINT_URLS = {
    "vit_s16": "https://dl.fbaipublicfiles.com/dino/dino_deitsmall16_pretrain/dino_deitsmall16_pretrain.pth",
    "vit_b8": "https://dl.fbaipublicfiles.com/dino/dino_vitbase8_pretrain/dino_vitbase8_pretrain.pth",
}


@dataclass(frozen=True)
class ViTConfig:
    patch_size: int
    embed_dim: int
    depth: int
    num_heads: int
    mlp_ratio: float = 4.0

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.num_heads


MODEL_CONFIGS = {
    "vit_s16": ViTConfig(patch_size=16, embed_dim=384, depth=12, num_heads=6),
    "vit_b8": ViTConfig(patch_size=8, embed_dim=768, depth=12, num_heads=12),
}


class Attention(nn.Module):
    def __init__(self, dim: int, num_heads: int):
        super().__init__()
        self.num_heads = num_heads
        self.scale = (dim // num_heads) ** -0.5
        self.qkv = nn.Linear(dim, dim * 3, bias=True)
        self.proj = nn.Linear(dim, dim)

    def split_qkv(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        b, t, d = x.shape
        qkv = self.qkv(x).reshape(b, t, 3, self.num_heads, d // self.num_heads)
        qkv = qkv.permute(2, 0, 3, 1, 4)  # (3, B, heads, T, head_dim)
        return qkv[0], qkv[1], qkv[2]

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, t, d = x.shape
        q, k, v = self.split_qkv(x)
        attn = (q @ k.transpose(-2, -1)) * self.scale
        attn = attn.softmax(dim=-1)
        out = (attn @ v).transpose(1, 2).reshape(b, t, d)
        return self.proj(out)


class Mlp(nn.Module):
    def __init__(self, dim: int, hidden: int):
        super().__init__()
        self.fc1 = nn.Linear(dim, hidden)
        self.act = nn.GELU()
        self.fc2 = nn.Linear(hidden, dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.fc2(self.act(self.fc1(x)))


class Block(nn.Module):
    def __init__(self, dim: int, num_heads: int, mlp_ratio: float):
        super().__init__()
        self.norm1 = nn.LayerNorm(dim, eps=1e-6)
        self.attn = Attention(dim, num_heads)
        self.norm2 = nn.LayerNorm(dim, eps=1e-6)
        self.mlp = Mlp(dim, int(dim * mlp_ratio))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.norm1(x))
        return x + self.mlp(self.norm2(x))


class VisionTransformer(nn.Module):
    def __init__(self, cfg: ViTConfig):
        super().__init__()
        if cfg.embed_dim % cfg.num_heads:
            raise ValueError("embed_dim must be divisible by num_heads")
        self.cfg = cfg
        self.patch_embed = PatchEmbed(cfg.patch_size, cfg.embed_dim)
        self.cls_token = nn.Parameter(torch.zeros(1, 1, cfg.embed_dim))
        # Sized for 224px inputs like the released checkpoints; interpolated
        # at run time for anything else.
        n_ref = (224 // cfg.patch_size) ** 2
        self.pos_embed = nn.Parameter(torch.zeros(1, n_ref + 1, cfg.embed_dim))
        self.blocks = nn.ModuleList(
            Block(cfg.embed_dim, cfg.num_heads, cfg.mlp_ratio) for _ in range(cfg.depth)
        )
        self.norm = nn.LayerNorm(cfg.embed_dim, eps=1e-6)
        self._init_weights()

    def _init_weights(self):
        nn.init.trunc_normal_(self.pos_embed, std=0.02)
        nn.init.trunc_normal_(self.cls_token, std=0.02)
        for module in self.modules():
            if isinstance(module, nn.Linear):
                nn.init.trunc_normal_(module.weight, std=0.02)
                if module.bias is not None:
                    nn.init.zeros_(module.bias)

    def _interpolated_pos_embed(self, grid_h: int, grid_w: int) -> torch.Tensor:
        n_patches = grid_h * grid_w
        n_ref = self.pos_embed.shape[1] - 1
        if n_patches == n_ref and grid_h == grid_w:
            return self.pos_embed
        cls_pos = self.pos_embed[:, :1]
        patch_pos = self.pos_embed[:, 1:]
        ref_side = int(math.sqrt(n_ref))
        patch_pos = patch_pos.reshape(1, ref_side, ref_side, -1).permute(0, 3, 1, 2)
        patch_pos = F.interpolate(
            patch_pos, size=(grid_h, grid_w), mode="bicubic", align_corners=False
        )
        patch_pos = patch_pos.permute(0, 2, 3, 1).reshape(1, n_patches, -1)
        return torch.cat([cls_pos, patch_pos], dim=1)

    def _prepare_tokens(self, images: torch.Tensor) -> tuple[torch.Tensor, int, int]:
        x, grid_h, grid_w = self.patch_embed(images)
        cls = self.cls_token.expand(x.shape[0], -1, -1)
        x = torch.cat([cls, x], dim=1)
        return x + self._interpolated_pos_embed(grid_h, grid_w), grid_h, grid_w

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        x, _, _ = self._prepare_tokens(images)
        for block in self.blocks:
            x = block(x)
        return self.norm(x)

    @torch.no_grad()
    def last_layer_keys(self, images: torch.Tensor) -> tuple[torch.Tensor, int, int]:
        """Per-head key projections of the final attention layer, concatenated.

        The class token is dropped, so the result is (B, grid_h*grid_w,
        num_heads * head_dim) with the heads concatenated in native order
        along the feature axis.
        """
        x, grid_h, grid_w = self._prepare_tokens(images)
        for block in self.blocks[:-1]:
            x = block(x)
        last = self.blocks[-1]
        _, keys, _ = last.attn.split_qkv(last.norm1(x))  # (B, heads, T, head_dim)
        keys = keys.transpose(1, 2).reshape(x.shape[0], x.shape[1], -1)
        return keys[:, 1:], grid_h, grid_w


class PatchEmbed(nn.Module):
    def __init__(self, patch_size: int, embed_dim: int):
        super().__init__()
        self.proj = nn.Conv2d(3, embed_dim, kernel_size=patch_size, stride=patch_size)

    def forward(self, images: torch.Tensor) -> tuple[torch.Tensor, int, int]:
        h, w = images.shape[-2:]
        patch = self.proj.kernel_size[0]
        if h % patch or w % patch:
            raise ValueError(f"input {h}x{w} is not a multiple of patch size {patch}")
        x = self.proj(images)
        grid_h, grid_w = x.shape[-2:]
        return x.flatten(2).transpose(1, 2), grid_h, grid_w


def build_model(
    name_or_config,
    weights: str | None = None,
    pretrained: bool = True,
) -> VisionTransformer:
    """Instantiate a model by registry name or explicit config.

    ``weights`` points at a local state-dict file; otherwise the published
    checkpoint for the named model is fetched (and cached) unless
    ``pretrained`` is False.
    """
    if isinstance(name_or_config, ViTConfig):
        cfg, url = name_or_config, None
    else:
        if name_or_config not in MODEL_CONFIGS:
            raise ValueError(f"unknown model {name_or_config!r}; options: {sorted(MODEL_CONFIGS)}")
        cfg = MODEL_CONFIGS[name_or_config]
        url = CHECKPOINT_URLS[name_or_config]

    model = VisionTransformer(cfg)
    if weights:
        state = torch.load(weights, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
    elif pretrained:
        if url is None:
            raise ValueError("custom configs need an explicit --weights file")
        state = torch.hub.load_state_dict_from_url(url, map_location="cpu")
        model.load_state_dict(state)
    model.eval()
    return model
