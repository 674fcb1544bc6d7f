"""Frame-level boundary regressor.

A small convolutional encoder with a total stride of 320 samples, so at
16 kHz every output frame covers exactly 20 ms and an input padded to a
multiple of 320 samples yields exactly ceil(n_samples / 320) frames. The
head is linear (unbounded); scores are regression outputs, clipped only by
the downstream consumer.

Identifiers accepted by build_model:
  "tiny-v1"      the built-in architecture, freshly initialized
  <path>.pt      a checkpoint produced by this package (warm start)
"""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn

from .dataio import FRAME_STRIDE, DataError

ARCHITECTURES = {"tiny-v1": dict(hidden=48)}


class FrameRegressor(nn.Module):
    total_stride = FRAME_STRIDE

    def __init__(self, hidden: int = 48):
        super().__init__()
        self.hidden = hidden
        self.frontend = nn.Sequential(
            nn.Conv1d(1, hidden, kernel_size=5, stride=5),
            nn.GroupNorm(1, hidden),
            nn.GELU(),
            nn.Conv1d(hidden, hidden, kernel_size=4, stride=4),
            nn.GELU(),
            nn.Conv1d(hidden, hidden, kernel_size=4, stride=4),
            nn.GELU(),
            nn.Conv1d(hidden, hidden, kernel_size=4, stride=4),
            nn.GELU(),
        )
        self.context = nn.Sequential(
            nn.Conv1d(hidden, hidden, kernel_size=9, padding=4),
            nn.GELU(),
            nn.Conv1d(hidden, hidden, kernel_size=9, padding=4),
            nn.GELU(),
        )
        self.head = nn.Conv1d(hidden, 1, kernel_size=1)

    def forward(self, wav: torch.Tensor) -> torch.Tensor:
        """(batch, n_samples) -> (batch, n_samples // 320); n_samples must
        be a multiple of the total stride."""
        if wav.shape[-1] % self.total_stride:
            raise ValueError(
                f"input length {wav.shape[-1]} is not a multiple of "
                f"{self.total_stride}; pad first"
            )
        x = self.frontend(wav.unsqueeze(1))
        x = self.context(x)
        return self.head(x).squeeze(1)


def pad_to_frames(samples: torch.Tensor, n_frames: int) -> torch.Tensor:
    """Right-pad with zeros so the encoder emits exactly n_frames."""
    want = n_frames * FRAME_STRIDE
    if samples.shape[-1] > want:
        raise ValueError(f"{samples.shape[-1]} samples exceed "
                         f"{n_frames} frames worth of audio")
    return nn.functional.pad(samples, (0, want - samples.shape[-1]))


def build_model(identifier: str) -> FrameRegressor:
    if identifier in ARCHITECTURES:
        return FrameRegressor(**ARCHITECTURES[identifier])
    path = Path(identifier)
    if path.suffix == ".pt" and path.exists():
        return load_checkpoint(path)
    raise DataError(
        f"unknown model identifier '{identifier}' (expected one of "
        f"{sorted(ARCHITECTURES)} or a .pt checkpoint path)"
    )


def save_checkpoint(model: FrameRegressor, path: str | Path,
                    extra: dict | None = None) -> None:
    torch.save({"arch": "tiny-v1", "hidden": model.hidden,
                "state_dict": model.state_dict(),
                "extra": extra or {}}, path)


def load_checkpoint(path: str | Path) -> FrameRegressor:
    try:
        blob = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise DataError(f"{path}: cannot load checkpoint: {e}") from e
    model = FrameRegressor(hidden=int(blob["hidden"]))
    model.load_state_dict(blob["state_dict"])
    return model
