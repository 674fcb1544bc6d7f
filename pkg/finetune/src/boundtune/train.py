"""Fine-tuning loop: per-frame MSE regression onto fuzzy boundary targets.

Audio is processed in overlapping chunks (the same plan the stitcher
expects); every chunk is one optimization step. One model is trained per
seed with identical settings, and each run writes a checkpoint plus a
tab-separated per-epoch loss log whose header records the optimizer
settings (they are implementation defaults, not inherited from anywhere).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from . import dataio
from .dataio import Annotation, DataError
from .model import build_model, pad_to_frames, save_checkpoint


@dataclass(frozen=True)
class TrainSpec:
    corpus: str
    out_dir: str
    pretrained_model: str = "tiny-v1"
    mode: str = "prosodic"  # or "prosodic+intermediate"
    chunk_len_s: float = 30.0
    step_s: float = 15.0
    epochs: int = 5
    learning_rate: float = 1e-3
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    held_out_speaker: str | None = None

    def __post_init__(self):
        if not self.seeds:
            raise DataError("seed list must be non-empty")
        if self.epochs < 1:
            raise DataError("epochs must be >= 1")

    @classmethod
    def from_config(cls, path: str | Path, **overrides) -> "TrainSpec":
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        doc.update({k: v for k, v in overrides.items() if v is not None})
        if "seeds" in doc:
            doc["seeds"] = tuple(int(s) for s in doc["seeds"])
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(doc) - known
        if unknown:
            raise DataError(f"{path}: unknown config keys: {sorted(unknown)}")
        return cls(**doc)


def _load_training_set(spec: TrainSpec) -> list[tuple[Annotation, np.ndarray]]:
    corpus_dir = Path(spec.corpus)
    anns = dataio.load_corpus(corpus_dir)
    kept = [a for a in anns if a.speaker_id != spec.held_out_speaker]
    if not kept:
        raise DataError("held-out speaker exclusion left no training data")
    out = []
    for ann in kept:
        wav = corpus_dir / f"{ann.recording_id}.wav"
        samples, rate = dataio.load_wav(wav)
        if rate != dataio.SAMPLE_RATE:
            raise DataError(f"{wav}: expected {dataio.SAMPLE_RATE} Hz audio, "
                            f"got {rate}")
        n_audio = dataio.frame_count(len(samples) / rate)
        n_label = dataio.frame_count(ann.duration_s)
        if n_audio != n_label:
            raise DataError(
                f"recording '{ann.recording_id}': audio covers {n_audio} "
                f"frames but the annotation implies {n_label}"
            )
        out.append((ann, samples))
    return out


def _chunks(spec: TrainSpec, data) -> list[tuple[torch.Tensor, torch.Tensor]]:
    """(padded samples, frame targets) per plan window of every recording."""
    chunks = []
    for ann, samples in data:
        targets = dataio.fuzzy_targets(ann, spec.mode)
        for w in dataio.plan_windows(ann.duration_s, spec.chunk_len_s,
                                     spec.step_s):
            a, b = dataio.window_frames(*w)
            seg = torch.from_numpy(
                samples[a * dataio.FRAME_STRIDE:b * dataio.FRAME_STRIDE].copy())
            chunks.append((pad_to_frames(seg, b - a),
                           torch.from_numpy(targets[a:b]).float()))
    return chunks


def finetune(spec: TrainSpec) -> list[Path]:
    """Train one model per seed; returns the checkpoint paths.

    Writes, per seed, ``seed<k>.pt`` and ``seed<k>.loss.tsv``, plus a
    ``manifest.tsv`` listing the recordings actually trained on.
    """
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = _load_training_set(spec)

    manifest = ["recording_id\tspeaker_id"]
    manifest += [f"{a.recording_id}\t{a.speaker_id}" for a, _ in data]
    (out_dir / "manifest.tsv").write_text("\n".join(manifest) + "\n")

    base_chunks = _chunks(spec, data)
    checkpoints = []
    for seed in spec.seeds:
        torch.manual_seed(seed)
        model = build_model(spec.pretrained_model)
        model.train()
        opt = torch.optim.Adam(model.parameters(), lr=spec.learning_rate)
        order_rng = np.random.default_rng(seed)

        log = [
            "# optimizer adam",
            f"# learning_rate {spec.learning_rate}",
            "# batch_size 1 (one chunk per step)",
            f"# chunks_per_epoch {len(base_chunks)}",
            f"# model {spec.pretrained_model}",
            f"# seed {seed}",
            "epoch\tmse",
        ]
        for epoch in range(1, spec.epochs + 1):
            sq_sum = 0.0
            n_frames = 0
            for i in order_rng.permutation(len(base_chunks)):
                wav, target = base_chunks[int(i)]
                opt.zero_grad()
                pred = model(wav.unsqueeze(0)).squeeze(0)
                loss = torch.mean((pred - target) ** 2)
                loss.backward()
                opt.step()
                sq_sum += loss.item() * len(target)
                n_frames += len(target)
            log.append(f"{epoch}\t{sq_sum / n_frames:.8f}")

        ckpt = out_dir / f"seed{seed}.pt"
        save_checkpoint(model, ckpt, extra={"seed": seed, "mode": spec.mode})
        (out_dir / f"seed{seed}.loss.tsv").write_text("\n".join(log) + "\n")
        checkpoints.append(ckpt)
    return checkpoints


def read_loss_log(path: str | Path) -> list[tuple[int, float]]:
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or line.startswith("epoch"):
            continue
        epoch, mse = line.split("\t")
        rows.append((int(epoch), float(mse)))
    return rows


__all__ = ["TrainSpec", "finetune", "read_loss_log"]
