"""Score export: run trained checkpoints over audio and write score files.

Per checkpoint (seed) the exporter writes either stitched per-recording
files or raw per-chunk files; optionally it also writes a pre-averaged
directory combining all seeds. Averaging uses the 6-decimal values as they
appear in the written files, so averaging the per-seed files downstream
reproduces the pre-averaged file to within one final rounding step.

Layout under the output directory:

    seed<k>/<recording_id>.scores             (stitched; default)
    seed<k>/<recording_id>.chunk<ccc>.scores  (with per_chunk=True)
    average/<recording_id>.scores             (with average=True)
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from . import dataio
from .dataio import DataError, ExportError
from .model import load_checkpoint, pad_to_frames


def _score_windows(model, samples: np.ndarray,
                   windows) -> list[np.ndarray]:
    out = []
    with torch.no_grad():
        for w in windows:
            a, b = dataio.window_frames(*w)
            seg = torch.from_numpy(
                samples[a * dataio.FRAME_STRIDE:b * dataio.FRAME_STRIDE].copy())
            pred = model(pad_to_frames(seg, b - a).unsqueeze(0)).squeeze(0)
            values = pred.numpy().astype(np.float64)
            if len(values) != b - a:
                raise ExportError(
                    f"window {w}: model produced {len(values)} frames, "
                    f"expected {b - a}"
                )
            out.append(values)
    return out


def export_scores(
    checkpoints: list[str | Path],
    corpus_dir: str | Path,
    out_dir: str | Path,
    chunk_len_s: float = 30.0,
    step_s: float = 15.0,
    per_chunk: bool = False,
    average: bool = False,
) -> list[Path]:
    """Score every recording of the corpus with every checkpoint; returns
    the written file paths."""
    if not checkpoints:
        raise DataError("no checkpoints given")
    if average and per_chunk:
        raise DataError("pre-averaging applies to stitched exports only")
    corpus_dir = Path(corpus_dir)
    out_dir = Path(out_dir)
    anns = dataio.load_corpus(corpus_dir)

    written = []
    stitched_by_rec: dict[str, list[np.ndarray]] = {a.recording_id: []
                                                    for a in anns}
    for ckpt in checkpoints:
        model = load_checkpoint(ckpt)
        model.eval()
        seed_dir = out_dir / Path(ckpt).stem
        seed_dir.mkdir(parents=True, exist_ok=True)
        for ann in anns:
            samples, rate = dataio.load_wav(corpus_dir / f"{ann.recording_id}.wav")
            if rate != dataio.SAMPLE_RATE:
                raise DataError(f"{ann.recording_id}: expected "
                                f"{dataio.SAMPLE_RATE} Hz audio, got {rate}")
            windows = dataio.plan_windows(ann.duration_s, chunk_len_s, step_s)
            chunks = _score_windows(model, samples, windows)
            if per_chunk:
                for k, values in enumerate(chunks):
                    path = seed_dir / f"{ann.recording_id}.chunk{k:03d}.scores"
                    dataio.write_scores(values, path)
                    written.append(path)
            else:
                stitched = dataio.stitch_frames(chunks, windows, ann.duration_s)
                path = seed_dir / f"{ann.recording_id}.scores"
                dataio.write_scores(stitched, path)
                written.append(path)
                stitched_by_rec[ann.recording_id].append(
                    np.round(stitched, 6))

    if average:
        avg_dir = out_dir / "average"
        avg_dir.mkdir(parents=True, exist_ok=True)
        for ann in anns:
            runs = stitched_by_rec[ann.recording_id]
            path = avg_dir / f"{ann.recording_id}.scores"
            dataio.write_scores(np.mean(np.stack(runs), axis=0), path)
            written.append(path)
    return written
