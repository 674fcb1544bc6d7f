"""Command-line pipeline driver.

Subcommands: labels, score, detect, eval, curve, combine, loo. Options can
also come from a JSON config file (--config); explicit flags win on
conflict. Every metric report is written both as an aligned text table and
as tab-separated values, always including the raw counts; curve and
leave-one-out reports additionally render figures unless --no-plots is
given.

Exit codes: 0 success, 1 input/validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import combine as combine_mod
from . import corpus as corpus_mod
from . import detect as detect_mod
from . import labels as labels_mod
from . import metrics as metrics_mod
from . import scores as scores_mod
from .errors import ConfigError, ParseError, PipelineError, ValidationError
from .report import fmt_frac, fmt_pct, format_aligned, format_tsv, write_text_atomic

CURVE_HEADER = ["threshold", "precision", "recall", "accuracy", "f1",
                "purity", "coverage", "fp_intermediate_fraction"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are code 1
        raise ConfigError(message)


def _add_common(p: _Parser):
    p.add_argument("--corpus", help="annotation file or directory of *.json")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON config file; flags win on conflict")
    p.add_argument("--speakers",
                   help="comma-separated speaker ids to include")
    p.add_argument("--exclude-speakers", dest="exclude_speakers",
                   help="comma-separated speaker ids to drop")


def build_parser() -> _Parser:
    ap = _Parser(prog="prosobound",
                 description="Prosodic boundary detection pipeline")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("labels", parents=[], help="emit fuzzy label curves")
    _add_common(p)
    p.add_argument("--mode", choices=["prosodic", "prosodic+intermediate"])
    p.add_argument("--frame-period", dest="frame_period", type=float)
    p.add_argument("--ramp-halfwidth", dest="ramp_halfwidth", type=float)

    p = sub.add_parser("score", help="produce score files (baseline / stitch / average)")
    _add_common(p)
    p.add_argument("--baseline", action="store_true", default=None,
                   help="compute the acoustic pause baseline from --audio")
    p.add_argument("--audio", help="directory of <recording_id>.wav")
    p.add_argument("--stitch", action="store_true", default=None,
                   help="stitch <recording_id>.chunk*.scores from --chunks")
    p.add_argument("--chunks", help="directory of per-chunk score files")
    p.add_argument("--chunk-len", dest="chunk_len", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--average", nargs="+", metavar="DIR",
                   help="average per-recording scores across run directories")

    p = sub.add_parser("detect", help="peak-pick scores and align to words")
    _add_common(p)
    p.add_argument("--scores", help="score file or directory of <recording_id>.scores")
    p.add_argument("--baseline", action="store_true", default=None)
    p.add_argument("--audio")
    p.add_argument("--threshold", type=float)
    p.add_argument("--nms-radius", dest="nms_radius", type=float)
    p.add_argument("--align-radius", dest="align_radius", type=float)
    p.add_argument("--mode", choices=["prosodic", "prosodic+intermediate"],
                   help="picks the default threshold (0.5 / 0.75)")
    p.add_argument("--scope", choices=["all", "within-sentence"])

    p = sub.add_parser("eval", help="evaluate a prediction file")
    _add_common(p)
    p.add_argument("--predictions", help="word-domain or break-marked token file")
    p.add_argument("--scope", choices=["all", "within-sentence"])

    p = sub.add_parser("curve", help="threshold sweep -> curve table + figures")
    _add_common(p)
    p.add_argument("--scores")
    p.add_argument("--baseline", action="store_true", default=None)
    p.add_argument("--audio")
    p.add_argument("--thresholds",
                   help="comma list '0.1,0.5' or range 'start:end:step'")
    p.add_argument("--nms-radius", dest="nms_radius", type=float)
    p.add_argument("--align-radius", dest="align_radius", type=float)
    p.add_argument("--scope", choices=["all", "within-sentence"])
    p.add_argument("--no-plots", dest="no_plots", action="store_true",
                   default=None)

    p = sub.add_parser("combine", help="AND/OR-combine two prediction files")
    _add_common(p)
    p.add_argument("--first", help="prediction file A")
    p.add_argument("--second", help="prediction file B")
    p.add_argument("--op", choices=["and", "or"])
    p.add_argument("--scope", choices=["all", "within-sentence"])

    p = sub.add_parser("loo", help="per-speaker report (leave-one-out layout)")
    _add_common(p)
    p.add_argument("--scores")
    p.add_argument("--baseline", action="store_true", default=None)
    p.add_argument("--audio")
    p.add_argument("--threshold", type=float)
    p.add_argument("--nms-radius", dest="nms_radius", type=float)
    p.add_argument("--align-radius", dest="align_radius", type=float)
    p.add_argument("--mode", choices=["prosodic", "prosodic+intermediate"])
    p.add_argument("--scope", choices=["all", "within-sentence"])
    p.add_argument("--no-plots", dest="no_plots", action="store_true",
                   default=None)

    return ap


class Options:
    """Flag values merged over config-file values; flags win."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._config = {}
        cfg_path = self._args.get("config")
        if cfg_path:
            try:
                with open(cfg_path, encoding="utf-8") as f:
                    self._config = json.load(f)
            except OSError as e:
                raise ConfigError(f"{cfg_path}: {e.strerror or e}") from e
            except json.JSONDecodeError as e:
                raise ConfigError(f"{cfg_path}: invalid JSON at line "
                                  f"{e.lineno}: {e.msg}") from e
            if not isinstance(self._config, dict):
                raise ConfigError(f"{cfg_path}: top level must be an object")

    def get(self, name: str, default=None):
        v = self._args.get(name)
        if v is not None:
            return v
        return self._config.get(name, default)

    def require(self, name: str, flag: str | None = None):
        v = self.get(name)
        if v is None:
            raise ConfigError(f"missing required option --{flag or name}")
        return v


def _speaker_set(value) -> set[str] | None:
    if value is None:
        return None
    if isinstance(value, str):
        return {s.strip() for s in value.split(",") if s.strip()}
    return set(value)


def _load_corpus(opts: Options) -> list[corpus_mod.Recording]:
    recs = corpus_mod.load_corpus(opts.require("corpus"))
    recs = corpus_mod.filter_speakers(
        recs,
        include=_speaker_set(opts.get("speakers")),
        exclude=_speaker_set(opts.get("exclude_speakers")),
    )
    if not recs:
        raise ValidationError("speaker filtering left an empty corpus")
    return sorted(recs, key=lambda r: r.id)


def _mode(opts: Options) -> corpus_mod.BoundaryKind:
    return corpus_mod.BoundaryKind(opts.get("mode", "prosodic"))


def _scope(opts: Options) -> corpus_mod.Scope:
    return corpus_mod.Scope(opts.get("scope", "all"))


def _detector_config(opts: Options) -> detect_mod.DetectorConfig:
    threshold = opts.get("threshold")
    if threshold is None:
        mode = _mode(opts)
        threshold = (0.75 if mode is corpus_mod.BoundaryKind.PROSODIC_AND_INTERMEDIATE
                     else 0.5)
    return detect_mod.DetectorConfig(
        threshold=float(threshold),
        nms_radius_s=float(opts.get("nms_radius", 0.25)),
        align_radius_s=float(opts.get("align_radius", 0.1)),
    )


def _load_scores(recs, opts: Options) -> dict[str, scores_mod.FrameScores]:
    """Per-recording scores from --scores files or the --baseline scorer.
    Imported values are clipped to [0, 1] before detection."""
    out = {}
    if opts.get("baseline"):
        audio_dir = Path(opts.require("audio"))
        for rec in recs:
            wav = audio_dir / f"{rec.id}.wav"
            if not wav.exists():
                raise PipelineError(
                    f"missing audio for recording '{rec.id}' "
                    f"(speaker '{rec.speaker_id}'): {wav}"
                )
            samples, rate = scores_mod.read_wav(wav)
            out[rec.id] = scores_mod.baseline_score(samples, rate)
        return out

    src = Path(opts.require("scores"))
    if src.is_file():
        if len(recs) != 1:
            raise ConfigError(
                "--scores points at a single file but the corpus has "
                f"{len(recs)} recordings; pass a directory"
            )
        return {recs[0].id: scores_mod.read_scores(src).clipped()}
    for rec in recs:
        f = src / f"{rec.id}.scores"
        if not f.exists():
            raise PipelineError(
                f"missing score file for recording '{rec.id}' "
                f"(speaker '{rec.speaker_id}'): {f}"
            )
        out[rec.id] = scores_mod.read_scores(f).clipped()
    return out


def _detect_recording(rec, frame_scores, cfg):
    peaks = detect_mod.detect_peaks(frame_scores, cfg)
    aligned, dropped = detect_mod.align_to_words(peaks, rec, cfg)
    return peaks, aligned, dropped


def _parse_thresholds(spec) -> list[float]:
    if isinstance(spec, (int, float)):
        values = [float(spec)]
    elif isinstance(spec, (list, tuple)):
        values = [float(v) for v in spec]
    elif ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad threshold range '{spec}' (want start:end:step)")
        start, end, step = (float(p) for p in parts)
        if step <= 0 or end < start:
            raise ConfigError(f"bad threshold range '{spec}'")
        n = int(round((end - start) / step))
        values = [round(start + i * step, 10) for i in range(n + 1)]
        values = [v for v in values if v <= end + 1e-12]
    else:
        values = [float(v) for v in spec.split(",") if v.strip()]
    if not values:
        raise ConfigError("empty threshold list")
    return values


def _out_dir(opts: Options) -> Path:
    out = Path(opts.require("out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands


def cmd_labels(opts: Options) -> int:
    recs = _load_corpus(opts)
    out = _out_dir(opts)
    cfg = labels_mod.LabelConfig(
        frame_period_s=float(opts.get("frame_period",
                                      scores_mod.DEFAULT_FRAME_PERIOD_S)),
        ramp_halfwidth_s=float(opts.get("ramp_halfwidth", 0.2)),
        mode=_mode(opts),
    )
    for rec in recs:
        curve = labels_mod.make_label_curve(rec, cfg)
        tmp = out / f"{rec.id}.scores"
        scores_mod.write_scores(curve.to_scores(f"labels:{rec.id}"), tmp)
        print(f"{rec.id}: {len(curve)} frames -> {tmp}")
    return 0


def cmd_score(opts: Options) -> int:
    recs = _load_corpus(opts)
    out = _out_dir(opts)
    chosen = [name for name in ("baseline", "stitch", "average")
              if opts.get(name)]
    if len(chosen) != 1:
        raise ConfigError("pick exactly one of --baseline, --stitch, --average")

    if chosen[0] == "baseline":
        audio_dir = Path(opts.require("audio"))
        params = scores_mod.BaselineParams(
            silence_energy_quantile=float(opts.get("silence_quantile", 0.10)),
            min_pause_s=float(opts.get("min_pause", 0.08)),
            full_credit_pause_s=float(opts.get("full_credit_pause", 0.4)),
        )
        for rec in recs:
            wav = audio_dir / f"{rec.id}.wav"
            if not wav.exists():
                raise PipelineError(f"missing audio for recording '{rec.id}': {wav}")
            samples, rate = scores_mod.read_wav(wav)
            result = scores_mod.baseline_score(samples, rate, params)
            scores_mod.write_scores(result, out / f"{rec.id}.scores")
            print(f"{rec.id}: baseline -> {out / f'{rec.id}.scores'}")
    elif chosen[0] == "stitch":
        chunk_dir = Path(opts.require("chunks"))
        chunk_len = float(opts.get("chunk_len", 30.0))
        step = float(opts.get("step", 15.0))
        for rec in recs:
            files = sorted(chunk_dir.glob(f"{rec.id}.chunk*.scores"))
            if not files:
                raise PipelineError(f"no chunk files for recording '{rec.id}' "
                                    f"in {chunk_dir}")
            plan = scores_mod.plan_chunks(rec.duration_s, chunk_len, step)
            chunks = [scores_mod.read_scores(f) for f in files]
            stitched = scores_mod.stitch(chunks, plan)
            scores_mod.write_scores(stitched, out / f"{rec.id}.scores")
            print(f"{rec.id}: stitched {len(files)} chunks -> "
                  f"{out / f'{rec.id}.scores'}")
    else:
        run_dirs = [Path(d) for d in opts.get("average")]
        for rec in recs:
            runs = []
            for d in run_dirs:
                f = d / f"{rec.id}.scores"
                if not f.exists():
                    raise PipelineError(f"missing score file for recording "
                                        f"'{rec.id}': {f}")
                runs.append(scores_mod.read_scores(f))
            avg = scores_mod.average_seeds(runs)
            scores_mod.write_scores(avg, out / f"{rec.id}.scores")
            print(f"{rec.id}: averaged {len(runs)} runs -> "
                  f"{out / f'{rec.id}.scores'}")
    return 0


def cmd_detect(opts: Options) -> int:
    recs = _load_corpus(opts)
    out = _out_dir(opts)
    cfg = _detector_config(opts)
    scope = _scope(opts)
    score_map = _load_scores(recs, opts)

    word_preds: list[detect_mod.WordPrediction] = []
    n_dropped = 0
    for rec in recs:
        peaks, aligned, dropped = _detect_recording(rec, score_map[rec.id], cfg)
        detect_mod.write_time_predictions(peaks, out / f"{rec.id}.peaks.tsv")
        word_preds.extend(detect_mod.filter_scope(aligned, rec, scope))
        n_dropped += len(dropped)
    detect_mod.write_word_predictions(word_preds, out / "predictions.tsv")
    print(f"{len(word_preds)} word predictions "
          f"({n_dropped} peaks dropped as unalignable) -> "
          f"{out / 'predictions.tsv'}")
    return 0


def _read_predictions(path: Path, recs) -> list[detect_mod.WordPrediction]:
    """Accept either prediction format; the field count per line tells them
    apart (4 = word-domain, 3 = break-marked tokens)."""
    with open(path, encoding="utf-8") as f:
        first = ""
        for line in f:
            if line.strip():
                first = line
                break
    if not first:  # an empty prediction set is a valid result
        return []
    n_fields = len(first.rstrip("\n").split("\t"))
    if n_fields == 4:
        return detect_mod.read_word_predictions(path, recs)
    if n_fields == 3:
        bset = combine_mod.parse_external_predictions(path, recs)
        word_ends = {}
        for rec in recs:
            for sent, i, w in rec.iter_words():
                word_ends[(rec.id, sent.id, i)] = w.end_s
        return [detect_mod.WordPrediction(r, s, i, word_ends[(r, s, i)], 1.0)
                for (r, s, i) in sorted(bset.entries)]
    raise ParseError(f"{path}: cannot identify prediction format "
                     f"({n_fields} tab-separated fields)")


def _eval_rows(counts, breakdown, purity, coverage):
    m = metrics_mod.compute_metrics(counts)
    frac = (breakdown.fp_intermediate / breakdown.fp) if breakdown.fp else None
    headers = ["accuracy", "precision", "recall", "f1", "purity", "coverage",
               "fp_intermediate_fraction", "tp", "fp", "fn", "tn",
               "fp_intermediate", "fp_nobreak", "candidates"]
    row = [fmt_pct(m.accuracy), fmt_pct(m.precision), fmt_pct(m.recall),
           fmt_pct(m.f1), fmt_pct(purity), fmt_pct(coverage), fmt_frac(frac, 4),
           str(counts.tp), str(counts.fp), str(counts.fn), str(counts.tn),
           str(breakdown.fp_intermediate), str(breakdown.fp_nobreak),
           str(counts.total)]
    return headers, row


def cmd_eval(opts: Options) -> int:
    recs = _load_corpus(opts)
    out = _out_dir(opts)
    scope = _scope(opts)
    preds = _read_predictions(Path(opts.require("predictions")), recs)

    by_rec: dict[str, list[detect_mod.WordPrediction]] = {r.id: [] for r in recs}
    for p in preds:
        if p.recording_id not in by_rec:
            raise ValidationError(f"prediction references unknown recording "
                                  f"'{p.recording_id}'")
        by_rec[p.recording_id].append(p)

    counts = metrics_mod.DetectionCounts()
    breakdown = metrics_mod.FpBreakdown()
    pur_num = pur_den = cov_num = cov_den = 0.0
    for rec in recs:
        scoped = detect_mod.filter_scope(by_rec[rec.id], rec, scope)
        counts = counts + metrics_mod.count_word_level(scoped, rec, scope)
        breakdown = breakdown + metrics_mod.fp_breakdown(scoped, rec, scope)
        if scope is corpus_mod.Scope.ALL:
            times = sorted({p.time_s for p in scoped
                            if 0 < p.time_s < rec.duration_s})
            sys_seg = metrics_mod.segmentation_from_boundaries(times, rec.duration_s)
            ref_seg = metrics_mod.reference_segmentation(rec)
            pur_num += metrics_mod.max_overlap_sum(sys_seg, ref_seg)
            pur_den += sys_seg.total_s
            cov_num += metrics_mod.max_overlap_sum(ref_seg, sys_seg)
            cov_den += ref_seg.total_s

    purity = pur_num / pur_den if pur_den else None
    coverage = cov_num / cov_den if cov_den else None
    headers, row = _eval_rows(counts, breakdown, purity, coverage)

    table = format_aligned(["metric", "value"],
                           [[h, v] for h, v in zip(headers, row)])
    header_line = (f"scope: {scope.value}   predictions: "
                   f"{opts.get('predictions')}\n")
    write_text_atomic(out / "eval_report.txt", header_line + table)
    write_text_atomic(out / "eval_report.tsv", format_tsv(headers, [row]))
    sys.stdout.write(header_line + table)
    return 0


def cmd_curve(opts: Options) -> int:
    recs = _load_corpus(opts)
    out = _out_dir(opts)
    scope = _scope(opts)
    cfg = _detector_config(opts)
    thresholds = _parse_thresholds(opts.require("thresholds"))
    score_map = _load_scores(recs, opts)

    rows = metrics_mod.sweep(score_map, recs, thresholds, scope, cfg)

    tsv_rows = [[fmt_frac(r.threshold), fmt_frac(r.metric.precision),
                 fmt_frac(r.metric.recall), fmt_frac(r.metric.accuracy),
                 fmt_frac(r.metric.f1), fmt_frac(r.purity),
                 fmt_frac(r.coverage), fmt_frac(r.fp_intermediate_fraction)]
                for r in rows]
    write_text_atomic(out / "curve.tsv", format_tsv(CURVE_HEADER, tsv_rows))

    count_rows = [[fmt_frac(r.threshold), str(r.counts.tp), str(r.counts.fp),
                   str(r.counts.fn), str(r.counts.tn), str(r.n_predictions)]
                  for r in rows]
    write_text_atomic(out / "curve_counts.tsv",
                      format_tsv(["threshold", "tp", "fp", "fn", "tn",
                                  "n_predictions"], count_rows))

    if not opts.get("no_plots"):
        from . import plots
        plots.plot_precision_recall(rows, out / "curve_pr.png")
        plots.plot_purity_coverage(rows, out / "curve_purity_coverage.png")
    print(f"{len(rows)} thresholds -> {out / 'curve.tsv'}")
    return 0


def cmd_combine(opts: Options) -> int:
    recs = _load_corpus(opts)
    out = _out_dir(opts)
    scope = _scope(opts)
    mode = combine_mod.CombineMode(opts.require("op"))

    sets = []
    for name in ("first", "second"):
        preds = _read_predictions(Path(opts.require(name)), recs)
        scoped = []
        for rec in recs:
            mine = [p for p in preds if p.recording_id == rec.id]
            scoped.extend(detect_mod.filter_scope(mine, rec, scope))
        entries = frozenset(p.key for p in scoped)
        sets.append(combine_mod.WordBoundarySet(
            entries, origin=Path(opts.require(name)).name))

    combined = combine_mod.combine(sets[0], sets[1], mode)
    combine_mod.validate_entries(combined.entries, recs)
    dest = out / "combined.breaks.tsv"
    combine_mod.write_external_predictions(combined, recs, dest)
    print(f"{len(sets[0].entries)} {mode.name} {len(sets[1].entries)} -> "
          f"{len(combined.entries)} boundaries -> {dest}")
    return 0


def cmd_loo(opts: Options) -> int:
    recs = _load_corpus(opts)
    out = _out_dir(opts)
    scope = _scope(opts)
    cfg = _detector_config(opts)
    score_map = _load_scores(recs, opts)

    speakers = sorted({r.speaker_id for r in recs})
    headers = ["speaker", "sentences", "acc", "precision", "recall", "f1",
               "tp", "fp", "fn", "tn"]
    table_rows = []
    points = {}
    total = metrics_mod.DetectionCounts()
    total_sents = 0

    for spk in speakers:
        counts = metrics_mod.DetectionCounts()
        n_sents = 0
        for rec in [r for r in recs if r.speaker_id == spk]:
            _, aligned, _ = _detect_recording(rec, score_map[rec.id], cfg)
            scoped = detect_mod.filter_scope(aligned, rec, scope)
            counts = counts + metrics_mod.count_word_level(scoped, rec, scope)
            n_sents += len(rec.sentences)
        m = metrics_mod.compute_metrics(counts)
        table_rows.append([spk, str(n_sents), fmt_pct(m.accuracy),
                           fmt_pct(m.precision), fmt_pct(m.recall),
                           fmt_pct(m.f1), str(counts.tp), str(counts.fp),
                           str(counts.fn), str(counts.tn)])
        points[spk] = (m.recall, m.precision)
        total = total + counts
        total_sents += n_sents

    m = metrics_mod.compute_metrics(total)
    table_rows.append(["all", str(total_sents), fmt_pct(m.accuracy),
                       fmt_pct(m.precision), fmt_pct(m.recall), fmt_pct(m.f1),
                       str(total.tp), str(total.fp), str(total.fn),
                       str(total.tn)])
    points["all"] = (m.recall, m.precision)

    header_line = (f"scope: {scope.value}   threshold: {cfg.threshold}   "
                   f"speakers: {len(speakers)}\n")
    text = header_line + format_aligned(headers, table_rows)
    write_text_atomic(out / "loo_report.txt", text)
    write_text_atomic(out / "loo_report.tsv", format_tsv(headers, table_rows))
    if not opts.get("no_plots"):
        from . import plots
        plots.plot_speaker_points(points, out / "loo_pr.png")
    sys.stdout.write(text)
    return 0


COMMANDS = {
    "labels": cmd_labels,
    "score": cmd_score,
    "detect": cmd_detect,
    "eval": cmd_eval,
    "curve": cmd_curve,
    "combine": cmd_combine,
    "loo": cmd_loo,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        opts = Options(args)
        return COMMANDS[args.command](opts)
    except PipelineError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception:  # internal invariant violation
        import traceback

        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
