"""Command-line interface.

Subcommands: embed-dataset, train, benchmark, analyze, survey, serve,
demo-assets. Every artifact embeds the schema version and a fingerprint
of the run configuration; re-running a command with identical inputs and
seed produces byte-identical output files. The model cache directory can
be set with the SCREENCENSUS_CACHE_DIR environment variable.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import replace
from pathlib import Path

import click

from . import bench, figures, pipeline, surveystats
from .aggregate import document_to_json
from .classifier import TrainConfig, load_head, save_head, train_head
from .config import RunConfig
from .embedder import EmbeddingCache, Encoder
from .errors import InputError, ModelLoadError, NoFacesError, TrainingError
from .facedet import FaceDetector

logger = logging.getLogger("screencensus")

_PIPELINE_ERRORS = (InputError, ModelLoadError, TrainingError, NoFacesError)


def _cache_from(cache_dir):
    cache_dir = cache_dir or os.environ.get("SCREENCENSUS_CACHE_DIR")
    return EmbeddingCache(cache_dir) if cache_dir else None


def _fail(exc: Exception):
    raise click.ClickException(str(exc))


@click.group()
@click.option("--verbose", is_flag=True, help="Enable info-level logging.")
def main(verbose):
    """Face-level gender/age representation analytics for media."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command("embed-dataset")
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--images-root", required=True, type=click.Path(exists=True))
@click.option("--encoder", "encoder_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--cache-dir", type=click.Path(), default=None,
              help="Embedding cache directory (or SCREENCENSUS_CACHE_DIR).")
@click.option("--limit", type=int, default=None, help="Embed a seeded subset.")
@click.option("--seed", type=int, default=0)
def embed_dataset_cmd(manifest, images_root, encoder_dir, out_path, cache_dir,
                      limit, seed):
    """Embed a labeled image manifest into a training pack (.npz)."""
    try:
        encoder = Encoder(encoder_dir)
        cache = _cache_from(cache_dir)
        vectors, genders, ages, paths = pipeline.embed_dataset(
            manifest, images_root, encoder, cache=cache, limit=limit, seed=seed
        )
        config = RunConfig(checkpoint_id=encoder.checkpoint_id, seed=seed,
                           extras={"manifest": str(manifest), "limit": limit})
        pipeline.save_pack(out_path, vectors, genders, ages, paths,
                           encoder.checkpoint_id, config.fingerprint())
    except _PIPELINE_ERRORS as exc:
        _fail(exc)
    click.echo(f"wrote {out_path} ({vectors.shape[0]} x {vectors.shape[1]}, "
               f"checkpoint {encoder.checkpoint_id})")


@main.command("train")
@click.option("--task", required=True, type=click.Choice(["gender", "age"]))
@click.option("--pack", "pack_path", type=click.Path(exists=True), default=None,
              help="Embedding pack from embed-dataset.")
@click.option("--manifest", type=click.Path(exists=True), default=None,
              help="Labeled manifest (embeds on the fly; needs --images-root "
                   "and --encoder).")
@click.option("--images-root", type=click.Path(exists=True), default=None)
@click.option("--encoder", "encoder_dir", type=click.Path(exists=True), default=None)
@click.option("--cache-dir", type=click.Path(), default=None)
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Head metadata path (.json); the weight blob sits next to it.")
@click.option("--l2", "l2_lambda", type=float, default=None,
              help="L2 strength; omitted -> grid selection on a held-out split.")
@click.option("--seed", type=int, default=0)
def train_cmd(task, pack_path, manifest, images_root, encoder_dir, cache_dir,
              out_path, l2_lambda, seed):
    """Train a softmax head from an embedding pack or a labeled manifest."""
    try:
        if pack_path is not None:
            vectors, genders, ages, _, checkpoint_id = pipeline.load_pack(pack_path)
        elif manifest is not None:
            if not images_root or not encoder_dir:
                raise InputError("--manifest needs --images-root and --encoder")
            enc = Encoder(encoder_dir)
            vectors, genders, ages, _ = pipeline.embed_dataset(
                manifest, images_root, enc, cache=_cache_from(cache_dir), seed=seed
            )
            checkpoint_id = enc.checkpoint_id
        else:
            raise InputError("provide --pack or --manifest")
        labels = genders if task == "gender" else ages
        head = train_head(
            (vectors, labels),
            TrainConfig(task=task, l2_lambda=l2_lambda, seed=seed,
                        checkpoint_id=checkpoint_id),
        )
        out_path = Path(out_path).with_suffix(".json")
        save_head(head, out_path)
    except _PIPELINE_ERRORS as exc:
        _fail(exc)
    meta = head.train_meta
    click.echo(
        f"trained {task} head: lambda={head.l2_lambda} "
        f"iterations={meta['iterations']} final_loss={meta['final_loss']:.6f}"
    )
    click.echo(f"wrote {out_path} and {out_path.with_suffix('.bin')}")


@main.command("benchmark")
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--images-root", required=True, type=click.Path(exists=True))
@click.option("--encoder", "encoder_dir", required=True, type=click.Path(exists=True))
@click.option("--gender-head", type=click.Path(exists=True), default=None)
@click.option("--age-head", type=click.Path(exists=True), default=None)
@click.option("--zero-shot/--no-zero-shot", default=True)
@click.option("--limit", type=int, default=None,
              help="Benchmark a seeded subset of the manifest.")
@click.option("--seed", type=int, default=0)
@click.option("--logit-scale", type=float, default=None,
              help="Zero-shot temperature (defaults to the checkpoint's).")
@click.option("--cache-dir", type=click.Path(), default=None)
@click.option("--out-dir", required=True, type=click.Path())
def benchmark_cmd(manifest, images_root, encoder_dir, gender_head, age_head,
                  zero_shot, limit, seed, logit_scale, cache_dir, out_dir):
    """Evaluate heads and/or the zero-shot baseline on a labeled manifest."""
    try:
        encoder = Encoder(encoder_dir)
        cache = _cache_from(cache_dir)
        g_head = load_head(gender_head) if gender_head else None
        a_head = load_head(age_head) if age_head else None
        reports, bias = pipeline.run_benchmark(
            manifest, images_root, encoder, g_head, a_head, cache=cache,
            zero_shot=zero_shot, limit=limit, seed=seed, logit_scale=logit_scale,
        )
    except _PIPELINE_ERRORS as exc:
        _fail(exc)

    config = RunConfig(
        checkpoint_id=encoder.checkpoint_id,
        gender_head_path=str(gender_head or ""),
        age_head_path=str(age_head or ""),
        logit_scale=logit_scale if logit_scale is not None else encoder.logit_scale,
        output_dir=str(out_dir), seed=seed,
        extras={"manifest": str(manifest), "limit": limit, "zero_shot": zero_shot},
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "benchmark.json").write_text(
        bench.report_to_json(reports, config.fingerprint())
    )
    table = bench.format_report_table(reports)
    (out_dir / "benchmark_table.txt").write_text(table)
    figures.save_benchmark_figure(reports, out_dir / "benchmark.png")
    if bias is not None:
        (out_dir / "bias_profile.json").write_text(
            json.dumps(pipeline.bias_to_json(bias), indent=2) + "\n"
        )
    click.echo(table)
    click.echo(f"wrote reports under {out_dir}")


@main.command("analyze")
@click.option("--video", "video_path", required=True, type=click.Path(exists=True))
@click.option("--film-id", required=True, help="User-supplied film label.")
@click.option("--encoder", "encoder_dir", required=True, type=click.Path(exists=True))
@click.option("--detector", "detector_path", required=True, type=click.Path(exists=True))
@click.option("--gender-head", required=True, type=click.Path(exists=True))
@click.option("--age-head", required=True, type=click.Path(exists=True))
@click.option("--fps", type=float, default=1.0, show_default=True,
              help="Frame sampling rate.")
@click.option("--threshold", type=float, default=0.9, show_default=True,
              help="Face detection confidence threshold.")
@click.option("--bias-profile", "bias_path", type=click.Path(exists=True),
              default=None, help="bias_profile.json from a benchmark run.")
@click.option("--age-confidence-mode", type=click.Choice(["binarized", "argmax9"]),
              default="binarized", show_default=True)
@click.option("--cache-dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out-dir", required=True, type=click.Path())
def analyze_cmd(video_path, film_id, encoder_dir, detector_path, gender_head,
                age_head, fps, threshold, bias_path, age_confidence_mode,
                cache_dir, seed, out_dir):
    """Analyze a video into a film analytics document plus figure."""
    config = RunConfig(
        checkpoint_id="", detector_path=str(detector_path), fps=fps,
        detection_threshold=threshold, gender_head_path=str(gender_head),
        age_head_path=str(age_head), age_confidence_mode=age_confidence_mode,
        output_dir=str(out_dir), seed=seed,
    )
    try:
        config.require_files("detector_path", "gender_head_path", "age_head_path")
        encoder = Encoder(encoder_dir)
        config = replace(config, checkpoint_id=encoder.checkpoint_id)
        detector = FaceDetector(detector_path)
        g_head = load_head(gender_head)
        a_head = load_head(age_head)
        bias = None
        if bias_path:
            bias = pipeline.bias_from_json(json.loads(Path(bias_path).read_text()))
        cache = _cache_from(cache_dir)
        analytics, doc, n_frames = pipeline.analyze_video(
            video_path, config, encoder, detector, g_head, a_head,
            film_id=film_id, bias=bias, cache=cache,
        )
    except _PIPELINE_ERRORS as exc:
        _fail(exc)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{film_id}.json"
    json_path.write_text(document_to_json(doc))
    figures.save_doughnut(doc, out_dir / f"{film_id}.png")
    summary_path = out_dir / f"{film_id}_summary.csv"
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["film_id", "n_faces", "female_pct", "male_pct",
                         "over50_pct", "upto50_pct", "gender_confidence_pct",
                         "age_confidence_pct"])
        writer.writerow([
            film_id, analytics.n_faces, f"{analytics.female_pct:.2f}",
            f"{analytics.male_pct:.2f}", f"{analytics.over50_pct:.2f}",
            f"{analytics.upto50_pct:.2f}", f"{analytics.gender_confidence:.2f}",
            f"{analytics.age_confidence:.2f}",
        ])

    click.echo(f"film {film_id}: {analytics.n_faces} faces over {n_frames} frames")
    click.echo(f"  female {analytics.female_pct:.2f}%  "
               f"over-50 {analytics.over50_pct:.2f}%")
    click.echo(f"  confidence gender {analytics.gender_confidence:.2f}%  "
               f"age {analytics.age_confidence:.2f}%")
    click.echo(f"wrote {json_path}, figure and summary CSV alongside")


@main.command("survey")
@click.option("--responses", "responses_csv", required=True,
              type=click.Path(exists=True))
@click.option("--mass", type=float, default=0.94, show_default=True)
@click.option("--kind", type=click.Choice(["HDI", "EqualTailed"]), default="HDI",
              show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
def survey_cmd(responses_csv, mass, kind, out_dir):
    """Credible intervals for a survey response file."""
    try:
        results = surveystats.analyze_survey(responses_csv, mass=mass, kind=kind)
    except _PIPELINE_ERRORS as exc:
        _fail(exc)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "survey_intervals.json").write_text(
        json.dumps(results, indent=2) + "\n"
    )
    with open(out_dir / "survey_intervals.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["code", "group", "kind", "n_eff", "n_excluded_idk",
                         "mean", "low", "high"])
        for q in results["questions"]:
            ci = q.get("interval")
            writer.writerow([
                q["code"], q["group"], q["kind"], q["n_eff"], q["n_excluded_idk"],
                f"{ci['mean']:.4f}" if ci else "",
                f"{ci['low']:.4f}" if ci else "",
                f"{ci['high']:.4f}" if ci else "",
            ])
    figures.save_survey_forest(results, out_dir / "survey_intervals.png")
    for q in results["questions"]:
        ci = q.get("interval")
        if ci:
            click.echo(f"{q['code']:<6} mean {ci['mean']:.3f} "
                       f"[{ci['low']:.3f}, {ci['high']:.3f}]  ({q['group']})")
        else:
            click.echo(f"{q['code']:<6} excluded (n_eff={q['n_eff']})")
    click.echo(f"wrote survey outputs under {out_dir}")


@main.command("serve")
@click.option("--analytics-dir", required=True, type=click.Path(exists=True))
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static-dir", type=click.Path(), default=None,
              help="Viewer bundle directory (defaults to frontend/dist if present).")
def serve_cmd(analytics_dir, port, host, static_dir):
    """Serve analytics documents and the web viewer."""
    from .serve import run_server

    if static_dir is None:
        default_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = default_dist if default_dist.is_dir() else None
    try:
        run_server(analytics_dir, port, static_dir=static_dir, host=host)
    except _PIPELINE_ERRORS as exc:
        _fail(exc)
    except OSError as exc:
        _fail(InputError(f"cannot bind port {port}: {exc}"))


@main.command("demo-assets")
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=0)
def demo_assets_cmd(out_dir, seed):
    """Generate the synthetic demo bundle (models, dataset, clips, survey)."""
    from .synthetic import make_demo

    paths = make_demo(out_dir, seed=seed)
    for name, path in paths.items():
        click.echo(f"{name}: {path}")


if __name__ == "__main__":
    main()
