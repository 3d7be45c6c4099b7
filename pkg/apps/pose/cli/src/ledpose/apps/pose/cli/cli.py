"""ledpose CLI commands."""

from __future__ import annotations

import json
import logging
from collections.abc import Generator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape

from ledpose.apps.pose.cli.configs import (
    Preset,
    check_input_size,
    dataset_scene,
    model_config,
    parse_floats,
    parse_ints,
    read_config,
    scene_config,
    train_config,
)
from ledpose.apps.pose.cli.render import detection_table, estimates_table, metrics_table, multi_robot_table
from ledpose.platform.config import RuntimeSettings, bootstrap_env, dump_config_file
from ledpose.pose.core import (
    CameraIntrinsics,
    DatasetError,
    DatasetManifest,
    InvalidInputError,
    LedPoseError,
    ManifestAccessor,
    OutputExistsError,
    RunRecord,
    derive_seed,
    load_image,
    prepare_output,
    run_lock,
    write_run_record,
)
from ledpose.pose.evaluation import (
    REPORT_NAME,
    MetricsReport,
    Subset,
    evaluate,
    evaluate_detection,
    evaluate_multi_robot,
    evaluate_predictor,
    mean_predictor,
)
from ledpose.pose.inference import (
    CALIBRATION_NAME,
    MIN_CONFIDENCE,
    Calibration,
    CalibrationRequest,
    DistanceWeights,
    PoseEstimate,
    calibrate_from_image,
    calibrate_from_rf_distance,
    dump_maps,
    estimate_multi_pose,
    estimate_pose,
    run_stack,
)
from ledpose.pose.model import LedPoseNet, build_model, load_model, receptive_field
from ledpose.pose.synth import BackgroundStyle, generate_dataset
from ledpose.pose.training import TargetGeometry, TrainConfig, TrainResult, train, train_supervised_upperbound

app = typer.Typer(help="ledpose - robot pose estimation learned from LED states alone", no_args_is_help=True)
console = Console()

# Configure logging (default to WARNING; --verbose gives INFO, --debug gives DEBUG)
logging.basicConfig(
    level=logging.WARNING,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M",
)
logger = logging.getLogger(__name__)

ESTIMATES_NAME = "estimates.jsonl"
SWEEP_NAME = "sweep.yaml"


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress (INFO)"),
    debug: bool = typer.Option(False, "--debug", help="Log everything (DEBUG)"),
) -> None:
    bootstrap_env()
    settings = RuntimeSettings()
    if debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        level = settings.log_level_number()
    logging.getLogger().setLevel(level)


@contextmanager
def reported_errors() -> Generator[None, None, None]:
    """Print ledpose failures and turn them into exit codes: 2 for bad input, 1 for runtime failures."""
    try:
        yield
    except (ValidationError, InvalidInputError, ValueError, DatasetError, OutputExistsError) as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        raise typer.Exit(2) from e
    except LedPoseError as e:
        console.print(f"[red]Failed:[/red] {escape(str(e))}")
        raise typer.Exit(1) from e
    except (click.exceptions.Exit, click.ClickException, click.Abort):
        raise
    except Exception as e:
        logger.exception("Unexpected failure")
        console.print(f"[red]Failed:[/red] {escape(str(e)) or type(e).__name__}")
        raise typer.Exit(1) from e


def _require_file(path: Path, flag: str) -> Path:
    if not path.is_file():
        console.print(f"[red]Error:[/red] {flag}: file not found: {path}")
        raise typer.Exit(2)
    return path


def _load_dataset(path: Path) -> DatasetManifest:
    manifest = DatasetManifest.load(path)
    if len(manifest) == 0:
        raise DatasetError(f"dataset at {path} has no frames")
    manifest.check_images()
    return manifest


def _load_checkpoint(path: Path) -> LedPoseNet:
    model, checkpoint = load_model(_require_file(path, "CHECKPOINT"), RuntimeSettings().resolve_device())
    logger.info("Loaded %s (epoch %s)", path, checkpoint.meta.get("epoch"))
    return model


def _model_intrinsics(model: LedPoseNet, hfov: float, cal: Calibration | None = None) -> CameraIntrinsics:
    if cal is not None and cal.intrinsics is not None:
        return cal.intrinsics
    return CameraIntrinsics.from_fov(model.cfg.input_width, model.cfg.input_height, hfov)


def _record(out: Path, command: str, seed: int | None, parameters: dict[str, Any]) -> None:
    write_run_record(out, RunRecord(command=command, seed=seed, parameters=parameters))


@app.command("gen-data")
def gen_data(
    out: Path = typer.Argument(..., help="Dataset directory to create"),
    frames: int = typer.Option(1000, "--frames", min=1, help="Number of frames"),
    seed: int = typer.Option(0, "--seed", help="Global seed"),
    config: Path | None = typer.Option(None, "--config", help="YAML config with a 'scene' section"),
    width: int | None = typer.Option(None, "--width", help="Image width in pixels"),
    height: int | None = typer.Option(None, "--height", help="Image height in pixels"),
    hfov: float | None = typer.Option(None, "--hfov", help="Horizontal field of view, degrees"),
    distance_range: str | None = typer.Option(None, "--distance-range", help="near,far in meters"),
    visible_fraction: float | None = typer.Option(None, "--visible-fraction", help="Fraction of frames with a robot"),
    led_count: int | None = typer.Option(None, "--led-count", help="Number of LEDs K"),
    toggle_period: int | None = typer.Option(None, "--toggle-period", help="Frames an LED state is held"),
    background: BackgroundStyle | None = typer.Option(None, "--background", help="Background style"),
    domain_id: int | None = typer.Option(None, "--domain-id", help="Background domain"),
    splits: str | None = typer.Option(None, "--splits", help="train,val,test fractions"),
    robots: int = typer.Option(1, "--robots", min=1, help="Robots composited per visible frame"),
    workers: int = typer.Option(0, "--workers", min=0, help="Render threads (0 renders inline)"),
    force: bool = typer.Option(False, "--force", help="Replace an existing output directory"),
) -> None:
    """Render a synthetic dataset with LED labels and ground-truth poses."""
    with reported_errors():
        overrides: dict[str, Any] = {
            "distance_range": parse_floats(distance_range, "--distance-range") if distance_range else None,
            "visible_fraction": visible_fraction,
            "led_config.count": led_count,
            "toggle_period": toggle_period,
            "background": background.value if background is not None else None,
            "domain_id": domain_id,
            "split_fractions": parse_floats(splits, "--splits") if splits else None,
        }
        scene = scene_config(read_config(config), width=width, height=height, hfov=hfov, overrides=overrides)
        prepare_output(out, force=force)
        with run_lock(out):
            manifest = generate_dataset(
                scene, frames, derive_seed(seed, "dataset"), out, robots=robots, workers=workers
            )
            _record(out, "gen-data", seed, {"frames": frames, "robots": robots})
    visible = sum(r.visible for r in manifest.records)
    console.print(f"[green][OK][/green] {len(manifest)} frames ({visible} with a robot) written to {out}")


def _train_overrides(
    seed: int,
    epochs: int | None,
    batch_size: int | None,
    lr_initial: float | None,
    lr_final: float | None,
    no_augment: bool,
    device: str | None,
) -> dict[str, Any]:
    return {
        "seed": seed,
        "epochs": epochs,
        "batch_size": batch_size,
        "lr_initial": lr_initial,
        "lr_final": lr_final,
        "augment.enabled": False if no_augment else None,
        "device": device,
    }


def _report_training(result: TrainResult, out: Path) -> None:
    console.print(
        f"[green][OK][/green] best epoch {result.history.best_epoch + 1} "
        f"(val loss {result.best_val_loss:.5f}); checkpoints in {out}"
    )


@app.command("train")
def train_cmd(
    data: Path = typer.Argument(..., help="Dataset directory"),
    out: Path = typer.Argument(..., help="Run directory to create"),
    seed: int = typer.Option(0, "--seed", help="Global seed (init, augmentation, shuffling)"),
    config: Path | None = typer.Option(None, "--config", help="YAML config with 'model' and 'train' sections"),
    preset: Preset = typer.Option(Preset.DESK, "--preset", help="Layer widths: desk or full"),
    epochs: int | None = typer.Option(None, "--epochs", help="Training epochs"),
    batch_size: int | None = typer.Option(None, "--batch-size", help="Frames per batch"),
    lr_initial: float | None = typer.Option(None, "--lr-initial", help="Learning rate at the first epoch"),
    lr_final: float | None = typer.Option(None, "--lr-final", help="Learning rate at the last epoch"),
    max_samples: int | None = typer.Option(None, "--max-samples", help="Use only the first N training frames"),
    permute_labels: bool = typer.Option(False, "--permute-labels", help="Shuffle LED labels across frames"),
    no_augment: bool = typer.Option(False, "--no-augment", help="Disable noise and color jitter"),
    supervised: bool = typer.Option(False, "--supervised", help="Train the pose-supervised upperbound instead"),
    device: str | None = typer.Option(None, "--device", help="Torch device (default from LEDPOSE_DEVICE)"),
    force: bool = typer.Option(False, "--force", help="Replace an existing run directory"),
) -> None:
    """Train on LED labels alone (or, with --supervised, on ground-truth poses)."""
    with reported_errors():
        sections = read_config(config)
        manifest = _load_dataset(data)
        scene = dataset_scene(manifest)
        cfg = model_config(sections, preset, scene)
        overrides = _train_overrides(seed, epochs, batch_size, lr_initial, lr_final, no_augment, device)
        overrides |= {"max_samples": max_samples, "permute_labels": True if permute_labels else None}
        tcfg = train_config(sections, RuntimeSettings(), overrides)
        if supervised and tcfg.permute_labels:
            raise InvalidInputError("--permute-labels applies to self-supervised training only")

        prepare_output(out, force=force)
        with run_lock(out):
            resolved = {"model": cfg.model_dump(mode="json"), "train": tcfg.model_dump(mode="json")}
            dump_config_file(out / "config.yaml", resolved)
            model = build_model(cfg, seed=derive_seed(seed, "init"))
            train_split, val_split = manifest.split("train"), manifest.split("val")
            if supervised:
                geometry = TargetGeometry(
                    intrinsics=scene.intrinsics,
                    d_c=scene.rf_distance(receptive_field(cfg)),
                    camera_drop=scene.camera_drop,
                )
                result = train_supervised_upperbound(model, train_split, val_split, tcfg, geometry, out)
            else:
                result = train(model, train_split, val_split, tcfg, out)
                if result.pose_reads:
                    raise LedPoseError(f"self-supervised training read {result.pose_reads} ground-truth poses")
            _record(out, "train", seed, {"data": str(data), "supervised": supervised, "preset": preset.value})
    _report_training(result, out)


def _sweep_calibration(
    model: LedPoseNet, calibration: Path | None, test: DatasetManifest, intr: CameraIntrinsics
) -> Calibration:
    if calibration is not None:
        return Calibration.load(_require_file(calibration, "--calibration"))
    scene = dataset_scene(test)
    return calibrate_from_rf_distance(scene.rf_distance(receptive_field(model.cfg)), model.cfg, intr)


@app.command("finetune")
def finetune(
    checkpoint: Path = typer.Argument(..., help="Pre-trained checkpoint"),
    data: Path = typer.Argument(..., help="Dataset of the new environment"),
    out: Path = typer.Argument(..., help="Sweep directory to create"),
    samples: str = typer.Option("5000,15000,30000", "--samples", help="Comma-separated training-frame budgets"),
    from_scratch: bool = typer.Option(False, "--from-scratch", help="Also train a fresh model per budget"),
    calibration: Path | None = typer.Option(
        None, "--calibration", help="Calibration for the reports (default: receptive-field distance of the dataset)"
    ),
    seed: int = typer.Option(0, "--seed", help="Global seed"),
    config: Path | None = typer.Option(None, "--config", help="YAML config with a 'train' section"),
    epochs: int | None = typer.Option(None, "--epochs", help="Training epochs per budget"),
    batch_size: int | None = typer.Option(None, "--batch-size", help="Frames per batch"),
    lr_initial: float | None = typer.Option(None, "--lr-initial", help="Learning rate at the first epoch"),
    lr_final: float | None = typer.Option(None, "--lr-final", help="Learning rate at the last epoch"),
    no_augment: bool = typer.Option(False, "--no-augment", help="Disable noise and color jitter"),
    device: str | None = typer.Option(None, "--device", help="Torch device (default from LEDPOSE_DEVICE)"),
    force: bool = typer.Option(False, "--force", help="Replace an existing sweep directory"),
) -> None:
    """Fine-tune a checkpoint on a new environment with growing sample budgets, one report per budget."""
    with reported_errors():
        budgets = parse_ints(samples, "--samples")
        sections = read_config(config)
        base = _load_checkpoint(checkpoint)
        manifest = _load_dataset(data)
        scene = dataset_scene(manifest)
        check_input_size(base.cfg, scene.intrinsics)
        overrides = _train_overrides(seed, epochs, batch_size, lr_initial, lr_final, no_augment, device)
        tcfg = train_config(sections, RuntimeSettings(), overrides)
        test = manifest.split("test")
        cal = _sweep_calibration(base, calibration, test, scene.intrinsics)

        prepare_output(out, force=force)
        reports: list[MetricsReport] = []
        with run_lock(out):
            for n in budgets:
                runs: list[tuple[str, TrainConfig]] = [
                    (f"n{n}", tcfg.model_copy(update={"max_samples": n, "resume_from": checkpoint})),
                ]
                if from_scratch:
                    runs.append((f"n{n}-scratch", tcfg.model_copy(update={"max_samples": n})))
                for name, run_cfg in runs:
                    model = build_model(base.cfg, seed=derive_seed(seed, "init"))
                    result = train(model, manifest.split("train"), manifest.split("val"), run_cfg, out / name)
                    report = evaluate(result.model, test, cal, scene.intrinsics, label=name)
                    report.save(out / name / REPORT_NAME)
                    reports.append(report)
            summary = {"budgets": list(budgets), "reports": [r.model_dump(mode="json") for r in reports]}
            dump_config_file(out / SWEEP_NAME, summary)
            _record(out, "finetune", seed, {"checkpoint": str(checkpoint), "data": str(data), "budgets": list(budgets)})
    console.print(metrics_table(reports, title="Fine-tuning sweep"))


@app.command("calibrate")
def calibrate(
    checkpoint: Path = typer.Argument(..., help="Trained checkpoint"),
    out: Path = typer.Argument(..., help="Directory to create for calibration.yaml"),
    image: Path | None = typer.Option(None, "--image", help="Calibration image with the robot in view"),
    distance: float | None = typer.Option(None, "--distance", help="Annotated distance of --image, meters"),
    data: Path | None = typer.Option(None, "--data", help="Dataset holding the annotated calibration frame"),
    frame: int | None = typer.Option(None, "--frame", help="Frame id in --data to calibrate on"),
    rf_distance: float | None = typer.Option(
        None, "--rf-distance", help="Distance at which the robot spans one receptive field (no image needed)"
    ),
    hfov: float = typer.Option(70.0, "--hfov", help="Horizontal field of view when no dataset is given"),
    weights: DistanceWeights = typer.Option(DistanceWeights.GEOMETRIC, "--weights", help="Per-scale distance weights"),
    min_confidence: float = typer.Option(MIN_CONFIDENCE, "--min-confidence", help="Refuse less confident images"),
    force: bool = typer.Option(False, "--force", help="Replace an existing output directory"),
) -> None:
    """Fix the metric distance scale d_c from one annotated image or a known receptive-field distance."""
    with reported_errors():
        methods = [rf_distance is not None, image is not None, data is not None]
        if sum(methods) != 1:
            raise InvalidInputError(
                "give exactly one of --rf-distance, --image (with --distance) or --data (with --frame)"
            )
        model = _load_checkpoint(checkpoint)
        intr = _model_intrinsics(model, hfov)
        if rf_distance is not None:
            cal = calibrate_from_rf_distance(rf_distance, model.cfg, intr, distance_weights=weights)
        elif image is not None:
            if distance is None:
                raise InvalidInputError("--image needs --distance")
            request = CalibrationRequest(load_image(_require_file(image, "--image")), distance)
            cal = calibrate_from_image(model, request, intr, min_confidence=min_confidence, distance_weights=weights)
        else:
            assert data is not None
            if frame is None:
                raise InvalidInputError("--data needs --frame")
            manifest = _load_dataset(data)
            intr = dataset_scene(manifest).intrinsics
            index = next((i for i, r in enumerate(manifest.records) if r.frame_id == frame), None)
            if index is None:
                raise DatasetError(f"frame {frame} is not in {data}")
            pose = ManifestAccessor(manifest, allow_poses=True).pose(index)
            if pose is None:
                raise DatasetError(f"frame {frame} has no robot in view")
            request = CalibrationRequest(load_image(manifest.image_path(manifest.records[index])), pose.distance)
            cal = calibrate_from_image(model, request, intr, min_confidence=min_confidence, distance_weights=weights)

        prepare_output(out, force=force)
        with run_lock(out):
            cal.save(out / CALIBRATION_NAME)
            _record(out, "calibrate", None, {"checkpoint": str(checkpoint), "method": cal.method})
    console.print(f"[green][OK][/green] d_c = {cal.d_c:.4f} m ({cal.method}) written to {out / CALIBRATION_NAME}")


@app.command("eval")
def eval_cmd(
    checkpoint: Path = typer.Argument(..., help="Trained checkpoint"),
    data: Path = typer.Argument(..., help="Dataset directory"),
    out: Path = typer.Argument(..., help="Report directory to create"),
    calibration: Path = typer.Option(..., "--calibration", help="calibration.yaml from the calibrate command"),
    split: str = typer.Option("test", "--split", help="Split to evaluate: train, val, test or all"),
    subset: str | None = typer.Option(None, "--subset", help="Restrict to 'leds_off' frames"),
    baseline: str | None = typer.Option(None, "--baseline", help="Also evaluate the 'mean' predictor"),
    detection: bool = typer.Option(False, "--detection", help="Also report robot-detection AUC"),
    multi: bool = typer.Option(False, "--multi", help="Also report multi-robot extraction"),
    batch_size: int = typer.Option(32, "--batch-size", min=1, help="Frames per forward pass"),
    force: bool = typer.Option(False, "--force", help="Replace an existing report directory"),
) -> None:
    """Pose metrics on the visible-robot frames of a dataset split."""
    with reported_errors():
        if split not in ("train", "val", "test", "all"):
            raise InvalidInputError(f"--split must be train, val, test or all, got {split!r}")
        if subset not in (None, "leds_off"):
            raise InvalidInputError(f"--subset must be leds_off, got {subset!r}")
        frames: Subset | None = "leds_off" if subset else None
        if baseline not in (None, "mean"):
            raise InvalidInputError(f"--baseline must be mean, got {baseline!r}")
        cal = Calibration.load(_require_file(calibration, "--calibration"))
        model = _load_checkpoint(checkpoint)
        manifest = _load_dataset(data)
        target = manifest if split == "all" else manifest.split(split)  # type: ignore[arg-type]
        intr = dataset_scene(manifest).intrinsics
        check_input_size(model.cfg, intr)

        reports = [evaluate(model, target, cal, intr, subset=frames, batch_size=batch_size)]
        if baseline == "mean":
            predictor = mean_predictor(manifest.split("train"), intr)
            reports.append(
                evaluate_predictor(predictor, target, intr, subset=frames, batch_size=batch_size, label="mean")
            )
        detection_report = evaluate_detection(model, target, batch_size=batch_size) if detection else None
        multi_report = evaluate_multi_robot(model, target, cal, intr) if multi else None

        prepare_output(out, force=force)
        with run_lock(out):
            reports[0].save(out / REPORT_NAME)
            if len(reports) > 1:
                reports[1].save(out / "mean.yaml")
            if detection_report is not None:
                detection_report.save(out / "detection.yaml")
            if multi_report is not None:
                multi_report.save(out / "multi_robot.yaml")
            _record(out, "eval", None, {"checkpoint": str(checkpoint), "data": str(data), "split": split})
    console.print(metrics_table(reports))
    if detection_report is not None:
        console.print(detection_table(detection_report))
    if multi_report is not None:
        console.print(multi_robot_table(multi_report))


@app.command("infer")
def infer(
    checkpoint: Path = typer.Argument(..., help="Trained checkpoint"),
    images: list[Path] = typer.Argument(..., help="Images to estimate poses in"),
    calibration: Path | None = typer.Option(None, "--calibration", help="calibration.yaml for metric distance"),
    hfov: float = typer.Option(70.0, "--hfov", help="Horizontal field of view when the calibration has none"),
    multi: bool = typer.Option(False, "--multi", help="Extract every robot instead of one"),
    max_robots: int = typer.Option(4, "--max-robots", min=1, help="Upper bound on robots per image"),
    out: Path | None = typer.Option(None, "--out", help="Directory to create for estimates.jsonl"),
    force: bool = typer.Option(False, "--force", help="Replace an existing --out directory"),
) -> None:
    """Estimate robot poses in images."""
    with reported_errors():
        cal = Calibration.load(_require_file(calibration, "--calibration")) if calibration is not None else None
        model = _load_checkpoint(checkpoint)
        intr = _model_intrinsics(model, hfov, cal)
        rows: list[tuple[str, int, PoseEstimate]] = []
        for path in images:
            image = load_image(_require_file(path, "IMAGES"))
            if multi:
                estimates = estimate_multi_pose(model, image, cal, intr, max_robots=max_robots)
            else:
                estimates = [estimate_pose(model, image, cal, intr)]
            rows.extend((str(path), i, e) for i, e in enumerate(estimates))

        if out is not None:
            prepare_output(out, force=force)
            with run_lock(out):
                with open(out / ESTIMATES_NAME, "w", encoding="utf-8") as f:
                    for image_name, robot, e in rows:
                        f.write(json.dumps({"image": image_name, "robot": robot, **e.record()}) + "\n")
                _record(out, "infer", None, {"checkpoint": str(checkpoint), "images": [str(p) for p in images]})
    console.print(estimates_table(rows))


@app.command("dump-maps")
def dump_maps_cmd(
    checkpoint: Path = typer.Argument(..., help="Trained checkpoint"),
    image: Path = typer.Argument(..., help="Image to run"),
    out: Path = typer.Argument(..., help="Directory to create for the map tiles"),
    upscale: int = typer.Option(4, "--upscale", min=1, help="Nearest-neighbour upscaling of each cell"),
    force: bool = typer.Option(False, "--force", help="Replace an existing output directory"),
) -> None:
    """Write presence, bearing and LED maps of every scale as PNG tiles."""
    with reported_errors():
        model = _load_checkpoint(checkpoint)
        stack = run_stack(model, load_image(_require_file(image, "IMAGE")))
        prepare_output(out, force=force)
        with run_lock(out):
            paths = dump_maps(stack, out, upscale=upscale)
            _record(out, "dump-maps", None, {"checkpoint": str(checkpoint), "image": str(image)})
    console.print(f"[green][OK][/green] {len(paths)} map tiles written to {out}")


def run(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        result = app(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        console.print("[red]Aborted[/red]")
        return 1
    return result if isinstance(result, int) else 0


__all__ = ["app", "run"]
