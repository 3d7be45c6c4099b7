"""Rich tables for reports and estimates."""

from __future__ import annotations

import math
from collections.abc import Sequence

from rich.table import Table

from ledpose.pose.evaluation import DetectionReport, MetricsReport, MultiRobotReport
from ledpose.pose.inference import PoseEstimate


def metrics_table(reports: Sequence[MetricsReport], title: str = "Pose metrics") -> Table:
    table = Table(title=title, show_header=True, header_style="bold")
    if not reports:
        return table
    columns = list(reports[0].row())
    for name in columns:
        table.add_column(name, justify="left" if name == "model" else "right")
    for report in reports:
        row = report.row()
        table.add_row(*(row[c] for c in columns))
    return table


def detection_table(report: DetectionReport) -> Table:
    table = Table(title="Robot detection", show_header=True, header_style="bold")
    table.add_column("score")
    table.add_column("AUC", justify="right")
    table.add_row("max presence", f"{report.auc_max:.1%}")
    table.add_row("LED entropy", f"{report.auc_entropy:.1%}")
    table.caption = f"{report.n_visible} frames with a robot, {report.n_empty} without"
    return table


def multi_robot_table(report: MultiRobotReport) -> Table:
    table = Table(title="Multi-robot", show_header=True, header_style="bold")
    table.add_column("metric")
    table.add_column("value", justify="right")
    table.add_row("count accuracy", f"{report.count_accuracy:.1%}")
    table.add_row("matched robots", f"{report.n_matched}/{report.n_robots}")
    if report.e_uv is not None:
        table.add_row("E_uv [px]", f"{report.e_uv:.1f}")
    if report.e_psi is not None:
        table.add_row("E_psi [deg]", f"{math.degrees(report.e_psi):.1f}")
    if report.e_d is not None:
        table.add_row("E_d", f"{report.e_d:.1%}")
    if report.gamma is not None:
        table.add_row("Gamma", f"{report.gamma:.1%}")
    return table


def estimates_table(rows: Sequence[tuple[str, int, PoseEstimate]]) -> Table:
    table = Table(title="Estimates", show_header=True, header_style="bold")
    for name in ("image", "robot", "u", "v", "psi [deg]", "d [m]", "LEDs", "presence", "confidence"):
        table.add_column(name, justify="left" if name in ("image", "LEDs") else "right")
    for image, robot, e in rows:
        table.add_row(
            image,
            str(robot),
            f"{e.u:.1f}",
            f"{e.v:.1f}",
            f"{math.degrees(e.psi):.1f}" + ("" if e.bearing_reliable else "?"),
            f"{e.d:.2f}" if e.d is not None else "-",
            " ".join(f"{p:.2f}" for p in e.led_probs),
            f"{e.presence_score:.2f}",
            f"{e.confidence:.2f}",
        )
    return table


__all__ = ["detection_table", "estimates_table", "metrics_table", "multi_robot_table"]
