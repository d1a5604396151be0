"""CSV and SVG emission for runs and sweeps."""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from loguru import logger  # noqa: E402

from app.models.results import SweepRow  # noqa: E402
from app.services.simulation import TrajectoryLog  # noqa: E402

plt.rcParams["svg.hashsalt"] = "adaptive-consensus"
plt.rcParams["svg.fonttype"] = "none"

CSV_OPTIONS = {"index": False, "float_format": "%.17g", "lineterminator": "\n"}
SWEEP_COLUMNS = ["sigma", "steady_state_consensus_error", "steady_state_V", "theorem2_offset"]

DEFAULT_COORDS = (1, 3)


def state_coords(p: int, coords: Optional[Sequence[int]] = None) -> List[int]:
    """Plotted 1-based coordinates; the default keeps those of (1, 3) that exist."""
    if coords is None:
        return [c for c in DEFAULT_COORDS if c <= p] or [1]
    coords = list(coords)
    if not coords:
        raise ValueError("at least one state coordinate is required")
    for c in coords:
        if not 1 <= c <= p:
            raise ValueError(f"state coordinate {c} out of range 1..{p}")
    return coords


def prepare_output_dir(out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write-test"
    probe.write_text("")
    probe.unlink()
    return out


def _save(fig, path: Path) -> str:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return str(path)


def write_trajectory_csv(log: TrajectoryLog, path: Path) -> str:
    log.to_dataframe().to_csv(path, **CSV_OPTIONS)
    logger.info(f"Wrote {path} ({len(log)} rows)")
    return str(path)


def plot_consensus_error(log: TrajectoryLog, path: Path) -> str:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(log.times, np.maximum(log.consensus, np.finfo(float).tiny))
    ax.set_yscale("log")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("sum_ij |x_i - x_j|^2")
    ax.set_title("Consensus error")
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_theta(log: TrajectoryLog, theta_true: np.ndarray, path: Path) -> str:
    theta = log.theta_hat.reshape(len(log), -1)
    truth = np.asarray(theta_true).ravel()
    fig, ax = plt.subplots(figsize=(7, 4))
    for k in range(theta.shape[1]):
        (line,) = ax.plot(log.times, theta[:, k], label=f"theta_hat_{k + 1}")
        ax.axhline(truth[k], linestyle="--", color=line.get_color(), linewidth=0.8)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("estimate")
    ax.set_title("Parameter estimates (dashed: true values)")
    ax.legend(loc="best", fontsize="small")
    return _save(fig, path)


def plot_state_coords(log: TrajectoryLog, coords: Optional[Sequence[int]], path: Path) -> str:
    """One panel per 1-based state coordinate, one curve per agent."""
    x = log.x
    n, p = x.shape[1], x.shape[2]
    coords = state_coords(p, coords)
    fig, axes = plt.subplots(len(coords), 1, figsize=(7, 3 * len(coords)), sharex=True, squeeze=False)
    for ax, c in zip(axes[:, 0], coords):
        for i in range(n):
            ax.plot(log.times, x[:, i, c - 1], label=f"agent {i + 1}")
        ax.set_ylabel(f"x_i,{c}")
        ax.legend(loc="best", fontsize="small")
    axes[-1, 0].set_xlabel("t [s]")
    return _save(fig, path)


def write_run_outputs(
    log: TrajectoryLog, theta_true: np.ndarray, out_dir, coords: Optional[Sequence[int]] = None
) -> List[str]:
    coords = state_coords(log.x.shape[2], coords)
    out = prepare_output_dir(out_dir)
    return [
        write_trajectory_csv(log, out / "trajectory.csv"),
        plot_consensus_error(log, out / "consensus_error.svg"),
        plot_theta(log, theta_true, out / "theta.svg"),
        plot_state_coords(log, coords, out / "state_coord.svg"),
    ]


def sweep_row(sigma: float, log: TrajectoryLog) -> SweepRow:
    ce, v = log.steady_state()
    return SweepRow(
        sigma=sigma,
        steady_state_consensus_error=ce,
        steady_state_V=v,
        theorem2_offset=log.certificate.offset,
    )


def write_sweep_outputs(runs: Sequence[Tuple[float, TrajectoryLog]], out_dir) -> Tuple[List[SweepRow], List[str]]:
    out = prepare_output_dir(out_dir)
    rows = [sweep_row(sigma, log) for sigma, log in runs]
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=SWEEP_COLUMNS)
    csv_path = out / "sweep.csv"
    frame.to_csv(csv_path, **CSV_OPTIONS)
    logger.info(f"Wrote {csv_path} ({len(rows)} rows)")

    fig, ax = plt.subplots(figsize=(7, 4))
    for sigma, log in runs:
        ax.plot(log.times, np.maximum(log.consensus, np.finfo(float).tiny), label=f"sigma = {sigma:g}")
    ax.set_yscale("log")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("sum_ij |x_i - x_j|^2")
    ax.set_title("Consensus error by quantization level")
    ax.legend(loc="best")
    svg = _save(fig, out / "sweep_consensus_error.svg")
    return rows, [str(csv_path), svg]
