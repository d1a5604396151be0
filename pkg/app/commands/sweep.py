"""Quantization-level sweep."""

import asyncio
from pathlib import Path
from typing import List, Sequence, Tuple, Union

from loguru import logger

from app.commands.verify import verify_scenario
from app.models.results import RunReport
from app.models.scenario import load_scenario
from app.services.reporting import prepare_output_dir, write_sweep_outputs
from app.services.scenario_builder import Scenario
from app.services.simulation import TrajectoryLog, simulate


async def run_sigmas(scenario: Scenario, sigmas: Sequence[float]) -> List[Tuple[float, TrajectoryLog]]:
    """One simulation per sigma, each in a worker thread."""
    tasks = [asyncio.to_thread(simulate, scenario.with_sigma(sigma)) for sigma in sigmas]
    logs = await asyncio.gather(*tasks)
    return list(zip(sigmas, logs))


def cmd_sweep_sigma(
    path: Union[str, Path],
    sigmas: Sequence[float],
    out_dir: Union[str, Path],
    force: bool = False,
) -> RunReport:
    if not sigmas:
        raise ValueError("at least one sigma is required")
    if any(s < 0 for s in sigmas):
        raise ValueError(f"sigma values must be nonnegative, got {list(sigmas)}")

    spec = load_scenario(path)
    prepare_output_dir(out_dir)
    report, scenario = verify_scenario(spec, command="sweep")
    if scenario is None:
        return report
    if not report.passed and not force:
        report.messages.append("preconditions failed; rerun with --force to simulate anyway")
        logger.error("Preconditions failed, not sweeping (use --force)")
        return report

    logger.info(f"Sweeping sigma over {list(sigmas)}")
    runs = asyncio.run(run_sigmas(scenario, sigmas))
    report.sweep, report.outputs = write_sweep_outputs(runs, out_dir)
    for row in report.sweep:
        logger.info(
            f"sigma = {row.sigma:g}: steady consensus error {row.steady_state_consensus_error:.6g}, "
            f"steady V {row.steady_state_V:.6g}, offset {row.theorem2_offset:.6g}"
        )
    return report
