"""Single simulation run with CSV/SVG output."""

from pathlib import Path
from typing import Optional, Sequence, Union

from loguru import logger

from app.commands.verify import verify_scenario
from app.models.scenario import load_scenario
from app.models.results import RunReport
from app.services.reporting import prepare_output_dir, state_coords, write_run_outputs
from app.services.simulation import simulate


def cmd_run(
    path: Union[str, Path],
    out_dir: Union[str, Path],
    force: bool = False,
    coords: Optional[Sequence[int]] = None,
) -> RunReport:
    spec = load_scenario(path)
    prepare_output_dir(out_dir)
    report, scenario = verify_scenario(spec, command="run")
    if scenario is None:
        return report
    coords = state_coords(scenario.model.p, coords)
    if not report.passed:
        if not force:
            report.messages.append("preconditions failed; rerun with --force to simulate anyway")
            logger.error("Preconditions failed, not simulating (use --force)")
            return report
        logger.warning("Preconditions failed; simulating anyway (--force)")

    log = simulate(scenario)
    report.certificate = log.certificate
    report.outputs = write_run_outputs(log, scenario.model.theta_true, out_dir, coords)
    return report
