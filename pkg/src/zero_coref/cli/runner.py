"""Command execution: timing, logging and error handling around each command."""

import argparse
import json
import sys
import time
from collections.abc import Callable
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from zero_coref.core.config import parse_buckets, settings
from zero_coref.core.exceptions import CliError, ZeroCorefError
from zero_coref.core.logging import get_logger, log_command, log_exception
from zero_coref.models.schemas import RunConfig

logger = get_logger(__name__)

Handler = Callable[[argparse.Namespace], int]


def run_command(name: str, handler: Handler, args: argparse.Namespace) -> int:
    """Run a command handler and turn failures into exit status 1."""
    start_time = time.time()
    logger.debug(f"→ {name} | args: {vars(args)}")
    try:
        exit_code = handler(args)
    except (ZeroCorefError, OSError) as exc:
        log_exception(logger, exc, context={"command": name})
        exit_code = 1
    duration_ms = (time.time() - start_time) * 1000
    log_command(name, exit_code, duration_ms)
    return exit_code


def build_config(
    args: argparse.Namespace, command: str, inputs: dict[str, str | None]
) -> RunConfig:
    """Effective run configuration from parsed flags and settings.

    Raises:
        CliError: If an input path does not exist
    """
    try:
        return RunConfig(
            command=command,  # type: ignore[arg-type]
            inputs={name: str(path) for name, path in inputs.items() if path is not None},
            output=getattr(args, "out", None),
            mode=getattr(args, "mode", None),
            cluster_representation=getattr(args, "cluster_rep", None)
            or settings.cluster_representation,
            azp_hit_mode=getattr(args, "azp_hit", None) or settings.azp_hit_mode,
            include_pro_in_coref=(
                settings.include_pro_in_coref
                if getattr(args, "include_pro_in_coref", None) is None
                else args.include_pro_in_coref
            ),
            buckets=getattr(args, "buckets", None) or settings.distance_buckets,
            seed=settings.seed if args.seed is None else args.seed,
            jobs=args.jobs or settings.jobs,
            json_output=args.json,
        )
    except ValidationError as e:
        raise CliError(
            "; ".join(str(error["msg"]).removeprefix("Value error, ") for error in e.errors())
        ) from e


def buckets_arg(value: str) -> tuple[int, ...]:
    """argparse type for ``--buckets 0,1,2,4,8``."""
    try:
        return parse_buckets(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def emit(text: str) -> None:
    """Write command output to stdout."""
    sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")
    sys.stdout.flush()


def emit_json(payload: Any) -> None:
    emit(json.dumps(payload, ensure_ascii=False, indent=2))


def write_json(path: str | Path, payload: Any) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
