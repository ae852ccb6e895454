"""Thin command-line client for the experiment service.

All experiment logic lives behind the HTTP API; this client assembles a
request from config-file values and flag overrides (flags win), posts it, and
writes the response out as metrics JSON, CSV tables, and an optional event
log. By default requests run against the in-process app; --server targets a
remote instance instead.

Exit codes: 0 success, 2 configuration error, 3 simulation abort.
"""

from __future__ import annotations

import asyncio
import json
import re
import sys
from pathlib import Path
from typing import Any

import click
import httpx

from .config import ConfigError, parse_config_file
from .metrics import stable_json
from .reports import (
    attack_table_csv,
    run_summary_text,
    sweep_csv,
    sweep_table_text,
    type_table_csv,
)

DEFAULT_INJECT_PLAN = (20, 15, 15)  # bad signature / expired timestamp / malformed

_TRUE_WORDS = {"true", "1", "yes", "on"}
_FALSE_WORDS = {"false", "0", "no", "off"}


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in _TRUE_WORDS:
        return True
    if lowered in _FALSE_WORDS:
        return False
    raise ConfigError(key, f"expected a boolean, got {raw!r}")


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {raw!r}") from None


def _set_path(target: dict, dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    for part in parts[:-1]:
        target = target.setdefault(part, {})
    target[parts[-1]] = value


# config-file key -> (request path, parser); "out"/"server"/"f_range" are
# client-side keys handled separately.
_INT_KEYS = {
    "seed": "seed",
    "n": "n",
    "f": "f",
    "fanout": "fanout",
    "hmax": "hmax",
    "max_age_ms": "max_age_ms",
    "future_skew_ms": "future_skew_ms",
    "vote_timeout_ms": "vote_timeout_ms",
    "max_events": "max_events",
    "jobs": "jobs",
    "gap_ms": "workload.gap_ms",
    "start_ms": "workload.start_ms",
    "count_patient_data": "workload.patient_data",
    "count_diagnosis": "workload.diagnosis",
    "count_treatment_plan": "workload.treatment_plan",
    "count_emergency_alert": "workload.emergency_alert",
    "inject_bad_signature": "inject.bad_signature",
    "inject_expired_timestamp": "inject.expired_timestamp",
    "inject_malformed_content": "inject.malformed_content",
}


def _apply_config_file(path: str, request: dict, client_opts: dict) -> None:
    entries = parse_config_file(path)
    delay_fixed = None
    delay_lo = None
    delay_hi = None
    for key, raw in entries.items():
        if key in _INT_KEYS:
            _set_path(request, _INT_KEYS[key], _parse_int(key, raw))
        elif key == "delay_fixed_ms":
            delay_fixed = _parse_int(key, raw)
        elif key == "delay_uniform_lo_ms":
            delay_lo = _parse_int(key, raw)
        elif key == "delay_uniform_hi_ms":
            delay_hi = _parse_int(key, raw)
        elif key == "trace":
            request["trace"] = _parse_bool(key, raw)
        elif key == "out":
            client_opts["out"] = raw
        elif key == "server":
            client_opts["server"] = raw
        elif key == "f_range":
            client_opts["f_range"] = _parse_range("f_range", raw)
        else:
            raise ConfigError(key, "unknown config key")
    if delay_fixed is not None and (delay_lo is not None or delay_hi is not None):
        raise ConfigError("delay", "fixed and uniform delay are mutually exclusive")
    if delay_fixed is not None:
        request["delay"] = {"kind": "fixed", "ms": delay_fixed}
    elif delay_lo is not None or delay_hi is not None:
        if delay_lo is None or delay_hi is None:
            raise ConfigError(
                "delay", "uniform delay needs both delay_uniform_lo_ms and delay_uniform_hi_ms"
            )
        request["delay"] = {"kind": "uniform", "lo_ms": delay_lo, "hi_ms": delay_hi}


_RANGE_RE = re.compile(r"^(\d+)(?:\.\.(\d+))?$")


def _parse_range(key: str, raw: str) -> tuple[int, int]:
    match = _RANGE_RE.match(raw.strip())
    if not match:
        raise ConfigError(key, f"expected LO..HI or a single integer, got {raw!r}")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) is not None else lo
    if hi < lo:
        raise ConfigError(key, f"range upper bound below lower bound: {raw!r}")
    return lo, hi


class FRange(click.ParamType):
    """Click type for --f sweep ranges like 1..10."""

    name = "range"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return _parse_range("--f", value)
        except ConfigError as exc:
            self.fail(str(exc), param, ctx)


def _call_service(path: str, payload: dict, server: str | None) -> httpx.Response:
    if server:
        try:
            with httpx.Client(base_url=server, timeout=600.0) as client:
                return client.post(path, json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"cannot reach {server}: {exc}", err=True)
            sys.exit(1)

    from .service import app as service_app

    async def _post() -> httpx.Response:
        transport = httpx.ASGITransport(app=service_app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://medgossip.local", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(_post())


def _fail_config(message: str) -> None:
    click.echo(f"config error: {message}", err=True)
    sys.exit(2)


def _handle_error_response(response: httpx.Response) -> None:
    if response.status_code in (400, 422):
        detail = response.json().get("detail", [])
        if isinstance(detail, list):
            for item in detail:
                loc = ".".join(str(p) for p in item.get("loc", []) if p != "body")
                click.echo(f"config error: {loc}: {item.get('msg', '')}", err=True)
        else:
            click.echo(f"config error: {detail}", err=True)
        sys.exit(2)
    detail = {}
    try:
        detail = response.json().get("detail", {})
    except ValueError:
        pass
    if isinstance(detail, dict) and detail.get("error") == "simulation_abort":
        click.echo(f"simulation abort: {detail.get('msg', '')}", err=True)
        sys.exit(3)
    click.echo(f"request failed with status {response.status_code}", err=True)
    sys.exit(1)


def _write(out_dir: str, name: str, content: str) -> Path:
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / name
    target.write_text(content, encoding="utf-8")
    return target


def _write_events(out_dir: str, events: list[dict]) -> Path:
    lines = "".join(
        json.dumps(event, sort_keys=True, separators=(",", ":")) + "\n"
        for event in events
    )
    return _write(out_dir, "events.ndjson", lines)


def _common_options(fn):
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Flat key=value config file."),
        click.option("--seed", type=int, default=None, help="RNG seed (required here or in the config file)."),
        click.option("--fanout", type=int, default=None, help="Gossip fanout cap k."),
        click.option("--hmax", type=int, default=None, help="Gossip hop cap (default: sized to n)."),
        click.option("--max-age-ms", type=int, default=None, help="Freshness window in virtual ms."),
        click.option("--future-skew-ms", type=int, default=None, help="Allowed future timestamp skew."),
        click.option("--delay-fixed-ms", type=int, default=None, help="Fixed link delay."),
        click.option("--delay-uniform-ms", type=(int, int), default=None, help="Uniform link delay LO HI."),
        click.option("--vote-timeout-ms", type=int, default=None, help="Round timeout (default: 20x max delay)."),
        click.option("--gap-ms", type=int, default=None, help="Virtual ms between proposals."),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory (default .)."),
        click.option("--trace", is_flag=True, default=False, help="Also write events.ndjson."),
        click.option("--jobs", type=int, default=None, help="Parallel sweep workers."),
        click.option("--server", default=None, help="Remote service URL (default: in-process)."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _build_request(
    config_path: str | None,
    client_opts: dict,
    **flags: Any,
) -> dict:
    request: dict[str, Any] = {}
    if config_path:
        _apply_config_file(config_path, request, client_opts)
    if flags.get("delay_fixed_ms") is not None and flags.get("delay_uniform_ms") is not None:
        raise ConfigError("delay", "--delay-fixed-ms and --delay-uniform-ms are mutually exclusive")

    direct = {
        "seed": "seed",
        "n": "n",
        "f": "f",
        "fanout": "fanout",
        "hmax": "hmax",
        "max_age_ms": "max_age_ms",
        "future_skew_ms": "future_skew_ms",
        "vote_timeout_ms": "vote_timeout_ms",
        "jobs": "jobs",
        "gap_ms": "workload.gap_ms",
        "bad_signature": "inject.bad_signature",
        "expired_timestamp": "inject.expired_timestamp",
        "malformed_content": "inject.malformed_content",
    }
    for flag, path in direct.items():
        if flags.get(flag) is not None:
            _set_path(request, path, flags[flag])
    if flags.get("delay_fixed_ms") is not None:
        request["delay"] = {"kind": "fixed", "ms": flags["delay_fixed_ms"]}
    if flags.get("delay_uniform_ms") is not None:
        lo, hi = flags["delay_uniform_ms"]
        request["delay"] = {"kind": "uniform", "lo_ms": lo, "hi_ms": hi}
    if flags.get("trace"):
        request["trace"] = True
    if flags.get("out") is not None:
        client_opts["out"] = flags["out"]
    if flags.get("server") is not None:
        client_opts["server"] = flags["server"]

    if "seed" not in request:
        raise ConfigError("seed", "a seed is required (no wall-clock default)")
    return request


def _run_and_report(request: dict, client_opts: dict, endpoint: str) -> None:
    response = _call_service(endpoint, request, client_opts.get("server"))
    if response.status_code != 200:
        _handle_error_response(response)
    body = response.json()
    out_dir = client_opts.get("out", ".")
    metrics = body["metrics"]
    paths = [
        _write(out_dir, "metrics.json", stable_json({"config": body["config"], "metrics": metrics})),
        _write(out_dir, "table1.csv", type_table_csv(metrics)),
        _write(out_dir, "table2.csv", attack_table_csv(metrics)),
    ]
    if body.get("events") is not None:
        paths.append(_write_events(out_dir, body["events"]))
    click.echo(run_summary_text(metrics))
    for path in paths:
        click.echo(f"wrote {path}")


@click.group()
def main() -> None:
    """Experiments on gossip-based Byzantine consensus for medical messages."""


@main.command()
@_common_options
@click.option("--n", type=int, default=None, help="Agent count.")
@click.option("--f", type=int, default=None, help="Byzantine tolerance.")
def run(config_path, **flags) -> None:
    """Run a consensus experiment and export its metrics."""
    client_opts: dict[str, Any] = {}
    try:
        request = _build_request(config_path, client_opts, **flags)
    except ConfigError as exc:
        _fail_config(str(exc))
    _run_and_report(request, client_opts, "/experiments/run")


@main.command()
@_common_options
@click.option("--n", type=int, default=None, help="Agent count.")
@click.option("--f", type=int, default=None, help="Byzantine tolerance.")
@click.option("--bad-signature", type=int, default=None, help=f"Invalid-signature injections (default {DEFAULT_INJECT_PLAN[0]}).")
@click.option("--expired-timestamp", type=int, default=None, help=f"Expired-timestamp injections (default {DEFAULT_INJECT_PLAN[1]}).")
@click.option("--malformed-content", type=int, default=None, help=f"Malformed-content injections (default {DEFAULT_INJECT_PLAN[2]}).")
def inject(config_path, **flags) -> None:
    """Run the Byzantine fault-injection workload and report detection."""
    client_opts: dict[str, Any] = {}
    try:
        request = _build_request(config_path, client_opts, **flags)
    except ConfigError as exc:
        _fail_config(str(exc))
    plan_defaults = zip(
        ("bad_signature", "expired_timestamp", "malformed_content"), DEFAULT_INJECT_PLAN
    )
    inject_section = request.setdefault("inject", {})
    for key, default in plan_defaults:
        inject_section.setdefault(key, default)
    _run_and_report(request, client_opts, "/experiments/inject")


@main.command()
@_common_options
@click.option("--f", "f_range", type=FRange(), default=None, help="Tolerance range, e.g. 1..10.")
def sweep(config_path, f_range, **flags) -> None:
    """Sweep network sizes n = 3f + 1 and export scalability plot data."""
    client_opts: dict[str, Any] = {}
    try:
        request = _build_request(config_path, client_opts, **flags)
    except ConfigError as exc:
        _fail_config(str(exc))
    lo, hi = f_range or client_opts.get("f_range") or (1, 10)
    if lo < 1:
        _fail_config("--f: sweep requires f >= 1")
    request.pop("inject", None)
    request["f_min"] = lo
    request["f_max"] = hi
    response = _call_service("/experiments/sweep", request, client_opts.get("server"))
    if response.status_code != 200:
        _handle_error_response(response)
    body = response.json()
    out_dir = client_opts.get("out", ".")
    paths = [
        _write(out_dir, "metrics.json", stable_json(body)),
        _write(out_dir, "sweep.csv", sweep_csv(body["rows"])),
    ]
    click.echo(sweep_table_text(body["rows"]))
    for path in paths:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
