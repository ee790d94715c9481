"""delaykern command line: a thin client of the HTTP service.

Every subcommand builds a JSON request, posts it to the service and writes
the returned artifacts into the output directory.  By default the request
is served in-process (httpx ASGI transport against the FastAPI app), so no
server needs to be running; pass --server URL to target a remote instance.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(instability or divergence).  Errors are emitted as JSON on stderr.
All flags can also be set through environment variables prefixed with
DELAYKERN_ (e.g. DELAYKERN_REGIONS_OUT).
"""

from __future__ import annotations

import json
import pathlib
import sys

import click
import httpx


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # in-process: drive the ASGI app through a synchronous httpx client
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service.app import app
    return TestClient(app, raise_server_exceptions=False)


def _fail(payload: dict, code: int):
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    sys.exit(code)


def _post(server: str | None, path: str, payload: dict) -> dict:
    try:
        with _client(server) as client:
            resp = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        _fail({"error": "TransportError", "message": str(exc),
               "exit_code": 2}, 2)
    if resp.status_code == 200:
        return resp.json()
    try:
        body = resp.json()
    except ValueError:
        body = {"error": "HTTPError", "message": resp.text,
                "exit_code": 2}
    if resp.status_code == 422:  # pydantic validation
        body = {"error": "ValidationError", "message": json.dumps(body),
                "exit_code": 2}
    _fail(body, int(body.get("exit_code", 2)))


def _merge_config(config_path: str | None, overrides: dict) -> dict:
    payload = {}
    if config_path:
        payload.update(json.loads(pathlib.Path(config_path).read_text()))
    payload.update({k: v for k, v in overrides.items() if v is not None})
    return payload


def _write_artifacts(result: dict, out: str):
    out_dir = pathlib.Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in result["files"].items():
        (out_dir / name).write_text(content)
    click.echo(f"wrote {len(result['files'])} file(s) to {out_dir}")


def _fmt(formats: str | None):
    return [formats] if formats else None


_shared = [
    click.option("--config", "config_path", type=click.Path(exists=True),
                 default=None, help="JSON file with request parameters"),
    click.option("--out", default="out", show_default=True,
                 help="output directory"),
    click.option("--format", "formats", type=click.Choice(["csv", "json", "svg"]),
                 default=None, help="emit a single format (default: all)"),
    click.option("--server", default=None,
                 help="HTTP base URL of a running service (default: in-process)"),
]


def _with_shared(cmd):
    for opt in reversed(_shared):
        cmd = opt(cmd)
    return cmd


@click.group()
def main():
    """Delay-aware H2 feedback synthesis workbench."""


@main.command()
@_with_shared
@click.option("--a-min", type=float, default=None)
@click.option("--a-max", type=float, default=None)
@click.option("--n-points", type=int, default=None)
@click.option("-T", "--delay", "T", type=float, default=None)
def regions(config_path, out, formats, server, a_min, a_max, n_points, T):
    """Stability/optimality region boundaries over an a grid."""
    payload = _merge_config(config_path, {
        "a_min": a_min, "a_max": a_max, "n_points": n_points, "T": T,
        "formats": _fmt(formats)})
    result = _post(server, "/api/regions", payload)
    _write_artifacts(result, out)


@main.command("scalar-sweep")
@_with_shared
@click.option("--a-min", type=float, default=None)
@click.option("--a-max", type=float, default=None)
@click.option("--n-points", type=int, default=None)
@click.option("--delays", default=None,
              help="comma-separated delay list, e.g. 0,1,2,3")
@click.option("-r", "--weight", "r", type=float, default=None)
def scalar_sweep(config_path, out, formats, server, a_min, a_max, n_points,
                 delays, r):
    """Optimal gain vs open-loop coefficient for several delays."""
    T_list = [float(x) for x in delays.split(",")] if delays else None
    payload = _merge_config(config_path, {
        "a_min": a_min, "a_max": a_max, "n_points": n_points,
        "T_list": T_list, "r": r, "formats": _fmt(formats)})
    result = _post(server, "/api/scalar-sweep", payload)
    _write_artifacts(result, out)


@main.command("rd-kernels")
@_with_shared
@click.option("-c", "--reaction", "c", type=float, default=None)
@click.option("-d", "--diffusion", "d", type=float, default=None)
@click.option("-T", "--delay", "T", type=float, default=None)
@click.option("-r", "--weight", "r", type=float, default=None)
@click.option("--dx", type=float, default=None)
@click.option("-L", "--half-width", "L", type=float, default=None)
def rd_kernels(config_path, out, formats, server, c, d, T, r, dx, L):
    """Reaction-diffusion kernels, design approximation and thresholds."""
    payload = _merge_config(config_path, {
        "c": c, "d": d, "T": T, "r": r, "dx": dx, "L": L,
        "formats": _fmt(formats)})
    result = _post(server, "/api/rd-kernels", payload)
    _write_artifacts(result, out)


@main.command()
@_with_shared
@click.option("-n", "--agents", "n", type=int, default=None)
@click.option("--a-row", default=None, help="comma-separated first row")
@click.option("-T", "--delay", "T", type=float, default=None)
@click.option("-r", "--weight", "r", type=float, default=None)
@click.option("--method", type=click.Choice(
    ["numerical_opt", "small_delay", "delay_free"]), default=None)
def circulant(config_path, out, formats, server, n, a_row, T, r, method):
    """Gain design for a ring of agents coupled by a circulant matrix."""
    row = [float(x) for x in a_row.split(",")] if a_row else None
    payload = _merge_config(config_path, {
        "n": n, "a_row": row, "T": T, "r": r, "method": method,
        "formats": _fmt(formats)})
    result = _post(server, "/api/circulant", payload)
    _write_artifacts(result, out)
    click.echo(json.dumps({"self_gain": result["report"]["self_gain"],
                           "cost": result["report"]["cost"],
                           "stable": result["report"]["stable"]},
                          sort_keys=True))


@main.command()
@_with_shared
@click.option("--seed", type=int, default=None)
@click.option("--k-per-cell", type=int, default=None)
@click.option("--step", "h", type=float, default=None)
def verify(config_path, out, formats, server, seed, k_per_cell, h):
    """Cross-check the closed-form cost against both oracles."""
    payload = _merge_config(config_path, {
        "seed": seed, "k_per_cell": k_per_cell, "h": h,
        "formats": _fmt(formats)})
    result = _post(server, "/api/verify", payload)
    _write_artifacts(result, out)
    rep = result["report"]
    click.echo(json.dumps({"n_triples": rep["n_triples"],
                           "max_rel_err_time": rep["max_rel_err_time"],
                           "max_rel_err_freq": rep["max_rel_err_freq"]},
                          sort_keys=True))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn
    uvicorn.run("delaykern.service.app:app", host=host, port=port)


def entrypoint():
    main(auto_envvar_prefix="DELAYKERN")


if __name__ == "__main__":
    entrypoint()
