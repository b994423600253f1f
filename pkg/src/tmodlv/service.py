"""HTTP service wrapping the compute core.

One POST endpoint per command; the request carries the config text plus
the command's parameters, the response carries the echoed header, the
rendered report and the exit code the CLI would have used.  All
computation is pure, so the service is stateless."""

from __future__ import annotations

from fastapi import FastAPI
from pydantic import BaseModel, Field

from . import __version__
from .runner import COMMANDS, run_command

app = FastAPI(
    title="tmodlv",
    version=__version__,
    description=(
        "Equivariant special L-values of Drinfeld modules and t-modules "
        "over F_q[t]: theta values, G-sizes, monic decompositions, and the "
        "trace-formula / ETNF / Brumer-Stark / volume-formula checkers."
    ),
)


class RunRequest(BaseModel):
    config_text: str = Field(description="run configuration in the [section] key = value format")
    precision: int | None = Field(default=None, ge=1)
    max_prime_degree: int | None = Field(default=None, ge=1)
    taming_set: str | None = Field(default=None, description="comma-separated primes for theta-s/cs-check")
    m: int | None = Field(default=None, ge=0, description="twist order for theta-m/cs-check")
    prime: str | None = Field(default=None, description="prime of A for gsize")
    value: str | None = Field(default=None, description="group-ring value for monic")
    format: str = Field(default="text", pattern="^(text|jsonl)$")


class RunResponse(BaseModel):
    command: str
    exit_code: int
    status: str
    header: dict
    report: str
    payload: dict


def _serve(command: str, req: RunRequest) -> RunResponse:
    report = run_command(
        command,
        req.config_text,
        precision=req.precision,
        max_prime_degree=req.max_prime_degree,
        set=req.taming_set,
        m=req.m,
        prime=req.prime,
        value=req.value,
    )
    status = {0: "pass", 1: "fail", 2: "error"}[report.exit_code]
    return RunResponse(
        command=command,
        exit_code=report.exit_code,
        status=status,
        header=report.header,
        report=report.render(req.format),
        payload=_jsonable(report.payload),
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def _register(command: str):
    path = "/v1/" + command

    @app.post(path, response_model=RunResponse, name=command)
    def endpoint(req: RunRequest) -> RunResponse:  # noqa: ANN001
        return _serve(command, req)

    return endpoint


for _cmd in COMMANDS:
    _register(_cmd)


@app.get("/healthz")
def healthz():
    return {"status": "ok", "version": __version__}
