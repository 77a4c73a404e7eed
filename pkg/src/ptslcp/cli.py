"""Benchmark and solve CLI; a thin client over the HTTP service.

By default requests go to an in-process copy of the service (no socket,
fully deterministic); --server targets a running remote instance and
--serve starts one. Modes: batch benchmark (default), accuracy trace
(--trace), and single-problem solve (--problem FILE).
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ParseError, PtsLcpError
from .problem import read_problem

BATCH_CSV_HEADER = ("n,seed,direction,predictors,correctors,"
                    "final_xts,final_v0,status,wall_ms")
TRACE_CSV_HEADER = "exponent,predictors,correctors"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptslcp",
        description="Benchmark a parabolic target-space LCP solver on random "
                    "monotone instances, trace solve accuracy, or solve a "
                    "problem file.")
    parser.add_argument("--n", type=int, default=16,
                        help="instance size (default 16)")
    parser.add_argument("--sizes", type=str, default=None,
                        help="comma-separated sizes for a batch, e.g. 16,32,64")
    parser.add_argument("--instances", type=int, default=25,
                        help="instances per size (default 25)")
    parser.add_argument("--eta", type=float, default=10.0,
                        help="skew weight of generated instances (default 10)")
    parser.add_argument("--seed", type=int, default=0,
                        help="base RNG seed (default 0)")
    parser.add_argument("--beta", type=float, default=0.25,
                        help="proximity radius (default 0.25)")
    parser.add_argument("--tau", type=_parse_tau, default=1.5,
                        help="barrier-gap radius, a number or 'theory' "
                             "(default 1.5)")
    parser.add_argument("--eps", type=float, default=1e-7,
                        help="target accuracy on v0 (default 1e-7)")
    parser.add_argument("--direction", choices=("ut", "ac", "both"),
                        default="ac", help="predictor direction (default ac)")
    parser.add_argument("--audit", action="store_true",
                        help="enable runtime theory oracles")
    parser.add_argument("--format", choices=("table", "csv", "json"),
                        default="table", help="output format (default table)")
    parser.add_argument("--trace", action="store_true",
                        help="trace decade crossings of one instance")
    parser.add_argument("--problem", type=str, default=None,
                        help="solve a problem file instead of a batch")
    parser.add_argument("--server", type=str, default=None,
                        help="base URL of a running service "
                             "(default: in-process)")
    parser.add_argument("--serve", action="store_true",
                        help="run the HTTP service")
    parser.add_argument("--host", type=str, default="127.0.0.1",
                        help="bind address for --serve")
    parser.add_argument("--port", type=int, default=8000,
                        help="port for --serve")
    return parser


def _parse_tau(text: str):
    if text == "theory":
        return "theory"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"must be a number or 'theory', got {text!r}")


class ServiceClient:
    """POSTs to a remote service or to an in-process app instance."""

    def __init__(self, server: str | None):
        if server is not None:
            import httpx
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings
            with warnings.catch_warnings():
                # Some starlette builds warn about their test-client shim
                # on import; it is irrelevant to this offline transport.
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient
            from .service import app
            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        body = response.json()
        if response.status_code != 200:
            detail = body.get("detail", body) if isinstance(body, dict) else body
            raise SystemExit(f"ptslcp: service error {response.status_code}: "
                             f"{detail}")
        return body


def _fmt(value, width: int, places: int = 2) -> str:
    if value is None:
        return "-".rjust(width)
    return f"{value:.{places}f}".rjust(width)


def _csv_float(value) -> str:
    return "nan" if value is None else repr(float(value))


def _render_batch(body: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(body, indent=2)
    if fmt == "csv":
        lines = [BATCH_CSV_HEADER]
        for row in body["rows"]:
            lines.append(
                f"{row['n']},{row['seed']},{row['direction']},"
                f"{row['predictors']},{row['correctors']},"
                f"{_csv_float(row['final_xts'])},"
                f"{_csv_float(row['final_v0'])},"
                f"{row['status']},{row['wall_ms']:.3f}")
        return "\n".join(lines)
    header = (f"{'n':>6}  {'dir':<4} {'inst':>5} {'conv':>5} "
              f"{'mean_pred':>10} {'mean_corr':>10} {'mean_ms':>9}")
    lines = [header, "-" * len(header)]
    for s in body["summaries"]:
        lines.append(
            f"{s['n']:>6}  {s['direction']:<4} {s['instances']:>5} "
            f"{s['converged']:>5} {_fmt(s['mean_predictors'], 10)} "
            f"{_fmt(s['mean_correctors'], 10)} {_fmt(s['mean_wall_ms'], 9, 1)}")
    failures = [r for r in body["rows"] if r["status"] != "converged"]
    if failures:
        lines.append("")
        for row in failures:
            lines.append(f"failed: n={row['n']} seed={row['seed']} "
                         f"direction={row['direction']} status={row['status']}")
    return "\n".join(lines)


def _render_trace(body: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(body, indent=2)
    if fmt == "csv":
        lines = [TRACE_CSV_HEADER]
        for row in body["rows"]:
            lines.append(f"{row['exponent']},{row['predictors']},"
                         f"{row['correctors']}")
        return "\n".join(lines)
    lines = [
        f"instance n={body['n']} seed={body['seed']} "
        f"direction={body['direction']} eps={body['eps']:g}",
        f"initial x^T s = {body['initial_xts']:.6e} "
        f"(decade {body['initial_exponent']})",
        f"{'accuracy':>8} {'predictors':>11} {'correctors':>11}",
    ]
    for row in body["rows"]:
        lines.append(f"{row['exponent']:>8} {row['predictors']:>11} "
                     f"{row['correctors']:>11}")
    status = "converged" if body["converged"] else "did not converge"
    lines.append(f"{status}: {body['predictors']} predictors, "
                 f"{body['correctors']} correctors, "
                 f"final x^T s = {body['final_xts']:.6e}")
    diag = body.get("diagnostics")
    if diag and not diag.get("degenerate"):
        lines.append(
            f"partition |B|={diag['m']} sigma={diag['sigma']:.3e} "
            f"kappa={diag['kappa']:.3e} "
            f"tail threshold={diag['tail_threshold']:.3e} "
            f"stable={diag['partition_stable']}")
    elif diag:
        lines.append("partition degenerate (singular principal block)")
    return "\n".join(lines)


def _render_solve(body: dict, fmt: str, n: int) -> str:
    if fmt == "json":
        return json.dumps(body, indent=2)
    if fmt == "csv":
        return "\n".join([
            BATCH_CSV_HEADER,
            f"{n},-1,-,{body['predictors']},{body['correctors']},"
            f"{_csv_float(body['final_xts'])},{_csv_float(body['final_v0'])},"
            f"{body['status']},{body['wall_ms']:.3f}"])
    lines = [
        f"status: {body['status']}",
        f"predictors: {body['predictors']}  correctors: {body['correctors']}",
        f"final x^T s = {body['final_xts']:.6e}  "
        f"final v0 = {body['final_v0']:.6e}",
    ]
    if body.get("x") is not None:
        lines.append("x = " + " ".join(f"{v:.9g}" for v in body["x"]))
        lines.append("s = " + " ".join(f"{v:.9g}" for v in body["s"]))
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tau = args.tau

    if args.serve:
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    if args.trace and args.problem:
        print("ptslcp: --trace applies to generated instances; "
              "it cannot be combined with --problem", file=sys.stderr)
        return 2

    client = ServiceClient(args.server)

    if args.problem is not None:
        if args.direction == "both":
            print("ptslcp: --problem needs a single direction (ut or ac)",
                  file=sys.stderr)
            return 2
        try:
            problem, start = read_problem(args.problem)
        except OSError as exc:
            print(f"ptslcp: cannot read {args.problem}: {exc}",
                  file=sys.stderr)
            return 2
        except ParseError as exc:
            where = (f" (line {exc.line}, column {exc.column})"
                     if exc.line is not None else "")
            print(f"ptslcp: bad problem file{where}: {exc}", file=sys.stderr)
            return 2
        if start is None:
            print("ptslcp: problem file has no x0/s0 starting pair",
                  file=sys.stderr)
            return 2
        payload = {
            "problem": {
                "n": problem.n,
                "M": [float(v) for v in problem.M.ravel()],
                "q": [float(v) for v in problem.q],
                "x0": [float(v) for v in start.x],
                "s0": [float(v) for v in start.s],
            },
            "options": {
                "beta": args.beta, "tau": tau, "eps": args.eps,
                "direction": args.direction, "audit": args.audit,
            },
        }
        body = client.post("/solve", payload)
        print(_render_solve(body, args.format, problem.n))
        return 0 if body["status"] == "converged" else 1

    if args.trace:
        direction = args.direction if args.direction != "both" else "ac"
        payload = {
            "n": args.n, "seed": args.seed, "eta": args.eta,
            "direction": direction, "eps": args.eps,
            "beta": args.beta, "tau": tau,
        }
        body = client.post("/bench/trace", payload)
        print(_render_trace(body, args.format))
        return 0 if body["converged"] else 1

    sizes = ([int(tok) for tok in args.sizes.split(",") if tok]
             if args.sizes else [args.n])
    payload = {
        "sizes": sizes, "instances": args.instances, "eta": args.eta,
        "base_seed": args.seed, "beta": args.beta, "tau": tau,
        "eps": args.eps, "direction": args.direction, "audit": args.audit,
    }
    body = client.post("/bench/batch", payload)
    print(_render_batch(body, args.format))
    return 0 if body["all_converged"] else 1


def run():  # console-script entry point
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
