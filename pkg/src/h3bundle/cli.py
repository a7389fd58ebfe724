"""Command-line front end.

All subcommands are thin clients of the service (in-process by default,
remote with --server), except ``serve``, which launches the service, and the
hidden verification test hook, which must bypass the wire format on purpose.

Exit codes: 0 when the command's checks pass (or it only emits data), 1 when
a requested check fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .client import ServiceClient, ServiceError
from .distributions import BUILTIN_NAMES, DEFAULT_SEED
from .serialize import write_csv, write_json

__all__ = ["main"]


def _parse_triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers, e.g. 0.3,-0.2,0.4")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def _add_common(p: argparse.ArgumentParser, *, velocity6: bool = False) -> None:
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--v", type=float, default=0.0)
    p.add_argument("--w", type=float, default=0.0)
    if velocity6:
        p.add_argument("--l", type=float, default=0.0)
        p.add_argument("--m", type=float, default=0.0)
        p.add_argument("--n", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=10.0, dest="t_max")
    p.add_argument("--step", type=float, default=1e-3)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--server", default=None, help="base URL of a running service; default runs in-process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="h3bundle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("base-geodesic", help="closed-form and RK4 base geodesic through the origin")
    _add_common(p)
    _add_output(p)

    p = sub.add_parser("bundle-geodesic", help="RK4 bundle geodesic from the origin")
    _add_common(p, velocity6=True)
    _add_output(p)

    p = sub.add_parser("lift", help="horizontal or natural lift of a base geodesic")
    p.add_argument("--kind", choices=("horizontal", "natural"), required=True)
    _add_common(p)
    p.add_argument("--y0", type=_parse_triple, default=(0.0, 0.0, 0.0),
                   help="initial fiber for the horizontal lift, as a,b,c")
    p.add_argument("--tol", type=float, default=1e-6)
    _add_output(p)

    p = sub.add_parser("check", help="totally-geodesic / isocline certification of a named distribution")
    p.add_argument("--name", required=True, help=f"one of {', '.join(BUILTIN_NAMES)}")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_output(p)

    p = sub.add_parser("verify", help="run the full reproduction suite")
    p.add_argument("--all", action="store_true", help="run every check (required)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--flip-curvature-sign", action="store_true", help=argparse.SUPPRESS)
    _add_output(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _emit_summary(summary: dict) -> None:
    print(json.dumps(summary, indent=2, sort_keys=True))


def _write_trajectory(out: Path, fmt: str, payload: dict) -> str:
    if fmt == "csv":
        write_csv(out, payload["columns"], payload["rows"])
    else:
        write_json(out, payload)
    return str(out)


def _with_tag(out: Path, tag: str) -> Path:
    return out.with_name(f"{out.stem}.{tag}{out.suffix}")


def _cmd_base_geodesic(args, client: ServiceClient) -> int:
    resp = client.base_geodesic(u=args.u, v=args.v, w=args.w, t_max=args.t_max, step=args.step)
    files = []
    if args.out is not None:
        files.append(_write_trajectory(_with_tag(args.out, "closed"), args.format, resp["closed_form"]))
        files.append(_write_trajectory(_with_tag(args.out, "rk4"), args.format, resp["rk4"]))
    _emit_summary(
        {
            "command": "base-geodesic",
            "u": args.u, "v": args.v, "w": args.w,
            "max_gap": resp["max_gap"],
            "residual_max": resp["residual_max"],
            "files": files,
        }
    )
    return 0


def _cmd_bundle_geodesic(args, client: ServiceClient) -> int:
    resp = client.bundle_geodesic(
        u=args.u, v=args.v, w=args.w, l=args.l, m=args.m, n=args.n,
        t_max=args.t_max, step=args.step,
    )
    files = []
    if args.out is not None:
        files.append(_write_trajectory(args.out, args.format, resp["trajectory"]))
    _emit_summary(
        {
            "command": "bundle-geodesic",
            "velocity": [args.u, args.v, args.w, args.l, args.m, args.n],
            "residual_max": resp["residual_max"],
            "lagrangian_rel_drift": resp["lagrangian_rel_drift"],
            "momentum_p3_drift": resp["momentum_p3_drift"],
            "files": files,
        }
    )
    return 0


def _cmd_lift(args, client: ServiceClient) -> int:
    resp = client.lift(
        kind=args.kind, u=args.u, v=args.v, w=args.w, y0=list(args.y0),
        t_max=args.t_max, step=args.step, tol=args.tol,
    )
    files = []
    if args.out is not None:
        files.append(_write_trajectory(args.out, args.format, resp["trajectory"]))
    _emit_summary(
        {
            "command": "lift",
            "kind": args.kind,
            "base_velocity": [args.u, args.v, args.w],
            "residual_max": resp["residual_max"],
            "is_geodesic": resp["is_geodesic"],
            "tolerance": args.tol,
            "files": files,
        }
    )
    return 0 if resp["is_geodesic"] else 1


_CHECK_CSV_COLUMNS = (
    "name", "criterion", "tolerance", "global_max", "verdict",
    "witness_x1", "witness_x2", "witness_x3",
    "witness_y1", "witness_y2", "witness_y3",
    "witness_residual",
)


def _check_csv_rows(outcome: dict) -> list[list]:
    rows = []
    for key in ("totally_geodesic", "isocline"):
        rep = outcome.get(key)
        if rep is None:
            continue
        point = rep["witness"]["point"]
        rows.append(
            [rep["name"], rep["criterion"], rep["tolerance"], rep["global_max"], rep["verdict"]]
            + [float(c) for c in point["x"]]
            + [float(c) for c in point["y"]]
            + [rep["witness"]["residual"]]
        )
    return rows


def _cmd_check(args, client: ServiceClient) -> int:
    resp = client.check_distribution(
        name=args.name, samples=args.samples, seed=args.seed, tol=args.tol
    )
    files = []
    if args.out is not None:
        if args.format == "csv":
            write_csv(args.out, _CHECK_CSV_COLUMNS, _check_csv_rows(resp))
        else:
            write_json(args.out, resp)
        files.append(str(args.out))
    summary = dict(resp)
    summary["command"] = "check"
    summary["files"] = files
    _emit_summary(summary)
    verdicts = [resp["totally_geodesic"]["verdict"]]
    if resp["isocline"] is not None:
        verdicts.append(resp["isocline"]["verdict"])
    return 0 if all(v == "pass" for v in verdicts) else 1


def _cmd_verify(args, client: ServiceClient) -> int:
    if not args.all:
        print("verify requires --all", file=sys.stderr)
        return 2
    if args.flip_curvature_sign:
        # test hook: inject a corrupted curvature table directly into the
        # suite runner; deliberately not part of the service surface
        from .verify import flipped_curvature, run_all

        report = run_all(seed=args.seed, curvature_table=flipped_curvature()).to_dict()
    else:
        report = client.verify(seed=args.seed)
    for name, chk in report["checks"].items():
        print(f"{chk['verdict'].upper():4s} {name}: {chk['detail']}", file=sys.stderr)
    files = []
    if args.out is not None:
        if args.format == "csv":
            rows = [
                [name, chk["verdict"], chk["detail"]]
                for name, chk in report["checks"].items()
            ]
            write_csv(args.out, ("check", "verdict", "detail"), rows)
        else:
            write_json(args.out, report)
        files.append(str(args.out))
    report["files"] = files
    _emit_summary(report)
    return int(report["exit_code"])


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        return _cmd_serve(args)

    handlers = {
        "base-geodesic": _cmd_base_geodesic,
        "bundle-geodesic": _cmd_bundle_geodesic,
        "lift": _cmd_lift,
        "check": _cmd_check,
        "verify": _cmd_verify,
    }
    try:
        with ServiceClient(getattr(args, "server", None)) as client:
            return handlers[args.command](args, client)
    except ServiceError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
