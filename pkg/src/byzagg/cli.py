"""Command-line client.

Every subcommand builds a JSON request and posts it to the service: an
in-process application by default, or a remote one when --url is given.
This keeps one code path for validation and serialization no matter how
the tool is invoked.

Exit codes: 0 success, 2 bad configuration, 3 protocol violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .errors import ConfigError


class _ExitError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def parse_int_list(text: str) -> list[int]:
    """Accept '2..7' (inclusive range), '2,3,5', or a single integer."""
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            return list(range(int(low), int(high) + 1))
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse integer list {text!r}") from None


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            body = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(body, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return body


def _make_client(url: str | None):
    if url is not None:
        import httpx

        return httpx.Client(base_url=url)
    # the testclient module warns about its own httpx dependency on import
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app, raise_server_exceptions=False)


def _post(client, path: str, body: dict) -> dict:
    resp = client.post(path, json=body)
    if 200 <= resp.status_code < 300:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    if resp.status_code in (400, 422):
        raise _ExitError(2, f"bad request: {detail}")
    raise _ExitError(3, f"server error ({resp.status_code}): {detail}")


def _write(out_dir: str | None, name: str, text: str) -> None:
    if out_dir is None:
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / name
    target.write_text(text, encoding="utf-8")
    print(f"wrote {target}")


def _cmd_assign(args, client) -> int:
    body = _load_config(args.config)
    if args.scheme is not None or "scheme" not in body:
        scheme: dict = dict(body.get("scheme", {}))
        if args.scheme is not None:
            scheme["kind"] = args.scheme
        if args.K is not None:
            scheme["K"] = args.K
        if args.r is not None:
            scheme["r"] = args.r
        if "kind" not in scheme or "K" not in scheme:
            raise ConfigError("assign needs --scheme and --K (or a config file)")
        body["scheme"] = scheme
    if args.seed is not None:
        body["seed"] = args.seed
    if args.iteration is not None:
        body["iteration"] = args.iteration
    payload = _post(client, "/assign", body)
    text = json.dumps(payload, indent=2) + "\n"
    if args.out is None:
        print(text, end="")
    _write(args.out, "assignment.json", text)
    return 0


def _cmd_epsilon(args, client) -> int:
    body = _load_config(args.config)
    if args.K is not None:
        body["K"] = args.K
    if args.r is not None:
        body["r"] = args.r
    if args.q is not None:
        body["q_values"] = parse_int_list(args.q)
    if args.schemes is not None:
        body["schemes"] = args.schemes.split(",")
    if "K" not in body:
        raise ConfigError("epsilon needs --K (or a config file)")
    if "q_values" not in body:
        raise ConfigError("epsilon needs --q (or q_values in the config file)")
    payload = _post(client, "/epsilon", body)
    if args.out is None:
        print(payload["csv"], end="")
    _write(args.out, "epsilon.csv", payload["csv"])
    return 0


_DEMO_BODIES = {
    "ATT1": {
        "K": 7, "r": 3, "seed": 0,
        "attack": {"mode": "ATT1", "q": 3, "adversaries": [0, 1, 2]},
    },
    "ATT2": {
        "K": 7, "r": 3, "seed": 0,
        "attack": {"mode": "ATT2", "q": 3, "adversaries": [0, 1, 2],
                   "disagreement": [3, 4, 5]},
    },
}


def _cmd_detect_demo(args, client) -> int:
    body = _load_config(args.config)
    if not body:
        custom = any(v is not None for v in (args.K, args.r, args.q, args.seed))
        if custom:
            body = {
                "K": args.K if args.K is not None else 7,
                "r": args.r if args.r is not None else 3,
                "seed": args.seed if args.seed is not None else 0,
                "attack": {"mode": args.mode, "q": args.q if args.q is not None else 3},
            }
        else:
            # canned showcase: fixed culprits so the outcome is reproducible
            body = json.loads(json.dumps(_DEMO_BODIES[args.mode]))
    elif args.seed is not None:
        body["seed"] = args.seed
    payload = _post(client, "/detect-demo", body)
    print(payload["summary"])
    print(f"actual adversaries: {sorted(payload['actual'])}")
    print(f"distorted files: {len(payload['distorted_files'])}")
    return 0


def _cmd_train(args, client) -> int:
    body = _load_config(args.config)
    if not body:
        raise ConfigError("train needs --config pointing at a run-config JSON file")
    if args.seed is not None:
        body["seed"] = args.seed
    payload = _post(client, "/train", body)
    out_dir = args.out if args.out is not None else "."
    _write(out_dir, "trajectory.csv", payload["trajectory_csv"])
    model = {
        "weights": payload["final_model"],
        "final_loss": payload["final_loss"],
        "digest": payload["digest"],
    }
    _write(out_dir, "final_model.json", json.dumps(model, indent=2) + "\n")
    print(f"final loss: {payload['final_loss']!r}")
    print(f"total distorted file gradients: {payload['total_distorted']}")
    return 0


def _cmd_bench(args, client) -> int:
    body = _load_config(args.config)
    if args.K is not None:
        body["K"] = args.K
    if args.r is not None:
        body["r"] = args.r
    if args.q is not None:
        body["q_values"] = parse_int_list(args.q)
    if args.attacks is not None:
        body["attacks"] = args.attacks.split(",")
    if args.repeats is not None:
        body["repeats"] = args.repeats
    payload = _post(client, "/bench", body)
    if args.out is None:
        print(payload["csv"], end="")
    _write(args.out, "bench.csv", payload["csv"])
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="byzagg",
        description="Byzantine-resilient gradient aggregation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with the request body")
        p.add_argument("--url", help="base URL of a running service (default: in-process)")
        p.add_argument("--out", help="directory for output files")

    p = sub.add_parser("assign", help="compute a worker-to-file assignment")
    common(p)
    p.add_argument("--scheme", choices=["aspis", "aspis_plus", "detox", "baseline"])
    p.add_argument("--K", type=int, help="number of workers")
    p.add_argument("--r", type=int, help="replication factor")
    p.add_argument("--seed", type=int)
    p.add_argument("--iteration", type=int, help="round index (matters for aspis_plus)")

    p = sub.add_parser("epsilon", help="distortion-fraction table across q")
    common(p)
    p.add_argument("--K", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--q", help="q values: '2..7', '2,4,6', or '3'")
    p.add_argument("--schemes", help="comma-separated subset of aspis,baseline,detox")

    p = sub.add_parser("detect-demo", help="one detection round on synthetic gradients")
    common(p)
    p.add_argument("--mode", choices=["ATT1", "ATT2", "ATT3"], default="ATT2")
    p.add_argument("--K", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("train", help="run the training simulator from a run-config")
    common(p)
    p.add_argument("--seed", type=int, help="override the config seed")

    p = sub.add_parser("bench", help="clique-enumeration timing on structured graphs")
    common(p)
    p.add_argument("--K", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--q", help="q values: '5,15,25' or '5..10'")
    p.add_argument("--attacks", help="comma-separated subset of ATT1,ATT2")
    p.add_argument("--repeats", type=int)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


_HANDLERS = {
    "assign": _cmd_assign,
    "epsilon": _cmd_epsilon,
    "detect-demo": _cmd_detect_demo,
    "train": _cmd_train,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    try:
        client = _make_client(args.url)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        with client:
            return _HANDLERS[args.command](args, client)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _ExitError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.code


cli = main


if __name__ == "__main__":
    sys.exit(main())
