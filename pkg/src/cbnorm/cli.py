"""Command line client.

All computation happens in the HTTP service; by default the CLI mounts
the app in-process, and --url points it at a running server instead.
File handling (map files, reports, JSONL search logs) stays on the
client side so remote use works on local paths.

Exit codes: 0 success / all checks pass, 1 verification failure,
2 input error, 3 resource cap exceeded.
"""

import argparse
import json
import sys

import httpx

from .bounds import CBounds, table_to_csv
from .modmap import MapFileError, load_map, map_from_dict, map_to_dict, save_map
from .search import read_jsonl


def _fail(msg, code):
    print(f"error: {msg}", file=sys.stderr)
    return code


class Client:
    """Uniform .get/.post over an in-process app or a remote server."""

    def __init__(self, url=None):
        if url:
            self._c = httpx.Client(base_url=url, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.filterwarnings(
                    "ignore", message="Using `httpx` with `starlette.testclient`"
                )
                from fastapi.testclient import TestClient

            from .service import app

            self._c = TestClient(app, raise_server_exceptions=False)

    def post(self, path, payload):
        r = self._c.post(path, json=payload)
        return r.status_code, r.json()

    def get(self, path):
        r = self._c.get(path)
        return r.status_code, r.json()


def _error_exit(status, body):
    detail = body.get("detail") if isinstance(body, dict) else None
    if isinstance(detail, dict):
        kind = detail.get("kind")
        msg = detail.get("message", str(detail))
        if kind == "cap":
            return _fail(msg, 3)
        return _fail(msg, 2)
    if status == 422:
        return _fail(f"invalid request: {json.dumps(detail)}", 2)
    return _fail(f"service error ({status}): {json.dumps(body)}", 1)


def _options_payload(args):
    return {
        "restarts": getattr(args, "restarts", 32),
        "max_iter": getattr(args, "max_iter", 500),
        "tol": getattr(args, "tol_engine", 1e-12),
        "seed": getattr(args, "seed", 0),
    }


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2)


def _write_out(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# ----------------------------------------------------------------- verify


def _print_case(case):
    print(f"case {case['name']}")
    for c in case["checks"]:
        tag = "PASS" if c["passed"] else "FAIL"
        rel = {"abs": "~", "ge": ">=", "le": "<="}[c["direction"]]
        print(
            f"  [{tag}] {c['description']}: achieved {c['achieved']:.12g} "
            f"{rel} target {c['target']:.12g} (tol {c['tolerance']:g})"
        )


def cmd_verify(args, client):
    payload = {
        "selector": args.case,
        "seeds": args.seeds,
        "tol": args.tol,
        "options": _options_payload(args),
    }
    preload_failure = None
    if args.map:
        try:
            payload["map"] = map_to_dict(load_map(args.map))
        except (MapFileError, OSError) as e:
            from .verify import failed_mapfile_case

            preload_failure = failed_mapfile_case(str(e)).to_dict()
    status, body = client.post("/api/verify", payload)
    if status != 200:
        return _error_exit(status, body)
    cases = body["cases"]
    if preload_failure is not None:
        cases = cases + [preload_failure]
    for case in cases:
        _print_case(case)
    total = sum(len(c["checks"]) for c in cases)
    failed = sum(1 for c in cases for ch in c["checks"] if not ch["passed"])
    if failed:
        print(f"FAIL: {failed} of {total} checks failed")
        return 1
    print(f"PASS: all {total} checks passed")
    return 0


# ------------------------------------------------------------------- norm


def cmd_norm(args, client):
    try:
        T = load_map(args.map)
    except (MapFileError, OSError) as e:
        return _fail(str(e), 2)
    map_payload = map_to_dict(T)

    if args.check_witness:
        try:
            with open(args.check_witness, encoding="utf-8") as f:
                report = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            return _fail(str(e), 2)
        ok = True
        for label in ("op_witness", "cb_witness"):
            w = report.get(label)
            if w is None:
                continue
            status, body = client.post(
                "/api/check-witness", {"map": map_payload, "witness": w}
            )
            if status != 200:
                return _error_exit(status, body)
            state = "ok" if body["consistent"] else "MISMATCH"
            print(
                f"{label}: claimed {body['claimed']:.12g}, "
                f"re-evaluated {body['value']:.12g} ({state})"
            )
            ok = ok and body["consistent"]
        return 0 if ok else 1

    payload = {"map": map_payload, "options": _options_payload(args)}
    if args.certified_op is not None:
        payload["certified_op"] = args.certified_op
    status, body = client.post("/api/norm", payload)
    if status != 200:
        return _error_exit(status, body)
    _write_out(_dump(body), args.out)
    return 0


# ----------------------------------------------------------------- bounds


def cmd_bounds(args, client):
    if args.table:
        m_max, n_max = args.table
        status, body = client.post("/api/bounds/table", {"m_max": m_max, "n_max": n_max})
        if status != 200:
            return _error_exit(status, body)
        text = body["csv"] if args.format == "csv" else _dump(body["rows"])
        _write_out(text, args.out)
        return 0
    if args.m is None or args.n is None:
        return _fail("either --table M N or both --m and --n are required", 2)
    n = args.n if args.n == "inf" else None
    if n is None:
        try:
            n = int(args.n)
        except ValueError:
            return _fail("--n must be a positive integer or 'inf'", 2)
    status, body = client.post("/api/bounds", {"m": args.m, "n": n})
    if status != 200:
        return _error_exit(status, body)
    text = table_to_csv([CBounds.from_dict(body)]) if args.format == "csv" else _dump(body)
    _write_out(text, args.out)
    return 0


# ----------------------------------------------------------------- search


def cmd_search(args, client):
    skip = []
    if args.resume:
        try:
            for rec in read_jsonl(args.resume):
                if rec.class_tag == args.class_tag and rec.m == args.m and rec.n == args.n:
                    skip.append(rec.shard)
        except FileNotFoundError:
            pass
        except (ValueError, KeyError) as e:
            return _fail(f"unreadable resume file: {e}", 2)
    payload = {
        "class_tag": args.class_tag,
        "m": args.m,
        "n": args.n,
        "iters": args.iters,
        "restarts": args.restarts,
        "seed": args.seed,
        "cap": args.cap,
        "skip_shards": skip,
        "options": _options_payload(args),
    }
    status, body = client.post("/api/search", payload)
    if status != 200:
        return _error_exit(status, body)
    records = body["records"]
    out_path = args.out or args.resume
    if out_path:
        with open(out_path, "a", encoding="utf-8") as f:
            for rec in records:
                f.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        for rec in records:
            print(json.dumps(rec, sort_keys=True))
    best = body["best"]
    if best is None and args.resume and skip:
        # all shards already done; recover the best from the log
        done = [r for r in read_jsonl(args.resume)
                if r.class_tag == args.class_tag and r.m == args.m and r.n == args.n]
        if done:
            best = max(done, key=lambda r: r.ratio_lower).to_dict()
    if best is None:
        print("no records produced")
        return 0
    print(f"best ratio {best['ratio_lower']:.6f}")
    return 0


# ----------------------------------------------------------------- tensor


def cmd_tensor(args, client):
    if len(args.map) != 2:
        return _fail("tensor needs exactly two --map files", 2)
    try:
        a = load_map(args.map[0])
        b = load_map(args.map[1])
    except (MapFileError, OSError) as e:
        return _fail(str(e), 2)
    status, body = client.post(
        "/api/tensor", {"map_a": map_to_dict(a), "map_b": map_to_dict(b)}
    )
    if status != 200:
        return _error_exit(status, body)
    T = map_from_dict(body["map"])
    save_map(T, args.out)
    print(f"wrote {T.m}x{T.n} map to {args.out}")
    return 0


# ------------------------------------------------------------------ serve


def cmd_serve(args):
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ------------------------------------------------------------------- main


def _add_engine_flags(p):
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iter", type=int, default=500, dest="max_iter")
    p.add_argument("--tol-engine", type=float, default=1e-12, dest="tol_engine",
                   help="relative convergence tolerance of the ascent engine")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    p = argparse.ArgumentParser(
        prog="cbnorm",
        description="Operator, Hilbert-Schmidt and cb norms of right D_n-module maps.",
    )
    p.add_argument("--url", help="base URL of a running service (default: in-process)")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run named verification cases")
    v.add_argument("--case", default="all",
                   help="all, 2x3, 2x4, msq:<m>, trunc:<m>:<n>, p34, twocol, bounds-sweep")
    v.add_argument("--seeds", type=int, default=100, help="random maps for the twocol case")
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--map", help="also run consistency checks on this map file")
    _add_engine_flags(v)

    n = sub.add_parser("norm", help="full norm report for a map file")
    n.add_argument("--map", required=True)
    n.add_argument("--certified-op", type=float, dest="certified_op")
    n.add_argument("--check-witness", metavar="REPORT", dest="check_witness",
                   help="re-evaluate the witnesses stored in REPORT against the map")
    n.add_argument("-o", "--out")
    _add_engine_flags(n)

    b = sub.add_parser("bounds", help="closed-form C(m,n) bounds")
    b.add_argument("--m", type=int)
    b.add_argument("--n", help="positive integer or 'inf'")
    b.add_argument("--table", nargs=2, type=int, metavar=("M", "N"))
    b.add_argument("--format", choices=("csv", "json"), default="json")
    b.add_argument("-o", "--out")

    s = sub.add_parser("search", help="search a structured class for large cb/op ratios")
    s.add_argument("--class", dest="class_tag", choices=("perm", "unitary"), required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--iters", type=int, default=2000)
    s.add_argument("--cap", type=int, default=10**6)
    s.add_argument("--resume", metavar="JSONL",
                   help="skip shards recorded in JSONL and append new records to it")
    s.add_argument("-o", "--out", metavar="JSONL", help="append records to this file")
    _add_engine_flags(s)
    s.set_defaults(restarts=8)

    t = sub.add_parser("tensor", help="tensor two maps into a new map file")
    t.add_argument("--map", action="append", required=True,
                   help="give twice: the two factor map files")
    t.add_argument("-o", "--out", required=True)

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    client = Client(args.url)
    handlers = {
        "verify": cmd_verify,
        "norm": cmd_norm,
        "bounds": cmd_bounds,
        "search": cmd_search,
        "tensor": cmd_tensor,
    }
    try:
        return handlers[args.command](args, client)
    except httpx.HTTPError as e:
        return _fail(f"cannot reach service: {e}", 2)


if __name__ == "__main__":
    sys.exit(main())
