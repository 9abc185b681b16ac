"""Command line front end: pgtower {build,verify,cohomology,tower}."""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import spec as S
from .build import build_group
from .cohomology import DEFAULT_WORK_CAP, MAX_DEGREE, cohomology_dims
from .errors import ConfigError, MalformedSpec, PGroupError
from .group import DEFAULT_ORDER_CAP
from .report import SCHEMA_VERSION, RunConfig, group_summary, run, tower_audit_json
from .tower import build_tower


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise _UsageError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{path} is not valid JSON: {exc}")


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_build(args) -> int:
    sp = S.from_json(_load(args.spec))
    G = build_group(sp, args.order_cap)
    _emit({"schema_version": SCHEMA_VERSION, "label": S.describe(sp), **group_summary(G)}, args.out)
    return 0


def _cmd_verify(args) -> int:
    cfg = RunConfig.from_json(_load(args.config))
    report = run(cfg)
    _emit(report.to_json(), args.report)
    return 1 if report.failed else 0


def _cmd_cohomology(args) -> int:
    if not 0 <= args.max_degree <= MAX_DEGREE:
        raise _UsageError(f"--max-degree must be in 0..{MAX_DEGREE}")
    G = build_group(S.from_json(_load(args.spec)), args.order_cap)
    res = cohomology_dims(G, args.prime, args.max_degree, args.work_cap)
    out = {"schema_version": SCHEMA_VERSION, **res.to_json(), "frattini_d": res.frattini_d}
    _emit(out, args.out)
    bad = (res.frattini_d is not None and res.h1_matches_d is False) or not res.duality_holds
    return 1 if bad else 0


def _cmd_tower(args) -> int:
    obj = _load(args.config)
    if not isinstance(obj, dict):
        raise ConfigError("tower config must be a JSON object")
    seed = obj.get("seed")
    tower = build_tower(S.from_json(seed) if seed is not None else None, obj.get("kind", "wreath_central"),
                        int(obj.get("p", 2)), int(obj.get("stages", 1)),
                        int(obj.get("order_cap", args.order_cap)), sample_seed=int(obj.get("sample_seed", 0)))
    out = tower_audit_json(tower)
    _emit(out, args.report)
    failed = any(s[k] is False for s in out["stages"] for k in ("monolithic", "link_surjective", "iso_to_wreath"))
    return 1 if failed else 0


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pgtower", description="Finite p-group towers and their F_p cohomology.")
    ap.add_argument("--version", action="version", version=f"pgtower {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="build a group from a spec and summarise it")
    b.add_argument("--spec", required=True)
    b.add_argument("--out")
    b.add_argument("--order-cap", type=int, default=DEFAULT_ORDER_CAP)
    b.set_defaults(func=_cmd_build)

    v = sub.add_parser("verify", help="run a batch of verification jobs")
    v.add_argument("--config", required=True)
    v.add_argument("--report")
    v.set_defaults(func=_cmd_verify)

    c = sub.add_parser("cohomology", help="dim H^q(G, F_p) for q up to --max-degree")
    c.add_argument("--spec", required=True)
    c.add_argument("--prime", type=int, required=True)
    c.add_argument("--max-degree", type=int, default=2)
    c.add_argument("--out")
    c.add_argument("--order-cap", type=int, default=DEFAULT_ORDER_CAP)
    c.add_argument("--work-cap", type=int, default=DEFAULT_WORK_CAP)
    c.set_defaults(func=_cmd_cohomology)

    t = sub.add_parser("tower", help="build and audit a tower")
    t.add_argument("--config", required=True)
    t.add_argument("--report")
    t.add_argument("--order-cap", type=int, default=DEFAULT_ORDER_CAP)
    t.set_defaults(func=_cmd_tower)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (ConfigError, MalformedSpec) as exc:
        print(f"pgtower: {exc}", file=sys.stderr)
        return 2
    except PGroupError as exc:
        print(f"pgtower: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
